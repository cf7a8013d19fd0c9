//! Parsing a protocol file, printing it back and resolving its queries.

use porverif::parser::{parse, print_file};

const SRC: &str = "
consts ok.
names k.
frame F = [ w0 -> pk(k) ].
let R(c, n) = in(c, x); if x = ok then out(c, n).
query equiv compressed { R(c1, k) | R(c2, k) } F ~ { R(c1, k) | R(c2, ok) } F.
";

fn main() {
    let file = match parse(SRC) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    print!("{}", print_file(&file));
    for q in &file.queries {
        let (a, b) = file.resolve(q).unwrap();
        println!("left:  {a}\nright: {b}");
    }
}
