//! How the three modes scale on the toy family.

use porverif::checker::{check, Config, Mode};
use porverif::term::Ident;
use porverif::toy::{reference_count, toy_process};

fn main() {
    println!("{:>2} {:>10} {:>10} {:>10} {:>10}", "n", "expected", "reference", "compressed", "reduced");
    for n in 1..=4 {
        let p = toy_process(n);
        let counts: Vec<usize> = Mode::ALL
            .iter()
            .map(|m| {
                let mut cfg = Config::new(*m);
                cfg.depth = 2;
                cfg.constants = vec![Ident::from("ok")];
                check(&p, &p, &cfg).unwrap().stats.max_traces
            })
            .collect();
        println!("{n:>2} {:>10} {:>10} {:>10} {:>10}", reference_count(n), counts[0], counts[1], counts[2]);
    }
}
