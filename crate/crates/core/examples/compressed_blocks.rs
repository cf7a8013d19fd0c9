//! Block-level traces and the factoring of an interleaved trace into blocks.

use porverif::compressed::{blocks_text, compressed_explore, factor_trace};
use porverif::concrete::{channel, trace_text, Action};
use porverif::frame::Universe;
use porverif::term::{Ident, Term};
use porverif::toy::toy_process;

fn main() {
    let u = Universe::new(&[Ident::from("ok")]);
    let p = toy_process(2);
    for (bs, _) in compressed_explore(&p, &u, 1) {
        if bs.len() == 2 {
            println!("{}", blocks_text(&bs));
        }
    }

    let tr = vec![
        Action::In(channel("c"), Term::constant("ok")),
        Action::In(channel("d"), Term::constant("ok")),
        Action::Out(channel("c"), 0),
    ];
    let (proper, improper) = factor_trace(&tr).unwrap();
    println!("{}  =  {} | {}", trace_text(&tr), blocks_text(&proper), blocks_text(&improper));
}
