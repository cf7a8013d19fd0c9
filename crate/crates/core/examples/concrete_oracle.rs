//! Bounded concrete trace equivalence by explicit exploration.

use porverif::concrete::{explore, oracle_trace_equiv, trace_text, ConcreteVerdict};
use porverif::frame::{Frame, Universe};
use porverif::process::{ExtendedProcess, Proc, SimpleProcess};
use porverif::term::{Ident, Term};

fn responder(secret: &str) -> ExtendedProcess {
    let p = Proc::input(
        "c",
        "x",
        Proc::cond(Term::var("x"), Term::constant("ok"), Proc::output("c", Term::name(secret), Proc::Null), Proc::Null),
    );
    ExtendedProcess::new(SimpleProcess::new(vec![p]).unwrap(), Frame::from_terms(vec![Term::name("n")]))
}

fn main() {
    let u = Universe::new(&[Ident::from("ok")]);
    let a = responder("n");
    let b = responder("m");
    for (tr, f) in explore(&a, &u, 1) {
        println!("{:<24} {f}", trace_text(&tr));
    }
    match oracle_trace_equiv(&a, &b, &u, 2) {
        ConcreteVerdict::Equivalent => println!("equivalent"),
        ConcreteVerdict::Witness(w) => println!("not equivalent: {}", trace_text(&w.trace)),
    }
}
