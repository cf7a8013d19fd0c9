//! Symbolic block steps and the solutions of the resulting constraints.

use porverif::frame::Universe;
use porverif::process::{Proc, SimpleProcess};
use porverif::symbolic::{enumerate_solutions, symb_compressed_step, ConstraintSystem, SymBlock, SymbolicProcess};
use porverif::term::{Ident, Term};

fn main() {
    let q = Proc::input(
        "c",
        "y",
        Proc::cond(
            Term::fst(Term::var("y")),
            Term::constant("ok"),
            Proc::output("c", Term::hash(Term::snd(Term::var("y"))), Proc::Null),
            Proc::output("c", Term::name("decoy"), Proc::Null),
        ),
    );
    let sp = SymbolicProcess {
        procs: SimpleProcess::new(vec![q]).unwrap(),
        cs: ConstraintSystem::new(vec![Term::name("k")]),
    };
    let blk = SymBlock { chan: "c".into(), inputs: vec![1], outputs: vec![1] };
    let u = Universe::new(&[Ident::from("ok")]);
    for next in symb_compressed_step(&sp, &blk) {
        println!("{}", next.cs);
        for s in enumerate_solutions(&next.cs, &u, 2).iter().take(3) {
            println!("    X1 = {}", s.theta[&1]);
        }
    }
}
