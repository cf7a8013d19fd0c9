//! Simplifying a pair of constraint systems into solved branches.

use std::sync::Arc;

use porverif::frame::Universe;
use porverif::solver::{Extension, Solver};
use porverif::symbolic::{Constraint, ConstraintSystem};
use porverif::term::{Ident, Term, Var};

fn system(frame: Vec<Term>, expected: Term) -> ConstraintSystem {
    let mut cs = ConstraintSystem::new(frame);
    cs.constraints.push(Constraint::Deduce { dom: 1, x2: 1, x: Var::Of(1) });
    cs.constraints.push(Constraint::Eq(Term::Var(Var::Of(1)), expected));
    cs
}

fn main() {
    let solver = Solver::new(Arc::new(Universe::new(&[Ident::from("ok")])));
    let left = system(vec![Term::name("a")], Term::name("a"));
    let right = system(vec![Term::name("b")], Term::constant("ok"));
    let mut ext = Extension::new();
    ext.add_root(1, 1, 2);
    for b in solver.simplify(&ext, &[&left, &right]) {
        println!("alive {:?}  region {}  sample {:?}", b.alive, b.ext, solver.sample(&b.ext));
    }
}
