//! Two frames that look alike until the attacker learns a nonce.

use porverif::frame::{static_equiv, Frame, StaticVerdict};
use porverif::term::Term;

fn main() {
    let n = Term::name;
    let base = [Term::pk(n("ska'")), Term::pk(n("ska")), Term::pk(n("skb"))];
    let mut left = base.to_vec();
    left.push(Term::aenc(Term::pair(n("na"), Term::pk(n("ska"))), Term::pk(n("skb"))));
    let mut right = base.to_vec();
    right.push(Term::aenc(Term::pair(n("na"), Term::pk(n("ska'"))), Term::pk(n("skb"))));

    let report = |l: &[Term], r: &[Term]| match static_equiv(&Frame::from_terms(l.to_vec()), &Frame::from_terms(r.to_vec())).unwrap() {
        StaticVerdict::Equivalent => println!("equivalent"),
        StaticVerdict::Witness { m, n: Some(n) } => println!("distinguished by {m} = {n}"),
        StaticVerdict::Witness { m, n: None } => println!("distinguished by validity of {m}"),
    };
    report(&left, &right);
    left.push(n("na"));
    right.push(n("na"));
    report(&left, &right);
}
