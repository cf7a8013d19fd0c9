//! Normal forms, validity and unification of message terms.

use porverif::term::{apply, is_valid, normalize, unify, Term};

fn main() {
    let ska = Term::name("ska");
    let cipher = Term::aenc(Term::pair(Term::name("na"), Term::pk(ska.clone())), Term::pk(ska.clone()));
    let opened = Term::snd(Term::adec(cipher.clone(), ska.clone()));
    println!("{opened}  ~>  {}", normalize(&opened));

    let wrong_key = Term::adec(cipher, Term::name("skb"));
    println!("{wrong_key} valid: {}", is_valid(&wrong_key));

    let x = Term::var("x");
    let pattern = Term::pair(x.clone(), Term::pk(Term::var("y")));
    let target = Term::pair(Term::constant("ok"), Term::pk(ska));
    if let Some(s) = unify(&pattern, &target) {
        println!("mgu instantiates {pattern} to {}", apply(&s, &pattern));
    }
}
