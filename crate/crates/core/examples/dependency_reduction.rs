//! Dependency constraints and minimality of block interleavings.

use porverif::compressed::Block;
use porverif::concrete::channel;
use porverif::frame::{Frame, Universe};
use porverif::reduction::{all_dep, phi_minimal, ChannelOrder};
use porverif::symbolic::SymBlock;
use porverif::term::{Ident, Term};

fn main() {
    let order = ChannelOrder::lexicographic();
    let sym = [
        SymBlock { chan: "c2".into(), inputs: vec![1], outputs: vec![0] },
        SymBlock { chan: "c1".into(), inputs: vec![2], outputs: vec![1] },
    ];
    for d in all_dep(&sym, &order) {
        println!("{d}");
    }

    let u = Universe::new(&[Ident::from("ok")]);
    let frame = Frame::from_terms(vec![Term::name("n2"), Term::name("n1")]);
    for second in [Term::constant("ok"), Term::Handle(0)] {
        let tr = [
            Block { chan: channel("c2"), inputs: vec![Term::constant("ok")], outputs: vec![0], proper: true },
            Block { chan: channel("c1"), inputs: vec![second.clone()], outputs: vec![1], proper: true },
        ];
        println!("c2 then c1 reading {second}: minimal = {}", phi_minimal(&tr, &frame, &order, &u, 2));
    }
}
