//! Deciding the anonymity queries of the private authentication protocol.

use porverif::checker::{Checker, Config, Mode};
use porverif::parser::parse;

fn main() {
    let file = parse(include_str!("../protocols/private_auth.spv")).unwrap();
    for q in &file.queries {
        let (a, b) = file.resolve(q).unwrap();
        for mode in Mode::ALL {
            let mut cfg = Config::new(mode);
            cfg.constants = file.constants.clone();
            let v = Checker::new(cfg).check(&a, &b).unwrap();
            print!("{}", v.report());
        }
    }
}
