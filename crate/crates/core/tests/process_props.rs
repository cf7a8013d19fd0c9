mod common;

use porverif::parser::{parse, print_file, ProtocolFile};
use porverif::process::{is_initial, wrap_initial, Proc};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Everything but source positions.
fn shape(f: &ProtocolFile) -> String {
    let defs: Vec<String> = f.defs.iter().map(|d| format!("{}{:?}={:?}", d.name, d.params, d.body)).collect();
    let queries: Vec<String> = f
        .queries
        .iter()
        .map(|q| {
            let refs = |rs: &[porverif::parser::ProcRef]| rs.iter().map(|r| format!("{}{:?}", r.name, r.args)).collect::<Vec<_>>();
            format!("{} {:?} {} {:?} {}", q.mode, refs(&q.left), q.left_frame, refs(&q.right), q.right_frame)
        })
        .collect();
    format!("{:?}|{:?}|{:?}|{defs:?}|{queries:?}", f.constants, f.names, f.frames)
}

fn source(rng: &mut ChaCha8Rng) -> String {
    let members = rng.gen_range(1..=3);
    let chans = ["c1", "c2", "c3"];
    let mut src = String::from("consts ok.\nnames n1, n2.\n");
    let len = rng.gen_range(0..=2);
    let entries: Vec<String> = common::frame(rng, len).entries().map(|(h, t)| format!("w{h} -> {t}")).collect();
    src += &format!("frame F = [{}].\n", entries.join("; "));
    let mut refs = Vec::new();
    for (i, c) in chans.iter().enumerate().take(members) {
        let n = rng.gen_range(1..=3);
        let p = common::basic(rng, c, n);
        if p.is_null() {
            continue;
        }
        src += &format!("let A{i} = {p}.\n");
        refs.push(format!("A{i}"));
    }
    if !refs.is_empty() {
        let mode = ["reference", "compressed", "reduced"][rng.gen_range(0..3)];
        src += &format!("query equiv {mode} {{ {} }} F ~ {{ {} }} F.\n", refs.join(" | "), refs.join(" | "));
    }
    src
}

/// A member that may start with an output or a test.
fn any_member(rng: &mut ChaCha8Rng, c: &str) -> Proc {
    let n = rng.gen_range(1..=2);
    let k = common::basic(rng, c, n);
    match rng.gen_range(0..3) {
        0 => k,
        1 => Proc::output(c, common::term(rng, &[], 2), k),
        _ => Proc::cond(common::term(rng, &[], 2), common::term(rng, &[], 2), k, Proc::Null),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let src = source(&mut rng);
        let f = parse(&src).unwrap();
        let printed = print_file(&f);
        let g = parse(&printed).unwrap();
        prop_assert_eq!(shape(&f), shape(&g));
        prop_assert_eq!(print_file(&g), printed);
    }

    #[test]
    fn wrap_initial_makes_initial_and_keeps_channels(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let members: Vec<Proc> = ["c1", "c2", "c3"][..rng.gen_range(1..=3)].iter().map(|c| any_member(&mut rng, c)).collect();
        let len = rng.gen_range(0..=2);
        let a = common::simple(members, common::frame(&mut rng, len));
        let w = wrap_initial(&a);
        prop_assert!(is_initial(&w));
        prop_assert_eq!(w.procs.channels(), a.procs.channels());
        prop_assert_eq!(&w.frame, &a.frame);
        if is_initial(&a) {
            prop_assert_eq!(w, a);
        }
    }
}
