mod common;

use std::collections::BTreeSet;

use porverif::checker::{validate_witness, Checker, Config, Mode};
use proptest::prelude::*;

fn traces(mode: Mode, a: &porverif::process::ExtendedProcess, b: &porverif::process::ExtendedProcess) -> (bool, BTreeSet<String>) {
    let mut cfg = Config::new(mode);
    cfg.depth = 2;
    cfg.constants = common::constants();
    cfg.collect_traces = true;
    let v = Checker::with_universe(cfg, common::universe()).check(a, b).unwrap();
    if let Some(w) = &v.witness {
        assert!(validate_witness(a, b, w, mode), "{mode} witness {}", w.trace_text());
    }
    (v.equivalent, v.traces.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reductions_explore_nested_trace_sets(seed in any::<u64>()) {
        let (a, b) = common::initial_pair(&mut common::rng(seed));
        let (e1, reference) = traces(Mode::Reference, &a, &b);
        let (e2, compressed) = traces(Mode::Compressed, &a, &b);
        let (e3, reduced) = traces(Mode::Reduced, &a, &b);
        prop_assert_eq!(e1, e2);
        prop_assert_eq!(e2, e3);
        if e1 {
            prop_assert!(reduced.is_subset(&compressed), "{:?}", reduced.difference(&compressed).collect::<Vec<_>>());
            prop_assert!(compressed.is_subset(&reference), "{:?}", compressed.difference(&reference).collect::<Vec<_>>());
        }
    }
}
