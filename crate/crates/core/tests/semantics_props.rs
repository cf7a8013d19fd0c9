mod common;

use std::collections::{BTreeMap, BTreeSet};

use porverif::compressed::{compressed_explore, factor_trace, flatten, oracle_compressed_equiv, replay_blocks, replay_compressed, Block};
use porverif::concrete::{explore, obs, oracle_trace_equiv, permutation_class, replay, replay_labeled, Action};
use porverif::frame::{instantiate, Frame};
use porverif::process::{ExtendedProcess, Proc, SimpleProcess};
use porverif::symbolic::{
    check_solution, enumerate_solutions, lambda_of, symb_compressed_step, symb_step, tau_closures, well_formed,
    ConstraintSystem, SymAction, SymBlock, SymbolicProcess,
};
use porverif::term::{apply, eval, normalize, AnyVar, Subst, Term, Var};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn initial(seed: u64) -> ExtendedProcess {
    common::initial_pair(&mut common::rng(seed)).0
}

fn concrete_of(sp: &SymbolicProcess) -> ExtendedProcess {
    ExtendedProcess::new(sp.procs.clone(), Frame::from_terms(sp.cs.frame.clone()))
}

fn instance(blocks: &[SymBlock], theta: &BTreeMap<u32, Term>) -> Vec<Block> {
    blocks
        .iter()
        .map(|b| Block {
            chan: b.chan.clone(),
            inputs: b.inputs.iter().map(|k| theta[k].clone()).collect(),
            outputs: b.outputs.clone(),
            proper: true,
        })
        .collect()
}

fn plausible_from(tr: &[Action], frame_len: usize) -> bool {
    let mut known: BTreeSet<u32> = (0..frame_len as u32).collect();
    let mut next = frame_len as u32;
    for a in tr {
        match a {
            Action::In(_, m) if !m.handles().iter().all(|h| known.contains(h)) => return false,
            Action::Out(_, w) => {
                if *w != next {
                    return false;
                }
                known.insert(*w);
                next += 1;
            }
            _ => {}
        }
    }
    true
}

/// λ computed by repeated passes in reverse constraint order, resolving a
/// deduction once its frame prefix is ground.
fn lambda_any_order(c: &ConstraintSystem, theta: &BTreeMap<u32, Term>) -> Option<BTreeMap<Var, Term>> {
    let mut ds: Vec<(usize, u32, Var)> = c.deduces().map(|(d, k, x)| (d, k, x.clone())).collect();
    ds.reverse();
    let mut out: BTreeMap<Var, Term> = BTreeMap::new();
    while !ds.is_empty() {
        let mut s = Subst::new();
        for (v, t) in &out {
            s.insert(AnyVar::First(v.clone()), t.clone());
        }
        let before = ds.len();
        let mut rest = Vec::new();
        for (dom, k, x) in ds {
            let prefix: Vec<Term> = c.frame[..dom].iter().map(|t| normalize(&apply(&s, t))).collect();
            if prefix.iter().all(|t| t.is_ground()) {
                let v = eval(&instantiate(&prefix, theta.get(&k)?).ok()?)?;
                out.insert(x, v);
            } else {
                rest.push((dom, k, x));
            }
        }
        if rest.len() == before {
            return None;
        }
        ds = rest;
    }
    Some(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn explored_traces_are_plausible_with_growing_frames(seed in any::<u64>()) {
        let a = initial(seed);
        let u = common::universe();
        for (tr, f) in explore(&a, &u, 1) {
            prop_assert!(plausible_from(&tr, a.frame.len()));
            let outs = tr.iter().filter(|x| matches!(x, Action::Out(..))).count();
            prop_assert_eq!(f.len(), a.frame.len() + outs);
            prop_assert_eq!(f.prefix(a.frame.len()), a.frame.clone());
        }
    }

    #[test]
    fn permuted_traces_replay_to_the_same_state(seed in any::<u64>()) {
        let a = initial(seed);
        let u = common::universe();
        let mut rng = common::rng(seed ^ 1);
        let mut traces = explore(&a, &u, 1);
        traces.retain(|(tr, _)| tr.len() <= 5);
        traces.shuffle(&mut rng);
        for (tr, _) in traces.iter().take(10) {
            let want = replay_labeled(&a, tr);
            prop_assert!(want.is_some());
            for tr2 in permutation_class(tr) {
                prop_assert_eq!(replay_labeled(&a, &tr2), want.clone());
            }
        }
    }

    #[test]
    fn oracle_verdict_is_symmetric(seed in any::<u64>()) {
        let (a, b) = common::initial_pair(&mut common::rng(seed));
        let u = common::universe();
        prop_assert_eq!(
            oracle_trace_equiv(&a, &b, &u, 2).is_equivalent(),
            oracle_trace_equiv(&b, &a, &u, 2).is_equivalent()
        );
    }

    #[test]
    fn concrete_and_compressed_oracles_agree(seed in any::<u64>()) {
        let (a, b) = common::initial_pair(&mut common::rng(seed));
        let u = common::universe();
        prop_assert_eq!(
            oracle_trace_equiv(&a, &b, &u, 2).is_equivalent(),
            oracle_compressed_equiv(&a, &b, &u, 2).is_equivalent()
        );
    }

    #[test]
    fn proper_compressed_traces_replay_concretely(seed in any::<u64>()) {
        let a = initial(seed);
        let u = common::universe();
        for (bs, f) in compressed_explore(&a, &u, 1) {
            if bs.iter().all(|b| b.proper) {
                let c = replay_compressed(&a, &bs).unwrap();
                let d = replay_blocks(&a, &bs);
                prop_assert_eq!(&c.frame, &f);
                prop_assert_eq!(Some(c), d);
            }
        }
    }

    #[test]
    fn proper_concrete_traces_replay_compressed(seed in any::<u64>()) {
        let a = initial(seed);
        let u = common::universe();
        for (tr, _) in explore(&a, &u, 1) {
            let Ok((io, imp)) = factor_trace(&tr) else { continue };
            if !imp.is_empty() || flatten(&io) != obs(&tr) {
                continue;
            }
            prop_assert_eq!(replay_compressed(&a, &io), replay(&a, &tr));
        }
    }

    #[test]
    fn symbolic_instances_replay_compressed(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let sp = common::block_process(&mut rng);
        let a = concrete_of(&sp);
        let u = common::universe();
        let mut traces = Vec::new();
        common::symbolic_traces(&sp, &mut Vec::new(), 3, &mut traces);
        for t in &traces {
            prop_assert!(well_formed(&t.cs));
            for s in enumerate_solutions(&t.cs, &u, 1).iter().take(8) {
                let got = replay_compressed(&a, &instance(&t.blocks, &s.theta));
                prop_assert!(got.is_some());
                let got = got.unwrap();
                prop_assert_eq!(got.frame.terms().to_vec(), common::ground_frame(&t.cs, &s.lambda));
                let sub = s.lambda_subst();
                let members: Vec<Proc> = t.procs.members().iter().map(|p| p.subst(&sub)).collect();
                prop_assert_eq!(got.procs, SimpleProcess::new(members).unwrap());
                prop_assert_eq!(lambda_any_order(&t.cs, &s.theta), Some(s.lambda.clone()));
            }
        }
    }

    #[test]
    fn concrete_compressed_traces_have_symbolic_counterparts(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let sp = common::block_process(&mut rng);
        let a = concrete_of(&sp);
        let u = common::universe();
        for (bs, _) in compressed_explore(&a, &u, 1) {
            if bs.is_empty() || bs.len() > 3 || !bs.iter().all(|b| b.proper) {
                continue;
            }
            let mut next_k = 1;
            let mut theta = BTreeMap::new();
            let sym: Vec<SymBlock> = bs
                .iter()
                .map(|b| {
                    let inputs = b.inputs.iter().map(|m| {
                        theta.insert(next_k, m.clone());
                        next_k += 1;
                        next_k - 1
                    }).collect();
                    SymBlock { chan: b.chan.clone(), inputs, outputs: b.outputs.clone() }
                })
                .collect();
            let mut states = vec![sp.clone()];
            for b in &sym {
                states = states.iter().flat_map(|s| symb_compressed_step(s, b)).collect();
            }
            prop_assert!(states.iter().any(|s| check_solution(&s.cs, &theta).is_some()), "{:?}", bs);
        }
    }

    #[test]
    fn symbolic_steps_keep_systems_well_formed(seed in any::<u64>()) {
        let a = initial(seed);
        let mut rng = common::rng(seed ^ 2);
        let mut states = tau_closures(&SymbolicProcess {
            procs: a.procs.clone(),
            cs: ConstraintSystem::new(a.frame.terms().to_vec()),
        });
        let mut k = 0;
        for _ in 0..4 {
            let Some(s) = states.choose(&mut rng).cloned() else { break };
            let mut acts = Vec::new();
            for p in s.procs.members() {
                match p {
                    Proc::In(c, _, _) => acts.push(SymAction::In(c.clone(), k + 1)),
                    Proc::Out(c, _, _) => acts.push(SymAction::Out(c.clone(), s.cs.frame.len() as u32)),
                    _ => {}
                }
            }
            let Some(act) = acts.choose(&mut rng).cloned() else { break };
            if matches!(act, SymAction::In(..)) {
                k += 1;
            }
            states = symb_step(&s, &act).iter().flat_map(tau_closures).collect();
            for t in &states {
                prop_assert!(well_formed(&t.cs), "{}", t.cs);
                if let Some(l) = enumerate_solutions(&t.cs, &common::universe(), 1).first() {
                    prop_assert_eq!(lambda_of(&t.cs, &l.theta), Some(l.lambda.clone()));
                }
            }
        }
    }
}
