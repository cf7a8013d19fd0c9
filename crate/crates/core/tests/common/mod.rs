//! Random generators shared by the integration tests.
//!
//! Every generator draws from a `ChaCha8Rng` seeded from `PORVERIF_SEED`
//! (default 2024) mixed with a per-suite salt.

#![allow(dead_code)]

use std::sync::Arc;

use std::collections::BTreeMap;

use porverif::compressed::Block;
use porverif::concrete::{channel, Action};
use porverif::frame::{Frame, Universe};
use porverif::process::{ExtendedProcess, Proc, SimpleProcess};
use porverif::symbolic::{symb_compressed_step, ConstraintSystem, SymBlock, SymbolicProcess};
use porverif::term::{apply, normalize, AnyVar, Ident, Subst, Term, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 2024;

pub fn seed() -> u64 {
    std::env::var("PORVERIF_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed() ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn constants() -> Vec<Ident> {
    vec![Ident::from("ok")]
}

pub fn universe() -> Arc<Universe> {
    Arc::new(Universe::new(&constants()))
}

pub const NAMES: [&str; 2] = ["n1", "n2"];

fn name(rng: &mut ChaCha8Rng) -> Term {
    Term::name(NAMES.choose(rng).unwrap())
}

/// A message term of height at most `h` over the names, `ok` and `vars`.
pub fn term(rng: &mut ChaCha8Rng, vars: &[Term], h: usize) -> Term {
    let leaf = |rng: &mut ChaCha8Rng| -> Term {
        match rng.gen_range(0..4) {
            0 | 1 if !vars.is_empty() => vars.choose(rng).unwrap().clone(),
            0 | 2 => name(rng),
            _ => Term::constant("ok"),
        }
    };
    if h <= 1 || rng.gen_bool(0.45) {
        return leaf(rng);
    }
    let sub = |rng: &mut ChaCha8Rng| term(rng, vars, h - 1);
    match rng.gen_range(0..9) {
        0 => Term::pair(sub(rng), sub(rng)),
        1 => Term::aenc(sub(rng), Term::pk(name(rng))),
        2 => Term::pk(name(rng)),
        3 => Term::enc(sub(rng), sub(rng)),
        4 => Term::hash(sub(rng)),
        5 => Term::fst(sub(rng)),
        6 => Term::snd(sub(rng)),
        7 => Term::adec(sub(rng), name(rng)),
        _ => Term::dec(sub(rng), sub(rng)),
    }
}

/// Basic process on channel `c` with at most `actions` actions, starting
/// with an input so that the result is initial.
pub fn basic(rng: &mut ChaCha8Rng, c: &str, actions: usize) -> Proc {
    fn tail(rng: &mut ChaCha8Rng, c: &str, left: usize, vars: &mut Vec<Term>, fresh: &mut usize, start: bool) -> Proc {
        if left == 0 || (!start && rng.gen_bool(0.25)) {
            return Proc::Null;
        }
        if !start && !vars.is_empty() && rng.gen_bool(0.3) {
            let u = term(rng, vars, 2);
            let v = term(rng, vars, 2);
            let then = tail(rng, c, left, vars, fresh, true);
            let other = if rng.gen_bool(0.5) {
                Proc::Null
            } else {
                tail(rng, c, left, vars, fresh, true)
            };
            return Proc::cond(u, v, then, other);
        }
        if start && vars.is_empty() || rng.gen_bool(0.4) {
            *fresh += 1;
            let x = format!("{c}x{fresh}");
            vars.push(Term::var(&x));
            let k = tail(rng, c, left - 1, vars, fresh, false);
            vars.pop();
            return Proc::input(c, &x, k);
        }
        let u = term(rng, vars, 2);
        Proc::output(c, u, tail(rng, c, left - 1, vars, fresh, false))
    }
    let mut vars = Vec::new();
    let mut fresh = 0;
    tail(rng, c, actions, &mut vars, &mut fresh, true)
}

/// Ground frame entries of height at most 2.
pub fn frame(rng: &mut ChaCha8Rng, len: usize) -> Frame {
    let mut out = Vec::new();
    while out.len() < len {
        let t = term(rng, &[], 2);
        if porverif::term::is_valid(&t) {
            out.push(porverif::term::normalize(&t));
        }
    }
    Frame::from_terms(out)
}

pub fn simple(members: Vec<Proc>, frame: Frame) -> ExtendedProcess {
    let members = members.into_iter().filter(|p| !p.is_null()).collect();
    ExtendedProcess::new(SimpleProcess::new(members).expect("distinct channels"), frame)
}

/// Rewrites one randomly chosen message of `p`.
pub fn mutate(rng: &mut ChaCha8Rng, p: &Proc) -> Proc {
    let mut sites = 0;
    count_sites(p, &mut sites);
    if sites == 0 {
        return p.clone();
    }
    let target = rng.gen_range(0..sites);
    let mut seen = 0;
    let mut vars = Vec::new();
    rewrite(rng, p, target, &mut seen, &mut vars)
}

fn count_sites(p: &Proc, n: &mut usize) {
    match p {
        Proc::Null => {}
        Proc::In(_, _, k) => count_sites(k, n),
        Proc::Out(_, _, k) => {
            *n += 1;
            count_sites(k, n)
        }
        Proc::If(_, _, a, b) => {
            *n += 2;
            count_sites(a, n);
            count_sites(b, n);
        }
    }
}

fn rewrite(rng: &mut ChaCha8Rng, p: &Proc, target: usize, seen: &mut usize, vars: &mut Vec<Term>) -> Proc {
    let mut pick = |rng: &mut ChaCha8Rng, t: &Term, vars: &Vec<Term>| {
        let hit = *seen == target;
        *seen += 1;
        if hit {
            term(rng, vars, 2)
        } else {
            t.clone()
        }
    };
    match p {
        Proc::Null => Proc::Null,
        Proc::In(c, x, k) => {
            vars.push(Term::Var(x.clone()));
            let k2 = rewrite(rng, k, target, seen, vars);
            vars.pop();
            Proc::In(c.clone(), x.clone(), Arc::new(k2))
        }
        Proc::Out(c, u, k) => {
            let u2 = pick(rng, u, vars);
            Proc::Out(c.clone(), u2, Arc::new(rewrite(rng, k, target, seen, vars)))
        }
        Proc::If(u, v, a, b) => {
            let u2 = pick(rng, u, vars);
            let v2 = pick(rng, v, vars);
            let a2 = rewrite(rng, a, target, seen, vars);
            let b2 = rewrite(rng, b, target, seen, vars);
            Proc::cond(u2, v2, a2, b2)
        }
    }
}

/// A pair of initial extended processes sharing channels and frame length.
/// Roughly a third are identical, the rest differ in one message or in the
/// frame.
pub fn initial_pair(rng: &mut ChaCha8Rng) -> (ExtendedProcess, ExtendedProcess) {
    let members = rng.gen_range(1..=3);
    let chans = ["c1", "c2", "c3"];
    let left: Vec<Proc> = (0..members)
        .map(|i| {
            let n = rng.gen_range(1..=2);
            basic(rng, chans[i], n)
        })
        .collect();
    let flen = rng.gen_range(0..=1);
    let lf = frame(rng, flen);
    let (right, rf) = match rng.gen_range(0..3) {
        0 => (left.clone(), lf.clone()),
        1 => {
            let i = rng.gen_range(0..members);
            let mut r = left.clone();
            r[i] = mutate(rng, &r[i]);
            (r, lf.clone())
        }
        _ => {
            let i = rng.gen_range(0..members);
            let mut r = left.clone();
            let n = rng.gen_range(1..=2);
            r[i] = basic(rng, chans[i], n);
            (r, frame(rng, flen))
        }
    };
    (simple(left, lf), simple(right, rf))
}

/// A random plausible trace over up to three channels, where each channel
/// starts with an input.
pub fn plausible_trace(rng: &mut ChaCha8Rng, frame_len: usize, len: usize) -> Vec<Action> {
    let chans = ["a", "b", "c"];
    let mut started = [false; 3];
    let mut handles: Vec<u32> = (0..frame_len as u32).collect();
    let mut next = frame_len as u32;
    let mut tr = Vec::new();
    for _ in 0..len {
        let i = rng.gen_range(0..3);
        let c = channel(chans[i]);
        if !started[i] || rng.gen_bool(0.5) {
            started[i] = true;
            let r = recipe(rng, &handles);
            tr.push(Action::In(c, r));
        } else {
            tr.push(Action::Out(c, next));
            handles.push(next);
            next += 1;
        }
    }
    tr
}

/// A recipe over `handles` and `ok` of height at most 2.
pub fn recipe(rng: &mut ChaCha8Rng, handles: &[u32]) -> Term {
    let leaf = |rng: &mut ChaCha8Rng| {
        if handles.is_empty() || rng.gen_bool(0.3) {
            Term::constant("ok")
        } else {
            Term::Handle(*handles.choose(rng).unwrap())
        }
    };
    match rng.gen_range(0..4) {
        0 => Term::pair(leaf(rng), leaf(rng)),
        1 => Term::hash(leaf(rng)),
        _ => leaf(rng),
    }
}

pub fn block(c: &str, inputs: Vec<Term>, outputs: Vec<u32>) -> Block {
    let proper = !outputs.is_empty();
    Block { chan: channel(c), inputs, outputs, proper }
}

/// Constructor-only message over names, `ok` and `vars`.
pub fn message(rng: &mut ChaCha8Rng, vars: &[Term], h: usize) -> Term {
    if h <= 1 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..3) {
            0 if !vars.is_empty() => vars.choose(rng).unwrap().clone(),
            1 => Term::constant("ok"),
            _ => Term::name(NAMES.choose(rng).unwrap()),
        };
    }
    let key = Term::pk(Term::name(NAMES.choose(rng).unwrap()));
    match rng.gen_range(0..3) {
        0 => Term::pair(message(rng, vars, h - 1), message(rng, vars, h - 1)),
        1 => Term::aenc(message(rng, vars, h - 1), key),
        _ => Term::hash(message(rng, vars, h - 1)),
    }
}

/// `blocks` rounds of one input and one output on `c`, each output possibly
/// guarded by a test.
pub fn block_member(rng: &mut ChaCha8Rng, c: &str, blocks: usize, vars: &mut Vec<Term>) -> Proc {
    if blocks == 0 {
        return Proc::Null;
    }
    let x = format!("{c}y{}", vars.len());
    vars.push(Term::var(&x));
    let cont = |rng: &mut ChaCha8Rng, vars: &mut Vec<Term>| {
        let t = message(rng, vars, 2);
        Proc::output(c, t, block_member(rng, c, blocks - 1, vars))
    };
    let body = if rng.gen_bool(0.4) {
        let u = term(rng, vars, 2);
        let v = term(rng, vars, 2);
        let a = cont(rng, vars);
        let b = cont(rng, vars);
        Proc::cond(u, v, a, b)
    } else {
        cont(rng, vars)
    };
    vars.pop();
    Proc::input(c, &x, body)
}

pub struct SymTrace {
    pub blocks: Vec<SymBlock>,
    pub procs: SimpleProcess,
    pub cs: ConstraintSystem,
}

pub fn symbolic_traces(sp: &SymbolicProcess, blocks: &mut Vec<SymBlock>, left: usize, out: &mut Vec<SymTrace>) {
    if left == 0 {
        return;
    }
    for c in sp.procs.channels() {
        if !matches!(sp.procs.get(&c), Some(Proc::In(..))) {
            continue;
        }
        let blk = SymBlock {
            chan: c.clone(),
            inputs: vec![blocks.len() as u32 + 1],
            outputs: vec![sp.cs.frame.len() as u32],
        };
        for next in symb_compressed_step(sp, &blk) {
            blocks.push(blk.clone());
            out.push(SymTrace {
                blocks: blocks.clone(),
                procs: next.procs.clone(),
                cs: next.cs.clone(),
            });
            symbolic_traces(&next, blocks, left - 1, out);
            blocks.pop();
        }
    }
}

pub fn ground_frame(cs: &ConstraintSystem, lambda: &BTreeMap<Var, Term>) -> Vec<Term> {
    let mut s = Subst::new();
    for (v, t) in lambda {
        s.insert(AnyVar::First(v.clone()), t.clone());
    }
    cs.frame.iter().map(|t| normalize(&apply(&s, t))).collect()
}

/// Members of the class of `blocks` generated by swapping adjacent
/// independent blocks and replacing a recipe by another one of height at
/// most `depth` computing the same message from handles already available.
/// Handles keep their original labels.
pub fn phi_class(blocks: &[Block], frame: &[Term], initial: usize, u: &Universe, depth: usize) -> Vec<Vec<Block>> {
    use std::collections::{BTreeSet, HashSet, VecDeque};
    let f = Frame::from_terms(frame.to_vec());
    let alternatives: Vec<Vec<Vec<Term>>> = blocks
        .iter()
        .map(|b| {
            b.inputs
                .iter()
                .map(|m| {
                    let target = porverif::frame::evaluate(&f, m).unwrap();
                    let mut alts: Vec<Term> = u
                        .valid(frame, depth)
                        .iter()
                        .filter(|r| r.values[0] == target)
                        .map(|r| r.recipe.clone())
                        .collect();
                    if !alts.contains(m) {
                        alts.push(m.clone());
                    }
                    alts
                })
                .collect()
        })
        .collect();
    let available = |ord: &[usize], pos: usize| -> BTreeSet<u32> {
        let mut hs: BTreeSet<u32> = (0..initial as u32).collect();
        for &j in &ord[..pos] {
            hs.extend(blocks[j].outputs.iter().copied());
        }
        hs
    };
    type State = (Vec<usize>, Vec<Vec<Term>>);
    let start: State = ((0..blocks.len()).collect(), blocks.iter().map(|b| b.inputs.clone()).collect());
    let mut seen: HashSet<State> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    let mut out = Vec::new();
    while let Some((ord, recs)) = queue.pop_front() {
        out.push(
            ord.iter()
                .map(|&i| Block { inputs: recs[i].clone(), ..blocks[i].clone() })
                .collect(),
        );
        let mut next = Vec::new();
        for p in 0..ord.len().saturating_sub(1) {
            let (i, j) = (ord[p], ord[p + 1]);
            let uses = |a: usize, b: usize| blocks[a].outputs.iter().any(|w| recs[b].iter().any(|m| m.handles().contains(w)));
            if blocks[i].chan != blocks[j].chan && !uses(i, j) && !uses(j, i) {
                let mut o = ord.clone();
                o.swap(p, p + 1);
                next.push((o, recs.clone()));
            }
        }
        for (pos, &i) in ord.iter().enumerate() {
            let avail = available(&ord, pos);
            for (k, alts) in alternatives[i].iter().enumerate() {
                for r in alts {
                    if *r != recs[i][k] && r.handles().iter().all(|h| avail.contains(h)) {
                        let mut rs = recs.clone();
                        rs[i][k] = r.clone();
                        next.push((ord.clone(), rs));
                    }
                }
            }
        }
        for s in next {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    out
}

/// Members made of whole input/output blocks, so every symbolic trace has
/// proper blocks only.
pub fn block_process(rng: &mut ChaCha8Rng) -> SymbolicProcess {
    let n = rng.gen_range(1..=3);
    let members: Vec<Proc> = ["a", "b", "c"][..n]
        .iter()
        .map(|c| {
            let k = rng.gen_range(1..=2);
            block_member(rng, c, k, &mut Vec::new())
        })
        .collect();
    let flen = rng.gen_range(1..=2);
    let frame = frame(rng, flen);
    SymbolicProcess {
        procs: SimpleProcess::new(members).unwrap(),
        cs: ConstraintSystem::new(frame.terms().to_vec()),
    }
}
