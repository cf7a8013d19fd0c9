//! Concrete labelled semantics with a bounded attacker, and the brute-force
//! trace-equivalence oracle built on it.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::frame::{evaluate, static_equiv, Frame, StaticVerdict, Universe};
use crate::process::{Channel, ExtendedProcess, Proc, SimpleProcess};
use crate::term::{eval, AnyVar, Subst, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    In(Channel, Term),
    Out(Channel, u32),
    Tau,
}

impl Action {
    pub fn channel(&self) -> Option<&Channel> {
        match self {
            Action::In(c, _) | Action::Out(c, _) => Some(c),
            Action::Tau => None,
        }
    }

    pub fn is_input(&self) -> bool {
        matches!(self, Action::In(..))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::In(c, m) => write!(f, "in({c},{m})"),
            Action::Out(c, w) => write!(f, "out({c},w{w})"),
            Action::Tau => write!(f, "tau"),
        }
    }
}

pub fn trace_text(tr: &[Action]) -> String {
    tr.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(".")
}

/// Observable part of a trace.
pub fn obs(tr: &[Action]) -> Vec<Action> {
    tr.iter().filter(|a| **a != Action::Tau).cloned().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Result of one conditional on ground terms: the then-branch runs iff both
/// sides are valid and equal modulo the theory.
pub fn branch_taken(u: &Term, v: &Term) -> bool {
    match (eval(u), eval(v)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

fn input_on(x: &crate::term::Var, value: Term, k: &Proc) -> Proc {
    k.subst(&Subst::single(AnyVar::First(x.clone()), value))
}

/// All successors of `a` by `act` (one rule application, no τ-closure).
pub fn step(a: &ExtendedProcess, act: &Action) -> Vec<ExtendedProcess> {
    match act {
        Action::Tau => {
            let mut out = Vec::new();
            for p in a.procs.members() {
                if let Proc::If(u, v, then, other) = p {
                    let next = if branch_taken(u, v) { then } else { other };
                    let c = p.channel().expect("channel");
                    out.push(ExtendedProcess::new(a.procs.replace(&c, (**next).clone()), a.frame.clone()));
                }
            }
            out
        }
        Action::In(c, m) => {
            let Some(Proc::In(_, x, k)) = a.procs.get(c) else {
                return Vec::new();
            };
            if m.handles().iter().any(|h| *h as usize >= a.frame.len()) || !m.is_recipe() {
                return Vec::new();
            }
            match evaluate(&a.frame, m) {
                Ok(Some(v)) => vec![ExtendedProcess::new(a.procs.replace(c, input_on(x, v, k)), a.frame.clone())],
                _ => Vec::new(),
            }
        }
        Action::Out(c, w) => {
            let Some(Proc::Out(_, u, k)) = a.procs.get(c) else {
                return Vec::new();
            };
            if *w as usize != a.frame.len() {
                return Vec::new();
            }
            match eval(u) {
                Some(v) => {
                    let mut frame = a.frame.clone();
                    frame.push(v);
                    vec![ExtendedProcess::new(a.procs.replace(c, (**k).clone()), frame)]
                }
                None => Vec::new(),
            }
        }
    }
}

/// Runs every pending conditional. Simple processes are determinate, so the
/// result is unique.
pub fn tau_close(a: &ExtendedProcess) -> ExtendedProcess {
    let mut cur = a.clone();
    loop {
        let next = step(&cur, &Action::Tau);
        match next.into_iter().next() {
            Some(n) => cur = n,
            None => return cur,
        }
    }
}

/// Replays an observable trace, closing under τ after every action.
pub fn replay(a: &ExtendedProcess, tr: &[Action]) -> Option<ExtendedProcess> {
    let mut cur = tau_close(a);
    for act in tr {
        if *act == Action::Tau {
            continue;
        }
        cur = tau_close(step(&cur, act).first()?);
    }
    Some(cur)
}

/// Replays a trace whose output handles are arbitrary distinct labels.
/// Returns the final processes and the frame keyed by label.
pub fn replay_labeled(a: &ExtendedProcess, tr: &[Action]) -> Option<(SimpleProcess, BTreeMap<u32, Term>)> {
    let mut labels: BTreeMap<u32, u32> = (0..a.frame.len() as u32).map(|i| (i, i)).collect();
    let mut cur = tau_close(a);
    for act in tr {
        let positional = match act {
            Action::Tau => continue,
            Action::In(c, m) => {
                let mut ok = true;
                let m2 = m.map_leaves(&|t| match t {
                    Term::Handle(h) => match labels.get(h) {
                        Some(p) => Some(Term::Handle(*p)),
                        None => Some(Term::Var2(u32::MAX)),
                    },
                    _ => None,
                });
                ok &= m2.is_ground();
                if !ok {
                    return None;
                }
                Action::In(c.clone(), m2)
            }
            Action::Out(c, w) => {
                if labels.contains_key(w) {
                    return None;
                }
                labels.insert(*w, cur.frame.len() as u32);
                Action::Out(c.clone(), cur.frame.len() as u32)
            }
        };
        cur = tau_close(step(&cur, &positional).first()?);
    }
    let frame = labels
        .iter()
        .map(|(l, p)| (*l, cur.frame.get(*p).expect("handle").clone()))
        .collect();
    Some((cur.procs, frame))
}

/// Actions available from a quiescent state, in channel order with inputs
/// drawn from `inputs` (already sorted by preference).
fn available(a: &ExtendedProcess, inputs: &[Term]) -> Vec<Action> {
    let mut out = Vec::new();
    for p in a.procs.members() {
        match p {
            Proc::In(c, _, _) => {
                for m in inputs {
                    out.push(Action::In(c.clone(), m.clone()));
                }
            }
            Proc::Out(c, u, _) => {
                if eval(u).is_some() {
                    out.push(Action::Out(c.clone(), a.frame.len() as u32));
                }
            }
            _ => {}
        }
    }
    out
}

/// All observable traces (maximal or not) with their frames, inputs ranging
/// over every valid recipe of height at most `depth`.
pub fn explore(a: &ExtendedProcess, universe: &Universe, depth: usize) -> Vec<(Vec<Action>, Frame)> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::new(), tau_close(a))];
    while let Some((tr, st)) = stack.pop() {
        let inputs: Vec<Term> = universe
            .valid(st.frame.terms(), depth)
            .iter()
            .map(|r| r.recipe.clone())
            .collect();
        let mut children = Vec::new();
        for act in available(&st, &inputs) {
            if let Some(next) = step(&st, &act).into_iter().next() {
                let mut tr2: Vec<Action> = tr.clone();
                tr2.push(act);
                children.push((tr2, tau_close(&next)));
            }
        }
        out.push((tr, st.frame.clone()));
        stack.extend(children.into_iter().rev());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteWitness {
    pub trace: Vec<Action>,
    /// Side on which the trace is executable without a matching counterpart.
    pub side: Side,
    /// Static-equivalence witness when both sides execute the trace.
    pub statics: Option<(Term, Option<Term>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConcreteVerdict {
    Equivalent,
    Witness(ConcreteWitness),
}

impl ConcreteVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, ConcreteVerdict::Equivalent)
    }
}

/// Ranking of witnesses: shortest trace, failures of the left side first,
/// then fewest distinct atoms in the input recipes, total size and text.
pub fn witness_rank(tr: &[Action], side: Side) -> (usize, Side, usize, usize, String) {
    let mut atoms: Vec<Term> = Vec::new();
    let mut size = 0;
    for a in tr {
        if let Action::In(_, m) = a {
            for t in m.atoms() {
                if !atoms.contains(&t) {
                    atoms.push(t);
                }
            }
            size += m.size();
        }
    }
    (tr.len(), side, atoms.len(), size, trace_text(tr))
}

type Ranked = ((usize, Side, usize, usize, String), ConcreteWitness);

struct Oracle<'a> {
    universe: &'a Universe,
    depth: usize,
    best: Option<Ranked>,
    /// State pairs whose whole subtree was explored without a failure.
    clean: HashSet<(ExtendedProcess, ExtendedProcess)>,
}

impl Oracle<'_> {
    fn consider(&mut self, w: ConcreteWitness) {
        let key = witness_rank(&w.trace, w.side);
        if self.best.as_ref().map(|(k, _)| key < *k).unwrap_or(true) {
            self.best = Some((key, w));
        }
    }

    fn bound(&self) -> Option<usize> {
        self.best.as_ref().map(|(k, _)| k.0)
    }

    /// Explores below `(x, y)`; true when the subtree holds no failure and
    /// was not cut by the length bound.
    fn visit(&mut self, tr: &mut Vec<Action>, x: ExtendedProcess, y: ExtendedProcess) -> bool {
        if self.bound().is_some_and(|b| tr.len() > b) {
            return false;
        }
        let key = (x, y);
        if self.clean.contains(&key) {
            return true;
        }
        let (x, y) = key;
        match static_equiv(&x.frame, &y.frame) {
            Ok(StaticVerdict::Equivalent) => {}
            Ok(StaticVerdict::Witness { m, n }) => {
                self.consider(ConcreteWitness {
                    trace: tr.clone(),
                    side: Side::Left,
                    statics: Some((m, n)),
                });
                return false;
            }
            Err(_) => {
                self.consider(ConcreteWitness {
                    trace: tr.clone(),
                    side: Side::Left,
                    statics: None,
                });
                return false;
            }
        }
        if self.bound().is_some_and(|b| tr.len() >= b) {
            return false;
        }
        let inputs: Vec<Term> = self
            .universe
            .representatives(x.frame.terms(), self.depth)
            .iter()
            .map(|(r, _)| r.clone())
            .collect();
        let mut chans: Vec<Channel> = x.procs.channels();
        for c in y.procs.channels() {
            if !chans.contains(&c) {
                chans.push(c);
            }
        }
        chans.sort();
        let mut clean = true;
        for c in chans {
            let mut acts: Vec<Action> = inputs.iter().map(|m| Action::In(c.clone(), m.clone())).collect();
            acts.push(Action::Out(c.clone(), x.frame.len() as u32));
            let mut reached: HashSet<(Option<ExtendedProcess>, Option<ExtendedProcess>)> = HashSet::new();
            for act in acts {
                let nx = step(&x, &act).into_iter().next().map(|s| tau_close(&s));
                let ny = step(&y, &act).into_iter().next().map(|s| tau_close(&s));
                if !reached.insert((nx.clone(), ny.clone())) {
                    continue;
                }
                tr.push(act);
                match (nx, ny) {
                    (Some(nx), Some(ny)) => clean &= self.visit(tr, nx, ny),
                    (Some(_), None) => {
                        self.consider(ConcreteWitness {
                            trace: tr.clone(),
                            side: Side::Left,
                            statics: None,
                        });
                        clean = false;
                    }
                    (None, Some(_)) => {
                        self.consider(ConcreteWitness {
                            trace: tr.clone(),
                            side: Side::Right,
                            statics: None,
                        });
                        clean = false;
                    }
                    (None, None) => {}
                }
                tr.pop();
            }
        }
        if clean {
            self.clean.insert((x, y));
        }
        clean
    }
}

/// Brute-force trace equivalence relative to recipes of height at most
/// `depth`. Inputs leading to the same pair of successor states are
/// explored once, and so is every pair of states whose subtree is clean.
pub fn oracle_trace_equiv(a: &ExtendedProcess, b: &ExtendedProcess, universe: &Universe, depth: usize) -> ConcreteVerdict {
    let mut o = Oracle {
        universe,
        depth,
        best: None,
        clean: HashSet::new(),
    };
    o.visit(&mut Vec::new(), tau_close(a), tau_close(b));
    match o.best {
        None => ConcreteVerdict::Equivalent,
        Some((_, w)) => ConcreteVerdict::Witness(w),
    }
}

/// Checks that `tr2` is a reordering of `tr` by swaps of independent
/// adjacent actions: same per-channel projections, and every output keeps
/// its position relative to inputs whose recipe mentions its handle.
pub fn permute_equiv(_a: &ExtendedProcess, tr: &[Action], tr2: &[Action]) -> bool {
    let tr = obs(tr);
    let tr2 = obs(tr2);
    if tr.len() != tr2.len() {
        return false;
    }
    let mut chans: Vec<&Channel> = tr.iter().chain(tr2.iter()).filter_map(Action::channel).collect();
    chans.sort();
    chans.dedup();
    for c in chans {
        let p1: Vec<&Action> = tr.iter().filter(|a| a.channel() == Some(c)).collect();
        let p2: Vec<&Action> = tr2.iter().filter(|a| a.channel() == Some(c)).collect();
        if p1 != p2 {
            return false;
        }
    }
    let pos = |t: &[Action], a: &Action| t.iter().position(|b| b == a);
    for o in tr.iter().filter(|a| matches!(a, Action::Out(..))) {
        let Action::Out(_, w) = o else { unreachable!() };
        for i in tr.iter().filter(|a| matches!(a, Action::In(_, m) if m.handles().contains(w))) {
            let before1 = pos(&tr, o) < pos(&tr, i);
            let before2 = pos(&tr2, o) < pos(&tr2, i);
            if before1 != before2 {
                return false;
            }
        }
    }
    true
}

/// All reorderings reachable by adjacent swaps of independent actions.
/// Exponential; used by tests as an oracle for [`permute_equiv`].
pub fn permutation_class(tr: &[Action]) -> Vec<Vec<Action>> {
    let independent = |x: &Action, y: &Action| -> bool {
        if x.channel() == y.channel() {
            return false;
        }
        let uses = |o: &Action, i: &Action| match (o, i) {
            (Action::Out(_, w), Action::In(_, m)) => m.handles().contains(w),
            _ => false,
        };
        !uses(x, y) && !uses(y, x)
    };
    let start = obs(tr);
    let mut seen = vec![start.clone()];
    let mut queue = vec![start];
    while let Some(t) = queue.pop() {
        for i in 0..t.len().saturating_sub(1) {
            if independent(&t[i], &t[i + 1]) {
                let mut u = t.clone();
                u.swap(i, i + 1);
                if !seen.contains(&u) {
                    seen.push(u.clone());
                    queue.push(u);
                }
            }
        }
    }
    seen
}

pub fn channel(c: &str) -> Channel {
    Arc::from(c)
}
