//! Exploration of pairs of sets of symbolic processes, in the reference,
//! compressed and reduced variants.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::compressed::{replay_compressed, Block};
use crate::concrete::{replay, trace_text, Action, Side};
use crate::frame::{static_equiv_terms, Frame, StaticVerdict, Universe};
use crate::process::{is_initial, wrap_initial, Channel, ExtendedProcess, Proc, SimpleProcess};
use crate::reduction::{dep, ChannelOrder, DepConstraint};
use crate::solver::{member_frame, theta_key, Extension, Solver};
use crate::symbolic::{symb_step, tau_closures, Constraint, ConstraintSystem, SymAction, SymBlock, SymbolicProcess};
use crate::term::{Ident, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Reference,
    Compressed,
    Reduced,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Reference, Mode::Compressed, Mode::Reduced];
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reference" => Ok(Mode::Reference),
            "compressed" => Ok(Mode::Compressed),
            "reduced" => Ok(Mode::Reduced),
            _ => Err(format!("unknown mode '{s}' (expected reference, compressed or reduced)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Reference => "reference",
            Mode::Compressed => "compressed",
            Mode::Reduced => "reduced",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub mode: Mode,
    /// Maximal height of attacker recipes.
    pub depth: usize,
    pub order: ChannelOrder,
    pub assume_non_blocking: bool,
    /// Worker threads; 1 runs sequentially.
    pub jobs: usize,
    pub constants: Vec<Ident>,
    /// Record the symbolic trace of every explored pair.
    pub collect_traces: bool,
}

impl Config {
    pub fn new(mode: Mode) -> Config {
        Config {
            mode,
            depth: 3,
            order: ChannelOrder::lexicographic(),
            assume_non_blocking: false,
            jobs: 1,
            constants: Vec::new(),
            collect_traces: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("frames have different domains ({0} vs {1} entries)")]
    DomainMismatch(usize, usize),
    #[error("recipe depth must be at least 1")]
    BadDepth,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Focus {
    Free,
    In(Channel),
    Out(Channel),
}

#[derive(Clone, Debug)]
pub struct PairState {
    pub left: Vec<SymbolicProcess>,
    pub right: Vec<SymbolicProcess>,
    pub ext: Extension,
    pub trace: Vec<SymAction>,
    pub blocks: Vec<SymBlock>,
    pub deps: Vec<DepConstraint>,
    focus: Focus,
}

impl PairState {
    pub fn trace_text(&self) -> String {
        if self.trace.is_empty() {
            return "ε".to_string();
        }
        self.trace.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub pairs: usize,
    pub solver_branches: usize,
    pub max_traces: usize,
    pub pruned: usize,
    pub wall_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Concrete trace obtained by instantiating the symbolic one.
    pub trace: Vec<Action>,
    pub symbolic: Vec<SymAction>,
    pub theta: BTreeMap<u32, Term>,
    pub side: Side,
    /// Whether the trace ends inside an input phase (an improper block).
    pub improper_end: bool,
    pub frame: Vec<Term>,
    /// Frame of a counterpart that executes the trace but is told apart.
    pub other_frame: Option<Vec<Term>>,
    pub statics: Option<(Term, Option<Term>)>,
}

impl Witness {
    pub fn trace_text(&self) -> String {
        trace_text(&self.trace)
    }

    /// The trace cut into blocks.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out: Vec<Block> = Vec::new();
        for a in &self.trace {
            match a {
                Action::In(c, m) => {
                    let fresh = match out.last() {
                        Some(b) => b.chan != *c || !b.outputs.is_empty(),
                        None => true,
                    };
                    if fresh {
                        out.push(Block {
                            chan: c.clone(),
                            inputs: Vec::new(),
                            outputs: Vec::new(),
                            proper: false,
                        });
                    }
                    out.last_mut().unwrap().inputs.push(m.clone());
                }
                Action::Out(_, w) => {
                    let b = out.last_mut().expect("output after input");
                    b.outputs.push(*w);
                    b.proper = true;
                }
                Action::Tau => {}
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub mode: Mode,
    pub equivalent: bool,
    pub witness: Option<Witness>,
    pub stats: Stats,
    /// Inputs were not initial and have been wrapped.
    pub wrapped: bool,
    pub traces: Vec<String>,
}

#[derive(Serialize)]
struct WitnessRecord {
    trace: String,
    side: String,
    theta: BTreeMap<String, String>,
    frame: String,
    other_frame: Option<String>,
    statics: Option<(String, Option<String>)>,
}

#[derive(Serialize)]
struct VerdictRecord<'a> {
    mode: Mode,
    verdict: &'a str,
    witness: Option<WitnessRecord>,
    stats: Stats,
    wrapped: bool,
}

fn frame_text(f: &[Term]) -> String {
    Frame::from_terms(f.to_vec()).to_string()
}

impl Verdict {
    pub fn verdict_text(&self) -> &'static str {
        if self.equivalent {
            "EQUIVALENT"
        } else {
            "NOT EQUIVALENT"
        }
    }

    /// Machine-readable record (JSON).
    pub fn to_json(&self) -> String {
        let witness = self.witness.as_ref().map(|w| WitnessRecord {
            trace: w.trace_text(),
            side: w.side.to_string(),
            theta: w.theta.iter().map(|(k, r)| (format!("X{k}"), r.to_string())).collect(),
            frame: frame_text(&w.frame),
            other_frame: w.other_frame.as_ref().map(|f| frame_text(f)),
            statics: w.statics.as_ref().map(|(m, n)| (m.to_string(), n.as_ref().map(|n| n.to_string()))),
        });
        let rec = VerdictRecord {
            mode: self.mode,
            verdict: self.verdict_text(),
            witness,
            stats: self.stats,
            wrapped: self.wrapped,
        };
        serde_json::to_string(&rec).expect("serializable")
    }

    /// Human-readable report.
    pub fn report(&self) -> String {
        let mut s = format!("[{}] {}\n", self.mode, self.verdict_text());
        if let Some(w) = &self.witness {
            s.push_str(&format!("  witness trace: {}\n", w.trace_text()));
            s.push_str(&format!("  executable on: {}\n", w.side));
            let theta: Vec<String> = w.theta.iter().map(|(k, r)| format!("X{k} -> {r}")).collect();
            s.push_str(&format!("  solution: {{{}}}\n", theta.join(", ")));
            s.push_str(&format!("  frame: {}\n", frame_text(&w.frame)));
            match (&w.other_frame, &w.statics) {
                (Some(f), Some((m, n))) => {
                    s.push_str(&format!("  counterpart frame: {}\n", frame_text(f)));
                    match n {
                        Some(n) => s.push_str(&format!("  distinguishing test: {m} = {n}\n")),
                        None => s.push_str(&format!("  distinguishing test: valid({m})\n")),
                    }
                }
                _ => s.push_str("  no counterpart executes this trace\n"),
            }
        }
        s.push_str(&format!(
            "  pairs={} solver_branches={} max_traces={} pruned={} wall_ms={}\n",
            self.stats.pairs, self.stats.solver_branches, self.stats.max_traces, self.stats.pruned, self.stats.wall_ms
        ));
        s
    }
}

/// Prepares processes for a mode: compressed variants need initial inputs.
pub fn prepare(a: &ExtendedProcess, b: &ExtendedProcess, mode: Mode) -> (ExtendedProcess, ExtendedProcess, bool) {
    if mode == Mode::Reference || (is_initial(a) && is_initial(b)) {
        return (a.clone(), b.clone(), false);
    }
    (wrap_initial(a), wrap_initial(b), true)
}

struct NodeOut {
    children: Vec<PairState>,
    failures: Vec<Witness>,
    pairs: usize,
    branches: usize,
    pruned: usize,
    traces: Vec<String>,
}

pub struct Checker {
    cfg: Config,
    solver: Solver,
}

fn head<'a>(sp: &'a SymbolicProcess, c: &str) -> Option<&'a Proc> {
    sp.procs.get(c)
}

fn with_constraint(sp: &SymbolicProcess, c: Constraint) -> SymbolicProcess {
    let mut out = sp.clone();
    out.cs.constraints.push(c);
    out
}

fn failed(sp: &SymbolicProcess) -> SymbolicProcess {
    SymbolicProcess {
        procs: SimpleProcess::empty(),
        cs: sp.cs.clone(),
    }
}

impl Checker {
    pub fn new(cfg: Config) -> Checker {
        let mut constants = cfg.constants.clone();
        constants.sort();
        constants.dedup();
        let solver = Solver::new(Arc::new(Universe::new(&constants)));
        Checker { cfg, solver }
    }

    pub fn with_universe(cfg: Config, universe: Arc<Universe>) -> Checker {
        Checker {
            cfg,
            solver: Solver::new(universe),
        }
    }

    fn compressed(&self) -> bool {
        self.cfg.mode != Mode::Reference
    }

    /// The member as seen by a trace that stops here, if it can stop.
    fn ended(&self, sp: &SymbolicProcess, focus: &Focus) -> Option<SymbolicProcess> {
        let nb = self.cfg.assume_non_blocking;
        match focus {
            Focus::Free => Some(sp.clone()),
            Focus::In(c) => match head(sp, c) {
                None | Some(Proc::Null) => Some(failed(sp)),
                Some(Proc::Out(_, u, _)) if !nb => Some(failed(&with_constraint(sp, Constraint::Neq(u.clone(), u.clone())))),
                _ => None,
            },
            Focus::Out(c) => match head(sp, c) {
                Some(Proc::Out(_, u, _)) => {
                    if nb {
                        None
                    } else {
                        Some(with_constraint(sp, Constraint::Neq(u.clone(), u.clone())))
                    }
                }
                _ => Some(sp.clone()),
            },
        }
    }

    /// Available actions in canonical order: channels by the order, inputs
    /// before outputs.
    fn actions(&self, members: &[&SymbolicProcess], focus: &Focus) -> Vec<(Channel, bool)> {
        let mut chans: Vec<Channel> = Vec::new();
        for m in members {
            for c in m.procs.channels() {
                if !chans.contains(&c) {
                    chans.push(c);
                }
            }
        }
        self.cfg.order.sort(&mut chans);
        let mut out = Vec::new();
        for c in chans {
            let can_in = members.iter().any(|m| matches!(head(m, &c), Some(Proc::In(..))));
            let can_out = members.iter().any(|m| matches!(head(m, &c), Some(Proc::Out(..))));
            let (allow_in, allow_out) = if !self.compressed() {
                (true, true)
            } else {
                match focus {
                    Focus::Free => (true, false),
                    Focus::In(f) => (*f == c, *f == c),
                    Focus::Out(f) => (true, *f == c),
                }
            };
            if can_in && allow_in {
                out.push((c.clone(), true));
            }
            if can_out && allow_out {
                out.push((c, false));
            }
        }
        out
    }

    fn successor(&self, st: &PairState, ext: &Extension, left: &[&SymbolicProcess], right: &[&SymbolicProcess], c: &Channel, input: bool) -> PairState {
        let nb = self.cfg.assume_non_blocking;
        let frame_len = left.iter().chain(right.iter()).next().map(|m| m.cs.frame.len()).unwrap_or(0);
        let inputs = st.trace.iter().filter(|a| matches!(a, SymAction::In(..))).count() as u32;
        let act = if input {
            SymAction::In(c.clone(), inputs + 1)
        } else {
            SymAction::Out(c.clone(), frame_len as u32)
        };
        let fire = |ms: &[&SymbolicProcess]| -> Vec<SymbolicProcess> {
            let mut out = Vec::new();
            for m in ms {
                let mut base = (*m).clone();
                // Starting a new block ends the focused one properly.
                if let (true, true, Focus::Out(f)) = (self.compressed(), input, &st.focus) {
                    if let Some(Proc::Out(_, u, _)) = head(m, f) {
                        if nb {
                            continue;
                        }
                        base = with_constraint(m, Constraint::Neq(u.clone(), u.clone()));
                    }
                }
                for s in symb_step(&base, &act) {
                    out.extend(tau_closures(&s));
                }
            }
            out
        };
        let mut next = PairState {
            left: fire(left),
            right: fire(right),
            ext: ext.clone(),
            trace: st.trace.clone(),
            blocks: st.blocks.clone(),
            deps: st.deps.clone(),
            focus: st.focus.clone(),
        };
        next.trace.push(act.clone());
        match act {
            SymAction::In(_, k) => {
                next.ext.add_root(k, frame_len, self.cfg.depth);
                let continuing = matches!(&st.focus, Focus::In(f) if f == c);
                if continuing {
                    next.blocks.last_mut().unwrap().inputs.push(k);
                } else {
                    next.blocks.push(SymBlock {
                        chan: c.clone(),
                        inputs: vec![k],
                        outputs: Vec::new(),
                    });
                }
                next.focus = Focus::In(c.clone());
            }
            SymAction::Out(_, w) => {
                let last = next.blocks.len().saturating_sub(1);
                if self.cfg.mode == Mode::Reduced && matches!(&st.focus, Focus::In(_)) {
                    let ws = dep(&next.blocks[..last], c, &self.cfg.order);
                    if !ws.is_empty() {
                        next.deps.push(DepConstraint {
                            vars: next.blocks[last].inputs.clone(),
                            handles: ws,
                        });
                    }
                }
                if let Some(b) = next.blocks.last_mut() {
                    b.outputs.push(w);
                }
                next.focus = Focus::Out(c.clone());
            }
            SymAction::Tau => {}
        }
        next
    }

    fn process(&self, solver: &Solver, st: &PairState) -> NodeOut {
        let mut out = NodeOut {
            children: Vec::new(),
            failures: Vec::new(),
            pairs: 0,
            branches: 0,
            pruned: 0,
            traces: Vec::new(),
        };
        let (end_l, end_r): (Vec<Option<SymbolicProcess>>, Vec<Option<SymbolicProcess>>) = if self.compressed() {
            (
                st.left.iter().map(|m| self.ended(m, &st.focus)).collect(),
                st.right.iter().map(|m| self.ended(m, &st.focus)).collect(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        // Layout: continuing left, continuing right, ended left, ended right.
        let mut systems: Vec<&ConstraintSystem> = Vec::new();
        systems.extend(st.left.iter().map(|m| &m.cs));
        systems.extend(st.right.iter().map(|m| &m.cs));
        let mut end_idx_l = Vec::new();
        let mut end_idx_r = Vec::new();
        for (i, e) in end_l.iter().enumerate() {
            if let Some(e) = e {
                end_idx_l.push((systems.len(), i));
                systems.push(&e.cs);
            }
        }
        for (i, e) in end_r.iter().enumerate() {
            if let Some(e) = e {
                end_idx_r.push((systems.len(), i));
                systems.push(&e.cs);
            }
        }
        let nl = st.left.len();
        let nr = st.right.len();
        let branches = solver.simplify(&st.ext, &systems);
        out.branches = branches.len();
        for b in branches {
            if self.cfg.mode == Mode::Reduced && dependency_violated(&b.ext.partial_solution(), &st.deps) {
                out.pruned += 1;
                continue;
            }
            out.pairs += 1;
            if self.cfg.collect_traces {
                out.traces.push(st.trace_text());
            }
            let ended_frames = |idx: &[(usize, usize)], base: usize, count: usize| -> Vec<Vec<Term>> {
                if self.compressed() {
                    idx.iter()
                        .filter(|(j, _)| b.alive[*j])
                        .filter_map(|(j, _)| member_frame(&b.ext, systems[*j]))
                        .collect()
                } else {
                    (0..count)
                        .filter(|i| b.alive[base + i])
                        .filter_map(|i| member_frame(&b.ext, systems[base + i]))
                        .collect()
                }
            };
            let fl = ended_frames(&end_idx_l, 0, nl);
            let fr = ended_frames(&end_idx_r, nl, nr);
            if let Some(w) = self.compare(solver, st, &b.ext, &fl, &fr) {
                out.failures.push(w);
            }
            let left: Vec<&SymbolicProcess> = (0..nl).filter(|i| b.alive[*i]).map(|i| &st.left[i]).collect();
            let right: Vec<&SymbolicProcess> = (0..nr).filter(|i| b.alive[nl + i]).map(|i| &st.right[i]).collect();
            let all: Vec<&SymbolicProcess> = left.iter().chain(right.iter()).copied().collect();
            for (c, input) in self.actions(&all, &st.focus) {
                out.children.push(self.successor(st, &b.ext, &left, &right, &c, input));
            }
        }
        out
    }

    /// Symbolic equivalence of the stopping members of one solved branch.
    fn compare(&self, solver: &Solver, st: &PairState, ext: &Extension, fl: &[Vec<Term>], fr: &[Vec<Term>]) -> Option<Witness> {
        for (side, mine, theirs) in [(Side::Left, fl, fr), (Side::Right, fr, fl)] {
            for f in mine {
                let mut first_other: Option<(Vec<Term>, (Term, Option<Term>))> = None;
                let mut matched = false;
                for g in theirs {
                    let (a, b) = match side {
                        Side::Left => (f, g),
                        Side::Right => (g, f),
                    };
                    match static_equiv_terms(a, b) {
                        StaticVerdict::Equivalent => {
                            matched = true;
                            break;
                        }
                        StaticVerdict::Witness { m, n } => {
                            if first_other.is_none() {
                                first_other = Some((g.clone(), (m, n)));
                            }
                        }
                    }
                }
                if !matched {
                    let theta = solver.sample(ext).expect("solved form has a solution");
                    let trace = st
                        .trace
                        .iter()
                        .map(|a| match a {
                            SymAction::In(c, k) => Action::In(c.clone(), theta[k].clone()),
                            SymAction::Out(c, w) => Action::Out(c.clone(), *w),
                            SymAction::Tau => Action::Tau,
                        })
                        .collect();
                    let (other_frame, statics) = match first_other {
                        Some((g, s)) => (Some(g), Some(s)),
                        None => (None, None),
                    };
                    return Some(Witness {
                        trace,
                        symbolic: st.trace.clone(),
                        theta,
                        side,
                        improper_end: matches!(st.focus, Focus::In(_)),
                        frame: f.clone(),
                        other_frame,
                        statics,
                    });
                }
            }
        }
        None
    }

    /// Decides equivalence of `a` and `b` under the configured mode.
    pub fn check(&self, a: &ExtendedProcess, b: &ExtendedProcess) -> Result<Verdict, CheckError> {
        let start = Instant::now();
        if self.cfg.depth == 0 {
            return Err(CheckError::BadDepth);
        }
        if a.frame.len() != b.frame.len() {
            return Err(CheckError::DomainMismatch(a.frame.len(), b.frame.len()));
        }
        let (a, b, wrapped) = prepare(a, b, self.cfg.mode);
        let widened;
        let solver = if wrapped && !self.solver.universe.constants().iter().any(|c| &**c == "start") {
            let mut cs = self.solver.universe.constants().to_vec();
            cs.push(Ident::from("start"));
            cs.sort();
            widened = Solver::new(Arc::new(Universe::new(&cs)));
            &widened
        } else {
            &self.solver
        };
        let root_of = |x: &ExtendedProcess| {
            tau_closures(&SymbolicProcess {
                procs: x.procs.clone(),
                cs: ConstraintSystem::new(x.frame.terms().to_vec()),
            })
        };
        let mut level = vec![PairState {
            left: root_of(&a),
            right: root_of(&b),
            ext: Extension::new(),
            trace: Vec::new(),
            blocks: Vec::new(),
            deps: Vec::new(),
            focus: Focus::Free,
        }];
        let mut stats = Stats::default();
        let mut traces = Vec::new();
        let mut held: Vec<Witness> = Vec::new();
        loop {
            let results: Vec<NodeOut> = if self.cfg.jobs > 1 {
                level.par_iter().map(|s| self.process(solver, s)).collect()
            } else {
                level.iter().map(|s| self.process(solver, s)).collect()
            };
            let mut level_pairs = 0;
            let mut failures = Vec::new();
            let mut next = Vec::new();
            for r in results {
                stats.pairs += r.pairs;
                stats.solver_branches += r.branches;
                stats.pruned += r.pruned;
                level_pairs += r.pairs;
                failures.extend(r.failures);
                next.extend(r.children);
                traces.extend(r.traces);
            }
            if level_pairs > 0 {
                stats.max_traces = level_pairs;
            }
            let only_improper = failures.iter().all(|w| w.improper_end);
            if held.is_empty() && !failures.is_empty() && only_improper && !next.is_empty() {
                held = failures;
                level = next;
                continue;
            }
            failures.append(&mut held);
            if !failures.is_empty() {
                let w = failures
                    .into_iter()
                    .min_by_key(|w| (w.improper_end, w.side, theta_key(&w.theta), w.trace_text()))
                    .expect("non-empty");
                stats.wall_ms = start.elapsed().as_millis();
                return Ok(Verdict {
                    mode: self.cfg.mode,
                    equivalent: false,
                    witness: Some(w),
                    stats,
                    wrapped,
                    traces,
                });
            }
            if next.is_empty() {
                stats.wall_ms = start.elapsed().as_millis();
                traces.sort();
                traces.dedup();
                return Ok(Verdict {
                    mode: self.cfg.mode,
                    equivalent: true,
                    witness: None,
                    stats,
                    wrapped,
                    traces,
                });
            }
            level = next;
        }
    }
}

/// Reduced-mode pruning: every variable of some constraint is fixed by the
/// partial solution to a recipe avoiding all of its handles.
pub fn dependency_violated(ps: &BTreeMap<u32, Term>, deps: &[DepConstraint]) -> bool {
    deps.iter().any(|d| {
        d.vars.iter().all(|x| match ps.get(x) {
            Some(r) => r.handles().iter().all(|h| !d.handles.contains(h)),
            None => false,
        })
    })
}

/// Convenience wrapper building a checker for one call.
pub fn check(a: &ExtendedProcess, b: &ExtendedProcess, cfg: &Config) -> Result<Verdict, CheckError> {
    Checker::new(cfg.clone()).check(a, b)
}

/// Re-validates a witness by concrete replay: the trace runs on the claimed
/// side, and the other side either cannot run it or ends in a frame that is
/// not statically equivalent.
pub fn validate_witness(a: &ExtendedProcess, b: &ExtendedProcess, w: &Witness, mode: Mode) -> bool {
    let (a, b, _) = prepare(a, b, mode);
    let (mine, other) = match w.side {
        Side::Left => (&a, &b),
        Side::Right => (&b, &a),
    };
    let run = |x: &ExtendedProcess| -> Option<Vec<Term>> {
        match mode {
            Mode::Reference => replay(x, &w.trace).map(|s| s.frame.terms().to_vec()),
            _ => {
                let blocks = w.blocks();
                if blocks.iter().any(|b| b.proper && b.outputs.is_empty()) {
                    return None;
                }
                replay_compressed(x, &blocks).map(|s| s.frame.terms().to_vec())
            }
        }
    };
    let Some(f) = run(mine) else { return false };
    match run(other) {
        None => true,
        Some(g) => {
            let (l, r) = match w.side {
                Side::Left => (f, g),
                Side::Right => (g, f),
            };
            !static_equiv_terms(&l, &r).is_equivalent()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy::toy_process;

    fn toy_counts(n: usize, mode: Mode) -> (bool, usize) {
        let p = toy_process(n);
        let mut cfg = Config::new(mode);
        cfg.constants = vec![Arc::from("ok")];
        cfg.depth = 2;
        let v = check(&p, &p, &cfg).unwrap();
        (v.equivalent, v.stats.max_traces)
    }

    #[test]
    fn toy_two_roles() {
        assert_eq!(toy_counts(2, Mode::Reference), (true, 6));
        assert_eq!(toy_counts(2, Mode::Compressed), (true, 2));
        assert_eq!(toy_counts(2, Mode::Reduced), (true, 1));
    }

    #[test]
    fn mode_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert!("fast".parse::<Mode>().is_err());
    }

    #[test]
    fn dependency_pruning_condition() {
        let ps: BTreeMap<u32, Term> = [(1, Term::constant("ok"))].into_iter().collect();
        let d = DepConstraint { vars: vec![1], handles: vec![2] };
        assert!(dependency_violated(&ps, &[d.clone()]));
        let ps2: BTreeMap<u32, Term> = [(1, Term::Handle(2))].into_iter().collect();
        assert!(!dependency_violated(&ps2, &[d.clone()]));
        assert!(!dependency_violated(&BTreeMap::new(), &[d]));
    }

    #[test]
    fn empty_processes_are_equivalent() {
        let e = ExtendedProcess::new(SimpleProcess::empty(), Frame::new());
        for m in Mode::ALL {
            let v = check(&e, &e, &Config::new(m)).unwrap();
            assert!(v.equivalent);
            assert_eq!(v.stats.pairs, 1);
        }
    }
}
