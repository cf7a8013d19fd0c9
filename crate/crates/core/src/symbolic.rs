//! Constraint systems and the symbolic semantics, step-wise and block-wise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::frame::{instantiate, Universe};
use crate::process::{Channel, Proc, SimpleProcess};
use crate::term::{apply, eval, normalize, AnyVar, Subst, Term, Var};

/// `dom` is the length of the frame prefix available to the attacker.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Deduce { dom: usize, x2: u32, x: Var },
    Eq(Term, Term),
    Neq(Term, Term),
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Deduce { dom, x2, x } => write!(f, "X{x2} |-[{dom}] {x}"),
            Constraint::Eq(u, v) => write!(f, "{u} =? {v}"),
            Constraint::Neq(u, v) => write!(f, "{u} !=? {v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ConstraintSystem {
    pub frame: Vec<Term>,
    pub constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn new(frame: Vec<Term>) -> ConstraintSystem {
        ConstraintSystem {
            frame,
            constraints: Vec::new(),
        }
    }

    pub fn deduces(&self) -> impl Iterator<Item = (usize, u32, &Var)> {
        self.constraints.iter().filter_map(|c| match c {
            Constraint::Deduce { dom, x2, x } => Some((*dom, *x2, x)),
            _ => None,
        })
    }

    /// Domain of a second-order variable.
    pub fn domain(&self, x2: u32) -> Option<usize> {
        self.deduces().find(|d| d.1 == x2).map(|d| d.0)
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.frame.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "w{i} -> {t}")?;
        }
        write!(f, " | ")?;
        let cs: Vec<String> = self.constraints.iter().map(|c| c.to_string()).collect();
        write!(f, "{})", cs.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SymbolicProcess {
    pub procs: SimpleProcess,
    pub cs: ConstraintSystem,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymAction {
    In(Channel, u32),
    Out(Channel, u32),
    Tau,
}

impl fmt::Display for SymAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymAction::In(c, x) => write!(f, "in({c},X{x})"),
            SymAction::Out(c, w) => write!(f, "out({c},w{w})"),
            SymAction::Tau => write!(f, "tau"),
        }
    }
}

/// Symbolic block `io_c(X1..Xk; w1..wl)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymBlock {
    pub chan: Channel,
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
}

impl fmt::Display for SymBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(|x| format!("X{x}")).collect();
        let outs: Vec<String> = self.outputs.iter().map(|w| format!("w{w}")).collect();
        write!(f, "io_{}[{};{}]", self.chan, ins.join(","), outs.join(","))
    }
}

pub fn var_of(k: u32) -> Var {
    Var::Of(k)
}

fn bind_input(x: &Var, k: u32, cont: &Proc) -> Proc {
    cont.subst(&Subst::single(AnyVar::First(x.clone()), Term::Var(var_of(k))))
}

/// One symbolic transition: inputs add a deduction constraint, outputs
/// extend the frame, conditionals split into an equation and a disequation.
pub fn symb_step(sp: &SymbolicProcess, act: &SymAction) -> Vec<SymbolicProcess> {
    match act {
        SymAction::In(c, k) => match sp.procs.get(c) {
            Some(Proc::In(_, x, cont)) => {
                let mut cs = sp.cs.clone();
                cs.constraints.push(Constraint::Deduce {
                    dom: cs.frame.len(),
                    x2: *k,
                    x: var_of(*k),
                });
                vec![SymbolicProcess {
                    procs: sp.procs.replace(c, bind_input(x, *k, cont)),
                    cs,
                }]
            }
            _ => Vec::new(),
        },
        SymAction::Out(c, w) => match sp.procs.get(c) {
            Some(Proc::Out(_, u, cont)) if *w as usize == sp.cs.frame.len() => {
                let mut cs = sp.cs.clone();
                cs.frame.push(u.clone());
                vec![SymbolicProcess {
                    procs: sp.procs.replace(c, (**cont).clone()),
                    cs,
                }]
            }
            _ => Vec::new(),
        },
        SymAction::Tau => {
            let mut out = Vec::new();
            for p in sp.procs.members() {
                if let Proc::If(u, v, a, b) = p {
                    let c = p.channel().expect("channel");
                    for (branch, atom) in [(a, Constraint::Eq(u.clone(), v.clone())), (b, Constraint::Neq(u.clone(), v.clone()))] {
                        let mut cs = sp.cs.clone();
                        cs.constraints.push(atom);
                        out.push(SymbolicProcess {
                            procs: sp.procs.replace(&c, (**branch).clone()),
                            cs,
                        });
                    }
                }
            }
            out
        }
    }
}

/// Resolves conditionals at the head of one basic process, both ways.
pub fn settle_basic(p: &Proc, cs: &ConstraintSystem) -> Vec<(Proc, ConstraintSystem)> {
    match p {
        Proc::If(u, v, a, b) => {
            let mut then_cs = cs.clone();
            then_cs.constraints.push(Constraint::Eq(u.clone(), v.clone()));
            let mut else_cs = cs.clone();
            else_cs.constraints.push(Constraint::Neq(u.clone(), v.clone()));
            let mut out = settle_basic(a, &then_cs);
            out.extend(settle_basic(b, &else_cs));
            out
        }
        _ => vec![(p.clone(), cs.clone())],
    }
}

/// All full τ-closures of a symbolic process, members resolved in channel
/// order, then-branches first.
pub fn tau_closures(sp: &SymbolicProcess) -> Vec<SymbolicProcess> {
    let mut states = vec![sp.clone()];
    for c in sp.procs.channels() {
        let mut next = Vec::new();
        for st in states {
            let p = st.procs.get(&c).expect("member").clone();
            for (q, cs) in settle_basic(&p, &st.cs) {
                next.push(SymbolicProcess {
                    procs: st.procs.replace(&c, q),
                    cs,
                });
            }
        }
        states = next;
    }
    states
}

/// Result of running a symbolic block on one basic process: the residual
/// process (`None` for ⊥) with the updated system.
pub type FocusResult = (Option<Proc>, ConstraintSystem);

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    IPlus,
    IStar,
    OStar,
}

fn focus(p: &Proc, cs: &ConstraintSystem, ins: &[u32], outs: &[u32], stage: Stage, out: &mut Vec<FocusResult>) {
    for (p, cs) in settle_basic(p, cs) {
        if let Some((k, rest)) = ins.split_first() {
            if let Proc::In(_, x, cont) = &p {
                let mut cs2 = cs.clone();
                cs2.constraints.push(Constraint::Deduce {
                    dom: cs2.frame.len(),
                    x2: *k,
                    x: var_of(*k),
                });
                focus(&bind_input(x, *k, cont), &cs2, rest, outs, Stage::IStar, out);
            }
            continue;
        }
        if let Some((w, rest)) = outs.split_first() {
            if stage == Stage::IPlus {
                continue;
            }
            if let Proc::Out(_, u, cont) = &p {
                if *w as usize == cs.frame.len() {
                    let mut cs2 = cs.clone();
                    cs2.frame.push(u.clone());
                    focus(cont, &cs2, &[], rest, Stage::OStar, out);
                }
            }
            continue;
        }
        match (stage, &p) {
            (Stage::OStar, Proc::Null) | (Stage::OStar, Proc::In(..)) => out.push((Some(p.clone()), cs)),
            (Stage::OStar, Proc::Out(_, u, _)) => {
                let mut cs2 = cs.clone();
                cs2.constraints.push(Constraint::Neq(u.clone(), u.clone()));
                out.push((Some(p.clone()), cs2));
            }
            (Stage::IStar, Proc::Null) => out.push((None, cs)),
            (Stage::IStar, Proc::Out(_, u, _)) => {
                let mut cs2 = cs.clone();
                cs2.constraints.push(Constraint::Neq(u.clone(), u.clone()));
                out.push((None, cs2));
            }
            _ => {}
        }
    }
}

/// Block-level symbolic transition. Every derivation is returned, so the
/// result is a set rather than an option; ⊥ results have no processes left.
pub fn symb_compressed_step(sp: &SymbolicProcess, blk: &SymBlock) -> Vec<SymbolicProcess> {
    if blk.inputs.is_empty() && blk.outputs.is_empty() {
        return vec![sp.clone()];
    }
    let Some(p) = sp.procs.get(&blk.chan) else { return Vec::new() };
    let mut res = Vec::new();
    focus(p, &sp.cs, &blk.inputs, &blk.outputs, Stage::IPlus, &mut res);
    res.into_iter()
        .map(|(q, cs)| SymbolicProcess {
            procs: match q {
                Some(q) => sp.procs.replace(&blk.chan, q),
                None => SimpleProcess::empty(),
            },
            cs,
        })
        .collect()
}

/// Unique introduction of every variable and an acyclic dependency between
/// deduced messages and the frame entries they may use.
pub fn well_formed(c: &ConstraintSystem) -> bool {
    let mut intro: BTreeMap<Var, usize> = BTreeMap::new();
    let mut x2s = BTreeSet::new();
    for (dom, x2, x) in c.deduces() {
        if intro.insert(x.clone(), dom).is_some() || !x2s.insert(x2) || dom > c.frame.len() {
            return false;
        }
    }
    // x may only rely on frame entries whose variables were introduced at a
    // strictly smaller domain; this rules out cycles.
    for (dom, _, _) in c.deduces() {
        for t in &c.frame[..dom] {
            for v in t.vars() {
                match intro.get(&v) {
                    Some(d) if *d < dom => {}
                    _ => return false,
                }
            }
        }
    }
    let mut terms: Vec<&Term> = c.frame.iter().collect();
    for k in &c.constraints {
        if let Constraint::Eq(u, v) | Constraint::Neq(u, v) = k {
            terms.push(u);
            terms.push(v);
        }
    }
    terms.iter().all(|t| t.vars().iter().all(|v| intro.contains_key(v)))
}

/// A second-order assignment and the first-order substitution it induces.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Solution {
    pub theta: BTreeMap<u32, Term>,
    pub lambda: BTreeMap<Var, Term>,
}

impl Solution {
    pub fn lambda_subst(&self) -> Subst {
        let mut s = Subst::new();
        for (v, t) in &self.lambda {
            s.insert(AnyVar::First(v.clone()), t.clone());
        }
        s
    }
}

fn lam(s: &BTreeMap<Var, Term>, t: &Term) -> Term {
    let mut sub = Subst::new();
    for (v, u) in s {
        sub.insert(AnyVar::First(v.clone()), u.clone());
    }
    normalize(&apply(&sub, t))
}

/// First-order values induced by `theta`, deduction constraints processed
/// in order of their domains. `None` when some recipe does not evaluate to a
/// valid message or uses a handle outside its domain.
pub fn lambda_of(c: &ConstraintSystem, theta: &BTreeMap<u32, Term>) -> Option<BTreeMap<Var, Term>> {
    let mut ds: Vec<(usize, u32, &Var)> = c.deduces().collect();
    ds.sort_by_key(|d| d.0);
    let mut out = BTreeMap::new();
    for (dom, x2, x) in ds {
        let m = theta.get(&x2)?;
        if m.handles().iter().any(|h| *h as usize >= dom) || !m.is_recipe() || !m.vars2().is_empty() {
            return None;
        }
        let prefix: Vec<Term> = c.frame[..dom].iter().map(|t| lam(&out, t)).collect();
        let v = eval(&instantiate(&prefix, m).ok()?)?;
        if !v.is_ground() {
            return None;
        }
        out.insert(x.clone(), v);
    }
    Some(out)
}

fn valid_ground(t: &Term) -> Option<Term> {
    if t.is_ground() {
        eval(t)
    } else {
        None
    }
}

/// Checks every clause of the solution definition for `theta`.
pub fn check_solution(c: &ConstraintSystem, theta: &BTreeMap<u32, Term>) -> Option<Solution> {
    let lambda = lambda_of(c, theta)?;
    let sub = Solution {
        theta: theta.clone(),
        lambda,
    };
    let s = sub.lambda_subst();
    for t in &c.frame {
        valid_ground(&apply(&s, t))?;
    }
    for k in &c.constraints {
        match k {
            Constraint::Eq(u, v) => {
                let a = valid_ground(&apply(&s, u))?;
                let b = valid_ground(&apply(&s, v))?;
                if a != b {
                    return None;
                }
            }
            Constraint::Neq(u, v) => {
                if let (Some(a), Some(b)) = (valid_ground(&apply(&s, u)), valid_ground(&apply(&s, v))) {
                    if a == b {
                        return None;
                    }
                }
            }
            Constraint::Deduce { .. } => {}
        }
    }
    Some(sub)
}

/// Every solution whose recipes have height at most `depth`.
pub fn enumerate_solutions(c: &ConstraintSystem, universe: &Universe, depth: usize) -> Vec<Solution> {
    let mut ds: Vec<(usize, u32, Var)> = c.deduces().map(|(d, x2, x)| (d, x2, x.clone())).collect();
    ds.sort_by_key(|d| d.0);
    let mut out = Vec::new();
    fn go(
        c: &ConstraintSystem,
        ds: &[(usize, u32, Var)],
        universe: &Universe,
        depth: usize,
        theta: &mut BTreeMap<u32, Term>,
        lambda: &mut BTreeMap<Var, Term>,
        out: &mut Vec<Solution>,
    ) {
        let Some(((dom, x2, x), rest)) = ds.split_first() else {
            if let Some(s) = check_solution(c, theta) {
                out.push(s);
            }
            return;
        };
        let prefix: Vec<Term> = c.frame[..*dom].iter().map(|t| lam(lambda, t)).collect();
        if prefix.iter().any(|t| valid_ground(t).is_none()) {
            return;
        }
        for r in universe.valid(&prefix, depth).iter() {
            theta.insert(*x2, r.recipe.clone());
            lambda.insert(x.clone(), r.values[0].clone().expect("valid"));
            go(c, rest, universe, depth, theta, lambda, out);
        }
        theta.remove(x2);
        lambda.remove(x);
    }
    go(c, &ds, universe, depth, &mut BTreeMap::new(), &mut BTreeMap::new(), &mut out);
    out
}
