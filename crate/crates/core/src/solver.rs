//! Extended constraint systems and their simplification into solved forms.
//!
//! Every second-order variable `X<k>` owns a recipe skeleton whose open
//! positions are leaves. A leaf ranges over recipes of bounded height built
//! on a fixed frame prefix, and stands for the first-order variable
//! `Var::Of(id)`. Refining a leaf either composes it from fresh leaves with a
//! constructor or closes it with a concrete recipe. Disequalities between
//! leaf variables are kept in a separate list.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::frame::{instantiate, recipe_key, static_equiv_terms, Universe};
use crate::symbolic::{Constraint, ConstraintSystem};
use crate::term::{apply, eval, normalize, unify_into, solved, AnyVar, Fun, Subst, Term, Var};

/// Leaf identifiers of refined sub-recipes start here; smaller ids are roots.
pub const LEAF_BASE: u32 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Leaf {
    pub dom: usize,
    pub height: usize,
    /// Common ground frame prefix of every live member, once known.
    pub frame: Option<Arc<Vec<Term>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Extension {
    pub roots: BTreeMap<u32, Term>,
    pub open: BTreeMap<u32, Leaf>,
    /// Value of each refined leaf in terms of its children.
    pub bound: BTreeMap<u32, Option<Term>>,
    /// Disequalities over leaf variables, as recorded.
    pub neqs: Vec<(Term, Term)>,
    next_leaf: u32,
}

impl Default for Extension {
    fn default() -> Self {
        Extension::new()
    }
}

pub fn leaf_var(l: u32) -> Term {
    Term::Var(Var::Of(l))
}

fn ordered(s: Term, t: Term) -> (Term, Term) {
    if s <= t {
        (s, t)
    } else {
        (t, s)
    }
}

impl Extension {
    pub fn new() -> Extension {
        Extension {
            roots: BTreeMap::new(),
            open: BTreeMap::new(),
            bound: BTreeMap::new(),
            neqs: Vec::new(),
            next_leaf: LEAF_BASE,
        }
    }

    /// Registers `X<k>` with domain `dom` and recipes of height at most `height`.
    pub fn add_root(&mut self, k: u32, dom: usize, height: usize) {
        self.roots.insert(k, Term::Var2(k));
        self.open.insert(k, Leaf { dom, height, frame: None });
    }

    pub fn skeleton(&self, k: u32) -> Option<&Term> {
        self.roots.get(&k)
    }

    /// Roots bound to closed recipes.
    pub fn partial_solution(&self) -> BTreeMap<u32, Term> {
        self.roots
            .iter()
            .filter(|(_, r)| r.vars2().is_empty())
            .map(|(k, r)| (*k, r.clone()))
            .collect()
    }

    /// Replaces refined leaf variables by their values, recursively.
    pub fn expand(&self, t: &Term) -> Term {
        match t {
            Term::Var(Var::Of(l)) => match self.bound.get(l) {
                Some(Some(v)) => self.expand(v),
                _ => t.clone(),
            },
            Term::App(f, args) if !args.is_empty() => {
                Term::App(f.clone(), args.iter().map(|a| self.expand(a)).collect())
            }
            _ => t.clone(),
        }
    }

    fn refine(&self, l: u32, recipe: &Term, value: Option<Term>, children: Vec<(u32, Leaf)>) -> Extension {
        let mut e = self.clone();
        e.open.remove(&l);
        let target = Term::Var2(l);
        for r in e.roots.values_mut() {
            *r = replace_leaf(r, &target, recipe);
        }
        e.bound.insert(l, value);
        for (c, leaf) in children {
            e.open.insert(c, leaf);
        }
        e
    }

    /// `f(L1..Lk)` with fresh leaves one level lower.
    fn compose(&self, l: u32, f: &Fun) -> Extension {
        let leaf = &self.open[&l];
        let mut next = self.next_leaf;
        let mut children = Vec::new();
        let mut recipe_args = Vec::new();
        let mut value_args = Vec::new();
        for _ in 0..f.arity() {
            children.push((
                next,
                Leaf {
                    dom: leaf.dom,
                    height: leaf.height - 1,
                    frame: leaf.frame.clone(),
                },
            ));
            recipe_args.push(Term::Var2(next));
            value_args.push(leaf_var(next));
            next += 1;
        }
        let recipe = Term::app(f.clone(), recipe_args);
        let value = Term::app(f.clone(), value_args);
        let mut e = self.refine(l, &recipe, Some(value), children);
        e.next_leaf = next;
        e
    }

    fn sort_key(&self) -> (usize, usize, String) {
        let mut atoms = 0;
        let mut size = 0;
        let mut text = String::new();
        for (k, r) in &self.roots {
            atoms += r.atoms().len();
            size += r.size();
            text.push_str(&format!("X{k}={r};"));
        }
        for (s, t) in &self.neqs {
            text.push_str(&format!("{s}!={t};"));
        }
        (atoms, size, text)
    }

    /// Whether the second-order assignment `theta` lies in the region
    /// described by the skeletons and the disequalities.
    pub fn admits(&self, theta: &BTreeMap<u32, Term>) -> bool {
        let mut assign: BTreeMap<u32, Term> = BTreeMap::new();
        for (k, skel) in &self.roots {
            let Some(r) = theta.get(k) else { return false };
            if !match_skeleton(skel, r, &mut assign) {
                return false;
            }
        }
        let mut values = Subst::new();
        for (l, r) in &assign {
            let Some(leaf) = self.open.get(l) else { return false };
            let Some(frame) = &leaf.frame else { return false };
            if r.height() > leaf.height || r.handles().iter().any(|h| *h as usize >= leaf.dom) {
                return false;
            }
            let Ok(inst) = instantiate(frame, r) else { return false };
            let Some(v) = eval(&inst) else { return false };
            values.insert(AnyVar::First(Var::Of(*l)), v);
        }
        self.neqs.iter().all(|(s, t)| {
            let s = apply(&values, &self.expand(s));
            let t = apply(&values, &self.expand(t));
            !matches!((eval(&s), eval(&t)), (Some(a), Some(b)) if a == b)
        })
    }
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let roots: Vec<String> = self.roots.iter().map(|(k, r)| format!("X{k} = {r}")).collect();
        write!(f, "{{{}}}", roots.join(", "))?;
        for (s, t) in &self.neqs {
            write!(f, " /\\ {s} != {t}")?;
        }
        Ok(())
    }
}

fn replace_leaf(t: &Term, target: &Term, by: &Term) -> Term {
    if t == target {
        return by.clone();
    }
    match t {
        Term::App(f, args) if !args.is_empty() => {
            Term::App(f.clone(), args.iter().map(|a| replace_leaf(a, target, by)).collect())
        }
        _ => t.clone(),
    }
}

fn match_skeleton(skel: &Term, r: &Term, assign: &mut BTreeMap<u32, Term>) -> bool {
    match (skel, r) {
        (Term::Var2(l), _) => {
            assign.insert(*l, r.clone());
            true
        }
        (Term::App(f, xs), Term::App(g, ys)) if !xs.is_empty() => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| match_skeleton(x, y, assign))
        }
        _ => skel == r,
    }
}

/// Outcome of deciding one equation over leaf variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomEval {
    True,
    False,
    /// Holds exactly when the listed leaves match their patterns.
    Residual(Vec<(u32, Term)>),
}

fn flatten(t: &Term, eqs: &mut Vec<(Term, Term)>, fresh: &mut u32) -> Term {
    let Term::App(f, args) = t else { return t.clone() };
    if args.is_empty() {
        return t.clone();
    }
    let rs: Vec<Term> = args.iter().map(|a| flatten(a, eqs, fresh)).collect();
    let mut z = || {
        *fresh += 1;
        Term::Var(Var::Fresh(*fresh))
    };
    match f {
        Fun::Fst | Fun::Snd => {
            let (z1, z2) = (z(), z());
            eqs.push((rs[0].clone(), Term::pair(z1.clone(), z2.clone())));
            if *f == Fun::Fst {
                z1
            } else {
                z2
            }
        }
        Fun::Adec => {
            let m = z();
            eqs.push((rs[0].clone(), Term::aenc(m.clone(), Term::pk(rs[1].clone()))));
            m
        }
        Fun::Dec => {
            let m = z();
            eqs.push((rs[0].clone(), Term::enc(m.clone(), rs[1].clone())));
            m
        }
        Fun::Check => {
            let (m, k) = (z(), z());
            eqs.push((rs[0].clone(), Term::sign(m.clone(), k.clone())));
            eqs.push((rs[1].clone(), Term::vk(k)));
            m
        }
        _ => Term::App(f.clone(), rs.into()),
    }
}

/// Decides `s = t` (both sides valid and equal) for all values of the leaf
/// variables they mention, by narrowing destructors and unifying.
pub fn eval_atom(s: &Term, t: &Term) -> AtomEval {
    if s.is_ground() && t.is_ground() {
        return match (eval(s), eval(t)) {
            (Some(a), Some(b)) if a == b => AtomEval::True,
            _ => AtomEval::False,
        };
    }
    let mut eqs = Vec::new();
    let mut fresh = 0;
    let a = flatten(s, &mut eqs, &mut fresh);
    let b = flatten(t, &mut eqs, &mut fresh);
    eqs.push((a, b));
    let mut sub = Subst::new();
    for (x, y) in &eqs {
        if !unify_into(&mut sub, x, y) {
            return AtomEval::False;
        }
    }
    let sub = solved(&sub);
    let res: Vec<(u32, Term)> = sub
        .bindings
        .iter()
        .filter_map(|(v, p)| match v {
            AnyVar::First(Var::Of(l)) => Some((*l, p.clone())),
            _ => None,
        })
        .collect();
    if res.is_empty() {
        AtomEval::True
    } else {
        AtomEval::Residual(res)
    }
}

/// A solved extended system with the members still alive in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub ext: Extension,
    pub alive: Vec<bool>,
}

struct MemberState {
    lambda: Subst,
    frame: Vec<Term>,
}

enum MemberEval {
    Dead,
    /// λ could only be partially computed; the frame prefix is returned.
    Stuck(Vec<Term>),
    Ok(MemberState),
}

fn lam_term(lambda: &Subst, t: &Term) -> Term {
    normalize(&apply(lambda, t))
}

fn with_leaf_vars(t: &Term) -> Term {
    match t {
        Term::Var2(l) => leaf_var(*l),
        Term::App(f, args) if !args.is_empty() => Term::App(f.clone(), args.iter().map(with_leaf_vars).collect()),
        _ => t.clone(),
    }
}

fn eval_member(ext: &Extension, cs: &ConstraintSystem) -> MemberEval {
    let mut lambda = Subst::new();
    for c in &cs.constraints {
        if let Constraint::Deduce { dom, x2, x } = c {
            let Some(skel) = ext.roots.get(x2) else { return MemberEval::Dead };
            let prefix: Vec<Term> = cs.frame[..*dom].iter().map(|t| lam_term(&lambda, t)).collect();
            let Ok(inst) = instantiate(&prefix, skel) else { return MemberEval::Dead };
            let inst = with_leaf_vars(&inst);
            match eval(&inst) {
                Some(v) => lambda.insert(AnyVar::First(x.clone()), v),
                None if inst.is_ground() => return MemberEval::Dead,
                None => return MemberEval::Stuck(prefix),
            }
        }
    }
    let frame: Vec<Term> = cs.frame.iter().map(|t| lam_term(&lambda, t)).collect();
    if frame.iter().any(|t| t.is_ground() && eval(t).is_none()) {
        return MemberEval::Dead;
    }
    MemberEval::Ok(MemberState { lambda, frame })
}

/// Ground frame of a member whose constraints are decided on the region of
/// `ext`; `None` when its deduction constraints fail.
pub fn member_frame(ext: &Extension, cs: &ConstraintSystem) -> Option<Vec<Term>> {
    match eval_member(ext, cs) {
        MemberEval::Ok(st) => Some(st.frame),
        _ => None,
    }
}

fn leaves_in(t: &Term, ext: &Extension) -> Vec<u32> {
    t.vars().iter().filter_map(|v| match v {
        Var::Of(l) if ext.open.contains_key(l) => Some(*l),
        _ => None,
    }).collect()
}

enum Round {
    Dead,
    Split(Vec<(Extension, Vec<bool>)>),
    Solved,
}

/// The simplification procedure, parameterized by the recipe universe.
pub struct Solver {
    pub universe: Arc<Universe>,
}

impl Solver {
    pub fn new(universe: Arc<Universe>) -> Solver {
        Solver { universe }
    }

    /// Splits `ext` into solved forms. Each branch carries a mask of the
    /// members whose constraints hold on its whole region; branches are
    /// disjoint and sorted canonically.
    pub fn simplify(&self, ext: &Extension, members: &[&ConstraintSystem]) -> Vec<Branch> {
        let mut work = vec![(ext.clone(), vec![true; members.len()])];
        let mut done = Vec::new();
        while let Some((mut e, mut alive)) = work.pop() {
            if !alive.iter().any(|a| *a) {
                continue;
            }
            match self.round(&mut e, &mut alive, members) {
                Round::Dead => {}
                Round::Split(v) => work.extend(v),
                Round::Solved => {
                    if alive.iter().any(|a| *a) && self.sample_leaves(&e).is_some() {
                        done.push(Branch { ext: e, alive });
                    }
                }
            }
        }
        done.sort_by_cached_key(|b| (b.ext.sort_key(), b.alive.clone()));
        done
    }

    fn round(&self, e: &mut Extension, alive: &mut [bool], members: &[&ConstraintSystem]) -> Round {
        // Ground every frame and compute λ per member.
        let mut states: Vec<Option<MemberState>> = Vec::with_capacity(members.len());
        let mut frames: Vec<Option<Vec<Term>>> = Vec::with_capacity(members.len());
        for (i, cs) in members.iter().enumerate() {
            if !alive[i] {
                states.push(None);
                frames.push(None);
                continue;
            }
            match eval_member(e, cs) {
                MemberEval::Dead => {
                    alive[i] = false;
                    states.push(None);
                    frames.push(None);
                }
                MemberEval::Stuck(prefix) => {
                    states.push(None);
                    frames.push(Some(prefix));
                }
                MemberEval::Ok(st) => {
                    frames.push(Some(st.frame.clone()));
                    states.push(Some(st));
                }
            }
        }
        let mut in_frames: BTreeSet<(usize, u32)> = BTreeSet::new();
        for f in frames.iter().flatten() {
            for t in f {
                for l in leaves_in(t, e) {
                    in_frames.insert((e.open[&l].dom, l));
                }
            }
        }
        if let Some(&(dom, l)) = in_frames.iter().next() {
            let prefixes = distinct_prefixes(&frames, alive, dom);
            return Round::Split(self.concretize(e, l, &prefixes).into_iter().map(|x| (x, alive.to_vec())).collect());
        }
        if !alive.iter().any(|a| *a) {
            return Round::Dead;
        }
        // An open leaf ranges over recipes behaving alike on every alive
        // member. Leaves whose domain frames disagree are closed unless they
        // are unused and the frames are statically equivalent.
        let used = self.used_leaves(e, alive, members, &states);
        let ids: Vec<u32> = e.open.keys().copied().collect();
        for l in ids {
            let dom = e.open[&l].dom;
            let prefixes = distinct_prefixes(&frames, alive, dom);
            let shared = prefixes.len() == 1
                || (prefixes.len() > 1
                    && used.as_ref().is_some_and(|u| !u.contains(&l))
                    && prefixes[1..].iter().all(|p| static_equiv_terms(&prefixes[0], p).is_equivalent()));
            if !shared {
                return Round::Split(self.concretize(e, l, &prefixes).into_iter().map(|x| (x, alive.to_vec())).collect());
            }
            let leaf = e.open.get_mut(&l).unwrap();
            if leaf.frame.as_deref() != Some(&prefixes[0]) {
                leaf.frame = Some(Arc::new(prefixes[0].clone()));
            }
        }
        // Disequalities of the extension.
        let mut keys = BTreeSet::new();
        let mut kept = Vec::new();
        for (s, t) in &e.neqs {
            let s2 = normalize(&e.expand(s));
            let t2 = normalize(&e.expand(t));
            match eval_atom(&s2, &t2) {
                AtomEval::True => return Round::Dead,
                AtomEval::False => {}
                AtomEval::Residual(_) => {
                    keys.insert(ordered(s2, t2));
                    kept.push((s.clone(), t.clone()));
                }
            }
        }
        e.neqs = kept;
        // Member atoms.
        let mut split: Option<(Term, Term)> = None;
        for (i, cs) in members.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let st = states[i].as_ref().expect("evaluated");
            for c in &cs.constraints {
                let (positive, u, v) = match c {
                    Constraint::Eq(u, v) => (true, u, v),
                    Constraint::Neq(u, v) => (false, u, v),
                    Constraint::Deduce { .. } => continue,
                };
                let s = lam_term(&st.lambda, u);
                let t = lam_term(&st.lambda, v);
                let key = ordered(s.clone(), t.clone());
                if keys.contains(&key) {
                    if positive {
                        alive[i] = false;
                        break;
                    }
                    continue;
                }
                match eval_atom(&s, &t) {
                    AtomEval::True if !positive => {
                        alive[i] = false;
                        break;
                    }
                    AtomEval::False if positive => {
                        alive[i] = false;
                        break;
                    }
                    AtomEval::Residual(_) => {
                        if split.is_none() {
                            split = Some((s, t));
                        }
                    }
                    _ => {}
                }
            }
        }
        if !alive.iter().any(|a| *a) {
            return Round::Dead;
        }
        if let Some((s, t)) = split {
            let mut out: Vec<(Extension, Vec<bool>)> =
                self.solve_true(e, &s, &t).into_iter().map(|x| (x, alive.to_vec())).collect();
            let mut neg = e.clone();
            neg.neqs.push((s, t));
            out.push((neg, alive.to_vec()));
            return Round::Split(out);
        }
        Round::Solved
    }

    /// Leaves occurring in an atom of an alive member or in a disequality of
    /// the extension; `None` when some alive member is stuck.
    fn used_leaves(&self, e: &Extension, alive: &[bool], members: &[&ConstraintSystem], states: &[Option<MemberState>]) -> Option<BTreeSet<u32>> {
        let mut used = BTreeSet::new();
        for (s, t) in &e.neqs {
            used.extend(leaves_in(&e.expand(s), e));
            used.extend(leaves_in(&e.expand(t), e));
        }
        for (i, cs) in members.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let st = states[i].as_ref()?;
            for c in &cs.constraints {
                if let Constraint::Eq(u, v) | Constraint::Neq(u, v) = c {
                    used.extend(leaves_in(&lam_term(&st.lambda, u), e));
                    used.extend(leaves_in(&lam_term(&st.lambda, v), e));
                }
            }
        }
        Some(used)
    }

    /// Disjoint refinements of `e` covering exactly the region where `s = t`.
    fn solve_true(&self, e: &Extension, s: &Term, t: &Term) -> Vec<Extension> {
        let mut work = vec![e.clone()];
        let mut out = Vec::new();
        while let Some(e) = work.pop() {
            let s2 = normalize(&e.expand(s));
            let t2 = normalize(&e.expand(t));
            match eval_atom(&s2, &t2) {
                AtomEval::True => out.push(e),
                AtomEval::False => {}
                AtomEval::Residual(bs) => {
                    let (l, p) = bs[0].clone();
                    work.extend(self.derive(&e, l, &p));
                }
            }
        }
        out
    }

    /// Disjoint refinements of leaf `l` covering every value that may match
    /// the pattern `p`.
    fn derive(&self, e: &Extension, l: u32, p: &Term) -> Vec<Extension> {
        let leaf = e.open[&l].clone();
        let frame = leaf.frame.clone().expect("leaf frame");
        if matches!(p, Term::Var(_)) || p.vars().iter().any(|v| matches!(v, Var::Of(_))) {
            return self.concretize(e, l, &[(*frame).clone()]);
        }
        match p {
            Term::App(Fun::Const(_), _) => vec![e.refine(l, p, Some(p.clone()), Vec::new())],
            Term::App(f, _) if f.is_constructor() => {
                let composable = leaf.height >= 2;
                let lower = if composable {
                    Some(self.universe.values(&frame, leaf.height - 1))
                } else {
                    None
                };
                let mut out = Vec::new();
                if composable {
                    out.push(e.compose(l, f));
                }
                for (r, v) in self.universe.representatives(&frame, leaf.height).iter() {
                    if crate::term::unify(v, p).is_none() {
                        continue;
                    }
                    if let (Some(lower), Some(g)) = (&lower, v.head()) {
                        if g == f && v.args().iter().all(|a| lower.contains(a)) {
                            continue;
                        }
                    }
                    out.push(e.refine(l, r, Some(v.clone()), Vec::new()));
                }
                out
            }
            _ => self
                .universe
                .representatives(&frame, leaf.height)
                .iter()
                .filter(|(_, v)| v == p)
                .map(|(r, v)| e.refine(l, r, Some(v.clone()), Vec::new()))
                .collect(),
        }
    }

    /// One branch per class of recipes that agree on every frame.
    fn concretize(&self, e: &Extension, l: u32, frames: &[Vec<Term>]) -> Vec<Extension> {
        let height = e.open[&l].height;
        if frames.len() == 1 {
            return self
                .universe
                .representatives(&frames[0], height)
                .iter()
                .map(|(r, v)| e.refine(l, r, Some(v.clone()), Vec::new()))
                .collect();
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for jr in self.universe.joint(frames, height).iter() {
            if seen.insert(jr.values.clone()) {
                out.push(e.refine(l, &jr.recipe, jr.values[0].clone(), Vec::new()));
            }
        }
        out
    }

    /// Recipes for the open leaves satisfying every disequality, chosen
    /// greedily in preference order.
    fn sample_leaves(&self, e: &Extension) -> Option<BTreeMap<u32, Term>> {
        let leaves: Vec<(u32, Leaf)> = e.open.iter().map(|(l, x)| (*l, x.clone())).collect();
        let index: BTreeMap<u32, usize> = leaves.iter().enumerate().map(|(i, (l, _))| (*l, i)).collect();
        let mut checks: Vec<Vec<(Term, Term)>> = vec![Vec::new(); leaves.len()];
        for (s, t) in &e.neqs {
            let s = e.expand(s);
            let t = e.expand(t);
            let last = leaves_in(&s, e).into_iter().chain(leaves_in(&t, e)).map(|l| index[&l]).max();
            match last {
                Some(i) => checks[i].push((s, t)),
                None => {
                    if eval_atom(&normalize(&s), &normalize(&t)) == AtomEval::True {
                        return None;
                    }
                }
            }
        }
        let cands: Vec<Arc<Vec<(Term, Term)>>> = leaves
            .iter()
            .map(|(_, leaf)| {
                let frame = leaf.frame.clone().unwrap_or_default();
                self.universe.representatives(&frame, leaf.height)
            })
            .collect();
        fn go(
            i: usize,
            leaves: &[(u32, Leaf)],
            cands: &[Arc<Vec<(Term, Term)>>],
            checks: &[Vec<(Term, Term)>],
            values: &mut Subst,
            chosen: &mut Vec<Term>,
        ) -> bool {
            if i == leaves.len() {
                return true;
            }
            for (r, v) in cands[i].iter() {
                values.insert(AnyVar::First(Var::Of(leaves[i].0)), v.clone());
                let ok = checks[i].iter().all(|(s, t)| {
                    !matches!((eval(&apply(values, s)), eval(&apply(values, t))), (Some(a), Some(b)) if a == b)
                });
                if ok {
                    chosen.push(r.clone());
                    if go(i + 1, leaves, cands, checks, values, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            values.bindings.remove(&AnyVar::First(Var::Of(leaves[i].0)));
            false
        }
        let mut chosen = Vec::new();
        if !go(0, &leaves, &cands, &checks, &mut Subst::new(), &mut chosen) {
            return None;
        }
        Some(leaves.iter().map(|(l, _)| *l).zip(chosen).collect())
    }

    /// A second-order assignment in the region of `e`, if any.
    pub fn sample(&self, e: &Extension) -> Option<BTreeMap<u32, Term>> {
        let leaves = self.sample_leaves(e)?;
        Some(instantiate_roots(e, &leaves))
    }

    /// Every assignment in the region of `e`, one per tuple of leaf values.
    pub fn enumerate_region(&self, e: &Extension) -> Vec<BTreeMap<u32, Term>> {
        let leaves: Vec<(u32, Leaf)> = e.open.iter().map(|(l, x)| (*l, x.clone())).collect();
        let mut out = Vec::new();
        let mut acc: Vec<BTreeMap<u32, Term>> = vec![BTreeMap::new()];
        for (l, leaf) in &leaves {
            let frame = leaf.frame.clone().unwrap_or_default();
            let reps = self.universe.representatives(&frame, leaf.height);
            let mut next = Vec::new();
            for a in &acc {
                for (r, _) in reps.iter() {
                    let mut b = a.clone();
                    b.insert(*l, r.clone());
                    next.push(b);
                }
            }
            acc = next;
        }
        for a in acc {
            let theta = instantiate_roots(e, &a);
            if e.admits(&theta) {
                out.push(theta);
            }
        }
        out
    }
}

fn distinct_prefixes(frames: &[Option<Vec<Term>>], alive: &[bool], dom: usize) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        if !alive[i] {
            continue;
        }
        if let Some(f) = f {
            if f.len() >= dom {
                let p = f[..dom].to_vec();
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn instantiate_roots(e: &Extension, leaves: &BTreeMap<u32, Term>) -> BTreeMap<u32, Term> {
    e.roots
        .iter()
        .map(|(k, skel)| {
            let mut r = skel.clone();
            for (l, rec) in leaves {
                r = replace_leaf(&r, &Term::Var2(*l), rec);
            }
            (*k, r)
        })
        .collect()
}

/// Ranking of a second-order assignment: distinct atoms, size, then text.
pub fn theta_key(theta: &BTreeMap<u32, Term>) -> (usize, usize, String) {
    let mut atoms = 0;
    let mut size = 0;
    let mut text = String::new();
    for (k, r) in theta {
        let (a, s, t) = recipe_key(r);
        atoms += a;
        size += s;
        text.push_str(&format!("X{k}={t};"));
    }
    (atoms, size, text)
}
