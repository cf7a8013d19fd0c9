//! Frames, recipe evaluation, deducibility and static equivalence.
//!
//! Static equivalence is decided by saturating each frame with the values an
//! attacker can extract by analysis, then running a finite set of tests built
//! from the saturated knowledge on the other frame. A bounded enumeration of
//! recipes provides an independent oracle.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::term::{eval, is_valid, normalize, Fun, Ident, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("unknown handle w{0}")]
    UnknownHandle(u32),
    #[error("frame handles must be w0, w1, ... in order; found w{found} at position {expected}")]
    NonConsecutive { expected: u32, found: u32 },
    #[error("payload of w{0} is not a valid ground term")]
    InvalidPayload(u32),
    #[error("frames have different domains ({0} vs {1} entries)")]
    DomainMismatch(usize, usize),
}

/// Ordered map from handles `w0..w(n-1)` to ground valid terms.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Frame {
    entries: Vec<Term>,
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, t) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "w{i} -> {t}")?;
        }
        write!(f, "]")
    }
}

impl Frame {
    pub fn new() -> Frame {
        Frame::default()
    }

    /// Builds a frame without validation. Callers guarantee ground valid terms.
    pub fn from_terms(entries: Vec<Term>) -> Frame {
        Frame { entries }
    }

    /// Builds a frame from explicit handle/payload pairs.
    pub fn from_entries(entries: Vec<(u32, Term)>) -> Result<Frame, FrameError> {
        let mut out = Vec::with_capacity(entries.len());
        for (i, (h, t)) in entries.into_iter().enumerate() {
            if h as usize != i {
                return Err(FrameError::NonConsecutive {
                    expected: i as u32,
                    found: h,
                });
            }
            if !t.is_ground() || !is_valid(&t) {
                return Err(FrameError::InvalidPayload(h));
            }
            out.push(normalize(&t));
        }
        Ok(Frame { entries: out })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, h: u32) -> Option<&Term> {
        self.entries.get(h as usize)
    }

    pub fn terms(&self) -> &[Term] {
        &self.entries
    }

    /// Appends a payload under the next fresh handle and returns that handle.
    pub fn push(&mut self, t: Term) -> u32 {
        self.entries.push(t);
        (self.entries.len() - 1) as u32
    }

    pub fn prefix(&self, n: usize) -> Frame {
        Frame {
            entries: self.entries[..n.min(self.entries.len())].to_vec(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, &Term)> {
        self.entries.iter().enumerate().map(|(i, t)| (i as u32, t))
    }
}

/// Replaces handles by payloads.
pub fn instantiate(frame: &[Term], m: &Term) -> Result<Term, FrameError> {
    match m {
        Term::Handle(h) => frame
            .get(*h as usize)
            .cloned()
            .ok_or(FrameError::UnknownHandle(*h)),
        Term::App(f, args) if !args.is_empty() => {
            let mut out = Vec::with_capacity(args.len());
            for a in args.iter() {
                out.push(instantiate(frame, a)?);
            }
            Ok(Term::App(f.clone(), out.into()))
        }
        _ => Ok(m.clone()),
    }
}

/// Value of recipe `m` on `frame`, or `None` when the computation is invalid.
pub fn evaluate(frame: &Frame, m: &Term) -> Result<Option<Term>, FrameError> {
    Ok(eval(&instantiate(frame.terms(), m)?))
}

/// Ordering key for recipes: fewest distinct atoms, then size, then text.
pub fn recipe_key(t: &Term) -> (usize, usize, String) {
    (t.atoms().len(), t.size(), t.to_string())
}

// ---------------------------------------------------------------------------
// Recipe universes

/// A recipe together with its value on each frame of a joint enumeration.
#[derive(Clone, Debug)]
pub struct JointRecipe {
    pub recipe: Term,
    pub values: Vec<Option<Term>>,
}

fn is_syntactic_redex(f: &Fun, first: &Term) -> bool {
    matches!(
        (f, first.head()),
        (Fun::Fst | Fun::Snd, Some(Fun::Pair))
            | (Fun::Adec, Some(Fun::Aenc))
            | (Fun::Dec, Some(Fun::Enc))
            | (Fun::Check, Some(Fun::Sign))
    )
}

fn apply_value(f: &Fun, args: &[&Option<Term>]) -> Option<Term> {
    let mut vals = Vec::with_capacity(args.len());
    for a in args {
        vals.push((*a).clone()?);
    }
    if f.is_destructor() {
        eval(&Term::App(f.clone(), vals.into()))
    } else {
        Some(Term::App(f.clone(), vals.into()))
    }
}

const ENUM_SYMBOLS: [Fun; 12] = [
    Fun::Pk,
    Fun::Hash,
    Fun::Vk,
    Fun::Fst,
    Fun::Snd,
    Fun::Pair,
    Fun::Aenc,
    Fun::Enc,
    Fun::Sign,
    Fun::Adec,
    Fun::Dec,
    Fun::Check,
];

/// All redex-free recipes of height at most `height` over the handles of the
/// given frames (which must share a length) and the constants, keeping those
/// valid on at least one frame. Sorted by [`recipe_key`].
pub fn enumerate_joint(frames: &[&[Term]], constants: &[Ident], height: usize) -> Vec<JointRecipe> {
    if height == 0 {
        return Vec::new();
    }
    let n = frames.first().map(|f| f.len()).unwrap_or(0);
    let mut levels: Vec<Vec<JointRecipe>> = Vec::new();
    let mut atoms = Vec::new();
    for h in 0..n {
        let values = frames.iter().map(|f| Some(f[h].clone())).collect();
        atoms.push(JointRecipe {
            recipe: Term::Handle(h as u32),
            values,
        });
    }
    for c in constants {
        let t = Term::App(Fun::Const(c.clone()), Arc::from([]));
        atoms.push(JointRecipe {
            values: vec![Some(t.clone()); frames.len().max(1)],
            recipe: t,
        });
    }
    levels.push(atoms);
    for _ in 2..=height {
        let top = levels.last().unwrap();
        let lower: Vec<&JointRecipe> = levels[..levels.len() - 1].iter().flatten().collect();
        let all: Vec<&JointRecipe> = levels.iter().flatten().collect();
        let mut next = Vec::new();
        let mut emit = |f: &Fun, args: &[&JointRecipe]| {
            if f.is_destructor() && is_syntactic_redex(f, &args[0].recipe) {
                return;
            }
            let width = args[0].values.len();
            let mut values = Vec::with_capacity(width);
            let mut any = false;
            for i in 0..width {
                let vs: Vec<&Option<Term>> = args.iter().map(|a| &a.values[i]).collect();
                let v = apply_value(f, &vs);
                any |= v.is_some();
                values.push(v);
            }
            if any {
                let recipe = Term::App(f.clone(), args.iter().map(|a| a.recipe.clone()).collect());
                next.push(JointRecipe { recipe, values });
            }
        };
        for f in ENUM_SYMBOLS.iter() {
            if f.arity() == 1 {
                for a in top {
                    emit(f, &[a]);
                }
            } else {
                for a in top {
                    for b in &all {
                        emit(f, &[a, b]);
                    }
                }
                for a in &lower {
                    for b in top {
                        emit(f, &[a, b]);
                    }
                }
            }
        }
        levels.push(next);
    }
    let mut out: Vec<(usize, usize, String, JointRecipe)> = levels
        .into_iter()
        .flatten()
        .map(|r| {
            let (a, s, t) = recipe_key(&r.recipe);
            (a, s, t, r)
        })
        .collect();
    out.sort_by(|x, y| (x.0, x.1, &x.2).cmp(&(y.0, y.1, &y.2)));
    out.into_iter().map(|x| x.3).collect()
}

type JointKey = (Vec<Vec<Term>>, usize);

/// Caches recipe enumerations keyed by frame contents and height.
pub struct Universe {
    constants: Vec<Ident>,
    joint: Mutex<HashMap<JointKey, Arc<Vec<JointRecipe>>>>,
    reps: Mutex<HashMap<(Vec<Term>, usize), Arc<Vec<(Term, Term)>>>>,
    values: Mutex<HashMap<(Vec<Term>, usize), Arc<HashSet<Term>>>>,
}

impl Universe {
    pub fn new(constants: &[Ident]) -> Universe {
        Universe {
            constants: constants.to_vec(),
            joint: Mutex::new(HashMap::new()),
            reps: Mutex::new(HashMap::new()),
            values: Mutex::new(HashMap::new()),
        }
    }

    pub fn constants(&self) -> &[Ident] {
        &self.constants
    }

    /// Recipes valid on at least one of `frames`, with their values.
    pub fn joint(&self, frames: &[Vec<Term>], height: usize) -> Arc<Vec<JointRecipe>> {
        let key = (frames.to_vec(), height);
        if let Some(v) = self.joint.lock().unwrap().get(&key) {
            return v.clone();
        }
        let refs: Vec<&[Term]> = frames.iter().map(|f| f.as_slice()).collect();
        let v = Arc::new(enumerate_joint(&refs, &self.constants, height));
        self.joint.lock().unwrap().insert(key, v.clone());
        v
    }

    /// Recipes valid on `frame`, in preference order.
    pub fn valid(&self, frame: &[Term], height: usize) -> Arc<Vec<JointRecipe>> {
        self.joint(&[frame.to_vec()], height)
    }

    /// One representative recipe per value, in preference order.
    pub fn representatives(&self, frame: &[Term], height: usize) -> Arc<Vec<(Term, Term)>> {
        let key = (frame.to_vec(), height);
        if let Some(v) = self.reps.lock().unwrap().get(&key) {
            return v.clone();
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for r in self.valid(frame, height).iter() {
            let v = r.values[0].clone().expect("valid recipe");
            if seen.insert(v.clone()) {
                out.push((r.recipe.clone(), v));
            }
        }
        let out = Arc::new(out);
        self.reps.lock().unwrap().insert(key, out.clone());
        out
    }

    /// Values computable by recipes of height at most `height`.
    pub fn values(&self, frame: &[Term], height: usize) -> Arc<HashSet<Term>> {
        let key = (frame.to_vec(), height);
        if let Some(v) = self.values.lock().unwrap().get(&key) {
            return v.clone();
        }
        let set: HashSet<Term> = self
            .representatives(frame, height)
            .iter()
            .map(|(_, v)| v.clone())
            .collect();
        let set = Arc::new(set);
        self.values.lock().unwrap().insert(key, set.clone());
        set
    }
}

// ---------------------------------------------------------------------------
// Saturation

/// Attacker knowledge after analysis: recipes paired with distinct values.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub known: Vec<(Term, Term)>,
    index: HashMap<Term, usize>,
    /// Pairs of recipes found to reach the same value.
    pub identities: Vec<(Term, Term)>,
}

impl Saturation {
    pub fn recipe_of(&self, v: &Term) -> Option<&Term> {
        self.index.get(v).map(|&i| &self.known[i].0)
    }

    fn add(&mut self, r: Term, v: Term) -> bool {
        if let Some(&i) = self.index.get(&v) {
            if self.known[i].0 != r {
                self.identities.push((self.known[i].0.clone(), r));
            }
            return false;
        }
        self.index.insert(v.clone(), self.known.len());
        self.known.push((r, v));
        true
    }

    /// A recipe building `t` from known values and public constructors.
    pub fn compose(&self, t: &Term) -> Option<Term> {
        if let Some(r) = self.recipe_of(t) {
            return Some(r.clone());
        }
        match t {
            Term::App(Fun::Const(_), _) => Some(t.clone()),
            Term::App(f, args) if f.is_constructor() => {
                let mut rs = Vec::with_capacity(args.len());
                for a in args.iter() {
                    rs.push(self.compose(a)?);
                }
                Some(Term::App(f.clone(), rs.into()))
            }
            _ => None,
        }
    }
}

pub fn saturate(frame: &[Term]) -> Saturation {
    let mut sat = Saturation {
        known: Vec::new(),
        index: HashMap::new(),
        identities: Vec::new(),
    };
    for (i, v) in frame.iter().enumerate() {
        sat.add(Term::Handle(i as u32), v.clone());
    }
    let mut analysed: HashSet<usize> = HashSet::new();
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < sat.known.len() {
            if analysed.contains(&i) {
                i += 1;
                continue;
            }
            let (r, v) = sat.known[i].clone();
            let step: Option<Vec<(Term, Term)>> = match &v {
                Term::App(Fun::Pair, a) => Some(vec![
                    (Term::fst(r.clone()), a[0].clone()),
                    (Term::snd(r.clone()), a[1].clone()),
                ]),
                Term::App(Fun::Aenc, a) => match &a[1] {
                    Term::App(Fun::Pk, k) => sat
                        .compose(&k[0])
                        .map(|rk| vec![(Term::adec(r.clone(), rk), a[0].clone())]),
                    _ => Some(vec![]),
                },
                Term::App(Fun::Enc, a) => sat
                    .compose(&a[1])
                    .map(|rk| vec![(Term::dec(r.clone(), rk), a[0].clone())]),
                Term::App(Fun::Sign, a) => sat
                    .compose(&Term::vk(a[1].clone()))
                    .map(|rk| vec![(Term::check(r.clone(), rk), a[0].clone())]),
                _ => Some(vec![]),
            };
            if let Some(adds) = step {
                analysed.insert(i);
                for (r2, v2) in adds {
                    sat.add(r2, v2);
                }
                changed = true;
            }
            i += 1;
        }
        if !changed {
            break;
        }
    }
    sat
}

/// Some recipe deriving `target` from `frame`, if one exists.
///
/// Saturation is complete for this theory, so `depth` is not needed here; it
/// is accepted for symmetry with the enumeration oracle.
pub fn deducible(frame: &Frame, target: &Term, _depth: usize) -> Option<Term> {
    saturate(frame.terms()).compose(&normalize(target))
}

/// Bounded-enumeration deducibility, used as an oracle in tests.
pub fn deducible_oracle(frame: &Frame, target: &Term, constants: &[Ident], depth: usize) -> Option<Term> {
    let target = normalize(target);
    enumerate_joint(&[frame.terms()], constants, depth)
        .into_iter()
        .find(|r| r.values[0].as_ref() == Some(&target))
        .map(|r| r.recipe)
}

// ---------------------------------------------------------------------------
// Static equivalence

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StaticVerdict {
    Equivalent,
    /// `n` absent: `m` is valid on exactly one frame. Otherwise the equality
    /// `m = n` holds on exactly one frame.
    Witness { m: Term, n: Option<Term> },
}

impl StaticVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, StaticVerdict::Equivalent)
    }
}

#[derive(Clone, Debug)]
enum Test {
    Valid(Term),
    Eq(Term, Term),
}

fn holds(frame: &[Term], t: &Test) -> bool {
    let ev = |m: &Term| instantiate(frame, m).ok().and_then(|u| eval(&u));
    match t {
        Test::Valid(m) => ev(m).is_some(),
        Test::Eq(m, n) => match (ev(m), ev(n)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        },
    }
}

fn tests_of(sat: &Saturation) -> Vec<Test> {
    let mut out: Vec<Test> = sat.known.iter().map(|(r, _)| Test::Valid(r.clone())).collect();
    for (a, b) in &sat.identities {
        out.push(Test::Eq(a.clone(), b.clone()));
    }
    for (r, v) in &sat.known {
        match v {
            Term::App(Fun::Const(_), _) => {
                if r != v {
                    out.push(Test::Eq(r.clone(), v.clone()));
                }
            }
            Term::App(f, args) if f.is_constructor() => {
                let parts: Option<Vec<Term>> = args.iter().map(|a| sat.compose(a)).collect();
                if let Some(parts) = parts {
                    let built = Term::App(f.clone(), parts.into());
                    if &built != r {
                        out.push(Test::Eq(r.clone(), built));
                    }
                }
            }
            _ => {}
        }
    }
    out
}

fn orient(m: Term, n: Term) -> (Term, Term) {
    let km = (m.size(), m.to_string());
    let kn = (n.size(), n.to_string());
    if km >= kn {
        (m, n)
    } else {
        (n, m)
    }
}

fn witness_of(t: &Test) -> (Term, Option<Term>) {
    match t {
        Test::Valid(m) => (m.clone(), None),
        Test::Eq(m, n) => {
            let (a, b) = orient(m.clone(), n.clone());
            (a, Some(b))
        }
    }
}

fn witness_order(w: &(Term, Option<Term>), true_on_left: bool) -> (usize, bool, String) {
    let size = w.0.size() + w.1.as_ref().map(Term::size).unwrap_or(0);
    let text = match &w.1 {
        Some(n) => format!("{}={}", w.0, n),
        None => w.0.to_string(),
    };
    (size, !true_on_left, text)
}

/// Decides static equivalence by saturation of both frames.
///
/// Among failing tests the witness minimises total recipe size, then prefers
/// tests that hold on the left frame, then canonical text.
pub fn static_equiv(f1: &Frame, f2: &Frame) -> Result<StaticVerdict, FrameError> {
    if f1.len() != f2.len() {
        return Err(FrameError::DomainMismatch(f1.len(), f2.len()));
    }
    Ok(static_equiv_terms(f1.terms(), f2.terms()))
}

pub fn static_equiv_terms(f1: &[Term], f2: &[Term]) -> StaticVerdict {
    if f1 == f2 {
        return StaticVerdict::Equivalent;
    }
    let mut best: Option<((usize, bool, String), (Term, Option<Term>))> = None;
    for (from_left, own, other) in [(true, f1, f2), (false, f2, f1)] {
        let sat = saturate(own);
        for t in tests_of(&sat) {
            if !holds(other, &t) {
                let w = witness_of(&t);
                let key = witness_order(&w, from_left);
                if best.as_ref().map(|(k, _)| key < *k).unwrap_or(true) {
                    best = Some((key, w));
                }
            }
        }
    }
    match best {
        None => StaticVerdict::Equivalent,
        Some((_, (m, n))) => StaticVerdict::Witness { m, n },
    }
}

/// Checks a claimed witness directly on both frames.
pub fn witness_distinguishes(f1: &Frame, f2: &Frame, m: &Term, n: Option<&Term>) -> bool {
    let t = match n {
        Some(n) => Test::Eq(m.clone(), n.clone()),
        None => Test::Valid(m.clone()),
    };
    let ok1 = holds(f1.terms(), &t);
    let ok2 = holds(f2.terms(), &t);
    if n.is_some() {
        // An equality only counts when both recipes are valid on both sides.
        let both_valid = |f: &[Term]| holds(f, &Test::Valid(m.clone())) && holds(f, &Test::Valid(n.unwrap().clone()));
        if both_valid(f1.terms()) != both_valid(f2.terms()) {
            return true;
        }
    }
    ok1 != ok2
}

/// Static equivalence by enumerating every recipe of height at most `depth`.
pub fn static_equiv_oracle(f1: &Frame, f2: &Frame, constants: &[Ident], depth: usize) -> Result<StaticVerdict, FrameError> {
    if f1.len() != f2.len() {
        return Err(FrameError::DomainMismatch(f1.len(), f2.len()));
    }
    let all = enumerate_joint(&[f1.terms(), f2.terms()], constants, depth);
    for r in &all {
        if r.values[0].is_some() != r.values[1].is_some() {
            return Ok(StaticVerdict::Witness {
                m: r.recipe.clone(),
                n: None,
            });
        }
    }
    let mut by_left: BTreeMap<&Term, &JointRecipe> = BTreeMap::new();
    let mut by_right: BTreeMap<&Term, &JointRecipe> = BTreeMap::new();
    for r in &all {
        if let (Some(a), Some(b)) = (&r.values[0], &r.values[1]) {
            for (map, key, other_idx) in [(&mut by_left, a, 1usize), (&mut by_right, b, 0usize)] {
                match map.get(key) {
                    Some(rep) => {
                        if rep.values[other_idx] != r.values[other_idx] {
                            let (m, n) = orient(r.recipe.clone(), rep.recipe.clone());
                            return Ok(StaticVerdict::Witness { m, n: Some(n) });
                        }
                    }
                    None => {
                        map.insert(key, r);
                    }
                }
            }
        }
    }
    Ok(StaticVerdict::Equivalent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: &str) -> Term {
        Term::name(x)
    }

    pub(crate) fn phi0() -> Frame {
        Frame::from_terms(vec![Term::pk(n("ska'")), Term::pk(n("ska")), Term::pk(n("skb"))])
    }

    fn phi_honest() -> Frame {
        let mut f = phi0();
        f.push(Term::aenc(Term::pair(n("na"), Term::pk(n("ska"))), Term::pk(n("skb"))));
        f.push(Term::aenc(
            Term::pair(n("na"), Term::pair(n("nb"), Term::pk(n("skb")))),
            Term::pk(n("ska")),
        ));
        f
    }

    fn phi_prime() -> Frame {
        let mut f = phi0();
        f.push(Term::aenc(Term::pair(n("na"), Term::pk(n("ska'"))), Term::pk(n("skb"))));
        f.push(Term::aenc(n("nb"), Term::pk(n("skb"))));
        f
    }

    #[test]
    fn evaluate_lookup_and_failure() {
        let f = phi0();
        assert_eq!(evaluate(&f, &Term::Handle(1)).unwrap(), Some(Term::pk(n("ska"))));
        assert_eq!(evaluate(&f, &Term::fst(Term::Handle(1))).unwrap(), None);
        assert!(evaluate(&f, &Term::Handle(7)).is_err());
    }

    #[test]
    fn evaluate_rebuilds_ciphertext() {
        let mut f = phi_honest();
        f.push(n("na"));
        let m = Term::aenc(Term::pair(Term::Handle(5), Term::Handle(1)), Term::Handle(2));
        assert_eq!(evaluate(&f, &m).unwrap().as_ref(), f.get(3));
    }

    #[test]
    fn deducible_examples() {
        assert_eq!(deducible(&phi0(), &Term::pk(n("skb")), 3), Some(Term::Handle(2)));
        assert_eq!(deducible(&phi_honest(), &n("na"), 3), None);
        let mut plus = phi_honest();
        plus.push(n("na"));
        assert_eq!(deducible(&plus, &n("na"), 3), Some(Term::Handle(5)));
    }

    #[test]
    fn saturation_opens_pairs_and_ciphertexts() {
        let f = Frame::from_terms(vec![
            Term::pair(n("k"), Term::enc(n("s"), n("k"))),
        ]);
        let r = deducible(&f, &n("s"), 3).unwrap();
        assert_eq!(evaluate(&f, &r).unwrap(), Some(n("s")));
    }

    #[test]
    fn private_authentication_frames() {
        assert_eq!(static_equiv(&phi_honest(), &phi_prime()).unwrap(), StaticVerdict::Equivalent);
        let mut p = phi_honest();
        p.push(n("na"));
        let mut q = phi_prime();
        q.push(n("na"));
        let w = static_equiv(&p, &q).unwrap();
        assert_eq!(
            w,
            StaticVerdict::Witness {
                m: Term::aenc(Term::pair(Term::Handle(5), Term::Handle(1)), Term::Handle(2)),
                n: Some(Term::Handle(3)),
            }
        );
        assert!(static_equiv(&p, &p).unwrap().is_equivalent());
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        assert!(static_equiv(&phi0(), &phi_honest()).is_err());
    }

    #[test]
    fn universe_sizes() {
        let ok: Ident = Arc::from("ok");
        let u = enumerate_joint(&[&[]], &[ok.clone()], 2);
        // ok, pk(ok), hash(ok), vk(ok) and four binary constructors.
        assert_eq!(u.len(), 8);
        assert_eq!(u[0].recipe, Term::constant("ok"));
    }

    #[test]
    fn oracle_agrees_on_examples() {
        let ok: Vec<Ident> = vec![];
        let a = Frame::from_terms(vec![n("a"), Term::hash(n("a"))]);
        let b = Frame::from_terms(vec![n("a"), Term::hash(n("b"))]);
        assert!(!static_equiv(&a, &b).unwrap().is_equivalent());
        assert!(!static_equiv_oracle(&a, &b, &ok, 2).unwrap().is_equivalent());
        let c = Frame::from_terms(vec![n("c"), Term::hash(n("c"))]);
        assert!(static_equiv(&a, &c).unwrap().is_equivalent());
        assert!(static_equiv_oracle(&a, &c, &ok, 2).unwrap().is_equivalent());
    }
}
