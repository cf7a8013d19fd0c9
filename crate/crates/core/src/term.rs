//! Terms over the fixed signature, rewriting, validity, substitutions and
//! syntactic unification.
//!
//! The signature has seven constructors (`pair`, `aenc`, `pk`, `enc`, `hash`,
//! `sign`, `vk`), user constants of arity 0, and five destructors (`fst`,
//! `snd`, `adec`, `dec`, `check`). Each destructor has exactly one rule, and
//! every right-hand side is a subterm of its left-hand side.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type Ident = Arc<str>;

/// Function symbols of the signature.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Fun {
    Pair,
    Aenc,
    Pk,
    Enc,
    Hash,
    Sign,
    Vk,
    Const(Ident),
    Fst,
    Snd,
    Adec,
    Dec,
    Check,
}

/// Whether a symbol builds messages or takes them apart.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SymbolKind {
    Constructor,
    Destructor,
}

/// Entry of the symbol table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Symbol {
    pub name: Ident,
    pub arity: usize,
    pub kind: SymbolKind,
}

/// Built-in constructors of positive arity.
pub const CONSTRUCTORS: [Fun; 7] = [
    Fun::Pair,
    Fun::Aenc,
    Fun::Pk,
    Fun::Enc,
    Fun::Hash,
    Fun::Sign,
    Fun::Vk,
];

pub const DESTRUCTORS: [Fun; 5] = [Fun::Fst, Fun::Snd, Fun::Adec, Fun::Dec, Fun::Check];

impl Fun {
    pub fn arity(&self) -> usize {
        match self {
            Fun::Const(_) => 0,
            Fun::Pk | Fun::Hash | Fun::Vk | Fun::Fst | Fun::Snd => 1,
            Fun::Pair | Fun::Aenc | Fun::Enc | Fun::Sign | Fun::Adec | Fun::Dec | Fun::Check => 2,
        }
    }

    pub fn kind(&self) -> SymbolKind {
        if self.is_destructor() {
            SymbolKind::Destructor
        } else {
            SymbolKind::Constructor
        }
    }

    pub fn is_destructor(&self) -> bool {
        matches!(self, Fun::Fst | Fun::Snd | Fun::Adec | Fun::Dec | Fun::Check)
    }

    pub fn is_constructor(&self) -> bool {
        !self.is_destructor()
    }

    pub fn name(&self) -> &str {
        match self {
            Fun::Pair => "pair",
            Fun::Aenc => "aenc",
            Fun::Pk => "pk",
            Fun::Enc => "enc",
            Fun::Hash => "hash",
            Fun::Sign => "sign",
            Fun::Vk => "vk",
            Fun::Const(c) => c,
            Fun::Fst => "fst",
            Fun::Snd => "snd",
            Fun::Adec => "adec",
            Fun::Dec => "dec",
            Fun::Check => "check",
        }
    }

    /// Looks up a built-in symbol by its surface name.
    pub fn builtin(name: &str) -> Option<Fun> {
        Some(match name {
            "pair" => Fun::Pair,
            "aenc" => Fun::Aenc,
            "pk" => Fun::Pk,
            "enc" => Fun::Enc,
            "hash" => Fun::Hash,
            "sign" => Fun::Sign,
            "vk" => Fun::Vk,
            "fst" => Fun::Fst,
            "snd" => Fun::Snd,
            "adec" => Fun::Adec,
            "dec" => Fun::Dec,
            "check" => Fun::Check,
            _ => return None,
        })
    }

    pub fn symbol(&self) -> Symbol {
        Symbol {
            name: Arc::from(self.name()),
            arity: self.arity(),
            kind: self.kind(),
        }
    }
}

/// The symbol table for a theory instance: built-ins plus the given constants.
pub fn signature(constants: &[Ident]) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = CONSTRUCTORS.iter().map(Fun::symbol).collect();
    out.extend(constants.iter().map(|c| Fun::Const(c.clone()).symbol()));
    out.extend(DESTRUCTORS.iter().map(Fun::symbol));
    out
}

/// First-order variables.
///
/// `Named` comes from protocol sources, `Of(k)` is the message bound to the
/// second-order variable `X<k>`, and `Fresh` is used internally by narrowing.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Var {
    Named(Ident),
    Of(u32),
    Fresh(u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Named(n) => write!(f, "{n}"),
            Var::Of(k) => write!(f, "x{k}"),
            Var::Fresh(k) => write!(f, "_{k}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Name(Ident),
    Var(Var),
    Handle(u32),
    Var2(u32),
    App(Fun, Arc<[Term]>),
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(n) => write!(f, "{n}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Handle(i) => write!(f, "w{i}"),
            Term::Var2(i) => write!(f, "X{i}"),
            Term::App(fun, args) => {
                write!(f, "{}", fun.name())?;
                if args.is_empty() {
                    return Ok(());
                }
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Term {
    pub fn app(f: Fun, args: Vec<Term>) -> Term {
        assert_eq!(f.arity(), args.len(), "arity mismatch for {}", f.name());
        Term::App(f, args.into())
    }

    pub fn name(n: &str) -> Term {
        Term::Name(Arc::from(n))
    }

    pub fn constant(c: &str) -> Term {
        Term::App(Fun::Const(Arc::from(c)), Arc::from([]))
    }

    pub fn var(v: &str) -> Term {
        Term::Var(Var::Named(Arc::from(v)))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::app(Fun::Pair, vec![a, b])
    }

    pub fn aenc(m: Term, k: Term) -> Term {
        Term::app(Fun::Aenc, vec![m, k])
    }

    pub fn pk(k: Term) -> Term {
        Term::app(Fun::Pk, vec![k])
    }

    pub fn enc(m: Term, k: Term) -> Term {
        Term::app(Fun::Enc, vec![m, k])
    }

    pub fn hash(m: Term) -> Term {
        Term::app(Fun::Hash, vec![m])
    }

    pub fn sign(m: Term, k: Term) -> Term {
        Term::app(Fun::Sign, vec![m, k])
    }

    pub fn vk(k: Term) -> Term {
        Term::app(Fun::Vk, vec![k])
    }

    pub fn fst(m: Term) -> Term {
        Term::app(Fun::Fst, vec![m])
    }

    pub fn snd(m: Term) -> Term {
        Term::app(Fun::Snd, vec![m])
    }

    pub fn adec(m: Term, k: Term) -> Term {
        Term::app(Fun::Adec, vec![m, k])
    }

    pub fn dec(m: Term, k: Term) -> Term {
        Term::app(Fun::Dec, vec![m, k])
    }

    pub fn check(m: Term, k: Term) -> Term {
        Term::app(Fun::Check, vec![m, k])
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, a) => a,
            _ => &[],
        }
    }

    pub fn head(&self) -> Option<&Fun> {
        match self {
            Term::App(f, _) => Some(f),
            _ => None,
        }
    }

    /// Number of symbol occurrences.
    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    /// Height, counting a leaf as 1.
    pub fn height(&self) -> usize {
        1 + self.args().iter().map(Term::height).max().unwrap_or(0)
    }

    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            stack.extend(t.args().iter());
        }
        out
    }

    fn any(&self, p: &impl Fn(&Term) -> bool) -> bool {
        p(self) || self.args().iter().any(|a| a.any(p))
    }

    pub fn has_destructor(&self) -> bool {
        self.any(&|t| matches!(t, Term::App(f, _) if f.is_destructor()))
    }

    /// No first- or second-order variables.
    pub fn is_ground(&self) -> bool {
        !self.any(&|t| matches!(t, Term::Var(_) | Term::Var2(_)))
    }

    /// Contains no names and no first-order variables.
    pub fn is_recipe(&self) -> bool {
        !self.any(&|t| matches!(t, Term::Name(_) | Term::Var(_)))
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.any(&|t| matches!(t, Term::Var(u) if u == v))
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect(&mut |t| {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    pub fn vars2(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect(&mut |t| {
            if let Term::Var2(v) = t {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        });
        out
    }

    pub fn handles(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect(&mut |t| {
            if let Term::Handle(h) = t {
                if !out.contains(h) {
                    out.push(*h);
                }
            }
        });
        out.sort_unstable();
        out
    }

    /// Handles and constants occurring in the term, used to rank witnesses.
    pub fn atoms(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        self.collect(&mut |t| {
            let atom = matches!(t, Term::Handle(_))
                || matches!(t, Term::App(Fun::Const(_), a) if a.is_empty());
            if atom && !out.contains(t) {
                out.push(t.clone());
            }
        });
        out
    }

    fn collect(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for a in self.args() {
            a.collect(f);
        }
    }

    /// Rebuilds the term bottom-up, letting `f` replace leaves.
    pub fn map_leaves(&self, f: &impl Fn(&Term) -> Option<Term>) -> Term {
        match self {
            Term::App(fun, args) => {
                if args.is_empty() {
                    return f(self).unwrap_or_else(|| self.clone());
                }
                Term::App(fun.clone(), args.iter().map(|a| a.map_leaves(f)).collect())
            }
            _ => f(self).unwrap_or_else(|| self.clone()),
        }
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

/// Applies the rewrite rule of a destructor at the root, if it matches.
/// Arguments must already be in normal form.
fn reduce_root(f: &Fun, args: &[Term]) -> Option<Term> {
    match (f, args) {
        (Fun::Fst, [Term::App(Fun::Pair, p)]) => Some(p[0].clone()),
        (Fun::Snd, [Term::App(Fun::Pair, p)]) => Some(p[1].clone()),
        (Fun::Adec, [Term::App(Fun::Aenc, m), k]) => match &m[1] {
            Term::App(Fun::Pk, y) if y[0] == *k => Some(m[0].clone()),
            _ => None,
        },
        (Fun::Dec, [Term::App(Fun::Enc, m), k]) if m[1] == *k => Some(m[0].clone()),
        (Fun::Check, [Term::App(Fun::Sign, m), Term::App(Fun::Vk, y)]) if m[1] == y[0] => {
            Some(m[0].clone())
        }
        _ => None,
    }
}

/// Unique normal form under the five rules.
pub fn normalize(t: &Term) -> Term {
    match t {
        Term::App(f, args) if !args.is_empty() => {
            let nargs: Vec<Term> = args.iter().map(normalize).collect();
            if f.is_destructor() {
                if let Some(r) = reduce_root(f, &nargs) {
                    return r;
                }
            }
            Term::App(f.clone(), nargs.into())
        }
        _ => t.clone(),
    }
}

/// Normal form of `t` if every subterm normalizes to a destructor-free term.
///
/// Variables are treated as destructor-free, so on open terms this answers
/// validity for instances by constructor terms whenever no destructor is
/// applied to a variable.
pub fn eval(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, args) if !args.is_empty() => {
            let mut nargs = Vec::with_capacity(args.len());
            for a in args.iter() {
                nargs.push(eval(a)?);
            }
            if f.is_destructor() {
                reduce_root(f, &nargs)
            } else {
                Some(Term::App(f.clone(), nargs.into()))
            }
        }
        _ => Some(t.clone()),
    }
}

pub fn eq_modulo(t1: &Term, t2: &Term) -> bool {
    normalize(t1) == normalize(t2)
}

/// Validity of a ground term.
pub fn is_valid(u: &Term) -> bool {
    eval(u).is_some()
}

/// Variables of any of the three sorts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum AnyVar {
    First(Var),
    Handle(u32),
    Second(u32),
}

impl AnyVar {
    fn of(t: &Term) -> Option<AnyVar> {
        match t {
            Term::Var(v) => Some(AnyVar::First(v.clone())),
            Term::Handle(h) => Some(AnyVar::Handle(*h)),
            Term::Var2(x) => Some(AnyVar::Second(*x)),
            _ => None,
        }
    }
}

/// Finite map from variables to terms.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Subst {
    pub bindings: BTreeMap<AnyVar, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn single(v: AnyVar, t: Term) -> Subst {
        let mut s = Subst::new();
        s.bindings.insert(v, t);
        s
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, v: &AnyVar) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn insert(&mut self, v: AnyVar, t: Term) {
        self.bindings.insert(v, t);
    }

    pub fn first(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(&AnyVar::First(v.clone()))
    }
}

/// Homomorphic replacement of variables (single pass).
pub fn apply(s: &Subst, t: &Term) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    match t {
        Term::App(f, args) => {
            if args.is_empty() {
                t.clone()
            } else {
                Term::App(f.clone(), args.iter().map(|a| apply(s, a)).collect())
            }
        }
        Term::Name(_) => t.clone(),
        _ => {
            let key = AnyVar::of(t).expect("variable");
            s.get(&key).cloned().unwrap_or_else(|| t.clone())
        }
    }
}

fn resolve(s: &Subst, t: &Term) -> Term {
    match t {
        Term::Var(v) => match s.first(v) {
            Some(b) => resolve(s, b),
            None => t.clone(),
        },
        Term::App(f, args) if !args.is_empty() => {
            Term::App(f.clone(), args.iter().map(|a| resolve(s, a)).collect())
        }
        _ => t.clone(),
    }
}

/// Extends the triangular substitution `s` so that `a` and `b` become equal.
///
/// Only first-order variables are bound; every other leaf is rigid.
pub fn unify_into(s: &mut Subst, a: &Term, b: &Term) -> bool {
    let a = walk(s, a);
    let b = walk(s, b);
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), Term::Var(y)) if matches!(y, Var::Fresh(_)) && !matches!(x, Var::Fresh(_)) => {
            bind(s, y, &a)
        }
        (Term::Var(x), _) => bind(s, x, &b),
        (_, Term::Var(y)) => bind(s, y, &a),
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| unify_into(s, x, y))
        }
        _ => a == b,
    }
}

fn walk(s: &Subst, t: &Term) -> Term {
    let mut cur = t.clone();
    while let Term::Var(v) = &cur {
        match s.first(v) {
            Some(b) => cur = b.clone(),
            None => break,
        }
    }
    cur
}

fn bind(s: &mut Subst, x: &Var, t: &Term) -> bool {
    if resolve(s, t).contains_var(x) {
        return false;
    }
    s.insert(AnyVar::First(x.clone()), t.clone());
    true
}

/// Makes a triangular substitution idempotent.
pub fn solved(s: &Subst) -> Subst {
    let mut out = Subst::new();
    for (k, v) in &s.bindings {
        out.insert(k.clone(), resolve(s, v));
    }
    out
}

/// Most general unifier of two terms, treating first-order variables as the
/// only unknowns.
pub fn unify(t1: &Term, t2: &Term) -> Option<Subst> {
    let mut s = Subst::new();
    if unify_into(&mut s, t1, t2) {
        Some(solved(&s))
    } else {
        None
    }
}
