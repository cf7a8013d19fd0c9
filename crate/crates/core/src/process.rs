//! Basic and simple processes, extended processes and the initial-form checks.

use std::fmt;
use std::sync::Arc;

use crate::frame::Frame;
use crate::term::{apply, is_valid, AnyVar, Ident, Subst, Term, Var};

pub type Channel = Ident;

/// Sequential process over a single channel.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Proc {
    Null,
    In(Channel, Var, Arc<Proc>),
    Out(Channel, Term, Arc<Proc>),
    If(Term, Term, Arc<Proc>, Arc<Proc>),
}

impl Proc {
    pub fn input(c: &str, x: &str, k: Proc) -> Proc {
        Proc::In(Arc::from(c), Var::Named(Arc::from(x)), Arc::new(k))
    }

    pub fn output(c: &str, u: Term, k: Proc) -> Proc {
        Proc::Out(Arc::from(c), u, Arc::new(k))
    }

    pub fn cond(u: Term, v: Term, then: Proc, other: Proc) -> Proc {
        Proc::If(u, v, Arc::new(then), Arc::new(other))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Proc::Null)
    }

    /// Channel of the first action reachable from the root.
    pub fn channel(&self) -> Option<Channel> {
        match self {
            Proc::Null => None,
            Proc::In(c, _, _) | Proc::Out(c, _, _) => Some(c.clone()),
            Proc::If(_, _, p, q) => p.channel().or_else(|| q.channel()),
        }
    }

    pub fn channels(&self) -> Vec<Channel> {
        let mut out = Vec::new();
        self.visit(&mut |p| {
            if let Proc::In(c, _, _) | Proc::Out(c, _, _) = p {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Proc)) {
        f(self);
        match self {
            Proc::Null => {}
            Proc::In(_, _, k) | Proc::Out(_, _, k) => k.visit(f),
            Proc::If(_, _, p, q) => {
                p.visit(f);
                q.visit(f);
            }
        }
    }

    /// Applies a substitution to every term, stopping under binders of the
    /// substituted variables.
    pub fn subst(&self, s: &Subst) -> Proc {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Proc::Null => Proc::Null,
            Proc::In(c, x, k) => {
                if s.first(x).is_some() {
                    let mut inner = s.clone();
                    inner.bindings.remove(&AnyVar::First(x.clone()));
                    Proc::In(c.clone(), x.clone(), Arc::new(k.subst(&inner)))
                } else {
                    Proc::In(c.clone(), x.clone(), Arc::new(k.subst(s)))
                }
            }
            Proc::Out(c, u, k) => Proc::Out(c.clone(), apply(s, u), Arc::new(k.subst(s))),
            Proc::If(u, v, p, q) => Proc::If(apply(s, u), apply(s, v), Arc::new(p.subst(s)), Arc::new(q.subst(s))),
        }
    }

    pub fn rename_channels(&self, f: &impl Fn(&Channel) -> Channel) -> Proc {
        match self {
            Proc::Null => Proc::Null,
            Proc::In(c, x, k) => Proc::In(f(c), x.clone(), Arc::new(k.rename_channels(f))),
            Proc::Out(c, u, k) => Proc::Out(f(c), u.clone(), Arc::new(k.rename_channels(f))),
            Proc::If(u, v, p, q) => Proc::If(
                u.clone(),
                v.clone(),
                Arc::new(p.rename_channels(f)),
                Arc::new(q.rename_channels(f)),
            ),
        }
    }

    /// Free first-order variables.
    pub fn free_vars(&self) -> Vec<Var> {
        fn go(p: &Proc, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
            let add = |t: &Term, bound: &Vec<Var>, out: &mut Vec<Var>| {
                for v in t.vars() {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            };
            match p {
                Proc::Null => {}
                Proc::In(_, x, k) => {
                    bound.push(x.clone());
                    go(k, bound, out);
                    bound.pop();
                }
                Proc::Out(_, u, k) => {
                    add(u, bound, out);
                    go(k, bound, out);
                }
                Proc::If(u, v, p, q) => {
                    add(u, bound, out);
                    add(v, bound, out);
                    go(p, bound, out);
                    go(q, bound, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Number of input and output actions on the longest branch.
    pub fn action_depth(&self) -> usize {
        match self {
            Proc::Null => 0,
            Proc::In(_, _, k) | Proc::Out(_, _, k) => 1 + k.action_depth(),
            Proc::If(_, _, p, q) => p.action_depth().max(q.action_depth()),
        }
    }
}

impl fmt::Display for Proc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proc::Null => write!(f, "0"),
            Proc::In(c, x, k) => {
                write!(f, "in({c}, {x})")?;
                if !k.is_null() {
                    write!(f, "; {k}")?;
                }
                Ok(())
            }
            Proc::Out(c, u, k) => {
                write!(f, "out({c}, {u})")?;
                if !k.is_null() {
                    write!(f, "; {k}")?;
                }
                Ok(())
            }
            Proc::If(u, v, p, q) => {
                write!(f, "if {u} = {v} then ({p})")?;
                if !q.is_null() {
                    write!(f, " else ({q})")?;
                }
                Ok(())
            }
        }
    }
}

/// Multiset of basic processes on pairwise distinct channels, kept sorted by
/// channel with null members removed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SimpleProcess {
    members: Vec<Proc>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProcessError {
    #[error("channel {0} is used by two basic processes")]
    DuplicateChannel(Channel),
    #[error("basic process mixes channels {0} and {1}")]
    MixedChannels(Channel, Channel),
}

impl SimpleProcess {
    pub fn new(members: Vec<Proc>) -> Result<SimpleProcess, ProcessError> {
        let mut seen: Vec<Channel> = Vec::new();
        let mut kept = Vec::new();
        for p in members {
            let chans = p.channels();
            if chans.len() > 1 {
                return Err(ProcessError::MixedChannels(chans[0].clone(), chans[1].clone()));
            }
            if let Some(c) = chans.first() {
                if seen.contains(c) {
                    return Err(ProcessError::DuplicateChannel(c.clone()));
                }
                seen.push(c.clone());
                kept.push(p);
            }
        }
        kept.sort_by_key(|p| p.channel());
        Ok(SimpleProcess { members: kept })
    }

    pub fn empty() -> SimpleProcess {
        SimpleProcess::default()
    }

    pub fn members(&self) -> &[Proc] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, c: &str) -> Option<&Proc> {
        self.members.iter().find(|p| p.channel().as_deref() == Some(c))
    }

    /// Replaces (or removes, when null) the member on channel `c`.
    pub fn replace(&self, c: &str, p: Proc) -> SimpleProcess {
        let mut members: Vec<Proc> = self
            .members
            .iter()
            .filter(|q| q.channel().as_deref() != Some(c))
            .cloned()
            .collect();
        if p.channel().is_some() {
            members.push(p);
            members.sort_by_key(|p| p.channel());
        }
        SimpleProcess { members }
    }

    pub fn channels(&self) -> Vec<Channel> {
        self.members.iter().filter_map(Proc::channel).collect()
    }
}

impl fmt::Display for SimpleProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ExtendedProcess {
    pub procs: SimpleProcess,
    pub frame: Frame,
}

impl ExtendedProcess {
    pub fn new(procs: SimpleProcess, frame: Frame) -> ExtendedProcess {
        ExtendedProcess { procs, frame }
    }
}

impl fmt::Display for ExtendedProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.procs, self.frame)
    }
}

fn member_initial(p: &Proc) -> bool {
    match p {
        Proc::Null | Proc::In(..) => true,
        Proc::Out(_, u, _) => u.is_ground() && !is_valid(u),
        Proc::If(..) => false,
    }
}

pub fn is_initial(a: &ExtendedProcess) -> bool {
    a.procs.members().iter().all(member_initial)
}

/// Guards every non-initial member with `in(c, z); if z = start then ...`.
pub fn wrap_initial(a: &ExtendedProcess) -> ExtendedProcess {
    let members = a
        .procs
        .members()
        .iter()
        .map(|p| {
            if member_initial(p) {
                return p.clone();
            }
            let c = p.channel().expect("non-null member has a channel");
            let z = Var::Named(Arc::from(format!("start_{c}")));
            Proc::In(
                c,
                z.clone(),
                Arc::new(Proc::cond(Term::Var(z), Term::constant("start"), p.clone(), Proc::Null)),
            )
        })
        .collect();
    ExtendedProcess {
        procs: SimpleProcess::new(members).expect("channels unchanged"),
        frame: a.frame.clone(),
    }
}

/// Sufficient syntactic condition for skipping blocked-output constraints:
/// every output term is destructor-free, or is preceded on its branch by an
/// equality test whose left side contains each destructor subterm of the
/// output.
pub fn looks_non_blocking(p: &Proc) -> bool {
    fn go(p: &Proc, guards: &mut Vec<Term>) -> bool {
        match p {
            Proc::Null => true,
            Proc::In(_, _, k) => go(k, guards),
            Proc::Out(_, u, k) => {
                let covered = u.subterms().into_iter().all(|s| {
                    !matches!(s, Term::App(f, _) if f.is_destructor())
                        || guards.iter().any(|g| g.subterms().contains(&s))
                });
                covered && go(k, guards)
            }
            Proc::If(u, v, a, b) => {
                guards.push(u.clone());
                guards.push(v.clone());
                let ok = go(a, guards);
                guards.pop();
                guards.pop();
                ok && go(b, guards)
            }
        }
    }
    go(p, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: &str) -> Term {
        Term::name(x)
    }

    fn q0(pka: Term) -> Proc {
        let m = Term::adec(Term::var("y"), n("skb"));
        Proc::input(
            "cB",
            "y",
            Proc::cond(
                Term::snd(m.clone()),
                pka.clone(),
                Proc::output(
                    "cB",
                    Term::aenc(Term::pair(Term::fst(m), Term::pair(n("nb"), Term::pk(n("skb")))), pka),
                    Proc::Null,
                ),
                Proc::Null,
            ),
        )
    }

    fn p_role() -> Proc {
        Proc::output(
            "cA",
            Term::aenc(Term::pair(n("na"), Term::pk(n("ska"))), Term::pk(n("skb"))),
            Proc::input("cA", "x", Proc::Null),
        )
    }

    #[test]
    fn initial_checks() {
        let a = ExtendedProcess::new(SimpleProcess::new(vec![p_role(), q0(Term::pk(n("ska")))]).unwrap(), Frame::new());
        assert!(!is_initial(&a));
        let w = wrap_initial(&a);
        assert!(is_initial(&w));
        assert_eq!(w.procs.channels(), a.procs.channels());
        assert!(is_initial(&ExtendedProcess::default()));
    }

    #[test]
    fn wrap_output_only_member() {
        let a = ExtendedProcess::new(
            SimpleProcess::new(vec![Proc::output("c", n("n"), Proc::Null)]).unwrap(),
            Frame::new(),
        );
        let w = wrap_initial(&a);
        assert_eq!(w.procs.to_string(), "{in(c, start_c); if start_c = start then (out(c, n))}");
        let already = wrap_initial(&w);
        assert_eq!(already, w);
    }

    #[test]
    fn duplicate_channels_rejected() {
        let r = SimpleProcess::new(vec![Proc::input("c", "x", Proc::Null), Proc::input("c", "y", Proc::Null)]);
        assert_eq!(r, Err(ProcessError::DuplicateChannel(Arc::from("c"))));
    }

    #[test]
    fn null_members_removed() {
        let s = SimpleProcess::new(vec![Proc::Null, Proc::input("c", "x", Proc::Null)]).unwrap();
        assert_eq!(s.members().len(), 1);
        assert!(s.replace("c", Proc::Null).is_empty());
    }

    #[test]
    fn substitution_respects_binders() {
        let p = Proc::output("c", Term::var("x"), Proc::input("c", "x", Proc::output("c", Term::var("x"), Proc::Null)));
        let s = Subst::single(AnyVar::First(Var::Named(Arc::from("x"))), Term::constant("ok"));
        assert_eq!(p.subst(&s).to_string(), "out(c, ok); in(c, x); out(c, x)");
    }

    #[test]
    fn non_blocking_hint() {
        assert!(!looks_non_blocking(&q0(Term::pk(n("ska")))));
        let guarded = Proc::input(
            "c",
            "y",
            Proc::cond(Term::fst(Term::var("y")), Term::constant("ok"), Proc::output("c", Term::fst(Term::var("y")), Proc::Null), Proc::Null),
        );
        assert!(looks_non_blocking(&guarded));
    }
}
