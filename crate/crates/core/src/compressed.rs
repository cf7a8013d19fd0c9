//! Focused execution of blocks, the compressed semantics on simple
//! processes, and factoring of concrete traces into blocks.

use std::fmt;

use crate::concrete::{obs, replay, step, tau_close, Action, ConcreteVerdict, ConcreteWitness, Side};
use crate::frame::{evaluate, static_equiv, Frame, StaticVerdict, Universe};
use crate::process::{Channel, ExtendedProcess, Proc, SimpleProcess};
use crate::term::{eval, AnyVar, Subst, Term};

/// A block `io_c(M1..Mk; w1..wl)`. Proper blocks have outputs; improper ones
/// consist of inputs only and end the execution.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub chan: Channel,
    pub inputs: Vec<Term>,
    pub outputs: Vec<u32>,
    pub proper: bool,
}

impl Block {
    pub fn actions(&self) -> Vec<Action> {
        let mut out: Vec<Action> = self.inputs.iter().map(|m| Action::In(self.chan.clone(), m.clone())).collect();
        out.extend(self.outputs.iter().map(|w| Action::Out(self.chan.clone(), *w)));
        out
    }

    /// Shape invariants of proper and improper blocks.
    pub fn well_shaped(&self) -> bool {
        !self.inputs.is_empty() && (self.proper != self.outputs.is_empty())
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(|m| m.to_string()).collect();
        let outs: Vec<String> = self.outputs.iter().map(|w| format!("w{w}")).collect();
        write!(f, "io_{}[{};{}]", self.chan, ins.join(","), outs.join(","))
    }
}

pub fn blocks_text(bs: &[Block]) -> String {
    bs.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(".")
}

pub fn flatten(bs: &[Block]) -> Vec<Action> {
    bs.iter().flat_map(Block::actions).collect()
}

/// Resolves pending conditionals of a ground basic process.
fn settle(p: &Proc) -> Proc {
    let mut cur = p.clone();
    while let Proc::If(u, v, a, b) = &cur {
        cur = if crate::concrete::branch_taken(u, v) { (**a).clone() } else { (**b).clone() };
    }
    cur
}

fn blocked(p: &Proc) -> bool {
    match p {
        Proc::Out(_, u, _) => eval(u).is_none(),
        _ => false,
    }
}

/// Runs `blk` on a single basic process from stage i+. Returns the residual
/// process (`None` for ⊥) with the final frame.
pub fn run_block(p: &Proc, frame: &Frame, blk: &Block) -> Option<(Option<Proc>, Frame)> {
    if blk.inputs.is_empty() || p.channel().as_ref() != Some(&blk.chan) {
        return None;
    }
    let mut cur = settle(p);
    let mut frame = frame.clone();
    for m in &blk.inputs {
        let Proc::In(_, x, k) = &cur else { return None };
        if m.handles().iter().any(|h| *h as usize >= frame.len()) {
            return None;
        }
        let v = evaluate(&frame, m).ok()??;
        cur = settle(&k.subst(&Subst::single(AnyVar::First(x.clone()), v)));
    }
    for w in &blk.outputs {
        let Proc::Out(_, u, k) = &cur else { return None };
        if *w as usize != frame.len() {
            return None;
        }
        frame.push(eval(u)?);
        cur = settle(k);
    }
    if blk.outputs.is_empty() {
        // Improper termination at i*.
        if cur.is_null() || blocked(&cur) {
            return Some((None, frame));
        }
        return None;
    }
    match &cur {
        Proc::Null | Proc::In(..) => Some((Some(cur), frame)),
        Proc::Out(..) if blocked(&cur) => Some((Some(cur), frame)),
        _ => None,
    }
}

/// One compressed transition. Failure empties the process multiset.
pub fn compressed_step(s: &ExtendedProcess, blk: &Block) -> Option<ExtendedProcess> {
    let p = s.procs.get(&blk.chan)?;
    let (res, frame) = run_block(p, &s.frame, blk)?;
    match res {
        Some(q) => Some(ExtendedProcess::new(s.procs.replace(&blk.chan, q), frame)),
        None => Some(ExtendedProcess::new(SimpleProcess::empty(), frame)),
    }
}

/// Every block executable by the member on `c`, with inputs drawn from
/// `inputs`.
pub fn blocks_from(s: &ExtendedProcess, c: &Channel, inputs: &[Term]) -> Vec<Block> {
    let Some(p) = s.procs.get(c) else { return Vec::new() };
    let mut out = Vec::new();
    let mut stack: Vec<(Proc, Vec<Term>)> = vec![(settle(p), Vec::new())];
    while let Some((cur, ins)) = stack.pop() {
        match &cur {
            Proc::In(_, x, k) => {
                let mut next = Vec::new();
                for m in inputs {
                    if let Ok(Some(v)) = evaluate(&s.frame, m) {
                        let mut ins2 = ins.clone();
                        ins2.push(m.clone());
                        next.push((settle(&k.subst(&Subst::single(AnyVar::First(x.clone()), v))), ins2));
                    }
                }
                stack.extend(next.into_iter().rev());
            }
            _ if ins.is_empty() => {}
            Proc::Out(..) if !blocked(&cur) => {
                let mut outs = Vec::new();
                let mut c2 = cur.clone();
                let mut n = s.frame.len() as u32;
                while let Proc::Out(_, u, k) = &c2 {
                    if eval(u).is_none() {
                        break;
                    }
                    outs.push(n);
                    n += 1;
                    c2 = settle(k);
                }
                out.push(Block {
                    chan: c.clone(),
                    inputs: ins,
                    outputs: outs,
                    proper: true,
                });
            }
            _ => out.push(Block {
                chan: c.clone(),
                inputs: ins,
                outputs: Vec::new(),
                proper: false,
            }),
        }
    }
    out
}

/// All compressed traces with their frames; inputs range over valid recipes
/// of height at most `depth`.
pub fn compressed_explore(a: &ExtendedProcess, universe: &Universe, depth: usize) -> Vec<(Vec<Block>, Frame)> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::<Block>::new(), a.clone(), false)];
    while let Some((tr, st, ended)) = stack.pop() {
        out.push((tr.clone(), st.frame.clone()));
        if ended {
            continue;
        }
        let inputs: Vec<Term> = universe.valid(st.frame.terms(), depth).iter().map(|r| r.recipe.clone()).collect();
        let mut children = Vec::new();
        for c in st.procs.channels() {
            for b in blocks_from(&st, &c, &inputs) {
                if let Some(next) = compressed_step(&st, &b) {
                    let mut tr2 = tr.clone();
                    let proper = b.proper;
                    tr2.push(b);
                    children.push((tr2, next, !proper));
                }
            }
        }
        stack.extend(children.into_iter().rev());
    }
    out
}

/// Compressed trace equivalence relative to recipes of height at most
/// `depth`, inputs explored once per value on the left frame.
pub fn oracle_compressed_equiv(a: &ExtendedProcess, b: &ExtendedProcess, universe: &Universe, depth: usize) -> ConcreteVerdict {
    let mut stack = vec![(Vec::<Block>::new(), a.clone(), b.clone(), false)];
    while let Some((tr, x, y, ended)) = stack.pop() {
        match static_equiv(&x.frame, &y.frame) {
            Ok(StaticVerdict::Equivalent) => {}
            Ok(StaticVerdict::Witness { m, n }) => {
                return ConcreteVerdict::Witness(ConcreteWitness {
                    trace: flatten(&tr),
                    side: Side::Left,
                    statics: Some((m, n)),
                })
            }
            Err(_) => {
                return ConcreteVerdict::Witness(ConcreteWitness {
                    trace: flatten(&tr),
                    side: Side::Left,
                    statics: None,
                })
            }
        }
        if ended {
            continue;
        }
        let inputs: Vec<Term> = universe.representatives(x.frame.terms(), depth).iter().map(|(r, _)| r.clone()).collect();
        let mut chans = x.procs.channels();
        for c in y.procs.channels() {
            if !chans.contains(&c) {
                chans.push(c);
            }
        }
        chans.sort();
        let mut children = Vec::new();
        for c in chans {
            let mut cands = blocks_from(&x, &c, &inputs);
            for blk in blocks_from(&y, &c, &inputs) {
                if !cands.contains(&blk) {
                    cands.push(blk);
                }
            }
            for blk in cands {
                let nx = compressed_step(&x, &blk);
                let ny = compressed_step(&y, &blk);
                let mut tr2 = tr.clone();
                let proper = blk.proper;
                tr2.push(blk);
                match (nx, ny) {
                    (Some(nx), Some(ny)) => children.push((tr2, nx, ny, !proper)),
                    (None, None) => {}
                    (l, _) => {
                        return ConcreteVerdict::Witness(ConcreteWitness {
                            trace: flatten(&tr2),
                            side: if l.is_some() { Side::Left } else { Side::Right },
                            statics: None,
                        })
                    }
                }
            }
        }
        stack.extend(children.into_iter().rev());
    }
    ConcreteVerdict::Equivalent
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FactorError {
    #[error("the first action on channel {0} is an output")]
    OutputFirst(Channel),
}

/// Splits an observable trace into proper blocks followed by improper
/// blocks, reordering only independent actions.
pub fn factor_trace(tr: &[Action]) -> Result<(Vec<Block>, Vec<Block>), FactorError> {
    let mut rest = obs(tr);
    let mut seen: Vec<Channel> = Vec::new();
    for a in &rest {
        let c = a.channel().expect("observable").clone();
        if !seen.contains(&c) {
            if !a.is_input() {
                return Err(FactorError::OutputFirst(c));
            }
            seen.push(c);
        }
    }
    let mut proper = Vec::new();
    loop {
        let Some(first_out) = rest.iter().position(|a| !a.is_input()) else { break };
        let c = rest[first_out].channel().unwrap().clone();
        let mut take = vec![false; rest.len()];
        let mut inputs = Vec::new();
        for (i, a) in rest[..first_out].iter().enumerate() {
            if a.channel() == Some(&c) {
                take[i] = true;
                if let Action::In(_, m) = a {
                    inputs.push(m.clone());
                }
            }
        }
        let mut outputs = Vec::new();
        for (i, a) in rest.iter().enumerate().skip(first_out) {
            if a.channel() != Some(&c) {
                continue;
            }
            match a {
                Action::Out(_, w) => {
                    take[i] = true;
                    outputs.push(*w);
                }
                _ => break,
            }
        }
        proper.push(Block {
            chan: c,
            inputs,
            outputs,
            proper: true,
        });
        rest = rest.into_iter().zip(take).filter(|(_, t)| !t).map(|(a, _)| a).collect();
    }
    let mut improper: Vec<Block> = Vec::new();
    for a in rest {
        let Action::In(c, m) = a else { unreachable!() };
        match improper.iter_mut().find(|b| b.chan == c) {
            Some(b) => b.inputs.push(m),
            None => improper.push(Block {
                chan: c,
                inputs: vec![m],
                outputs: Vec::new(),
                proper: false,
            }),
        }
    }
    Ok((proper, improper))
}

/// Replays a block sequence in the concrete semantics.
pub fn replay_blocks(a: &ExtendedProcess, bs: &[Block]) -> Option<ExtendedProcess> {
    replay(a, &flatten(bs))
}

/// Checks that `tr` can be cut into maximal blocks the compressed semantics
/// accepts, returning the final compressed state.
pub fn replay_compressed(a: &ExtendedProcess, bs: &[Block]) -> Option<ExtendedProcess> {
    let mut cur = a.clone();
    for (i, b) in bs.iter().enumerate() {
        if !b.proper && i + 1 != bs.len() {
            return None;
        }
        cur = compressed_step(&cur, b)?;
    }
    Some(cur)
}

/// Concrete single steps are still available for mixing block-level and
/// action-level checks in tests.
pub fn concrete_successor(a: &ExtendedProcess, act: &Action) -> Option<ExtendedProcess> {
    step(a, act).into_iter().next().map(|s| tau_close(&s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::channel;

    fn n(x: &str) -> Term {
        Term::name(x)
    }

    fn h(i: u32) -> Term {
        Term::Handle(i)
    }

    fn phi0() -> Frame {
        Frame::from_terms(vec![Term::pk(n("ska'")), Term::pk(n("ska")), Term::pk(n("skb"))])
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

    fn attack() -> Term {
        Term::aenc(Term::pair(h(1), h(1)), h(2))
    }

    #[test]
    fn focused_runs_of_q0() {
        let blk = Block {
            chan: channel("cB"),
            inputs: vec![attack()],
            outputs: vec![3],
            proper: true,
        };
        let (p, f) = run_block(&q0(Term::pk(n("ska"))), &phi0(), &blk).unwrap();
        assert_eq!(p, Some(Proc::Null));
        assert_eq!(f.len(), 4);
        let imp = Block {
            chan: channel("cB"),
            inputs: vec![attack()],
            outputs: vec![],
            proper: false,
        };
        let (p, f) = run_block(&q0(Term::pk(n("ska'"))), &phi0(), &imp).unwrap();
        assert_eq!(p, None);
        assert_eq!(f, phi0());
        let out_only = Proc::output("c", n("a"), Proc::Null);
        let b = Block {
            chan: channel("c"),
            inputs: vec![],
            outputs: vec![0],
            proper: true,
        };
        assert!(run_block(&out_only, &Frame::new(), &b).is_none());
    }

    #[test]
    fn failure_empties_state() {
        let s = ExtendedProcess::new(
            SimpleProcess::new(vec![q0(Term::pk(n("ska'"))), Proc::input("cA", "z", Proc::Null)]).unwrap(),
            phi0(),
        );
        let imp = Block {
            chan: channel("cB"),
            inputs: vec![attack()],
            outputs: vec![],
            proper: false,
        };
        let after = compressed_step(&s, &imp).unwrap();
        assert!(after.procs.is_empty());
        let any = Block {
            chan: channel("cA"),
            inputs: vec![h(0)],
            outputs: vec![],
            proper: false,
        };
        assert!(compressed_step(&after, &any).is_none());
    }

    #[test]
    fn single_input_only_as_improper_tail() {
        let u = Universe::new(&[std::sync::Arc::from("ok")]);
        let a = ExtendedProcess::new(SimpleProcess::new(vec![Proc::input("c", "x", Proc::Null)]).unwrap(), Frame::new());
        let all = compressed_explore(&a, &u, 1);
        assert_eq!(all.len(), 2);
        assert!(!all[1].0[0].proper);
    }

    #[test]
    fn factor_examples() {
        let m = Term::constant("ok");
        let tr = vec![
            Action::In(channel("c"), m.clone()),
            Action::In(channel("d"), m.clone()),
            Action::Out(channel("c"), 0),
        ];
        let (io, i) = factor_trace(&tr).unwrap();
        assert_eq!(blocks_text(&io), "io_c[ok;w0]");
        assert_eq!(blocks_text(&i), "io_d[ok;]");
        let (io, i) = factor_trace(&tr[..2]).unwrap();
        assert!(io.is_empty());
        assert_eq!(i.len(), 2);
        assert!(factor_trace(&[Action::Out(channel("c"), 0)]).is_err());
    }
}
