//! Dependency constraints, block independence and Φ-minimality.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::compressed::Block;
use crate::frame::{instantiate, Frame, Universe};
use crate::process::Channel;
use crate::symbolic::{lambda_of, ConstraintSystem, SymBlock};
use crate::term::{apply, eval, normalize, AnyVar, Subst, Term, Var};

/// Total order on channels: listed channels first, in the given order, then
/// the others lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChannelOrder {
    pub listed: Vec<Channel>,
}

impl ChannelOrder {
    pub fn lexicographic() -> ChannelOrder {
        ChannelOrder::default()
    }

    pub fn rank(&self, c: &str) -> (usize, String) {
        match self.listed.iter().position(|x| &**x == c) {
            Some(i) => (i, String::new()),
            None => (self.listed.len(), c.to_string()),
        }
    }

    pub fn less(&self, a: &str, b: &str) -> bool {
        self.rank(a) < self.rank(b)
    }

    pub fn sort(&self, cs: &mut [Channel]) {
        cs.sort_by_key(|c| self.rank(c));
    }
}

impl FromStr for ChannelOrder {
    type Err = String;

    /// Parses `c1<c2<...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut listed: Vec<Channel> = Vec::new();
        for part in s.split('<') {
            let p = part.trim();
            if p.is_empty() {
                return Err(format!("empty channel in order '{s}'"));
            }
            if listed.iter().any(|c| &**c == p) {
                return Err(format!("channel '{p}' listed twice"));
            }
            listed.push(Channel::from(p));
        }
        Ok(ChannelOrder { listed })
    }
}

impl fmt::Display for ChannelOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.listed.iter().map(|c| &**c).collect();
        write!(f, "{}", names.join("<"))
    }
}

/// `X⃗ ◁ w⃗`: at least one of the recipes must need one of the handles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DepConstraint {
    pub vars: Vec<u32>,
    pub handles: Vec<u32>,
}

impl fmt::Display for DepConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.vars.iter().map(|x| format!("X{x}")).collect();
        let ws: Vec<String> = self.handles.iter().map(|w| format!("w{w}")).collect();
        write!(f, "[{}] <| {{{}}}", xs.join(","), ws.join(","))
    }
}

/// Handles of the blocks from the last rank `k` with `c ≺ c_k`, provided
/// every later block is on a channel smaller than `c`.
pub fn dep(tr: &[SymBlock], c: &str, order: &ChannelOrder) -> Vec<u32> {
    for k in (0..tr.len()).rev() {
        let ck = &tr[k].chan;
        if order.less(ck, c) {
            continue;
        }
        if order.less(c, ck) {
            let mut ws: Vec<u32> = tr[k..].iter().flat_map(|b| b.outputs.iter().copied()).collect();
            ws.sort_unstable();
            return ws;
        }
        return Vec::new();
    }
    Vec::new()
}

/// Constraints generated along `tr`, one per block with a non-empty `dep`.
/// Blocks without outputs generate nothing.
pub fn all_dep(tr: &[SymBlock], order: &ChannelOrder) -> Vec<DepConstraint> {
    let mut out = Vec::new();
    for i in 0..tr.len() {
        if tr[i].outputs.is_empty() {
            continue;
        }
        let ws = dep(&tr[..i], &tr[i].chan, order);
        if !ws.is_empty() {
            out.push(DepConstraint {
                vars: tr[i].inputs.clone(),
                handles: ws,
            });
        }
    }
    out
}

/// Checks every dependency constraint against all recipes of height at most
/// `depth` that compute the same message as the chosen one.
pub fn satisfies_deps(
    theta: &BTreeMap<u32, Term>,
    c: &ConstraintSystem,
    deps: &[DepConstraint],
    universe: &Universe,
    depth: usize,
) -> bool {
    let Some(lambda) = lambda_of(c, theta) else { return false };
    let mut sub = Subst::new();
    for (v, t) in &lambda {
        sub.insert(AnyVar::First(v.clone()), t.clone());
    }
    deps.iter().all(|d| {
        d.vars.iter().any(|x| {
            let Some(dom) = c.domain(*x) else { return false };
            let Some(target) = lambda.get(&Var::Of(*x)) else { return false };
            let prefix: Vec<Term> = c.frame[..dom].iter().map(|t| normalize(&apply(&sub, t))).collect();
            universe
                .valid(&prefix, depth)
                .iter()
                .filter(|r| r.values[0].as_ref() == Some(target))
                .all(|r| r.recipe.handles().iter().any(|h| d.handles.contains(h)))
        })
    })
}

fn recipes_handles(b: &Block) -> BTreeSet<u32> {
    b.inputs.iter().flat_map(|m| m.handles()).collect()
}

/// Distinct channels and no handle of one block used by the other.
pub fn block_independent(b1: &Block, b2: &Block) -> bool {
    if b1.chan == b2.chan {
        return false;
    }
    let h1 = recipes_handles(b1);
    let h2 = recipes_handles(b2);
    b1.outputs.iter().all(|w| !h2.contains(w)) && b2.outputs.iter().all(|w| !h1.contains(w))
}

type HandleSet = BTreeSet<u32>;

/// Inclusion-minimal handle sets of recipes of height at most `depth`
/// computing `target` on `frame`.
fn minimal_handle_sets(frame: &[Term], target: &Term, universe: &Universe, depth: usize) -> Vec<HandleSet> {
    let mut sets: Vec<HandleSet> = Vec::new();
    for r in universe.valid(frame, depth).iter() {
        if r.values[0].as_ref() == Some(target) {
            let s: HandleSet = r.recipe.handles().into_iter().collect();
            if !sets.contains(&s) {
                sets.push(s);
            }
        }
    }
    let all = sets.clone();
    sets.retain(|s| !all.iter().any(|t| t != s && t.is_subset(s)));
    sets
}

/// Whether `tr` is the lexicographically least channel sequence of its
/// class, where the class is generated by swapping adjacent independent
/// blocks and replacing recipes by others computing the same message.
pub fn phi_minimal(tr: &[Block], frame: &Frame, order: &ChannelOrder, universe: &Universe, depth: usize) -> bool {
    if tr.len() <= 1 {
        return true;
    }
    let terms = frame.terms();
    // Alternatives per input, as handle sets.
    let mut alts: Vec<Vec<Vec<HandleSet>>> = Vec::new();
    for b in tr {
        let mut per = Vec::new();
        for m in &b.inputs {
            let mut opts = vec![m.handles().into_iter().collect::<HandleSet>()];
            if let Some(v) = instantiate(terms, m).ok().and_then(|t| eval(&t)) {
                for s in minimal_handle_sets(terms, &v, universe, depth) {
                    if !opts.contains(&s) {
                        opts.push(s);
                    }
                }
            }
            per.push(opts);
        }
        alts.push(per);
    }
    let ranks: Vec<(usize, String)> = tr.iter().map(|b| order.rank(&b.chan)).collect();
    // State: block order and the chosen handle set for every input.
    type State = (Vec<usize>, Vec<Vec<HandleSet>>);
    let start: State = ((0..tr.len()).collect(), alts.iter().map(|per| per.iter().map(|o| o[0].clone()).collect()).collect());
    let plausible = |st: &State| {
        let mut seen: HashSet<u32> = HashSet::new();
        for &i in &st.0 {
            if st.1[i].iter().any(|s| s.iter().any(|h| (*h as usize) >= frame.len() - output_count(tr) && !seen.contains(h))) {
                return false;
            }
            seen.extend(tr[i].outputs.iter().copied());
        }
        true
    };
    let mut visited: HashSet<State> = HashSet::new();
    let mut queue = VecDeque::new();
    visited.insert(start.clone());
    queue.push_back(start);
    let original: Vec<&(usize, String)> = ranks.iter().collect();
    while let Some(st) = queue.pop_front() {
        let seq: Vec<&(usize, String)> = st.0.iter().map(|&i| &ranks[i]).collect();
        if seq < original {
            return false;
        }
        let mut next: Vec<State> = Vec::new();
        for p in 0..st.0.len() - 1 {
            let (i, j) = (st.0[p], st.0[p + 1]);
            let hi: HandleSet = st.1[i].iter().flatten().copied().collect();
            let hj: HandleSet = st.1[j].iter().flatten().copied().collect();
            if tr[i].chan != tr[j].chan
                && tr[i].outputs.iter().all(|w| !hj.contains(w))
                && tr[j].outputs.iter().all(|w| !hi.contains(w))
            {
                let mut o = st.0.clone();
                o.swap(p, p + 1);
                next.push((o, st.1.clone()));
            }
        }
        for i in 0..tr.len() {
            for k in 0..alts[i].len() {
                for s in &alts[i][k] {
                    if *s != st.1[i][k] {
                        let mut sets = st.1.clone();
                        sets[i][k] = s.clone();
                        next.push((st.0.clone(), sets));
                    }
                }
            }
        }
        for n in next {
            if plausible(&n) && visited.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    true
}

fn output_count(tr: &[Block]) -> usize {
    tr.iter().map(|b| b.outputs.len()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::channel;

    fn sb(c: &str, xs: &[u32], ws: &[u32]) -> SymBlock {
        SymBlock {
            chan: channel(c),
            inputs: xs.to_vec(),
            outputs: ws.to_vec(),
        }
    }

    fn blk(c: &str, ins: Vec<Term>, ws: &[u32]) -> Block {
        Block {
            chan: channel(c),
            inputs: ins,
            outputs: ws.to_vec(),
            proper: !ws.is_empty(),
        }
    }

    #[test]
    fn dependency_generation() {
        let o = ChannelOrder::lexicographic();
        let tr = vec![sb("c", &[1], &[10]), sb("a", &[2], &[11]), sb("b", &[3], &[12])];
        assert_eq!(dep(&tr[..1], "a", &o), vec![10]);
        assert_eq!(dep(&tr[..2], "b", &o), vec![10, 11]);
        assert!(dep(&[sb("a", &[1], &[1]), sb("b", &[2], &[2])], "c", &o).is_empty());
        assert_eq!(
            all_dep(&tr, &o),
            vec![
                DepConstraint { vars: vec![2], handles: vec![10] },
                DepConstraint { vars: vec![3], handles: vec![10, 11] },
            ]
        );
        assert!(all_dep(&[], &o).is_empty());
        assert!(all_dep(&[sb("a", &[1], &[1]), sb("b", &[2], &[2]), sb("c", &[3], &[3])], &o).is_empty());
    }

    #[test]
    fn order_parsing() {
        let o: ChannelOrder = "c2<c1".parse().unwrap();
        assert!(o.less("c2", "c1"));
        assert!(o.less("c1", "a"));
        assert!("a<<b".parse::<ChannelOrder>().is_err());
        assert_eq!(o.to_string(), "c2<c1");
    }

    #[test]
    fn independence_of_blocks() {
        let b1 = blk("c1", vec![Term::Handle(0)], &[1]);
        let b2 = blk("c2", vec![Term::Handle(0)], &[2]);
        assert!(block_independent(&b1, &b2));
        let b3 = blk("c1", vec![Term::Handle(2)], &[1]);
        assert!(!block_independent(&b3, &b2));
        assert!(!block_independent(&b1, &blk("c1", vec![Term::Handle(0)], &[3])));
    }

    #[test]
    fn swappable_trace_is_not_minimal() {
        let u = Universe::new(&[]);
        let frame = Frame::from_terms(vec![Term::name("n"), Term::name("m1"), Term::name("m2")]);
        let tr = vec![blk("c2", vec![Term::Handle(0)], &[2]), blk("c1", vec![Term::Handle(0)], &[1])];
        let o = ChannelOrder::lexicographic();
        assert!(!phi_minimal(&tr, &frame, &o, &u, 2));
        let swapped = vec![blk("c1", vec![Term::Handle(0)], &[1]), blk("c2", vec![Term::Handle(0)], &[2])];
        assert!(phi_minimal(&swapped, &Frame::from_terms(vec![Term::name("n"), Term::name("m1"), Term::name("m2")]), &o, &u, 2));
        assert!(phi_minimal(&tr[..1], &frame, &o, &u, 2));
    }

    #[test]
    fn recipe_change_enables_swap() {
        // w2 and w0 carry the same name, so the second block may use w0.
        let u = Universe::new(&[]);
        let n = Term::name("n");
        let frame = Frame::from_terms(vec![n.clone(), n.clone(), n.clone()]);
        let o = ChannelOrder::lexicographic();
        let tr = vec![blk("c2", vec![Term::Handle(0)], &[2]), blk("c1", vec![Term::Handle(2)], &[1])];
        assert!(!phi_minimal(&tr, &frame, &o, &u, 2));
        let mut cs = ConstraintSystem::new(vec![n.clone(), Term::Var(Var::Of(1)), Term::Var(Var::Of(2))]);
        cs.frame = vec![n.clone(), n.clone(), n.clone()];
        cs.constraints.push(crate::symbolic::Constraint::Deduce { dom: 1, x2: 2, x: Var::Of(2) });
        cs.constraints.push(crate::symbolic::Constraint::Deduce { dom: 3, x2: 1, x: Var::Of(1) });
        let deps = vec![DepConstraint { vars: vec![1], handles: vec![2] }];
        let theta: BTreeMap<u32, Term> = [(1, Term::Handle(2)), (2, Term::Handle(0))].into_iter().collect();
        assert!(!satisfies_deps(&theta, &cs, &deps, &u, 3));
        assert!(satisfies_deps(&theta, &cs, &[], &u, 3));
    }

    #[test]
    fn fresh_nonce_forces_dependency() {
        let u = Universe::new(&[]);
        let mut cs = ConstraintSystem::new(vec![Term::name("n"), Term::name("m1"), Term::name("u2")]);
        cs.constraints.push(crate::symbolic::Constraint::Deduce { dom: 3, x2: 1, x: Var::Of(1) });
        let theta: BTreeMap<u32, Term> = [(1, Term::Handle(2))].into_iter().collect();
        let deps = vec![DepConstraint { vars: vec![1], handles: vec![2] }];
        assert!(satisfies_deps(&theta, &cs, &deps, &u, 3));
    }
}
