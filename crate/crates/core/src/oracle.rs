//! Brute-force ground truth on the region graph, for small automata.
//!
//! Regions are built over every clock of a [`Context`], including the
//! auxiliary clock `z`, which here only serves to detect time divergence:
//! an extra "tick" edge resets `z` once it has reached 1, so a cycle of
//! the region graph that contains a tick lets at least one time unit pass
//! per lap.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::context::{atom_zone, Context};
use crate::model::{Formula, ModeId};
use crate::stateset::StateSet;

/// Largest number of automaton plus freeze clocks the oracle accepts.
pub const MAX_CLOCKS: usize = 3;
/// Largest constant the oracle accepts.
pub const MAX_CEILING: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} clocks exceed the oracle limit of {MAX_CLOCKS}")]
    TooManyClocks(usize),
    #[error("constant {0} exceeds the oracle limit of {MAX_CEILING}")]
    CeilingTooLarge(i32),
}

/// A clock region: integer parts (a value above the clock's ceiling means
/// "beyond the ceiling") and the ranks of the fractional parts (0 for an
/// integer value, equal ranks for equal fractions).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    ints: Vec<u8>,
    ranks: Vec<u8>,
}

impl Region {
    fn normalize(mut self, ceilings: &[u8]) -> Region {
        for i in 0..self.ints.len() {
            let c = ceilings[i];
            if self.ints[i] > c || (self.ints[i] == c && self.ranks[i] > 0) {
                self.ints[i] = c + 1;
                self.ranks[i] = 0;
            }
        }
        let positive: BTreeSet<u8> = self.ranks.iter().copied().filter(|&r| r > 0).collect();
        let relabel: HashMap<u8, u8> = positive.iter().enumerate().map(|(k, &r)| (r, k as u8 + 1)).collect();
        for r in &mut self.ranks {
            if *r > 0 {
                *r = relabel[r];
            }
        }
        self
    }

    fn above(&self, i: usize, ceilings: &[u8]) -> bool {
        self.ints[i] > ceilings[i]
    }

    /// The immediate time successor, or `None` when every clock is beyond
    /// its ceiling.
    fn time_successor(&self, ceilings: &[u8]) -> Option<Region> {
        let n = self.ints.len();
        let bounded: Vec<usize> = (0..n).filter(|&i| !self.above(i, ceilings)).collect();
        if bounded.is_empty() {
            return None;
        }
        let mut next = self.clone();
        let on_integer: Vec<usize> = bounded.iter().copied().filter(|&i| self.ranks[i] == 0).collect();
        if !on_integer.is_empty() {
            for &i in &bounded {
                if next.ranks[i] > 0 {
                    next.ranks[i] += 1;
                }
            }
            for &i in &on_integer {
                if next.ints[i] == ceilings[i] {
                    next.ints[i] = ceilings[i] + 1;
                } else {
                    next.ranks[i] = 1;
                }
            }
        } else {
            let top = bounded.iter().map(|&i| self.ranks[i]).max().unwrap_or(0);
            for &i in &bounded {
                if self.ranks[i] == top {
                    next.ints[i] += 1;
                    next.ranks[i] = 0;
                }
            }
        }
        Some(next.normalize(ceilings))
    }

    fn reset(&self, clocks: &[usize], ceilings: &[u8]) -> Region {
        let mut next = self.clone();
        for &k in clocks {
            next.ints[k] = 0;
            next.ranks[k] = 0;
        }
        next.normalize(ceilings)
    }

    /// Two points of the region in units of `1 / scale`; index 0 is the
    /// zero reference. They differ in fractional spacing and in the
    /// offsets of clocks beyond their ceilings.
    fn representatives(&self, ceilings: &[u8], scale: i64) -> [Vec<i64>; 2] {
        let n = self.ints.len();
        let k = self.ranks.iter().copied().max().unwrap_or(0) as i64;
        let mut a = vec![0; n + 1];
        let mut b = vec![0; n + 1];
        for i in 0..n {
            let int = self.ints[i] as i64 * scale;
            let r = self.ranks[i] as i64;
            if self.above(i, ceilings) {
                a[i + 1] = int;
                b[i + 1] = int + scale * (i as i64 + 1) / (n as i64 + 2);
            } else {
                a[i + 1] = int + scale * r / (k + 1);
                b[i + 1] = int + scale * r / (k + 2);
            }
        }
        [a, b]
    }

    /// Human-readable form, e.g. `x = 1, 0 < y < 1, frac order [y]`.
    pub fn describe(&self, names: &[String], ceilings: &[u8]) -> String {
        let mut parts = Vec::new();
        for (i, name) in names.iter().enumerate().take(self.ints.len()) {
            let v = self.ints[i];
            parts.push(if self.above(i, ceilings) {
                format!("{name} > {}", ceilings[i])
            } else if self.ranks[i] == 0 {
                format!("{name} = {v}")
            } else {
                format!("{v} < {name} < {} (rank {})", v + 1, self.ranks[i])
            });
        }
        parts.join(", ")
    }
}

/// Every region for the given per-clock ceilings, in a fixed order.
pub fn enumerate_regions(ceilings: &[u8]) -> Vec<Region> {
    let n = ceilings.len();
    let mut out = BTreeSet::new();
    let mut ints = vec![0u8; n];
    loop {
        let bounded = (0..n).filter(|&i| ints[i] <= ceilings[i]).count();
        let mut ranks = vec![0u8; n];
        loop {
            let r = Region { ints: ints.clone(), ranks: ranks.clone() }.normalize(ceilings);
            out.insert(r);
            // Next rank assignment, only varying clocks below their ceiling.
            let mut i = 0;
            while i < n {
                if ints[i] <= ceilings[i] && (ranks[i] as usize) < bounded {
                    ranks[i] += 1;
                    break;
                }
                ranks[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        let mut i = 0;
        while i < n {
            if ints[i] <= ceilings[i] {
                ints[i] += 1;
                break;
            }
            ints[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    out.into_iter().collect()
}

/// A state of the region graph that two symbolic sets classify
/// differently, or that a symbolic set splits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub mode: String,
    pub region: String,
    pub expected: bool,
    pub split: bool,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.split {
            write!(f, "{}: {} is split by the symbolic set", self.mode, self.region)
        } else {
            write!(f, "{}: {} expected {} by the oracle", self.mode, self.region, self.expected)
        }
    }
}

/// Node `q * regions + r` is region `r` in mode `q`.
pub struct RegionGraph {
    ctx: Context,
    ceilings: Vec<u8>,
    regions: Vec<Region>,
    scale: i64,
    reps: Vec<[Vec<i64>; 2]>,
    inv_ok: Vec<bool>,
    /// Time successor and discrete successors per node.
    succ: Vec<Vec<usize>>,
    /// Tick successor per node (reset of `z` once `z >= 1`).
    tick: Vec<Option<usize>>,
}

fn lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

impl RegionGraph {
    pub fn build(ctx: &Context) -> Result<RegionGraph, OracleError> {
        let visible = ctx.visible_clocks();
        if visible > MAX_CLOCKS {
            return Err(OracleError::TooManyClocks(visible));
        }
        if ctx.ceiling > MAX_CEILING {
            return Err(OracleError::CeilingTooLarge(ctx.ceiling));
        }
        let mut ceilings = vec![ctx.ceiling as u8; visible];
        ceilings.push(1);
        let regions = enumerate_regions(&ceilings);
        let index: HashMap<Region, usize> = regions.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let n = ceilings.len();
        let scale = (1..=(n as i64 + 2)).fold(2, lcm);
        let reps: Vec<[Vec<i64>; 2]> = regions.iter().map(|r| r.representatives(&ceilings, scale)).collect();
        let count = regions.len();
        let modes = ctx.modes();
        let mut inv_ok = vec![false; modes * count];
        for q in 0..modes {
            for r in 0..count {
                inv_ok[q * count + r] = ctx.invariants[q].contains_scaled(&reps[r][0], scale);
            }
        }
        let time: Vec<Option<usize>> = regions.iter().map(|r| r.time_successor(&ceilings).map(|s| index[&s])).collect();
        let z = n - 1;
        let tick_region: Vec<Option<usize>> = regions
            .iter()
            .map(|r| (r.ints[z] >= 1).then(|| index[&r.reset(&[z], &ceilings)]))
            .collect();
        let mut succ = vec![Vec::new(); modes * count];
        let mut tick = vec![None; modes * count];
        for q in 0..modes {
            for r in 0..count {
                let node = q * count + r;
                if !inv_ok[node] {
                    continue;
                }
                if let Some(s) = time[r] {
                    if inv_ok[q * count + s] {
                        succ[node].push(q * count + s);
                    }
                }
                if let Some(s) = tick_region[r] {
                    tick[node] = Some(q * count + s);
                }
                for e in ctx.edges.iter().filter(|e| e.source == q) {
                    if !e.guard.contains_scaled(&reps[r][0], scale) {
                        continue;
                    }
                    let resets: Vec<usize> = e.resets.iter().map(|&k| k - 1).collect();
                    let target = e.target * count + index[&regions[r].reset(&resets, &ceilings)];
                    if inv_ok[target] {
                        succ[node].push(target);
                    }
                }
                succ[node].sort_unstable();
                succ[node].dedup();
            }
        }
        Ok(RegionGraph { ctx: ctx.clone(), ceilings, regions, scale, reps, inv_ok, succ, tick })
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    fn mode_of(&self, node: usize) -> ModeId {
        node / self.regions.len()
    }

    fn region_of(&self, node: usize) -> usize {
        node % self.regions.len()
    }

    /// Nodes whose state satisfies the mode invariant.
    pub fn invariant_nodes(&self) -> Vec<bool> {
        self.inv_ok.clone()
    }

    pub fn all(&self) -> Vec<bool> {
        vec![true; self.node_count()]
    }

    /// Least set containing `y2` and every node of `y1` with a successor
    /// in the set.
    pub fn rch(&self, y1: &[bool], y2: &[bool]) -> Vec<bool> {
        let n = self.node_count();
        let mut preds = vec![Vec::new(); n];
        for (u, ss) in self.succ.iter().enumerate() {
            for &v in ss {
                preds[v].push(u);
            }
        }
        let mut out = y2.to_vec();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| out[v]).collect();
        while let Some(v) = queue.pop_front() {
            for &u in &preds[v] {
                if !out[u] && y1[u] {
                    out[u] = true;
                    queue.push_back(u);
                }
            }
        }
        out
    }

    /// Nodes of `eta1` lying in a strongly connected part of `eta1` that
    /// contains an `eta2` node and a tick.
    pub fn fair_cycles(&self, eta1: &[bool], eta2: &[bool]) -> Vec<bool> {
        let n = self.node_count();
        let mut g: DiGraph<usize, bool> = DiGraph::with_capacity(n, n);
        let ids: Vec<NodeIndex> = (0..n).map(|v| g.add_node(v)).collect();
        for u in (0..n).filter(|&u| eta1[u]) {
            for &v in self.succ[u].iter().filter(|&&v| eta1[v]) {
                g.add_edge(ids[u], ids[v], false);
            }
            if let Some(v) = self.tick[u].filter(|&v| eta1[v]) {
                g.add_edge(ids[u], ids[v], true);
            }
        }
        let mut out = vec![false; n];
        let mut component = vec![usize::MAX; n];
        let sccs = tarjan_scc(&g);
        for (c, scc) in sccs.iter().enumerate() {
            for &ix in scc {
                component[g[ix]] = c;
            }
        }
        for scc in &sccs {
            let members: Vec<usize> = scc.iter().map(|&ix| g[ix]).collect();
            if !members.iter().any(|&v| eta1[v] && eta2[v]) {
                continue;
            }
            let c = component[members[0]];
            let has_tick = members
                .iter()
                .any(|&u| eta1[u] && self.tick[u].is_some_and(|v| eta1[v] && component[v] == c));
            if has_tick {
                for v in members {
                    out[v] = true;
                }
            }
        }
        out
    }

    /// States that start a time-divergent run keeping `eta0` always,
    /// `eta1` eventually always and visiting `eta2` infinitely often.
    pub fn nzf(&self, eta0: &[bool], eta1: &[bool], eta2: &[bool]) -> Vec<bool> {
        let g = self.fair_cycles(eta1, eta2);
        let tail = self.rch(eta1, &g);
        self.rch(eta0, &tail)
    }

    /// `∃ y1 U y2` over time-divergent runs.
    pub fn exists_until(&self, y1: &[bool], y2: &[bool]) -> Vec<bool> {
        let all = self.all();
        let divergent = self.nzf(&all, &all, &all);
        let target: Vec<bool> = y2.iter().zip(&divergent).map(|(a, b)| *a && *b).collect();
        self.rch(y1, &target)
    }

    fn freeze(&self, clock: usize, body: &[bool]) -> Vec<bool> {
        let count = self.regions.len();
        (0..self.node_count())
            .map(|v| {
                let r = self.regions[self.region_of(v)].reset(&[clock - 1], &self.ceilings);
                let reset = self.mode_of(v) * count + self.regions.binary_search(&r).expect("region");
                body[reset]
            })
            .collect()
    }

    /// Region-level denotation of a formula.
    pub fn eval(&self, f: &Formula) -> Vec<bool> {
        let n = self.node_count();
        let all = self.all();
        match f {
            Formula::False => vec![false; n],
            Formula::Mode(q) => (0..n).map(|v| self.mode_of(v) == *q).collect(),
            Formula::Clock(a) => {
                let zone = atom_zone(self.ctx.dim, a);
                (0..n)
                    .map(|v| zone.contains_scaled(&self.reps[self.region_of(v)][0], self.scale))
                    .collect()
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.eval(a), self.eval(b));
                a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
            }
            Formula::Not(a) => self.eval(a).iter().map(|x| !x).collect(),
            Formula::Freeze { clock, body, .. } => self.freeze(*clock, &self.eval(body)),
            Formula::ExistsUntil(a, b) => self.exists_until(&self.eval(a), &self.eval(b)),
            Formula::ExistsAlways(a) => {
                let w = self.eval(a);
                self.nzf(&w, &w, &all)
            }
            Formula::ExistsInfinitelyOften(a) => self.nzf(&all, &all, &self.eval(a)),
            Formula::ExistsEventuallyAlways(a) => self.nzf(&all, &self.eval(a), &all),
        }
    }

    fn describe(&self, v: usize, expected: bool, split: bool) -> Mismatch {
        Mismatch {
            mode: self.ctx.automaton.modes[self.mode_of(v)].name.clone(),
            region: self.regions[self.region_of(v)].describe(&self.ctx.clock_names, &self.ceilings),
            expected,
            split,
        }
    }

    /// Region membership of a symbolic set; fails on a region the set
    /// only partly contains.
    pub fn classify(&self, s: &StateSet) -> Result<Vec<bool>, Mismatch> {
        (0..self.node_count())
            .map(|v| {
                let q = self.mode_of(v);
                let [a, b] = &self.reps[self.region_of(v)];
                let (in_a, in_b) = (s.contains_scaled(q, a, self.scale), s.contains_scaled(q, b, self.scale));
                if in_a != in_b {
                    Err(self.describe(v, in_a, true))
                } else {
                    Ok(in_a)
                }
            })
            .collect()
    }

    /// Checks that a symbolic set denotes exactly the given nodes.
    pub fn agrees(&self, s: &StateSet, expected: &[bool]) -> Result<(), Mismatch> {
        let got = self.classify(s)?;
        match (0..got.len()).find(|&v| got[v] != expected[v]) {
            Some(v) => Err(self.describe(v, expected[v], false)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    /// Region key of an exact point with denominator `den`, computed
    /// directly from integer parts and pairwise fraction comparisons.
    fn key(point: &[i64], den: i64, c: i64) -> Vec<i64> {
        let n = point.len();
        let mut k = Vec::new();
        for i in 0..n {
            let above = point[i] > c * den;
            k.push(if above { -1 } else { point[i] / den });
            k.push(if above { 0 } else { (point[i] % den == 0) as i64 });
            for j in 0..n {
                let bounded = point[i] <= c * den && point[j] <= c * den;
                k.push(if bounded { (point[i] % den).cmp(&(point[j] % den)) as i64 } else { 0 });
            }
        }
        k
    }

    fn brute_force_count(n: usize, c: i64) -> usize {
        let den = 12;
        let top = (c + 1) * den + den / 2;
        let mut keys = BTreeSet::new();
        let mut p = vec![0i64; n];
        loop {
            keys.insert(key(&p, den, c));
            let mut i = 0;
            while i < n {
                if p[i] < top {
                    p[i] += 1;
                    break;
                }
                p[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        keys.len()
    }

    #[test]
    fn region_counts() {
        assert_eq!(enumerate_regions(&[1]).len(), 4);
        assert_eq!(enumerate_regions(&[1, 1]).len(), brute_force_count(2, 1));
        assert_eq!(enumerate_regions(&[2, 2]).len(), brute_force_count(2, 2));
        assert_eq!(enumerate_regions(&[1, 1, 1]).len(), brute_force_count(3, 1));
    }

    #[test]
    fn representatives_identify_their_region() {
        let ceilings = [1, 1, 1];
        let regions = enumerate_regions(&ceilings);
        let mut keys = BTreeSet::new();
        for r in &regions {
            let [a, b] = r.representatives(&ceilings, 120);
            let k = key(&a[1..], 120, 1);
            assert_eq!(k, key(&b[1..], 120, 1), "{}", r.describe(&names(3), &ceilings));
            keys.insert(k);
        }
        assert_eq!(keys.len(), regions.len());
    }

    #[test]
    fn time_successors_walk_one_clock() {
        let c = [1];
        let mut r = enumerate_regions(&c)[0].clone();
        let mut seen = vec![r.describe(&names(1), &c)];
        while let Some(s) = r.time_successor(&c) {
            seen.push(s.describe(&names(1), &c));
            r = s;
        }
        assert_eq!(seen, vec!["c0 = 0", "0 < c0 < 1 (rank 1)", "c0 = 1", "c0 > 1"]);
    }

    #[test]
    fn invariant_prunes_nodes() {
        let a = parse_model("clocks x; mode q { inv x <= 0; } init q;").unwrap();
        let ctx = Context::for_automaton(&a);
        let g = RegionGraph::build(&ctx).unwrap();
        let x_regions: BTreeSet<u8> = (0..g.node_count())
            .filter(|&v| g.inv_ok[v])
            .map(|v| g.regions[g.region_of(v)].ints[0] * 10 + g.regions[g.region_of(v)].ranks[0])
            .collect();
        assert_eq!(x_regions, BTreeSet::from([0]));
    }

    #[test]
    fn bounded_mode_has_no_divergent_run() {
        let a = parse_model("clocks x; mode q { inv x <= 4; } init q;").unwrap();
        let g = RegionGraph::build(&Context::for_automaton(&a)).unwrap();
        assert!(g.eval(&Formula::eg(Formula::tt())).iter().all(|b| !b));
        let a = parse_model("clocks x; mode q { inv true; } init q;").unwrap();
        let g = RegionGraph::build(&Context::for_automaton(&a)).unwrap();
        assert!(g.eval(&Formula::eg(Formula::tt())).iter().all(|b| *b));
    }

    #[test]
    fn caps_are_enforced() {
        let a = parse_model("clocks a, b, c, d; mode q { inv true; } init q;").unwrap();
        assert_eq!(RegionGraph::build(&Context::for_automaton(&a)).err(), Some(OracleError::TooManyClocks(4)));
        let a = parse_model("clocks a; mode q { inv a <= 9; } init q;").unwrap();
        assert_eq!(RegionGraph::build(&Context::for_automaton(&a)).err(), Some(OracleError::CeilingTooLarge(9)));
    }
}
