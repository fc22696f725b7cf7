//! Non-Zeno fairness: the set of states from which some time-divergent run
//! keeps `eta0` always, `eta1` eventually always and `eta2` infinitely
//! often. Computed exactly by a nested fixpoint, or under-approximated by
//! enumerating fair zones one at a time.

use crate::backward::{predecessors, rch_bck, time_bck};
use crate::context::Context;
use crate::model::ModeId;
use crate::stateset::StateSet;
use crate::stats::Stats;
use crate::zone::{Bound, Dbm};

/// The three arguments of an NZF query. All sets must leave `z`
/// unconstrained.
#[derive(Clone, Debug)]
pub struct NzfQuery {
    pub eta0: StateSet,
    pub eta1: StateSet,
    pub eta2: StateSet,
}

impl NzfQuery {
    pub fn new(eta0: StateSet, eta1: StateSet, eta2: StateSet) -> NzfQuery {
        NzfQuery { eta0, eta1, eta2 }
    }

    /// `NZF(true, true, true)`: states that start some time-divergent run.
    pub fn divergence(ctx: &Context) -> NzfQuery {
        NzfQuery::new(StateSet::all(ctx), StateSet::all(ctx), StateSet::all(ctx))
    }
}

/// How the NZF of a query is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NzfMode {
    Exact,
    /// Successive under-approximation with the given number of zone-search
    /// iterations, optionally pruning whole backward closures.
    Under { level: usize, big_chunks: bool },
}

pub fn nzf(ctx: &Context, q: &NzfQuery, mode: NzfMode, stats: &mut Stats) -> StateSet {
    match mode {
        NzfMode::Exact => nzf_exact(ctx, q, stats),
        NzfMode::Under { level, big_chunks: false } => successive_uapprox(ctx, q, level, stats),
        NzfMode::Under { level, big_chunks: true } => successive_uapprox_big_chunks(ctx, q, level, stats),
    }
}

fn z_at_least_one(ctx: &Context) -> Dbm {
    Dbm::universe(ctx.dim).constrained(0, ctx.z, Bound::le(-1))
}

fn z_is_zero(ctx: &Context) -> Dbm {
    Dbm::universe(ctx.dim).constrained(ctx.z, 0, Bound::LE_ZERO)
}

/// Exact NZF: `G = gfp F. ∃z. (z = 0 ∧ eta2 ∧ rch_bck(eta1, z ≥ C ∧ F))`,
/// then `rch_bck(eta0, rch_bck(eta1, G))`.
pub fn nzf_exact(ctx: &Context, q: &NzfQuery, stats: &mut Stats) -> StateSet {
    let cycling = fair_cycle_states(ctx, &q.eta1, &q.eta2, stats);
    let tail = rch_bck(ctx, &q.eta1, &cycling, stats).forget_z(ctx);
    rch_bck(ctx, &q.eta0, &tail, stats).forget_z(ctx)
}

/// The greatest fixpoint of the exact formulation: states of `eta2` that
/// return to the fixpoint through `eta1` after at least `C` time units,
/// `C` being the ceiling. Any lap length of at least one gives the same
/// fixpoint; longer laps make each round discard more.
pub fn fair_cycle_states(ctx: &Context, eta1: &StateSet, eta2: &StateSet, stats: &mut Stats) -> StateSet {
    let lap = Dbm::universe(ctx.dim).constrained(0, ctx.z, Bound::le(-ctx.ceiling));
    let start = z_is_zero(ctx);
    let mut f = eta2.clone();
    loop {
        stats.fixpoint_iterations += 1;
        let back = rch_bck(ctx, eta1, &f.intersect_zone(&lap), stats);
        let next = back.intersect_zone(&start).intersect(eta2).forget_z(ctx);
        stats.observe_zones(next.zone_count());
        if next.set_equal(&f) {
            return next;
        }
        f = next;
    }
}

/// Zones of `s` with no upper bound on any clock that also lie inside
/// their mode invariant, so that waiting forever in the zone is a run.
pub fn zones_wo_upper_bounds(ctx: &Context, s: &StateSet) -> StateSet {
    let mut out = StateSet::none(ctx);
    for (q, zeta) in s.iter() {
        if !zeta.has_no_upper_bounds() {
            continue;
        }
        let single = StateSet::zone(ctx, q, zeta.clone());
        if time_bck(ctx, &single).subsumes(&single) {
            out.insert(q, zeta.clone());
        }
    }
    out
}

/// A node of the backward zone search.
#[derive(Clone, Debug)]
pub struct DfsNode {
    pub mode: ModeId,
    pub zone: Dbm,
    pub parent: Option<usize>,
    pub depth: usize,
}

/// Result of a successful zone search.
#[derive(Clone, Debug)]
pub struct FairZone {
    /// Mode and zone picked from `eta1 ∧ eta2`.
    pub mode: ModeId,
    pub zone: Dbm,
    /// States of `zone` shown to lie on fair time-divergent cycles. Equal
    /// to `zone` unless the search had to narrow it.
    pub states: StateSet,
    /// The final search tree. Roots are `states ∧ z ≥ 1`; every other node
    /// is a predecessor of its parent within `eta1`, and the nodes of
    /// `mode` cover `states ∧ z = 0`.
    pub nodes: Vec<DfsNode>,
    /// `eta1` as narrowed by the search when the nodes were produced.
    pub eta1: StateSet,
}

/// Candidate zones of `eta1 ∧ eta2` in search order: lowest mode first,
/// then the lexicographically smallest constraint listing.
fn candidates(ctx: &Context, eta1: &StateSet, eta2: &StateSet) -> Vec<(ModeId, Dbm)> {
    let both = eta1.intersect(eta2).intersect(&StateSet::invariants(ctx));
    let mut out: Vec<(ModeId, String, Dbm)> = both
        .iter()
        .map(|(q, z)| (q, z.constraint_strings(&ctx.clock_names).join(" && "), z.clone()))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    out.into_iter().map(|(q, _, z)| (q, z)).collect()
}

/// Finds a zone of `eta1 ∧ eta2` whose states start time-divergent runs
/// that stay in `eta1` and return to the zone infinitely often. Returns
/// `None` once `eta1 ∧ eta2` has no such zone.
pub fn get_a_zone_w_dfs(ctx: &Context, eta1: &StateSet, eta2: &StateSet, stats: &mut Stats) -> Option<FairZone> {
    let mut local = eta1.clone();
    loop {
        let (mode, zone) = candidates(ctx, &local, eta2).into_iter().next()?;
        stats.zones_enumerated += 1;
        let mut states = StateSet::zone(ctx, mode, zone.clone());
        loop {
            let (closed, nodes) = search(ctx, &local, mode, &states, stats);
            if closed {
                return Some(FairZone { mode, zone, states, nodes, eta1: local });
            }
            // Keep only the states that can return with one time unit
            // elapsed, and search again from those.
            let mut reached = StateSet::none(ctx);
            for n in nodes.iter().filter(|n| n.mode == mode) {
                reached.insert(mode, n.zone.intersect(&z_is_zero(ctx)));
            }
            let narrowed = states.intersect(&reached.forget_z(ctx));
            if narrowed.is_empty() {
                local = local.minus(&StateSet::zone(ctx, mode, zone));
                break;
            }
            states = narrowed;
        }
    }
}

/// Backward depth-first search from `states ∧ z ≥ 1` through `eta1`.
/// Returns whether the visited zones of `mode` came to cover
/// `states ∧ z = 0`, and the search tree.
fn search(ctx: &Context, eta1: &StateSet, mode: ModeId, states: &StateSet, stats: &mut Stats) -> (bool, Vec<DfsNode>) {
    let eta1_inv = eta1.intersect(&StateSet::invariants(ctx));
    let goal = states.intersect_zone(&z_is_zero(ctx));
    let lap = z_at_least_one(ctx);
    let mut visited = StateSet::none(ctx);
    let mut nodes = Vec::new();
    let mut stack = Vec::new();
    for root in states.zones(mode) {
        let z = root.intersect(&lap);
        if visited.insert(mode, z.clone()) {
            nodes.push(DfsNode { mode, zone: z, parent: None, depth: 0 });
            stack.push(nodes.len() - 1);
        }
    }
    while let Some(i) = stack.pop() {
        stats.dfs_nodes += 1;
        let (m, z, depth) = (nodes[i].mode, nodes[i].zone.clone(), nodes[i].depth);
        for (pm, p, _) in predecessors(ctx, eta1, &eta1_inv, m, &z) {
            if visited.covers(pm, &p) {
                continue;
            }
            visited.insert(pm, p.clone());
            nodes.push(DfsNode { mode: pm, zone: p, parent: Some(i), depth: depth + 1 });
            stack.push(nodes.len() - 1);
            if pm == mode && goal.zones(mode).iter().all(|g| visited.covers(mode, g)) {
                return (true, nodes);
            }
        }
    }
    stats.observe_zones(visited.zone_count());
    (false, nodes)
}

/// Successive under-approximation: the unbounded fair zones first, then up
/// to `level` zones found by the search, each contributing its backward
/// closure.
pub fn successive_uapprox(ctx: &Context, q: &NzfQuery, level: usize, stats: &mut Stats) -> StateSet {
    let mut eta1 = q.eta1.clone();
    let seed = zones_wo_upper_bounds(ctx, &eta1.intersect(&q.eta2));
    let mut eta = close(ctx, &q.eta0, &eta1, &seed, stats);
    eta1 = eta1.minus(&eta);
    let mut used = 0;
    let mut exhausted = false;
    for _ in 0..level {
        let Some(found) = get_a_zone_w_dfs(ctx, &eta1, &q.eta2, stats) else {
            exhausted = true;
            break;
        };
        used += 1;
        eta = eta.union(&close(ctx, &q.eta0, &eta1, &found.states, stats));
        eta1 = eta1.minus(&found.states);
        stats.observe_zones(eta.zone_count());
    }
    record_level(stats, used, exhausted);
    eta
}

/// Variant that removes the whole backward closure of each fair zone from
/// `eta1` instead of just the zone.
pub fn successive_uapprox_big_chunks(ctx: &Context, q: &NzfQuery, level: usize, stats: &mut Stats) -> StateSet {
    let mut eta1 = q.eta1.clone();
    let seed = zones_wo_upper_bounds(ctx, &eta1.intersect(&q.eta2));
    let chunk = rch_bck(ctx, &eta1, &seed, stats).forget_z(ctx);
    eta1 = eta1.minus(&chunk);
    let mut eta = rch_bck(ctx, &q.eta0, &chunk, stats).forget_z(ctx);
    let mut used = 0;
    let mut exhausted = false;
    for _ in 0..level {
        let Some(found) = get_a_zone_w_dfs(ctx, &eta1, &q.eta2, stats) else {
            exhausted = true;
            break;
        };
        used += 1;
        let chunk = rch_bck(ctx, &eta1, &found.states, stats).forget_z(ctx);
        eta1 = eta1.minus(&chunk);
        eta = eta.union(&rch_bck(ctx, &q.eta0, &chunk, stats).forget_z(ctx));
        stats.observe_zones(eta.zone_count());
    }
    record_level(stats, used, exhausted);
    eta
}

fn close(ctx: &Context, eta0: &StateSet, eta1: &StateSet, seed: &StateSet, stats: &mut Stats) -> StateSet {
    let tail = rch_bck(ctx, eta1, seed, stats).forget_z(ctx);
    rch_bck(ctx, eta0, &tail, stats).forget_z(ctx)
}

fn record_level(stats: &mut Stats, used: usize, exhausted: bool) {
    stats.level_used = stats.level_used.max(used);
    if !exhausted {
        stats.saturated = false;
    }
}
