//! Backward precondition operators and the backward-reachability least
//! fixpoint.

use crate::context::{Context, Edge};
use crate::model::ModeId;
use crate::par;
use crate::stateset::StateSet;
use crate::stats::Stats;
use crate::zone::Dbm;

/// States that reach `s` by letting time pass while satisfying their mode
/// invariant: per mode, `down(ζ ∩ μ) ∩ μ`.
pub fn time_bck(ctx: &Context, s: &StateSet) -> StateSet {
    let mut out = StateSet::none(ctx);
    for (q, z) in s.iter() {
        let inv = &ctx.invariants[q];
        let pre = z.intersect(inv).down().intersect(inv).extrapolate(ctx.ceiling);
        out.insert(q, pre);
    }
    out
}

/// Weakest precondition of transition `e`: states of its source mode that
/// satisfy the invariant and guard and land in `s` (within the target
/// invariant) after the resets.
pub fn xtion_bck(ctx: &Context, s: &StateSet, e: usize) -> StateSet {
    let edge = &ctx.edges[e];
    let mut out = StateSet::none(ctx);
    for z in s.zones(edge.target) {
        out.insert(edge.source, edge_pre(ctx, edge, z));
    }
    out
}

fn edge_pre(ctx: &Context, edge: &Edge, z: &Dbm) -> Dbm {
    z.intersect(&ctx.invariants[edge.target])
        .reset_pre(&edge.resets)
        .intersect(&edge.guard)
        .intersect(&ctx.invariants[edge.source])
        .extrapolate(ctx.ceiling)
}

/// States of `z1` that reach `zf` by a single delay during which every
/// intermediate state lies in `z1`. Both zones must already satisfy the
/// mode invariant. The delay either ends inside `zf` having stayed in `z1`
/// up to that instant, or leaves `z1` from a last point from which `zf` is
/// entered immediately.
fn delay_into(z1: &Dbm, zf: &Dbm) -> [Dbm; 2] {
    let arrive = z1.intersect(&zf.intersect(&z1.left_limit()).down());
    let handoff = z1.intersect(&z1.intersect(&zf.right_limit()).down());
    [arrive, handoff]
}

/// Delay predecessors of `s2` through `s1`: states of `s1` that reach `s2`
/// by time passage with every intermediate state in `s1`, all within the
/// mode invariant.
pub fn time_until(ctx: &Context, s1: &StateSet, s2: &StateSet) -> StateSet {
    let s1 = s1.intersect(&StateSet::invariants(ctx));
    let mut out = StateSet::none(ctx);
    for (q, zf) in s2.iter() {
        let zf = zf.intersect(&ctx.invariants[q]);
        for z1 in s1.zones(q) {
            for piece in delay_into(z1, &zf) {
                out.insert(q, piece.extrapolate(ctx.ceiling));
            }
        }
    }
    out
}

/// How a zone entered a backward fixpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Part of the target set.
    Target,
    /// Delay predecessor of the parent.
    Delay,
    /// Predecessor of the parent through the indexed transition.
    Transition(usize),
}

/// A zone added to a backward fixpoint, with the zone it was derived from.
#[derive(Clone, Debug)]
pub struct TraceNode {
    pub mode: ModeId,
    pub zone: Dbm,
    pub parent: Option<usize>,
    pub step: Step,
}

/// One-step predecessors of `(q, z)` that lie in `s1`: delay predecessors
/// within `s1_inv` (= `s1` ∩ invariants) and transition predecessors.
pub fn predecessors(
    ctx: &Context,
    s1: &StateSet,
    s1_inv: &StateSet,
    q: ModeId,
    z: &Dbm,
) -> Vec<(ModeId, Dbm, Step)> {
    let mut out = Vec::new();
    let zf = z.intersect(&ctx.invariants[q]);
    if zf.is_empty() {
        return out;
    }
    for z1 in s1_inv.zones(q) {
        for piece in delay_into(z1, &zf) {
            if !piece.is_empty() {
                out.push((q, piece.extrapolate(ctx.ceiling), Step::Delay));
            }
        }
    }
    for (e, edge) in ctx.edges.iter().enumerate() {
        if edge.target != q {
            continue;
        }
        let pre = edge_pre(ctx, edge, &zf);
        if pre.is_empty() {
            continue;
        }
        for z1 in s1.zones(edge.source) {
            let p = z1.intersect(&pre);
            if !p.is_empty() {
                out.push((edge.source, p, Step::Transition(e)));
            }
        }
    }
    out
}

/// `∃ s1 U s2` over the zone graph: the least set containing `s2` and
/// closed under delay and transition predecessors that stay in `s1`.
pub fn rch_bck(ctx: &Context, s1: &StateSet, s2: &StateSet, stats: &mut Stats) -> StateSet {
    run(ctx, s1, s2, stats, false).0
}

/// [`rch_bck`] that also returns every added zone with its parent link.
pub fn rch_bck_traced(
    ctx: &Context,
    s1: &StateSet,
    s2: &StateSet,
    stats: &mut Stats,
) -> (StateSet, Vec<TraceNode>) {
    run(ctx, s1, s2, stats, true)
}

fn run(
    ctx: &Context,
    s1: &StateSet,
    s2: &StateSet,
    stats: &mut Stats,
    traced: bool,
) -> (StateSet, Vec<TraceNode>) {
    let s1_inv = s1.intersect(&StateSet::invariants(ctx));
    let mut result = s2.clone();
    let mut trace = Vec::new();
    // Frontier entries: (mode, zone, trace index).
    let mut frontier: Vec<(ModeId, Dbm, usize)> = Vec::new();
    for (q, z) in s2.iter() {
        if traced {
            trace.push(TraceNode { mode: q, zone: z.clone(), parent: None, step: Step::Target });
        }
        frontier.push((q, z.clone(), trace.len().wrapping_sub(1)));
    }
    while !frontier.is_empty() {
        stats.fixpoint_iterations += 1;
        let expanded = par::map(&frontier, |(q, z, _)| predecessors(ctx, s1, &s1_inv, *q, z));
        let mut next = Vec::new();
        for ((_, _, parent), preds) in frontier.iter().zip(expanded) {
            for (q, p, step) in preds {
                if result.covers(q, &p) {
                    continue;
                }
                result.insert(q, p.clone());
                if traced {
                    trace.push(TraceNode { mode: q, zone: p.clone(), parent: Some(*parent), step });
                }
                next.push((q, p, trace.len().wrapping_sub(1)));
            }
        }
        stats.observe_zones(result.zone_count());
        frontier = next;
    }
    (result, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;
    use crate::zone::Bound;

    fn single(inv: &str) -> Context {
        let a = parse_model(&format!("clocks x, y; mode q {{ inv {inv}; }} init q;")).unwrap();
        let mut c = Context::for_automaton(&a);
        c.ceiling = 5;
        c
    }

    fn eq(dim: usize, x: usize, c: i32) -> Dbm {
        Dbm::universe(dim).constrained(x, 0, Bound::le(c)).constrained(0, x, Bound::le(-c))
    }

    #[test]
    fn time_bck_examples() {
        let c = single("true");
        let s = StateSet::zone(&c, 0, eq(c.dim, 1, 3));
        let pre = time_bck(&c, &s);
        assert_eq!(pre.zones(0)[0].constraint_strings(&c.clock_names), vec!["x <= 3"]);

        let c = single("x <= 2");
        let s = StateSet::zone(&c, 0, eq(c.dim, 1, 3));
        assert!(time_bck(&c, &s).is_empty());

        let c = single("x <= 5");
        let s = StateSet::zone(&c, 0, eq(c.dim, 1, 3).intersect(&eq(c.dim, 2, 1)));
        let pre = time_bck(&c, &s);
        assert_eq!(
            pre.zones(0)[0].constraint_strings(&c.clock_names),
            vec!["x - y <= 2", "x <= 3", "x >= 2", "y - x <= -2", "y <= 1"]
        );
    }

    #[test]
    fn xtion_bck_examples() {
        let a = parse_model(
            "clocks x, y; mode p { inv true; } mode r { inv true; } init p;\n\
             trans p -> r { guard true; }\n\
             trans p -> r { guard x >= 2; reset x; }",
        )
        .unwrap();
        let mut c = Context::for_automaton(&a);
        c.ceiling = 5;
        assert!(xtion_bck(&c, &StateSet::none(&c), 0).is_empty());
        let target = Dbm::universe(c.dim).constrained(1, 2, Bound::le(1));
        let s = StateSet::zone(&c, 1, target.clone());
        assert_eq!(xtion_bck(&c, &s, 0), StateSet::zone(&c, 0, target));

        let z = eq(c.dim, 1, 0).constrained(0, 2, Bound::le(-3));
        let s = StateSet::zone(&c, 1, z);
        let pre = xtion_bck(&c, &s, 1);
        assert_eq!(pre.zones(0)[0].constraint_strings(&c.clock_names), vec!["x >= 2", "y >= 3"]);
    }

    #[test]
    fn rch_bck_basics() {
        let a = parse_model(
            "clocks x; mode idle { inv true; } mode busy { inv x <= 5; } init idle;\n\
             trans idle -> busy { guard x >= 2; reset x; }\n\
             trans busy -> idle { guard x >= 1; }",
        )
        .unwrap();
        let c = Context::for_automaton(&a);
        let mut st = Stats::new();
        let all = StateSet::all(&c);
        assert!(rch_bck(&c, &all, &StateSet::none(&c), &mut st).is_empty());
        let busy = StateSet::mode(&c, 1);
        let r = rch_bck(&c, &all, &busy, &mut st);
        assert!(r.subsumes(&busy));
        // Every idle valuation can wait until x >= 2 and switch.
        assert!(r.subsumes(&StateSet::mode(&c, 0)));
    }

    #[test]
    fn delay_must_stay_inside_the_path_set() {
        let c = single("true");
        // x <= 1 then x >= 3: the gap (1, 3) blocks the delay.
        let s1 = StateSet::zone(&c, 0, Dbm::universe(c.dim).constrained(1, 0, Bound::le(1)));
        let s2 = StateSet::zone(&c, 0, Dbm::universe(c.dim).constrained(0, 1, Bound::le(-3)));
        let mut st = Stats::new();
        assert!(rch_bck(&c, &s1, &s2, &mut st).set_equal(&s2));
        // Closing the gap with (1, 3) makes every state reach x >= 3.
        let gap = StateSet::zone(
            &c,
            0,
            Dbm::universe(c.dim).constrained(0, 1, Bound::lt(-1)).constrained(1, 0, Bound::lt(3)),
        );
        let r = rch_bck(&c, &s1.union(&gap), &s2, &mut st);
        assert!(r.set_equal(&StateSet::all(&c)));
    }
}
