//! Strategies and law bodies shared by the property suite and the
//! acceptance harness. Each law returns `Err` with a reason on violation.

use nzf_core::backward::{predecessors, rch_bck, rch_bck_traced, Step};
use nzf_core::eval::{EvalConfig, Evaluator};
use nzf_core::gen::{random_automaton, random_formula, Shape, SEED};
use nzf_core::model::{parse_model, ClockAtom, CmpOp, Formula, StatePredicate};
use nzf_core::nzf::{get_a_zone_w_dfs, nzf, NzfMode, NzfQuery};
use nzf_core::zone::{Bound, Clock, Dbm};
use nzf_core::{Context, StateSet, Stats};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Law = Result<(), TestCaseError>;

/// Zero reference plus two clocks.
pub const DIM: usize = 3;
pub const CEILING: i32 = 3;
/// Grid step `1 / SCALE` and extent: fine enough to separate every region
/// of two clocks, wide enough to reach every zone with constants up to
/// `CEILING`.
const SCALE: i64 = 3;
const EXTENT: i64 = 3 * CEILING as i64 + 1;

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

fn grid() -> impl Iterator<Item = [i64; DIM]> {
    let n = EXTENT * SCALE;
    (0..=n).flat_map(move |x| (0..=n).map(move |y| [0, x, y]))
}

fn constraint() -> impl Strategy<Value = (Clock, Clock, Bound)> {
    (0..DIM, 0..DIM, -CEILING..=CEILING, any::<bool>())
        .prop_filter("distinct clocks", |(i, j, _, _)| i != j)
        .prop_map(|(i, j, v, strict)| (i, j, Bound::new(v, strict)))
}

pub fn zone() -> impl Strategy<Value = Dbm> {
    prop::collection::vec(constraint(), 0..4).prop_map(|cs| Dbm::from_constraints(DIM, &cs))
}

pub fn federation() -> impl Strategy<Value = StateSet> {
    prop::collection::vec((0..2usize, zone()), 0..4).prop_map(|zs| {
        let mut s = StateSet::empty(2, DIM);
        for (q, z) in zs {
            s.insert(q, z);
        }
        s
    })
}

fn in_zones(zs: &[Dbm], p: &[i64]) -> bool {
    zs.iter().any(|z| z.contains_scaled(p, SCALE))
}

fn same_points(a: &StateSet, b: &StateSet) -> bool {
    (0..2).all(|q| grid().all(|p| a.contains_scaled(q, &p, SCALE) == b.contains_scaled(q, &p, SCALE)))
}

pub fn canonicalize_is_idempotent(z: Dbm) -> Law {
    prop_assert_eq!(z.clone().canonicalized(), z);
    Ok(())
}

pub fn inclusion_agrees_with_grid((a, b): (Dbm, Dbm)) -> Law {
    let witness = grid().any(|p| b.contains_scaled(&p, SCALE) && !a.contains_scaled(&p, SCALE));
    prop_assert_eq!(a.includes(&b), !witness);
    prop_assert_eq!(b.subtract(&a).iter().all(Dbm::is_empty), !witness);
    Ok(())
}

pub fn down_is_idempotent_and_extensive(z: Dbm) -> Law {
    let d = z.down();
    prop_assert_eq!(d.down(), d.clone());
    prop_assert!(d.includes(&z));
    Ok(())
}

pub fn complement_partitions_the_grid(z: Dbm) -> Law {
    let pieces = z.complement();
    for p in grid() {
        prop_assert!(z.contains_scaled(&p, SCALE) != in_zones(&pieces, &p));
    }
    Ok(())
}

pub fn subtraction_is_pointwise((a, b): (Dbm, Dbm)) -> Law {
    let pieces = a.subtract(&b);
    for p in grid() {
        let expected = a.contains_scaled(&p, SCALE) && !b.contains_scaled(&p, SCALE);
        prop_assert_eq!(in_zones(&pieces, &p), expected);
    }
    Ok(())
}

pub fn extrapolation_never_shrinks((z, c): (Dbm, i32)) -> Law {
    prop_assert!(z.extrapolate(c).includes(&z));
    Ok(())
}

pub fn elimination_commutes(z: Dbm) -> Law {
    prop_assert_eq!(z.fm_eliminate(&[1]).fm_eliminate(&[2]), z.fm_eliminate(&[2]).fm_eliminate(&[1]));
    Ok(())
}

pub fn boolean_laws((a, b, c): (StateSet, StateSet, StateSet)) -> Law {
    prop_assert!(a.union(&b).set_equal(&b.union(&a)));
    prop_assert!(a.intersect(&b).set_equal(&b.intersect(&a)));
    prop_assert!(a.union(&b).union(&c).set_equal(&a.union(&b.union(&c))));
    prop_assert!(a.intersect(&b).intersect(&c).set_equal(&a.intersect(&b.intersect(&c))));
    prop_assert!(a.union(&b).negate().set_equal(&a.negate().intersect(&b.negate())));
    prop_assert!(a.intersect(&b).negate().set_equal(&a.negate().union(&b.negate())));
    prop_assert!(same_points(&a.intersect(&b).negate(), &a.negate().union(&b.negate())));
    Ok(())
}

pub fn subsumption_is_an_order((a, b): (StateSet, StateSet)) -> Law {
    let j = a.union(&b);
    prop_assert!(j.subsumes(&a) && j.subsumes(&b));
    prop_assert!(a.subsumes(&a));
    let pointwise =
        (0..2).all(|q| grid().all(|p| !b.contains_scaled(q, &p, SCALE) || a.contains_scaled(q, &p, SCALE)));
    prop_assert_eq!(a.subsumes(&b), pointwise);
    if a.subsumes(&b) && b.subsumes(&a) {
        prop_assert!(a.set_equal(&b));
    }
    Ok(())
}

fn atom() -> impl Strategy<Value = ClockAtom> {
    let op = prop::sample::select(vec![CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt]);
    (1..DIM, op, 0..=CEILING).prop_map(|(clock, op, constant)| ClockAtom { clock, op, constant })
}

pub fn predicate() -> impl Strategy<Value = StatePredicate> {
    let leaf = prop_oneof![
        Just(StatePredicate::True),
        Just(StatePredicate::False),
        (0..2usize).prop_map(StatePredicate::Mode),
        atom().prop_map(StatePredicate::Clock),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(StatePredicate::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| StatePredicate::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| StatePredicate::or(a, b)),
        ]
    })
}

fn holds(p: &StatePredicate, q: usize, point: &[i64]) -> bool {
    match p {
        StatePredicate::True => true,
        StatePredicate::False => false,
        StatePredicate::Mode(m) => *m == q,
        StatePredicate::Clock(a) => a.op.holds(point[a.clock], a.constant as i64 * SCALE),
        StatePredicate::Not(a) => !holds(a, q, point),
        StatePredicate::And(a, b) => holds(a, q, point) && holds(b, q, point),
        StatePredicate::Or(a, b) => holds(a, q, point) || holds(b, q, point),
    }
}

pub fn from_predicate_is_pointwise(p: StatePredicate) -> Law {
    let a = parse_model("clocks x, y; mode p { inv true; } mode r { inv true; } init p;").unwrap();
    let ctx = Context::for_automaton(&a);
    let s = StateSet::from_predicate(&ctx, &p);
    for q in 0..2 {
        for [_, x, y] in grid() {
            // The auxiliary clock is unconstrained; probe it at zero.
            let point = [0, x, y, 0];
            prop_assert_eq!(s.contains_scaled(q, &point, SCALE), holds(&p, q, &point));
        }
    }
    Ok(())
}

/// A random automaton, its context and three random argument sets.
fn fixture(seed: u64) -> (Context, StateSet, StateSet, StateSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_automaton(&mut rng, Shape::default());
    let fs: Vec<Formula> = (0..3).map(|_| random_formula(&mut rng, &a, 2)).collect();
    let joined = fs.iter().cloned().reduce(Formula::or).unwrap();
    let ctx = Context::new(&a, &joined);
    let mut ev = Evaluator::new(&ctx, EvalConfig::exact());
    let sets: Vec<StateSet> = fs.iter().map(|f| ev.eval(f, 0)).collect();
    (ctx, sets[0].clone(), sets[1].clone(), sets[2].clone())
}

pub fn rch_bck_is_monotone_and_idempotent(seed: u64) -> Law {
    let (ctx, s1, s2, extra) = fixture(seed);
    let st = &mut Stats::new();
    let r = rch_bck(&ctx, &s1, &s2, st);
    prop_assert!(rch_bck(&ctx, &s1, &s2.union(&extra), st).subsumes(&r));
    prop_assert!(rch_bck(&ctx, &s1.union(&extra), &s2, st).subsumes(&r));
    prop_assert!(rch_bck(&ctx, &s1, &r, st).set_equal(&r));
    Ok(())
}

pub fn rch_bck_zone_steps_are_predecessor_steps(seed: u64) -> Law {
    let (ctx, s1, s2, _) = fixture(seed);
    let (r, trace) = rch_bck_traced(&ctx, &s1, &s2, &mut Stats::new());
    let s1_inv = s1.intersect(&StateSet::invariants(&ctx));
    for node in &trace {
        prop_assert!(r.covers(node.mode, &node.zone));
        match (node.parent, node.step) {
            (None, Step::Target) => prop_assert!(s2.covers(node.mode, &node.zone)),
            (Some(p), Step::Delay | Step::Transition(_)) => {
                let parent = &trace[p];
                let found = predecessors(&ctx, &s1, &s1_inv, parent.mode, &parent.zone)
                    .into_iter()
                    .any(|(m, z, step)| m == node.mode && step == node.step && z == node.zone);
                prop_assert!(found, "node is not a recorded predecessor of its parent");
            }
            _ => prop_assert!(false, "inconsistent trace node"),
        }
    }
    Ok(())
}

pub fn under_approximation_levels_are_monotone(seed: u64) -> Law {
    let (ctx, w, _, _) = fixture(seed);
    let all = StateSet::all(&ctx);
    let queries = [
        NzfQuery::new(w.clone(), w.clone(), all.clone()),
        NzfQuery::new(all.clone(), all.clone(), w.clone()),
        NzfQuery::new(all.clone(), w, all),
    ];
    for q in queries {
        for big_chunks in [false, true] {
            let mut prev = StateSet::none(&ctx);
            for level in 0..=3 {
                let s = nzf(&ctx, &q, NzfMode::Under { level, big_chunks }, &mut Stats::new());
                prop_assert!(s.subsumes(&prev));
                prev = s;
            }
        }
    }
    Ok(())
}

pub fn search_trees_certify_their_zone(seed: u64) -> Law {
    let (ctx, w, _, _) = fixture(seed);
    let eta2 = StateSet::all(&ctx);
    let z0 = Dbm::universe(ctx.dim).constrained(ctx.z, 0, Bound::LE_ZERO);
    let Some(found) = get_a_zone_w_dfs(&ctx, &w, &eta2, &mut Stats::new()) else {
        return Ok(());
    };
    let inv = found.eta1.intersect(&StateSet::invariants(&ctx));
    let mut reached = StateSet::none(&ctx);
    for node in &found.nodes {
        if let Some(p) = node.parent {
            let parent = &found.nodes[p];
            let mut steps = StateSet::none(&ctx);
            for (m, z, _) in predecessors(&ctx, &found.eta1, &inv, parent.mode, &parent.zone) {
                steps.insert(m, z);
            }
            prop_assert!(steps.covers(node.mode, &node.zone));
        }
        if node.mode == found.mode {
            reached.insert(node.mode, node.zone.clone());
        }
    }
    prop_assert!(reached.subsumes(&found.states.intersect_zone(&z0)));
    Ok(())
}
