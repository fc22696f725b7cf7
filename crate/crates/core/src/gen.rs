//! Seeded generators of small random automata and formulas.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{ClockAtom, CmpOp, Formula, Mode, StatePredicate, TimedAutomaton, Transition};

/// Seed of the published randomized suites.
pub const SEED: u64 = 0x7a0e_2d05;

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_modes: usize,
    pub max_clocks: usize,
    pub max_constant: i32,
    pub max_transitions: usize,
}

impl Default for Shape {
    fn default() -> Shape {
        Shape { max_modes: 3, max_clocks: 2, max_constant: 3, max_transitions: 4 }
    }
}

const OPS: [CmpOp; 5] = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt];

fn atom(rng: &mut impl Rng, clocks: usize, ops: &[CmpOp], max_constant: i32) -> ClockAtom {
    ClockAtom {
        clock: rng.gen_range(1..=clocks),
        op: *ops.choose(rng).expect("nonempty"),
        constant: rng.gen_range(0..=max_constant),
    }
}

fn conjunction(atoms: Vec<ClockAtom>) -> StatePredicate {
    atoms
        .into_iter()
        .map(StatePredicate::Clock)
        .reduce(StatePredicate::and)
        .unwrap_or(StatePredicate::True)
}

/// A random automaton: up to three modes, two clocks, four transitions and
/// constants up to three by default. Invariants are upper bounds only.
pub fn random_automaton(rng: &mut impl Rng, shape: Shape) -> TimedAutomaton {
    let modes = rng.gen_range(1..=shape.max_modes);
    let clocks = rng.gen_range(1..=shape.max_clocks);
    let clock_names: Vec<String> = ["x", "y", "w"].iter().take(clocks).map(|s| s.to_string()).collect();
    let modes: Vec<Mode> = (0..modes)
        .map(|q| {
            let n = rng.gen_range(0..=clocks);
            let atoms = (0..n).map(|_| atom(rng, clocks, &[CmpOp::Lt, CmpOp::Le], shape.max_constant)).collect();
            Mode { name: format!("m{q}"), invariant: conjunction(atoms) }
        })
        .collect();
    let transitions = (0..rng.gen_range(0..=shape.max_transitions))
        .map(|_| {
            let n = rng.gen_range(0..=2);
            let guard = conjunction((0..n).map(|_| atom(rng, clocks, &OPS, shape.max_constant)).collect());
            let resets = (1..=clocks).filter(|_| rng.gen_bool(0.5)).collect();
            Transition {
                source: rng.gen_range(0..modes.len()),
                target: rng.gen_range(0..modes.len()),
                guard,
                resets,
            }
        })
        .collect();
    let start = rng.gen_range(0..modes.len());
    let initial = (1..=clocks).fold(StatePredicate::Mode(start), |p, k| {
        StatePredicate::and(p, StatePredicate::Clock(ClockAtom { clock: k, op: CmpOp::Eq, constant: 0 }))
    });
    TimedAutomaton { clocks: clock_names, modes, labels: Vec::new(), initial, transitions }
}

/// A random formula of syntactic depth at most `depth`, using modes and
/// clocks of `a`, the derived operators, and occasionally one freeze clock.
pub fn random_formula(rng: &mut impl Rng, a: &TimedAutomaton, depth: usize) -> Formula {
    random_formula_with(rng, a, depth, false)
}

fn random_formula_with(rng: &mut impl Rng, a: &TimedAutomaton, depth: usize, frozen: bool) -> Formula {
    let freeze_clock = a.clocks.len() + 1;
    if depth == 0 || rng.gen_bool(0.2) {
        let clocks = a.clocks.len() + frozen as usize;
        return match rng.gen_range(0..4) {
            0 => Formula::tt(),
            1 => Formula::Mode(rng.gen_range(0..a.modes.len())),
            _ => Formula::Clock(atom(rng, clocks, &OPS, 3)),
        };
    }
    let d = depth - 1;
    macro_rules! sub {
        ($frozen:expr) => {
            random_formula_with(rng, a, d, $frozen)
        };
    }
    match rng.gen_range(0..13) {
        0 => Formula::not(sub!(frozen)),
        1 => Formula::or(sub!(frozen), sub!(frozen)),
        2 => Formula::and(sub!(frozen), sub!(frozen)),
        3 => Formula::exists_until(sub!(frozen), sub!(frozen)),
        4 => Formula::forall_until(sub!(frozen), sub!(frozen)),
        5 => Formula::ef(sub!(frozen)),
        6 => Formula::af(sub!(frozen)),
        7 => Formula::eg(sub!(frozen)),
        8 => Formula::ag(sub!(frozen)),
        9 => Formula::egf(sub!(frozen)),
        10 => Formula::efg(sub!(frozen)),
        11 => Formula::agf(sub!(frozen)),
        _ => Formula::Freeze { clock: freeze_clock, name: "u".into(), body: Box::new(sub!(true)) },
    }
}

/// `count` random automata, each paired with its own generator for
/// follow-up draws, from a fixed seed.
pub fn corpus(seed: u64, count: usize, shape: Shape) -> Vec<TimedAutomaton> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_automaton(&mut rng, shape)).collect()
}

/// Deterministic generator for the `index`-th item of a suite.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}
