//! Shared fixtures for the randomized suites.
#![allow(dead_code)]

pub mod laws;

use nzf_core::eval::{EvalConfig, Evaluator};
use nzf_core::gen::{corpus, random_formula, rng_for, Shape, SEED};
use nzf_core::model::{Formula, TimedAutomaton};
use nzf_core::nzf::NzfQuery;
use nzf_core::oracle::RegionGraph;
use nzf_core::{Context, StateSet};

pub fn tiny_automata(count: usize) -> Vec<TimedAutomaton> {
    corpus(SEED, count, Shape::default())
}

/// `count` random formulas of depth at most 3 for the `index`-th automaton.
pub fn formulas(index: usize, a: &TimedAutomaton, count: usize) -> Vec<Formula> {
    let mut rng = rng_for(SEED, index as u64);
    (0..count).map(|_| random_formula(&mut rng, a, 3)).collect()
}

/// Argument sets for NZF queries: every mode, its complement, and the
/// exact denotations of a few random formulas.
pub fn argument_sets(index: usize, a: &TimedAutomaton, ctx: &Context) -> Vec<StateSet> {
    let mut out = Vec::new();
    for q in 0..ctx.modes() {
        out.push(StateSet::mode(ctx, q));
        out.push(StateSet::mode(ctx, q).negate());
    }
    let mut ev = Evaluator::new(ctx, EvalConfig::exact());
    for f in formulas(index + 1000, a, 3) {
        out.push(ev.eval(&f, 0));
    }
    out
}

/// The three encodings `NZF(W, W, ⊤)`, `NZF(⊤, ⊤, W)` and `NZF(⊤, W, ⊤)`
/// for every argument set, plus the divergence query.
pub fn queries(index: usize, a: &TimedAutomaton, ctx: &Context) -> Vec<NzfQuery> {
    let all = StateSet::all(ctx);
    let mut out = vec![NzfQuery::divergence(ctx)];
    for w in argument_sets(index, a, ctx) {
        out.push(NzfQuery::new(w.clone(), w.clone(), all.clone()));
        out.push(NzfQuery::new(all.clone(), all.clone(), w.clone()));
        out.push(NzfQuery::new(all.clone(), w, all.clone()));
    }
    out
}

/// Context wide enough for every formula of the `index`-th automaton, so
/// that all queries share one clock space.
pub fn context_for(index: usize, a: &TimedAutomaton) -> Context {
    let fs = formulas(index + 1000, a, 3);
    let joined = fs.into_iter().reduce(Formula::or).unwrap_or(Formula::False);
    Context::new(a, &joined)
}

/// An upper bound on the number of fair zones the search can return: each
/// one removes at least one region-mode pair from `eta1`.
pub fn saturation_level(ctx: &Context) -> usize {
    RegionGraph::build(ctx).map(|g| g.node_count()).unwrap_or(usize::MAX)
}
