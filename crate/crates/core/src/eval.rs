//! Recursive evaluation of formulas to state sets, with an approximation
//! flag that is flipped under negation, and the top-level verdict.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::backward::rch_bck;
use crate::context::Context;
use crate::model::{Formula, TimedAutomaton};
use crate::nzf::{nzf, NzfMode, NzfQuery};
use crate::stateset::StateSet;
use crate::stats::Stats;

/// Approximation direction: `-1` under-approximates the denotation, `0` is
/// exact, `+1` over-approximates.
pub type Flag = i8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalConfig {
    pub flag: Flag,
    /// Zone-search iterations per under-approximated NZF query.
    pub level: usize,
    pub big_chunks: bool,
    /// Require time divergence after reaching the target of an until even
    /// when over-approximating.
    pub non_zeno: bool,
}

impl EvalConfig {
    pub fn exact() -> EvalConfig {
        EvalConfig { flag: 0, level: 0, big_chunks: false, non_zeno: true }
    }

    /// Top-level under-approximation of the negated property.
    pub fn refute(level: usize) -> EvalConfig {
        EvalConfig { flag: -1, level, big_chunks: false, non_zeno: true }
    }

    /// Top-level over-approximation of the negated property.
    pub fn prove() -> EvalConfig {
        EvalConfig { flag: 1, level: 0, big_chunks: false, non_zeno: true }
    }

    pub fn with_big_chunks(mut self, on: bool) -> EvalConfig {
        self.big_chunks = on;
        self
    }

    pub fn with_non_zeno(mut self, on: bool) -> EvalConfig {
        self.non_zeno = on;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("freeze clock `{0}` shadows an automaton clock")]
    Shadowing(String),
    #[error("formula refers to clock #{0}, which is outside the clock space")]
    UnknownClock(usize),
    #[error("formula refers to mode #{0}, which the automaton does not declare")]
    UnknownMode(usize),
}

/// Evaluates formulas over one context, memoizing results per
/// `(subformula, flag)`.
pub struct Evaluator<'a> {
    ctx: &'a Context,
    cfg: EvalConfig,
    memo: HashMap<(Formula, Flag), StateSet>,
    divergent: HashMap<Flag, StateSet>,
    pub stats: Stats,
}

impl<'a> Evaluator<'a> {
    pub fn new(ctx: &'a Context, cfg: EvalConfig) -> Evaluator<'a> {
        Evaluator {
            ctx,
            cfg,
            memo: HashMap::new(),
            divergent: HashMap::new(),
            stats: Stats::new(),
        }
    }

    fn nzf_mode(&self, flag: Flag) -> NzfMode {
        if flag < 0 {
            NzfMode::Under { level: self.cfg.level, big_chunks: self.cfg.big_chunks }
        } else {
            NzfMode::Exact
        }
    }

    fn nzf(&mut self, q: NzfQuery, flag: Flag) -> StateSet {
        let mode = self.nzf_mode(flag);
        nzf(self.ctx, &q, mode, &mut self.stats)
    }

    fn divergence(&mut self, flag: Flag) -> StateSet {
        if let Some(s) = self.divergent.get(&flag) {
            return s.clone();
        }
        let s = self.nzf(NzfQuery::divergence(self.ctx), flag);
        self.divergent.insert(flag, s.clone());
        s
    }

    /// Denotation of `f`, approximated in the direction of `flag`.
    pub fn eval(&mut self, f: &Formula, flag: Flag) -> StateSet {
        let key = (f.clone(), flag);
        if let Some(s) = self.memo.get(&key) {
            return s.clone();
        }
        let ctx = self.ctx;
        let all = || StateSet::all(ctx);
        let out = match f {
            Formula::False => StateSet::none(ctx),
            Formula::Mode(q) => StateSet::mode(ctx, *q),
            Formula::Clock(a) => {
                StateSet::from_predicate(ctx, &crate::model::StatePredicate::Clock(*a))
            }
            Formula::Or(a, b) => {
                let a = self.eval(a, flag);
                a.union(&self.eval(b, flag))
            }
            Formula::Not(a) => self.eval(a, -flag).negate(),
            Formula::Freeze { clock, body, .. } => {
                let x = *clock;
                self.eval(body, flag).map_zones(|z| z.reset_pre(&[x]))
            }
            Formula::ExistsUntil(a, b) => {
                let y1 = self.eval(a, flag);
                let mut y2 = self.eval(b, flag);
                // Dropping the divergence requirement only enlarges the
                // result, which is allowed when over-approximating.
                if !(flag > 0 && !self.cfg.non_zeno) {
                    y2 = y2.intersect(&self.divergence(flag));
                }
                rch_bck(ctx, &y1, &y2, &mut self.stats).forget_z(ctx)
            }
            Formula::ExistsAlways(a) => {
                let w = self.eval(a, flag);
                self.nzf(NzfQuery::new(w.clone(), w, all()), flag)
            }
            Formula::ExistsInfinitelyOften(a) => {
                let w = self.eval(a, flag);
                self.nzf(NzfQuery::new(all(), all(), w), flag)
            }
            Formula::ExistsEventuallyAlways(a) => {
                let w = self.eval(a, flag);
                self.nzf(NzfQuery::new(all(), w, all()), flag)
            }
        };
        self.stats.observe_zones(out.zone_count());
        self.memo.insert(key, out.clone());
        out
    }
}

/// Checks that every clock and mode mentioned by `f` exists in `ctx`.
pub fn check_formula(ctx: &Context, f: &Formula) -> Result<(), EvalError> {
    let automaton_clocks = ctx.automaton.clocks.len();
    match f {
        Formula::False => Ok(()),
        Formula::Mode(q) if *q >= ctx.modes() => Err(EvalError::UnknownMode(*q)),
        Formula::Mode(_) => Ok(()),
        Formula::Clock(a) if a.clock == 0 || a.clock >= ctx.z => Err(EvalError::UnknownClock(a.clock)),
        Formula::Clock(_) => Ok(()),
        Formula::Or(a, b) | Formula::ExistsUntil(a, b) => {
            check_formula(ctx, a)?;
            check_formula(ctx, b)
        }
        Formula::Not(a)
        | Formula::ExistsAlways(a)
        | Formula::ExistsInfinitelyOften(a)
        | Formula::ExistsEventuallyAlways(a) => check_formula(ctx, a),
        Formula::Freeze { clock, name, body } => {
            if *clock <= automaton_clocks {
                return Err(EvalError::Shadowing(name.clone()));
            }
            if *clock >= ctx.z {
                return Err(EvalError::UnknownClock(*clock));
            }
            check_formula(ctx, body)
        }
    }
}

/// Denotation of `f` at the configured top-level flag.
pub fn eval(a: &TimedAutomaton, f: &Formula, cfg: EvalConfig) -> Result<(StateSet, Stats), EvalError> {
    let ctx = Context::new(a, f);
    check_formula(&ctx, f)?;
    let mut ev = Evaluator::new(&ctx, cfg);
    let s = ev.eval(f, cfg.flag);
    Ok((s, ev.stats))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Satisfied,
    Refuted,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Satisfied => "SATISFIED",
            Outcome::Refuted => "REFUTED",
            Outcome::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Initial states that violate the property, when refuted.
    pub witness: Option<String>,
    pub stats: Stats,
}

/// Decides `a ⊨ f` from `I ∧ eval(¬f)`. With flag `-1` the violating set is
/// under-approximated, so only refutations are conclusive; with `+1` it is
/// over-approximated, so only proofs are.
pub fn check(a: &TimedAutomaton, f: &Formula, cfg: EvalConfig) -> Result<Verdict, EvalError> {
    let negated = Formula::not(f.clone());
    let ctx = Context::new(a, &negated);
    check_formula(&ctx, &negated)?;
    let mut ev = Evaluator::new(&ctx, cfg);
    let bad = StateSet::from_predicate(&ctx, &a.initial).intersect(&ev.eval(&negated, cfg.flag));
    let outcome = match (cfg.flag, bad.is_empty()) {
        (0, true) | (1, true) => Outcome::Satisfied,
        (0, false) | (-1, false) => Outcome::Refuted,
        _ => Outcome::Unknown,
    };
    let witness = (outcome == Outcome::Refuted).then(|| bad.dump(&ctx));
    Ok(Verdict { outcome, witness, stats: ev.stats })
}
