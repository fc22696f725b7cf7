//! The clock space and compiled automaton shared by every symbolic
//! operation of one check.

use crate::model::{self, ClockAtom, CmpOp, Formula, ModeId, TimedAutomaton};
use crate::zone::{Bound, Clock, Dbm};

/// A transition with its guard compiled to a zone.
#[derive(Clone, Debug)]
pub struct Edge {
    pub source: ModeId,
    pub target: ModeId,
    pub guard: Dbm,
    pub resets: Vec<Clock>,
}

/// Fixed clock space of a check: index 0 is the zero reference, then the
/// automaton clocks, then the formula's freeze clocks, and last the
/// auxiliary cycle-time clock `z`.
#[derive(Clone, Debug)]
pub struct Context {
    pub automaton: TimedAutomaton,
    pub dim: usize,
    pub z: Clock,
    pub ceiling: i32,
    pub invariants: Vec<Dbm>,
    pub edges: Vec<Edge>,
    pub clock_names: Vec<String>,
}

impl Context {
    /// Context for checking `formula` on `automaton`.
    pub fn new(automaton: &TimedAutomaton, formula: &Formula) -> Context {
        let names = model::clock_names(automaton, formula);
        Context::build(automaton, names, model::max_constant(automaton, formula))
    }

    /// Context without freeze clocks, for set-level operations on the
    /// automaton alone.
    pub fn for_automaton(automaton: &TimedAutomaton) -> Context {
        Context::new(automaton, &Formula::tt())
    }

    fn build(automaton: &TimedAutomaton, mut clock_names: Vec<String>, ceiling: i32) -> Context {
        let dim = clock_names.len() + 2;
        let z = dim - 1;
        clock_names.push("z".to_string());
        let invariants = automaton
            .modes
            .iter()
            .map(|m| conjunctive_zone(dim, &m.invariant.conjuncts().expect("validated invariant")))
            .collect();
        let edges = automaton
            .transitions
            .iter()
            .map(|t| Edge {
                source: t.source,
                target: t.target,
                guard: conjunctive_zone(dim, &t.guard.conjuncts().expect("validated guard")),
                resets: t.resets.clone(),
            })
            .collect();
        Context {
            automaton: automaton.clone(),
            dim,
            z,
            ceiling,
            invariants,
            edges,
            clock_names,
        }
    }

    pub fn modes(&self) -> usize {
        self.automaton.modes.len()
    }

    /// Clocks seen by the model: everything except `z`.
    pub fn visible_clocks(&self) -> usize {
        self.dim - 2
    }
}

/// Zone of a single clock atom.
pub fn atom_zone(dim: usize, a: &ClockAtom) -> Dbm {
    let mut d = Dbm::universe(dim);
    constrain_atom(&mut d, a);
    d
}

/// Zone of a conjunction of clock atoms.
pub fn conjunctive_zone(dim: usize, atoms: &[ClockAtom]) -> Dbm {
    let mut d = Dbm::universe(dim);
    for a in atoms {
        constrain_atom(&mut d, a);
    }
    d
}

fn constrain_atom(d: &mut Dbm, a: &ClockAtom) {
    let (x, c) = (a.clock, a.constant);
    match a.op {
        CmpOp::Lt => d.constrain(x, 0, Bound::lt(c)),
        CmpOp::Le => d.constrain(x, 0, Bound::le(c)),
        CmpOp::Eq => {
            d.constrain(x, 0, Bound::le(c));
            d.constrain(0, x, Bound::le(-c));
        }
        CmpOp::Ge => d.constrain(0, x, Bound::le(-c)),
        CmpOp::Gt => d.constrain(0, x, Bound::lt(-c)),
    }
}
