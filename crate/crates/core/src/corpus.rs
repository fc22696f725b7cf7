//! Benchmark models, flattened from small networks of processes into a
//! single automaton, together with their properties.

use std::collections::{BTreeMap, VecDeque};

use crate::model::{
    parse_formula, ClockAtom, CmpOp, Formula, Label, Mode, ParseError, StatePredicate, TimedAutomaton, Transition,
};
use crate::zone::Clock;

/// One move of the global state: target, guard atoms and reset clocks.
struct Move<S> {
    target: S,
    guard: Vec<ClockAtom>,
    resets: Vec<Clock>,
}

fn mv<S>(target: S, guard: Vec<ClockAtom>, resets: Vec<Clock>) -> Move<S> {
    Move { target, guard, resets }
}

fn at(clock: Clock, op: CmpOp, constant: i32) -> ClockAtom {
    ClockAtom { clock, op, constant }
}

fn conj(atoms: &[ClockAtom]) -> StatePredicate {
    atoms
        .iter()
        .map(|a| StatePredicate::Clock(*a))
        .reduce(StatePredicate::and)
        .unwrap_or(StatePredicate::True)
}

type LabelFn<S> = Box<dyn Fn(&S) -> bool>;

/// Explores the global states reachable from `init` by discrete moves and
/// emits one mode per state. Modes are numbered in breadth-first order.
fn flatten<S: Ord + Clone>(
    clocks: Vec<String>,
    init: S,
    name: impl Fn(&S) -> String,
    invariant: impl Fn(&S) -> Vec<ClockAtom>,
    moves: impl Fn(&S) -> Vec<Move<S>>,
    labels: Vec<(String, LabelFn<S>)>,
) -> TimedAutomaton {
    let mut ids: BTreeMap<S, usize> = BTreeMap::new();
    let mut states = vec![init.clone()];
    ids.insert(init, 0);
    let mut queue = VecDeque::from([0]);
    let mut transitions = Vec::new();
    while let Some(i) = queue.pop_front() {
        for m in moves(&states[i].clone()) {
            let target = *ids.entry(m.target.clone()).or_insert_with(|| {
                states.push(m.target.clone());
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            transitions.push(Transition { source: i, target, guard: conj(&m.guard), resets: m.resets });
        }
    }
    let modes = states
        .iter()
        .map(|s| Mode { name: name(s), invariant: conj(&invariant(s)) })
        .collect();
    let labels = labels
        .iter()
        .map(|(n, holds)| Label {
            name: n.clone(),
            modes: (0..states.len()).filter(|&q| holds(&states[q])).collect(),
        })
        .filter(|l| !l.modes.is_empty())
        .collect();
    let initial = (1..=clocks.len()).fold(StatePredicate::Mode(0), |p, k| {
        StatePredicate::and(p, StatePredicate::Clock(at(k, CmpOp::Eq, 0)))
    });
    TimedAutomaton { clocks, modes, labels, initial, transitions }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Fl {
    Idle,
    Req,
    Ready,
    Critical,
}

const FISCHER_K: i32 = 1;

/// Fischer's protocol over `n` processes sharing `turn`. A process
/// requests when `turn = 0`, writes `turn := i` within `K`, and enters the
/// critical section after waiting more than `K` if `turn` is still `i`.
/// Process `i` uses clock `x<i>`.
///
/// With `buggy`, a process that lost the race clears `turn` and retries
/// instead of going idle, so processes can keep each other out (and, as a
/// side effect, mutual exclusion fails too).
pub fn fischer(n: usize, buggy: bool) -> TimedAutomaton {
    type S = (Vec<Fl>, usize);
    let clocks = (1..=n).map(|i| format!("x{i}")).collect();
    let name = |(ls, turn): &S| {
        let locs: String = ls
            .iter()
            .map(|l| match l {
                Fl::Idle => 'i',
                Fl::Req => 'q',
                Fl::Ready => 'r',
                Fl::Critical => 'c',
            })
            .collect();
        format!("{locs}_t{turn}")
    };
    let invariant = |(ls, _): &S| {
        ls.iter()
            .enumerate()
            .filter_map(|(i, l)| match l {
                Fl::Req => Some(at(i + 1, CmpOp::Le, FISCHER_K)),
                Fl::Ready => Some(at(i + 1, CmpOp::Le, 2 * FISCHER_K + 1)),
                _ => None,
            })
            .collect()
    };
    let moves = move |(ls, turn): &S| {
        let mut out = Vec::new();
        for i in 0..n {
            let id = i + 1;
            let with = |l: Fl, t: usize| {
                let mut ls = ls.clone();
                ls[i] = l;
                (ls, t)
            };
            match ls[i] {
                Fl::Idle if *turn == 0 => out.push(mv(with(Fl::Req, 0), vec![], vec![id])),
                Fl::Idle => {}
                Fl::Req => out.push(mv(with(Fl::Ready, id), vec![at(id, CmpOp::Le, FISCHER_K)], vec![id])),
                Fl::Ready if *turn == id => {
                    out.push(mv(with(Fl::Critical, id), vec![at(id, CmpOp::Gt, FISCHER_K)], vec![id]))
                }
                Fl::Ready if buggy => out.push(mv(with(Fl::Req, 0), vec![], vec![id])),
                Fl::Ready => out.push(mv(with(Fl::Idle, *turn), vec![], vec![id])),
                Fl::Critical => out.push(mv(with(Fl::Idle, 0), vec![], vec![id])),
            }
        }
        out
    };
    let mut labels: Vec<(String, LabelFn<S>)> = Vec::new();
    for i in 0..n {
        labels.push((format!("ready{}", i + 1), Box::new(move |(ls, _): &S| ls[i] == Fl::Ready)));
        labels.push((format!("critical{}", i + 1), Box::new(move |(ls, _): &S| ls[i] == Fl::Critical)));
    }
    labels.push(("critical".into(), Box::new(|(ls, _): &S| ls.contains(&Fl::Critical))));
    flatten(clocks, (vec![Fl::Idle; n], 0), name, invariant, moves, labels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Bus {
    Idle,
    Active,
    Collision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Snd {
    Wait,
    Transm,
    Retry,
}

/// Message transmission time.
pub const CSMA_LAMBDA: i32 = 808;
/// Signal propagation delay.
pub const CSMA_SIGMA: i32 = 26;

/// Single-bus CSMA/CD with `n` senders. Sender `i` uses clock `x<i>`; the
/// bus uses `y`. A sender that starts while another signal is still
/// propagating collides; collisions are detected within `sigma` and all
/// transmitting senders back off for less than `2 sigma`.
pub fn csma_cd(n: usize) -> TimedAutomaton {
    type S = (Bus, Vec<Snd>);
    let (lambda, sigma) = (CSMA_LAMBDA, CSMA_SIGMA);
    let y = n + 1;
    let clocks = (1..=n).map(|i| format!("x{i}")).chain(["y".to_string()]).collect();
    let name = |(bus, ss): &S| {
        let b = match bus {
            Bus::Idle => "idle",
            Bus::Active => "active",
            Bus::Collision => "coll",
        };
        let s: String = ss
            .iter()
            .map(|s| match s {
                Snd::Wait => 'w',
                Snd::Transm => 't',
                Snd::Retry => 'r',
            })
            .collect();
        format!("{b}_{s}")
    };
    let invariant = move |(bus, ss): &S| {
        let mut out: Vec<ClockAtom> = ss
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Snd::Transm => Some(at(i + 1, CmpOp::Le, lambda)),
                Snd::Retry => Some(at(i + 1, CmpOp::Lt, 2 * sigma)),
                Snd::Wait => None,
            })
            .collect();
        if *bus == Bus::Collision {
            out.push(at(y, CmpOp::Lt, sigma));
        }
        out
    };
    let moves = move |(bus, ss): &S| {
        let mut out = Vec::new();
        let with = |b: Bus, i: usize, s: Snd| {
            let mut ss = ss.clone();
            ss[i] = s;
            (b, ss)
        };
        for i in 0..n {
            let x = i + 1;
            let (start_guard, may_start) = match ss[i] {
                Snd::Wait => (vec![], true),
                Snd::Retry => (vec![at(x, CmpOp::Lt, 2 * sigma)], true),
                Snd::Transm => (vec![], false),
            };
            if may_start {
                match bus {
                    Bus::Idle => out.push(mv(with(Bus::Active, i, Snd::Transm), start_guard.clone(), vec![x, y])),
                    Bus::Active => {
                        let mut g = start_guard.clone();
                        g.push(at(y, CmpOp::Lt, sigma));
                        out.push(mv(with(Bus::Collision, i, Snd::Transm), g, vec![x, y]));
                        let mut g = start_guard.clone();
                        g.push(at(y, CmpOp::Ge, sigma));
                        out.push(mv(with(Bus::Active, i, Snd::Retry), g, vec![x]));
                    }
                    Bus::Collision => out.push(mv(with(Bus::Collision, i, Snd::Retry), start_guard, vec![x])),
                }
            }
            if ss[i] == Snd::Transm && *bus == Bus::Active {
                out.push(mv(with(Bus::Idle, i, Snd::Wait), vec![at(x, CmpOp::Eq, lambda)], vec![x, y]));
            }
        }
        if *bus == Bus::Collision {
            // Collision detected: every transmitting sender aborts.
            let mut next = ss.clone();
            let mut resets = vec![y];
            for (i, s) in next.iter_mut().enumerate() {
                if *s == Snd::Transm {
                    *s = Snd::Retry;
                    resets.push(i + 1);
                }
            }
            out.push(mv((Bus::Idle, next), vec![at(y, CmpOp::Lt, sigma)], resets));
        }
        out
    };
    let mut labels: Vec<(String, LabelFn<S>)> = Vec::new();
    for i in 0..n {
        labels.push((format!("transm{}", i + 1), Box::new(move |(_, ss): &S| ss[i] == Snd::Transm)));
        labels.push((format!("retry{}", i + 1), Box::new(move |(_, ss): &S| ss[i] == Snd::Retry)));
    }
    flatten(clocks, (Bus::Idle, vec![Snd::Wait; n]), name, invariant, moves, labels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Task {
    Idle,
    Pending,
    Run,
}

/// Priority scheduling in the style of PATHOS: `n` processes, process 1
/// has the highest priority. A process may request the CPU at any time,
/// at most once per period of `n` time units (clock `p<i>`), and runs for
/// at most one time unit (clock `c`). The CPU always goes to the pending
/// process of highest priority.
pub fn pathos(n: usize) -> TimedAutomaton {
    type S = Vec<Task>;
    let c = n + 1;
    let period = n as i32;
    let clocks = (1..=n).map(|i| format!("p{i}")).chain(["c".to_string()]).collect();
    let name = |ts: &S| {
        let s: String = ts
            .iter()
            .map(|t| match t {
                Task::Idle => 'i',
                Task::Pending => 'p',
                Task::Run => 'r',
            })
            .collect();
        format!("s_{s}")
    };
    let invariant = move |ts: &S| {
        if ts.contains(&Task::Run) {
            vec![at(c, CmpOp::Le, 1)]
        } else {
            vec![]
        }
    };
    let moves = move |ts: &S| {
        let mut out = Vec::new();
        let busy = ts.contains(&Task::Run);
        let top = ts.iter().position(|t| *t == Task::Pending);
        for i in 0..n {
            let with = |t: Task| {
                let mut ts = ts.clone();
                ts[i] = t;
                ts
            };
            match ts[i] {
                Task::Idle => out.push(mv(with(Task::Pending), vec![at(i + 1, CmpOp::Ge, period)], vec![i + 1])),
                Task::Pending if !busy && top == Some(i) => out.push(mv(with(Task::Run), vec![], vec![c])),
                Task::Pending => {}
                Task::Run => out.push(mv(with(Task::Idle), vec![], vec![])),
            }
        }
        out
    };
    let mut labels: Vec<(String, LabelFn<S>)> = Vec::new();
    for i in 0..n {
        labels.push((format!("run{}", i + 1), Box::new(move |ts: &S| ts[i] == Task::Run)));
    }
    let mut a = flatten(clocks, vec![Task::Idle; n], name, invariant, moves, labels);
    // Periods start elapsed so that every process may request at once.
    a.initial = (1..=c).fold(StatePredicate::Mode(0), |p, k| {
        let value = if k == c { 0 } else { period };
        StatePredicate::and(p, StatePredicate::Clock(at(k, CmpOp::Eq, value)))
    });
    a
}

/// Three unit-time modes where `m0` and `m1` share a cycle and `m2` cycles
/// alone. The zone search meets `m0`, `m1` and `m2` in that order, so
/// removing only the found zone wastes a level on `m1`, while removing its
/// backward closure does not.
pub fn pruning_instance() -> TimedAutomaton {
    crate::model::parse_model(
        "clocks x;\n\
         mode m0 { inv x <= 1; }\n\
         mode m1 { inv x <= 1; }\n\
         mode m2 { inv x <= 1; }\n\
         init m0 && x == 0;\n\
         trans m0 -> m1 { guard x >= 1; reset x; }\n\
         trans m1 -> m0 { guard x >= 1; reset x; }\n\
         trans m1 -> m1 { guard x >= 1; reset x; }\n\
         trans m2 -> m2 { guard x >= 1; reset x; }\n",
    )
    .expect("well-formed")
}

/// A benchmark model with its property.
#[derive(Clone, Debug)]
pub struct Benchmark {
    /// File stem, e.g. `fischer2`.
    pub name: String,
    pub automaton: TimedAutomaton,
    /// Property in the formula syntax.
    pub property: String,
}

impl Benchmark {
    pub fn formula(&self) -> Result<Formula, ParseError> {
        parse_formula(&self.property, &self.automaton)
    }
}

fn bench(name: String, automaton: TimedAutomaton, property: String) -> Benchmark {
    Benchmark { name, automaton, property }
}

/// Fischer bounded waiting: a ready process eventually enters.
pub fn fischer_bounded_waiting(n: usize) -> Benchmark {
    bench(format!("fischer{n}"), fischer(n, false), "AG (ready1 -> AF critical1)".into())
}

/// Buggy Fischer progress: a ready process implies someone enters.
pub fn fischer_buggy_progress(n: usize) -> Benchmark {
    bench(format!("fischer{n}_bug"), fischer(n, true), "AG (ready1 -> AF critical)".into())
}

/// CSMA/CD bounded waiting: a transmitting sender eventually gets
/// through the collision window.
pub fn csma_bounded_waiting(n: usize) -> Benchmark {
    bench(
        format!("csma{n}"),
        csma_cd(n),
        format!("AG (transm1 -> AF (transm1 && x1 >= {}))", 2 * CSMA_SIGMA),
    )
}

/// PATHOS: the lowest-priority process runs infinitely often.
pub fn pathos_fairness(n: usize) -> Benchmark {
    bench(format!("pathos{n}"), pathos(n), format!("AGF run{n}"))
}

/// The shipped benchmark matrix.
pub fn benchmarks() -> Vec<Benchmark> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push(fischer_bounded_waiting(n));
    }
    for n in 2..=3 {
        out.push(fischer_buggy_progress(n));
    }
    for n in 2..=3 {
        out.push(csma_bounded_waiting(n));
    }
    for n in 2..=4 {
        out.push(pathos_fairness(n));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, validate};

    #[test]
    fn models_are_valid_and_round_trip() {
        for b in benchmarks() {
            assert!(validate(&b.automaton).is_empty(), "{}", b.name);
            assert_eq!(parse_model(&b.automaton.to_source()).unwrap(), b.automaton, "{}", b.name);
            b.formula().unwrap();
        }
    }

    #[test]
    fn fischer_two_process_shape() {
        let a = fischer(2, false);
        assert_eq!(a.modes[0].name, "ii_t0");
        assert_eq!(a.clocks, ["x1", "x2"]);
        // Both processes in the critical section is only excluded by timing.
        assert!(a.mode_id("cc_t2").is_some());
        let mutex = parse_formula("AG !(critical1 && critical2)", &a).unwrap();
        let v = crate::eval::check(&a, &mutex, crate::eval::EvalConfig::exact()).unwrap();
        assert_eq!(v.outcome, crate::eval::Outcome::Satisfied);
        // Clearing `turn` while another process is inside lets a second
        // one in as well.
        let buggy = fischer(2, true);
        let v = crate::eval::check(&buggy, &mutex, crate::eval::EvalConfig::exact()).unwrap();
        assert_eq!(v.outcome, crate::eval::Outcome::Refuted);
    }

    #[test]
    fn csma_constants() {
        let a = csma_cd(2);
        assert_eq!(crate::model::max_constant(&a, &Formula::False), CSMA_LAMBDA);
    }
}
