//! Timed automata, state predicates and TCTL∞ formulas.

mod parser;

use std::fmt;

pub use parser::{parse_formula, parse_model, ParseError, ParseErrorKind};

use crate::zone::Clock;

pub type ModeId = usize;

/// Comparison operator of a clock atom `x ~ c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// `x ~ c`. `clock` is the DBM index of `x` (automaton clocks start at 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClockAtom {
    pub clock: Clock,
    pub op: CmpOp,
    pub constant: i32,
}

/// Boolean combination of mode and clock atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StatePredicate {
    True,
    False,
    Mode(ModeId),
    Clock(ClockAtom),
    Not(Box<StatePredicate>),
    And(Box<StatePredicate>, Box<StatePredicate>),
    Or(Box<StatePredicate>, Box<StatePredicate>),
}

impl StatePredicate {
    pub fn and(a: StatePredicate, b: StatePredicate) -> StatePredicate {
        StatePredicate::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: StatePredicate, b: StatePredicate) -> StatePredicate {
        StatePredicate::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: StatePredicate) -> StatePredicate {
        StatePredicate::Not(Box::new(a))
    }

    /// The clock atoms of a conjunctive clock-only predicate, or `None` if
    /// the predicate is not of that shape.
    pub fn conjuncts(&self) -> Option<Vec<ClockAtom>> {
        let mut out = Vec::new();
        self.collect_conjuncts(&mut out).then_some(out)
    }

    fn collect_conjuncts(&self, out: &mut Vec<ClockAtom>) -> bool {
        match self {
            StatePredicate::True => true,
            StatePredicate::Clock(a) => {
                out.push(*a);
                true
            }
            StatePredicate::And(a, b) => a.collect_conjuncts(out) && b.collect_conjuncts(out),
            StatePredicate::Not(inner) => match inner.as_ref() {
                StatePredicate::Clock(a) if a.op != CmpOp::Eq => {
                    let op = match a.op {
                        CmpOp::Lt => CmpOp::Ge,
                        CmpOp::Le => CmpOp::Gt,
                        CmpOp::Ge => CmpOp::Lt,
                        CmpOp::Gt => CmpOp::Le,
                        CmpOp::Eq => unreachable!(),
                    };
                    out.push(ClockAtom { op, ..*a });
                    true
                }
                _ => false,
            },
            _ => false,
        }
    }

    fn max_constant(&self) -> i32 {
        match self {
            StatePredicate::Clock(a) => a.constant,
            StatePredicate::Not(a) => a.max_constant(),
            StatePredicate::And(a, b) | StatePredicate::Or(a, b) => {
                a.max_constant().max(b.max_constant())
            }
            _ => 0,
        }
    }

    fn visit_atoms(&self, f: &mut dyn FnMut(&StatePredicate)) {
        match self {
            StatePredicate::Not(a) => a.visit_atoms(f),
            StatePredicate::And(a, b) | StatePredicate::Or(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            atom => f(atom),
        }
    }

    pub fn display<'a>(&'a self, names: &'a Names<'a>) -> impl fmt::Display + 'a {
        PredicateDisplay { pred: self, names }
    }
}

/// Name tables used when printing predicates and formulas.
pub struct Names<'a> {
    pub modes: &'a [Mode],
    pub clocks: &'a [String],
}

impl Names<'_> {
    fn clock(&self, k: Clock) -> String {
        self.clocks
            .get(k.wrapping_sub(1))
            .cloned()
            .unwrap_or_else(|| format!("c{k}"))
    }

    fn mode(&self, q: ModeId) -> String {
        self.modes
            .get(q)
            .map(|m| m.name.clone())
            .unwrap_or_else(|| format!("mode#{q}"))
    }
}

struct PredicateDisplay<'a> {
    pred: &'a StatePredicate,
    names: &'a Names<'a>,
}

impl fmt::Display for PredicateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |p| PredicateDisplay { pred: p, names: self.names };
        match self.pred {
            StatePredicate::True => write!(f, "true"),
            StatePredicate::False => write!(f, "false"),
            StatePredicate::Mode(q) => write!(f, "{}", self.names.mode(*q)),
            StatePredicate::Clock(a) => write!(
                f,
                "{} {} {}",
                self.names.clock(a.clock),
                a.op.symbol(),
                a.constant
            ),
            StatePredicate::Not(a) => write!(f, "!({})", sub(a)),
            StatePredicate::And(a, b) => write_binary(f, "&&", a, b, self.names),
            StatePredicate::Or(a, b) => write!(f, "({} || {})", sub(a), sub(b)),
        }
    }
}

fn write_binary(
    f: &mut fmt::Formatter<'_>,
    op: &str,
    a: &StatePredicate,
    b: &StatePredicate,
    names: &Names<'_>,
) -> fmt::Result {
    let wrap = |p: &StatePredicate| matches!(p, StatePredicate::Or(..));
    let show = |p: &StatePredicate| PredicateDisplay { pred: p, names }.to_string();
    let left = if wrap(a) { format!("({})", show(a)) } else { show(a) };
    let right = if wrap(b) { format!("({})", show(b)) } else { show(b) };
    write!(f, "{left} {op} {right}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mode {
    pub name: String,
    pub invariant: StatePredicate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub source: ModeId,
    pub target: ModeId,
    pub guard: StatePredicate,
    pub resets: Vec<Clock>,
}

/// A named set of modes, usable as an atomic proposition in formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub name: String,
    pub modes: Vec<ModeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedAutomaton {
    pub clocks: Vec<String>,
    pub modes: Vec<Mode>,
    pub labels: Vec<Label>,
    pub initial: StatePredicate,
    pub transitions: Vec<Transition>,
}

impl TimedAutomaton {
    pub fn names(&self) -> Names<'_> {
        Names {
            modes: &self.modes,
            clocks: &self.clocks,
        }
    }

    pub fn mode_id(&self, name: &str) -> Option<ModeId> {
        self.modes.iter().position(|m| m.name == name)
    }

    pub fn clock_id(&self, name: &str) -> Option<Clock> {
        self.clocks.iter().position(|c| c == name).map(|i| i + 1)
    }

    fn max_constant(&self) -> i32 {
        let modes = self.modes.iter().map(|m| m.invariant.max_constant());
        let guards = self.transitions.iter().map(|t| t.guard.max_constant());
        modes
            .chain(guards)
            .chain(std::iter::once(self.initial.max_constant()))
            .max()
            .unwrap_or(0)
    }

    /// Pretty-prints the automaton in the input syntax.
    pub fn to_source(&self) -> String {
        let names = self.names();
        let mut out = String::new();
        out.push_str(&format!("clocks {};\n", self.clocks.join(", ")));
        for m in &self.modes {
            out.push_str(&format!("mode {} {{ inv {}; }}\n", m.name, m.invariant.display(&names)));
        }
        for l in &self.labels {
            let modes: Vec<&str> = l.modes.iter().map(|&q| self.modes[q].name.as_str()).collect();
            out.push_str(&format!("label {} = {};\n", l.name, modes.join(", ")));
        }
        out.push_str(&format!("init {};\n", self.initial.display(&names)));
        for t in &self.transitions {
            out.push_str(&format!(
                "trans {} -> {} {{ guard {};",
                self.modes[t.source].name,
                self.modes[t.target].name,
                t.guard.display(&names)
            ));
            if !t.resets.is_empty() {
                let resets: Vec<&str> = t.resets.iter().map(|&k| self.clocks[k - 1].as_str()).collect();
                out.push_str(&format!(" reset {};", resets.join(", ")));
            }
            out.push_str(" }\n");
        }
        out
    }
}

/// A static-check finding on an automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Checks referential integrity and the conjunctive shape of invariants
/// and guards.
pub fn validate(a: &TimedAutomaton) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut report = |message: String| out.push(Diagnostic { message });
    let clocks = a.clocks.len();
    let modes = a.modes.len();

    for (i, c) in a.clocks.iter().enumerate() {
        if a.clocks[..i].contains(c) {
            report(format!("clock `{c}` declared twice"));
        }
    }
    for (i, m) in a.modes.iter().enumerate() {
        if a.modes[..i].iter().any(|o| o.name == m.name) {
            report(format!("mode `{}` declared twice", m.name));
        }
    }
    if modes == 0 {
        report("automaton declares no modes".to_string());
    }

    let check_pred = |p: &StatePredicate, ctx: &str, clock_only: bool, report: &mut dyn FnMut(String)| {
        p.visit_atoms(&mut |atom| match atom {
            StatePredicate::Mode(q) if *q >= modes => report(format!("{ctx}: unknown mode #{q}")),
            StatePredicate::Mode(_) if clock_only => {
                report(format!("{ctx}: mode atoms are not allowed here"))
            }
            StatePredicate::Clock(c) if c.clock == 0 || c.clock > clocks => {
                report(format!("{ctx}: unknown clock #{}", c.clock))
            }
            StatePredicate::Clock(c) if c.constant < 0 => {
                report(format!("{ctx}: negative constant {}", c.constant))
            }
            _ => {}
        });
        if clock_only && p.conjuncts().is_none() {
            report(format!("{ctx}: must be a conjunction of clock atoms"));
        }
    };

    for m in &a.modes {
        check_pred(&m.invariant, &format!("invariant of `{}`", m.name), true, &mut report);
    }
    check_pred(&a.initial, "initial condition", false, &mut report);
    for (i, t) in a.transitions.iter().enumerate() {
        let ctx = format!("transition #{i}");
        if t.source >= modes {
            report(format!("{ctx}: unknown source mode #{}", t.source));
        }
        if t.target >= modes {
            report(format!("{ctx}: unknown target mode #{}", t.target));
        }
        check_pred(&t.guard, &format!("guard of {ctx}"), true, &mut report);
        for (j, &k) in t.resets.iter().enumerate() {
            if k == 0 || k > clocks {
                report(format!("{ctx}: reset of unknown clock #{k}"));
            } else if t.resets[..j].contains(&k) {
                report(format!("{ctx}: clock `{}` reset twice", a.clocks[k - 1]));
            }
        }
    }
    for l in &a.labels {
        for &q in &l.modes {
            if q >= modes {
                report(format!("label `{}`: unknown mode #{q}", l.name));
            }
        }
    }
    out
}

/// TCTL∞ formula in core form. Derived operators are expanded by the parser.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    False,
    Mode(ModeId),
    Clock(ClockAtom),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    /// `x. φ`: evaluate `φ` with a fresh clock `x` reading zero.
    Freeze {
        clock: Clock,
        name: String,
        body: Box<Formula>,
    },
    ExistsUntil(Box<Formula>, Box<Formula>),
    /// `∃□ φ`
    ExistsAlways(Box<Formula>),
    /// `∃□◇ φ`
    ExistsInfinitelyOften(Box<Formula>),
    /// `∃◇□ φ`
    ExistsEventuallyAlways(Box<Formula>),
}

impl Formula {
    pub fn tt() -> Formula {
        Formula::not(Formula::False)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn exists_until(a: Formula, b: Formula) -> Formula {
        Formula::ExistsUntil(Box::new(a), Box::new(b))
    }

    pub fn ef(f: Formula) -> Formula {
        Formula::exists_until(Formula::tt(), f)
    }

    pub fn ag(f: Formula) -> Formula {
        Formula::not(Formula::ef(Formula::not(f)))
    }

    pub fn eg(f: Formula) -> Formula {
        Formula::ExistsAlways(Box::new(f))
    }

    pub fn egf(f: Formula) -> Formula {
        Formula::ExistsInfinitelyOften(Box::new(f))
    }

    pub fn efg(f: Formula) -> Formula {
        Formula::ExistsEventuallyAlways(Box::new(f))
    }

    /// `∀ a U b := ¬((∃ ¬b U ¬(a ∨ b)) ∨ ∃□¬b)`.
    pub fn forall_until(a: Formula, b: Formula) -> Formula {
        let avoid = Formula::not(Formula::or(a, b.clone()));
        Formula::not(Formula::or(
            Formula::exists_until(Formula::not(b.clone()), avoid),
            Formula::eg(Formula::not(b)),
        ))
    }

    /// `∀◇ φ := ∀ true U φ`, with `¬(true ∨ φ)` simplified to `false`.
    pub fn af(f: Formula) -> Formula {
        Formula::not(Formula::or(
            Formula::exists_until(Formula::not(f.clone()), Formula::False),
            Formula::eg(Formula::not(f)),
        ))
    }

    /// `∀□◇ φ := ¬∃◇□¬φ`
    pub fn agf(f: Formula) -> Formula {
        Formula::not(Formula::efg(Formula::not(f)))
    }

    /// `∀◇□ φ := ¬∃□◇¬φ`
    pub fn afg(f: Formula) -> Formula {
        Formula::not(Formula::egf(Formula::not(f)))
    }

    pub fn max_constant(&self) -> i32 {
        match self {
            Formula::Clock(a) => a.constant,
            Formula::False | Formula::Mode(_) => 0,
            Formula::Or(a, b) | Formula::ExistsUntil(a, b) => a.max_constant().max(b.max_constant()),
            Formula::Not(a)
            | Formula::ExistsAlways(a)
            | Formula::ExistsInfinitelyOften(a)
            | Formula::ExistsEventuallyAlways(a) => a.max_constant(),
            Formula::Freeze { body, .. } => body.max_constant(),
        }
    }

    /// Largest clock index mentioned (atoms and freeze binders).
    pub fn max_clock(&self) -> Clock {
        match self {
            Formula::Clock(a) => a.clock,
            Formula::False | Formula::Mode(_) => 0,
            Formula::Or(a, b) | Formula::ExistsUntil(a, b) => a.max_clock().max(b.max_clock()),
            Formula::Not(a)
            | Formula::ExistsAlways(a)
            | Formula::ExistsInfinitelyOften(a)
            | Formula::ExistsEventuallyAlways(a) => a.max_clock(),
            Formula::Freeze { clock, body, .. } => (*clock).max(body.max_clock()),
        }
    }

    /// Names of the freeze clocks, indexed from the first non-automaton
    /// clock.
    pub fn freeze_clocks(&self, automaton_clocks: usize) -> Vec<String> {
        let count = self.max_clock().saturating_sub(automaton_clocks);
        let mut names: Vec<String> = (0..count).map(|i| format!("c{}", automaton_clocks + i + 1)).collect();
        self.collect_freeze_names(automaton_clocks, &mut names);
        names
    }

    fn collect_freeze_names(&self, base: usize, names: &mut Vec<String>) {
        match self {
            Formula::Freeze { clock, name, body } => {
                if *clock > base {
                    names[*clock - base - 1] = name.clone();
                }
                body.collect_freeze_names(base, names);
            }
            Formula::Or(a, b) | Formula::ExistsUntil(a, b) => {
                a.collect_freeze_names(base, names);
                b.collect_freeze_names(base, names);
            }
            Formula::Not(a)
            | Formula::ExistsAlways(a)
            | Formula::ExistsInfinitelyOften(a)
            | Formula::ExistsEventuallyAlways(a) => a.collect_freeze_names(base, names),
            _ => {}
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::False | Formula::Mode(_) | Formula::Clock(_) => 0,
            Formula::Or(a, b) | Formula::ExistsUntil(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Not(a)
            | Formula::ExistsAlways(a)
            | Formula::ExistsInfinitelyOften(a)
            | Formula::ExistsEventuallyAlways(a) => 1 + a.depth(),
            Formula::Freeze { body, .. } => 1 + body.depth(),
        }
    }

    pub fn display<'a>(&'a self, names: &'a Names<'a>) -> impl fmt::Display + 'a {
        FormulaDisplay { formula: self, names }
    }
}

struct FormulaDisplay<'a> {
    formula: &'a Formula,
    names: &'a Names<'a>,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |x| FormulaDisplay { formula: x, names: self.names };
        match self.formula {
            Formula::False => write!(f, "false"),
            Formula::Mode(q) => write!(f, "{}", self.names.mode(*q)),
            Formula::Clock(a) => {
                write!(f, "{} {} {}", self.names.clock(a.clock), a.op.symbol(), a.constant)
            }
            Formula::Or(a, b) => write!(f, "({} || {})", sub(a), sub(b)),
            Formula::Not(a) => write!(f, "!({})", sub(a)),
            Formula::Freeze { name, body, .. } => write!(f, "{name}. ({})", sub(body)),
            Formula::ExistsUntil(a, b) => write!(f, "E [{} U {}]", sub(a), sub(b)),
            Formula::ExistsAlways(a) => write!(f, "EG ({})", sub(a)),
            Formula::ExistsInfinitelyOften(a) => write!(f, "EGF ({})", sub(a)),
            Formula::ExistsEventuallyAlways(a) => write!(f, "EFG ({})", sub(a)),
        }
    }
}

/// `C_{A:φ}`: the largest integer constant in the automaton and formula,
/// floored at 1.
pub fn max_constant(a: &TimedAutomaton, f: &Formula) -> i32 {
    a.max_constant().max(f.max_constant()).max(1)
}

/// Clock names of the full clock space of a check: automaton clocks, then
/// the formula's freeze clocks.
pub fn clock_names(a: &TimedAutomaton, f: &Formula) -> Vec<String> {
    let mut names = a.clocks.clone();
    names.extend(f.freeze_clocks(a.clocks.len()));
    names
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_modes() -> TimedAutomaton {
        parse_model(
            "clocks x, y;\n\
             mode idle  { inv true; }\n\
             mode busy  { inv x <= 5; }\n\
             init idle && x == 0 && y == 0;\n\
             trans idle -> busy { guard x >= 2; reset x; }\n\
             trans busy -> idle { guard x >= 1; }\n",
        )
        .unwrap()
    }

    #[test]
    fn max_constant_examples() {
        let mut a = two_modes();
        a.modes[1].invariant = StatePredicate::True;
        a.transitions.iter_mut().for_each(|t| t.guard = StatePredicate::True);
        a.initial = StatePredicate::Mode(0);
        assert_eq!(max_constant(&a, &Formula::tt()), 1);

        let a = parse_model(
            "clocks x1; mode m { inv true; } init m; trans m -> m { guard x1 >= 52; reset x1; }",
        )
        .unwrap();
        assert_eq!(max_constant(&a, &Formula::tt()), 52);

        let a = parse_model(
            "clocks x; mode m { inv x <= 3; } init m; trans m -> m { guard x >= 5; }",
        )
        .unwrap();
        let f = parse_formula("EF x <= 7", &a).unwrap();
        assert_eq!(max_constant(&a, &f), 7);
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&two_modes()).is_empty());

        let mut a = two_modes();
        a.modes[1].invariant = StatePredicate::or(
            StatePredicate::Clock(ClockAtom { clock: 1, op: CmpOp::Le, constant: 1 }),
            StatePredicate::Clock(ClockAtom { clock: 2, op: CmpOp::Le, constant: 1 }),
        );
        let diags = validate(&a);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("conjunction"));

        let mut a = two_modes();
        a.transitions[0].target = 7;
        let diags = validate(&a);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("unknown target mode"));
    }

    #[test]
    fn conjuncts_of_negated_atoms() {
        let p = StatePredicate::not(StatePredicate::Clock(ClockAtom { clock: 1, op: CmpOp::Le, constant: 3 }));
        assert_eq!(
            p.conjuncts(),
            Some(vec![ClockAtom { clock: 1, op: CmpOp::Gt, constant: 3 }])
        );
        let eq = StatePredicate::not(StatePredicate::Clock(ClockAtom { clock: 1, op: CmpOp::Eq, constant: 3 }));
        assert_eq!(eq.conjuncts(), None);
    }

    #[test]
    fn pretty_print_round_trips() {
        let a = two_modes();
        let again = parse_model(&a.to_source()).unwrap();
        assert_eq!(a, again);
    }
}
