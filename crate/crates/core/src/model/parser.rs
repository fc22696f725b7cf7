//! Hand-written lexer and recursive-descent parsers for the model and
//! formula languages.

use std::collections::HashMap;

use thiserror::Error;

use super::{
    validate, ClockAtom, CmpOp, Formula, Label, Mode, ModeId, StatePredicate, TimedAutomaton,
    Transition,
};
use crate::zone::Clock;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("negative constant")]
    NegativeConstant,
    #[error("{0} must be a conjunction of clock atoms")]
    NonConjunctive(String),
    #[error("freeze clock `{0}` shadows an automaton clock")]
    Shadowing(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Comma,
    Semi,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Arrow,
    AndAnd,
    OrOr,
    Bang,
    Dot,
    Minus,
    Assign,
    Cmp(CmpOp),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: tl, column: tc });
            *i += width;
            *col += width;
        };
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '/' if next == Some('/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '[' => push(Tok::LBracket, 1, &mut i, &mut col),
            ']' => push(Tok::RBracket, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '-' if next == Some('>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '-' => push(Tok::Minus, 1, &mut i, &mut col),
            '&' if next == Some('&') => push(Tok::AndAnd, 2, &mut i, &mut col),
            '|' if next == Some('|') => push(Tok::OrOr, 2, &mut i, &mut col),
            '!' if next == Some('=') => {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax("`!=` is not supported".into()),
                    line,
                    column: col,
                })
            }
            '!' => push(Tok::Bang, 1, &mut i, &mut col),
            '<' if next == Some('=') => push(Tok::Cmp(CmpOp::Le), 2, &mut i, &mut col),
            '<' => push(Tok::Cmp(CmpOp::Lt), 1, &mut i, &mut col),
            '>' if next == Some('=') => push(Tok::Cmp(CmpOp::Ge), 2, &mut i, &mut col),
            '>' => push(Tok::Cmp(CmpOp::Gt), 1, &mut i, &mut col),
            '=' if next == Some('=') => push(Tok::Cmp(CmpOp::Eq), 2, &mut i, &mut col),
            '=' => push(Tok::Assign, 1, &mut i, &mut col),
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<i64>().map_err(|_| ParseError {
                    kind: ParseErrorKind::Syntax(format!("integer `{text}` out of range")),
                    line: tl,
                    column: tc,
                })?;
                if value > i32::MAX as i64 / 4 {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax(format!("integer `{text}` out of range")),
                        line: tl,
                        column: tc,
                    });
                }
                out.push(Token { tok: Tok::Int(value), line: tl, column: tc });
                col += i - start;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(text), line: tl, column: tc });
                col += i - start;
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                    line,
                    column: col,
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        let (line, column) = self.here();
        Err(ParseError { kind, line, column })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        self.error(ParseErrorKind::Syntax(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        )))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<(String, (usize, usize)), ParseError> {
        let at = self.here();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, at))
            }
            _ => self.unexpected(wanted),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn constant(&mut self) -> Result<i32, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(v as i32)
            }
            Tok::Minus => self.error(ParseErrorKind::NegativeConstant),
            _ => self.unexpected("an integer constant"),
        }
    }
}

/// Predicate syntax tree with unresolved names.
#[derive(Debug, Clone)]
enum RawPred {
    True,
    False,
    Name(String, (usize, usize)),
    Cmp(String, CmpOp, i32, (usize, usize)),
    Not(Box<RawPred>),
    And(Box<RawPred>, Box<RawPred>),
    Or(Box<RawPred>, Box<RawPred>),
}

fn parse_pred_or(c: &mut Cursor) -> Result<RawPred, ParseError> {
    let mut lhs = parse_pred_and(c)?;
    while *c.peek() == Tok::OrOr {
        c.bump();
        let rhs = parse_pred_and(c)?;
        lhs = RawPred::Or(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_pred_and(c: &mut Cursor) -> Result<RawPred, ParseError> {
    let mut lhs = parse_pred_unary(c)?;
    while *c.peek() == Tok::AndAnd {
        c.bump();
        let rhs = parse_pred_unary(c)?;
        lhs = RawPred::And(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_pred_unary(c: &mut Cursor) -> Result<RawPred, ParseError> {
    match c.peek().clone() {
        Tok::Bang => {
            c.bump();
            Ok(RawPred::Not(Box::new(parse_pred_unary(c)?)))
        }
        Tok::LParen => {
            c.bump();
            let inner = parse_pred_or(c)?;
            c.expect(Tok::RParen, "`)`")?;
            Ok(inner)
        }
        Tok::Ident(name) => {
            let at = c.here();
            c.bump();
            match name.as_str() {
                "true" => return Ok(RawPred::True),
                "false" => return Ok(RawPred::False),
                _ => {}
            }
            if let Tok::Cmp(op) = *c.peek() {
                c.bump();
                let k = c.constant()?;
                Ok(RawPred::Cmp(name, op, k, at))
            } else {
                Ok(RawPred::Name(name, at))
            }
        }
        _ => c.unexpected("a predicate"),
    }
}

struct Scope<'a> {
    modes: &'a HashMap<String, ModeId>,
    labels: &'a HashMap<String, Vec<ModeId>>,
    clocks: &'a HashMap<String, Clock>,
}

fn undeclared<T>(kind: &'static str, name: &str, at: (usize, usize)) -> Result<T, ParseError> {
    Err(ParseError {
        kind: ParseErrorKind::Undeclared { kind, name: name.to_string() },
        line: at.0,
        column: at.1,
    })
}

fn modes_disjunction(modes: &[ModeId]) -> StatePredicate {
    modes
        .iter()
        .map(|&q| StatePredicate::Mode(q))
        .reduce(StatePredicate::or)
        .unwrap_or(StatePredicate::False)
}

fn resolve_pred(p: &RawPred, scope: &Scope<'_>) -> Result<StatePredicate, ParseError> {
    Ok(match p {
        RawPred::True => StatePredicate::True,
        RawPred::False => StatePredicate::False,
        RawPred::Name(n, at) => {
            if let Some(&q) = scope.modes.get(n) {
                StatePredicate::Mode(q)
            } else if let Some(ms) = scope.labels.get(n) {
                modes_disjunction(ms)
            } else {
                return undeclared("mode", n, *at);
            }
        }
        RawPred::Cmp(n, op, k, at) => match scope.clocks.get(n) {
            Some(&clock) => StatePredicate::Clock(ClockAtom { clock, op: *op, constant: *k }),
            None => return undeclared("clock", n, *at),
        },
        RawPred::Not(a) => StatePredicate::not(resolve_pred(a, scope)?),
        RawPred::And(a, b) => StatePredicate::and(resolve_pred(a, scope)?, resolve_pred(b, scope)?),
        RawPred::Or(a, b) => StatePredicate::or(resolve_pred(a, scope)?, resolve_pred(b, scope)?),
    })
}

struct RawTransition {
    source: (String, (usize, usize)),
    target: (String, (usize, usize)),
    guard: Option<(RawPred, (usize, usize))>,
    resets: Vec<(String, (usize, usize))>,
}

/// Parses and validates a model.
///
/// ```text
/// clocks x, y;
/// mode idle  { inv true; }
/// mode busy  { inv x <= 5; }
/// init idle && x == 0 && y == 0;
/// trans idle -> busy { guard x >= 2; reset x; }
/// ```
///
/// `label name = m1, m2;` declares a proposition that holds in the listed
/// modes.
pub fn parse_model(src: &str) -> Result<TimedAutomaton, ParseError> {
    let mut c = Cursor { toks: lex(src)?, pos: 0 };
    if *c.peek() == Tok::Eof {
        return c.unexpected("a model declaration");
    }
    let mut clock_names: Vec<(String, (usize, usize))> = Vec::new();
    let mut modes: Vec<(String, Option<(RawPred, (usize, usize))>, (usize, usize))> = Vec::new();
    let mut labels: Vec<(String, Vec<(String, (usize, usize))>)> = Vec::new();
    let mut init: Option<RawPred> = None;
    let mut trans: Vec<RawTransition> = Vec::new();

    while *c.peek() != Tok::Eof {
        let (kw, at) = c.ident("`clocks`, `mode`, `label`, `init` or `trans`")?;
        match kw.as_str() {
            "clocks" => {
                if *c.peek() != Tok::Semi {
                    clock_names.push(c.ident("a clock name")?);
                    while *c.peek() == Tok::Comma {
                        c.bump();
                        clock_names.push(c.ident("a clock name")?);
                    }
                }
                c.expect(Tok::Semi, "`;`")?;
            }
            "mode" => {
                let (name, _) = c.ident("a mode name")?;
                c.expect(Tok::LBrace, "`{`")?;
                let mut inv = None;
                if c.keyword("inv") {
                    let at = c.here();
                    inv = Some((parse_pred_or(&mut c)?, at));
                    c.expect(Tok::Semi, "`;`")?;
                }
                c.expect(Tok::RBrace, "`}`")?;
                modes.push((name, inv, at));
            }
            "label" => {
                let (name, _) = c.ident("a label name")?;
                c.expect(Tok::Assign, "`=`")?;
                let mut members = vec![c.ident("a mode name")?];
                while *c.peek() == Tok::Comma {
                    c.bump();
                    members.push(c.ident("a mode name")?);
                }
                c.expect(Tok::Semi, "`;`")?;
                labels.push((name, members));
            }
            "init" => {
                if init.is_some() {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax("duplicate `init`".into()),
                        line: at.0,
                        column: at.1,
                    });
                }
                init = Some(parse_pred_or(&mut c)?);
                c.expect(Tok::Semi, "`;`")?;
            }
            "trans" => {
                let source = c.ident("a source mode")?;
                c.expect(Tok::Arrow, "`->`")?;
                let target = c.ident("a target mode")?;
                c.expect(Tok::LBrace, "`{`")?;
                let mut guard = None;
                let mut resets = Vec::new();
                if c.keyword("guard") {
                    let at = c.here();
                    guard = Some((parse_pred_or(&mut c)?, at));
                    c.expect(Tok::Semi, "`;`")?;
                }
                if c.keyword("reset") {
                    resets.push(c.ident("a clock name")?);
                    while *c.peek() == Tok::Comma {
                        c.bump();
                        resets.push(c.ident("a clock name")?);
                    }
                    c.expect(Tok::Semi, "`;`")?;
                }
                c.expect(Tok::RBrace, "`}`")?;
                trans.push(RawTransition { source, target, guard, resets });
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax(format!("unknown declaration `{other}`")),
                    line: at.0,
                    column: at.1,
                })
            }
        }
    }

    let clock_map: HashMap<String, Clock> = clock_names
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.clone(), i + 1))
        .collect();
    let mode_map: HashMap<String, ModeId> =
        modes.iter().enumerate().map(|(i, (n, _, _))| (n.clone(), i)).collect();
    let mut label_map: HashMap<String, Vec<ModeId>> = HashMap::new();
    let mut resolved_labels = Vec::new();
    for (name, members) in &labels {
        let mut ids = Vec::new();
        for (m, at) in members {
            match mode_map.get(m) {
                Some(&q) => ids.push(q),
                None => return undeclared("mode", m, *at),
            }
        }
        label_map.insert(name.clone(), ids.clone());
        resolved_labels.push(Label { name: name.clone(), modes: ids });
    }
    let scope = Scope { modes: &mode_map, labels: &label_map, clocks: &clock_map };

    let conjunctive = |p: &RawPred, at: (usize, usize), what: &str| -> Result<StatePredicate, ParseError> {
        let resolved = resolve_pred(p, &scope)?;
        if resolved.conjuncts().is_none() {
            return Err(ParseError {
                kind: ParseErrorKind::NonConjunctive(what.to_string()),
                line: at.0,
                column: at.1,
            });
        }
        Ok(resolved)
    };

    let mut out_modes = Vec::new();
    for (name, inv, _) in &modes {
        let invariant = match inv {
            Some((p, at)) => conjunctive(p, *at, &format!("invariant of `{name}`"))?,
            None => StatePredicate::True,
        };
        out_modes.push(Mode { name: name.clone(), invariant });
    }
    let initial = match &init {
        Some(p) => resolve_pred(p, &scope)?,
        None => StatePredicate::True,
    };
    let mut transitions = Vec::new();
    for t in &trans {
        let source = match mode_map.get(&t.source.0) {
            Some(&q) => q,
            None => return undeclared("mode", &t.source.0, t.source.1),
        };
        let target = match mode_map.get(&t.target.0) {
            Some(&q) => q,
            None => return undeclared("mode", &t.target.0, t.target.1),
        };
        let guard = match &t.guard {
            Some((p, at)) => conjunctive(p, *at, "guard")?,
            None => StatePredicate::True,
        };
        let mut resets = Vec::new();
        for (n, at) in &t.resets {
            match clock_map.get(n) {
                Some(&k) => resets.push(k),
                None => return undeclared("clock", n, *at),
            }
        }
        transitions.push(Transition { source, target, guard, resets });
    }

    let automaton = TimedAutomaton {
        clocks: clock_names.into_iter().map(|(n, _)| n).collect(),
        modes: out_modes,
        labels: resolved_labels,
        initial,
        transitions,
    };
    if let Some(d) = validate(&automaton).into_iter().next() {
        return Err(ParseError { kind: ParseErrorKind::Invalid(d.message), line: 1, column: 1 });
    }
    Ok(automaton)
}

struct FormulaParser<'a> {
    c: Cursor,
    automaton: &'a TimedAutomaton,
    freeze: HashMap<String, Clock>,
}

const MODALITIES: [&str; 8] = ["EF", "AF", "EG", "AG", "EGF", "EFG", "AGF", "AFG"];

impl FormulaParser<'_> {
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.c.peek() == Tok::Arrow {
            self.c.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.c.peek() == Tok::OrOr {
            self.c.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.c.peek() == Tok::AndAnd {
            self.c.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until_pair(&mut self) -> Result<(Formula, Formula), ParseError> {
        self.c.expect(Tok::LBracket, "`[`")?;
        let lhs = self.implication()?;
        if !self.c.keyword("U") {
            return self.c.unexpected("`U`");
        }
        let rhs = self.implication()?;
        self.c.expect(Tok::RBracket, "`]`")?;
        Ok((lhs, rhs))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.c.peek().clone() {
            Tok::Bang => {
                self.c.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.c.bump();
                let inner = self.implication()?;
                self.c.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) if MODALITIES.contains(&name.as_str()) => {
                self.c.bump();
                let body = self.unary()?;
                Ok(match name.as_str() {
                    "EF" => Formula::ef(body),
                    "AF" => Formula::af(body),
                    "EG" => Formula::eg(body),
                    "AG" => Formula::ag(body),
                    "EGF" => Formula::egf(body),
                    "EFG" => Formula::efg(body),
                    "AGF" => Formula::agf(body),
                    "AFG" => Formula::afg(body),
                    _ => unreachable!(),
                })
            }
            Tok::Ident(name) if (name == "E" || name == "A") && *self.c.peek2() == Tok::LBracket => {
                self.c.bump();
                let (lhs, rhs) = self.until_pair()?;
                Ok(if name == "E" {
                    Formula::exists_until(lhs, rhs)
                } else {
                    Formula::forall_until(lhs, rhs)
                })
            }
            Tok::Ident(name) if *self.c.peek2() == Tok::Dot => {
                let at = self.c.here();
                self.c.bump();
                self.c.bump();
                if self.automaton.clock_id(&name).is_some() {
                    return Err(ParseError {
                        kind: ParseErrorKind::Shadowing(name),
                        line: at.0,
                        column: at.1,
                    });
                }
                let next = self.automaton.clocks.len() + self.freeze.len() + 1;
                let clock = *self.freeze.entry(name.clone()).or_insert(next);
                let body = self.implication()?;
                Ok(Formula::Freeze { clock, name, body: Box::new(body) })
            }
            Tok::Ident(name) => {
                let at = self.c.here();
                self.c.bump();
                match name.as_str() {
                    "true" => return Ok(Formula::tt()),
                    "false" => return Ok(Formula::False),
                    _ => {}
                }
                if let Tok::Cmp(op) = *self.c.peek() {
                    self.c.bump();
                    let constant = self.c.constant()?;
                    let clock = match self.automaton.clock_id(&name).or_else(|| self.freeze.get(&name).copied()) {
                        Some(k) => k,
                        None => return undeclared("clock", &name, at),
                    };
                    return Ok(Formula::Clock(ClockAtom { clock, op, constant }));
                }
                if let Some(q) = self.automaton.mode_id(&name) {
                    return Ok(Formula::Mode(q));
                }
                if let Some(l) = self.automaton.labels.iter().find(|l| l.name == name) {
                    return Ok(l
                        .modes
                        .iter()
                        .map(|&q| Formula::Mode(q))
                        .reduce(Formula::or)
                        .unwrap_or(Formula::False));
                }
                undeclared("mode", &name, at)
            }
            _ => self.c.unexpected("a formula"),
        }
    }
}

/// Parses a formula against an automaton's modes, labels and clocks. All
/// derived operators are expanded into the core constructors.
pub fn parse_formula(src: &str, automaton: &TimedAutomaton) -> Result<Formula, ParseError> {
    let mut p = FormulaParser {
        c: Cursor { toks: lex(src)?, pos: 0 },
        automaton,
        freeze: HashMap::new(),
    };
    let f = p.implication()?;
    if *p.c.peek() != Tok::Eof {
        return p.c.unexpected("end of formula");
    }
    Ok(f)
}
