//! Difference bound matrices.
//!
//! A [`Dbm`] of dimension `n + 1` constrains the clocks `1..=n` against each
//! other and against the zero reference at index 0. Entry `(i, j)` bounds the
//! difference `x_i - x_j`. Every public operation that returns a `Dbm`
//! returns it in canonical (shortest-path closed) form.

use std::cmp::Ordering;
use std::fmt;

/// Index of a clock inside a [`Dbm`]. Index 0 is the zero reference.
pub type Clock = usize;

/// A bound `(~, d)` on a clock difference, packed into one integer.
///
/// The encoding is `2 * d + 1` for `<= d` and `2 * d` for `< d`, which makes
/// the natural integer order coincide with tightness.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound(i32);

impl Bound {
    /// `(<, ∞)`.
    pub const INFINITY: Bound = Bound(i32::MAX - 1);
    /// `(<=, 0)`.
    pub const LE_ZERO: Bound = Bound(1);
    /// `(<, 0)`.
    pub const LT_ZERO: Bound = Bound(0);

    pub const fn le(value: i32) -> Bound {
        Bound((value << 1) | 1)
    }

    pub const fn lt(value: i32) -> Bound {
        Bound(value << 1)
    }

    pub fn new(value: i32, strict: bool) -> Bound {
        if strict {
            Bound::lt(value)
        } else {
            Bound::le(value)
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Bound::INFINITY
    }

    pub fn is_strict(self) -> bool {
        self.0 & 1 == 0
    }

    /// Finite value, or `None` for `(<, ∞)`.
    pub fn value(self) -> Option<i32> {
        if self.is_infinite() {
            None
        } else {
            Some(self.0 >> 1)
        }
    }

    /// Bound addition: values add, strictness is the OR of both flags.
    pub fn plus(self, other: Bound) -> Bound {
        if self.is_infinite() || other.is_infinite() {
            Bound::INFINITY
        } else {
            Bound(((self.0 & !1) + (other.0 & !1)) | (self.0 & other.0 & 1))
        }
    }

    /// The bound of the negated constraint, read in the opposite direction:
    /// `not (a - b <= c)` is `b - a < -c`.
    pub fn negate(self) -> Bound {
        debug_assert!(!self.is_infinite());
        Bound(1 - self.0)
    }

    /// Whether `diff ~ d` holds for an exact difference `diff` expressed in
    /// units of `1 / scale`.
    pub fn admits_scaled(self, diff: i64, scale: i64) -> bool {
        match self.value() {
            None => true,
            Some(v) => {
                let limit = v as i64 * scale;
                if self.is_strict() {
                    diff < limit
                } else {
                    diff <= limit
                }
            }
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "<inf"),
            Some(v) if self.is_strict() => write!(f, "<{v}"),
            Some(v) => write!(f, "<={v}"),
        }
    }
}

/// A zone: a conjunction of difference constraints over clocks and zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    dim: usize,
    entries: Vec<Bound>,
}

impl Dbm {
    /// The true-zone: all nonnegative valuations.
    pub fn universe(dim: usize) -> Dbm {
        assert!(dim >= 1, "a DBM needs at least the zero reference");
        let mut entries = vec![Bound::INFINITY; dim * dim];
        for j in 0..dim {
            entries[j] = Bound::LE_ZERO;
            entries[j * dim + j] = Bound::LE_ZERO;
        }
        Dbm { dim, entries }
    }

    /// The canonical empty zone of the given dimension.
    pub fn empty(dim: usize) -> Dbm {
        Dbm {
            dim,
            entries: vec![Bound::LT_ZERO; dim * dim],
        }
    }

    /// The single point where every clock reads zero.
    pub fn zero(dim: usize) -> Dbm {
        Dbm {
            dim,
            entries: vec![Bound::LE_ZERO; dim * dim],
        }
    }

    /// Builds a zone from raw `(i, j, bound)` constraints on top of the
    /// true-zone.
    pub fn from_constraints(dim: usize, constraints: &[(Clock, Clock, Bound)]) -> Dbm {
        let mut d = Dbm::universe(dim);
        for &(i, j, b) in constraints {
            let idx = i * dim + j;
            if b < d.entries[idx] {
                d.entries[idx] = b;
            }
        }
        d.canonicalize();
        d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of real clocks (excluding the zero reference).
    pub fn clocks(&self) -> usize {
        self.dim - 1
    }

    #[inline]
    pub fn get(&self, i: Clock, j: Clock) -> Bound {
        self.entries[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: Clock, j: Clock, b: Bound) {
        self.entries[i * self.dim + j] = b;
    }

    fn mark_empty(&mut self) {
        self.entries.iter_mut().for_each(|e| *e = Bound::LT_ZERO);
    }

    /// Full Floyd–Warshall closure. Inconsistent inputs collapse to the
    /// canonical empty zone.
    pub fn canonicalize(&mut self) {
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.entries[i * n + k];
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let via = ik.plus(self.entries[k * n + j]);
                    if via < self.entries[i * n + j] {
                        self.entries[i * n + j] = via;
                    }
                }
            }
            if (0..n).any(|i| self.entries[i * n + i] < Bound::LE_ZERO) {
                self.mark_empty();
                return;
            }
        }
    }

    pub fn canonicalized(mut self) -> Dbm {
        self.canonicalize();
        self
    }

    pub fn is_empty(&self) -> bool {
        self.entries[0] < Bound::LE_ZERO
    }

    /// Tightens `x_i - x_j` to `b` and restores canonical form in O(n²).
    pub fn constrain(&mut self, i: Clock, j: Clock, b: Bound) {
        if self.is_empty() || b >= self.get(i, j) {
            return;
        }
        if b.plus(self.get(j, i)) < Bound::LE_ZERO {
            self.mark_empty();
            return;
        }
        self.set(i, j, b);
        let n = self.dim;
        for k in 0..n {
            let ki = self.get(k, i);
            if ki.is_infinite() {
                continue;
            }
            let kij = ki.plus(b);
            for l in 0..n {
                let via = kij.plus(self.get(j, l));
                if via < self.get(k, l) {
                    self.set(k, l, via);
                }
            }
        }
    }

    pub fn constrained(mut self, i: Clock, j: Clock, b: Bound) -> Dbm {
        self.constrain(i, j, b);
        self
    }

    /// `self ⊇ other`, decided entrywise on canonical forms.
    pub fn includes(&self, other: &Dbm) -> bool {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if other.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(mine, theirs)| mine >= theirs)
    }

    pub fn intersect(&self, other: &Dbm) -> Dbm {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if self.is_empty() || other.is_empty() {
            return Dbm::empty(self.dim);
        }
        let mut out = self.clone();
        let mut changed = false;
        for (mine, theirs) in out.entries.iter_mut().zip(&other.entries) {
            if theirs < mine {
                *mine = *theirs;
                changed = true;
            }
        }
        if changed {
            out.canonicalize();
        }
        out
    }

    /// Past closure: every valuation that reaches `self` by letting time pass.
    pub fn down(&self) -> Dbm {
        if self.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        for j in 1..self.dim {
            out.set(0, j, Bound::LE_ZERO);
        }
        out.canonicalize();
        out
    }

    /// Future closure: every valuation reachable from `self` by delay.
    pub fn up(&self) -> Dbm {
        if self.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        for i in 1..self.dim {
            out.set(i, 0, Bound::INFINITY);
        }
        out
    }

    /// Existential projection of the listed clocks. The eliminated clocks
    /// become unconstrained (but nonnegative).
    pub fn fm_eliminate(&self, xs: &[Clock]) -> Dbm {
        let mut out = self.clone();
        if out.is_empty() {
            return out;
        }
        for &x in xs {
            assert!(x >= 1 && x < self.dim, "unknown clock index {x}");
            for k in 0..self.dim {
                if k == x {
                    continue;
                }
                out.set(x, k, Bound::INFINITY);
                let k0 = out.get(k, 0);
                out.set(k, x, k0);
            }
            out.set(0, x, Bound::LE_ZERO);
        }
        out
    }

    /// Weakest precondition of resetting `xs` to zero.
    pub fn reset_pre(&self, xs: &[Clock]) -> Dbm {
        let mut pinned = self.clone();
        for &x in xs {
            pinned.constrain(x, 0, Bound::LE_ZERO);
        }
        pinned.fm_eliminate(xs)
    }

    /// Forward image of resetting `xs` to zero.
    pub fn reset(&self, xs: &[Clock]) -> Dbm {
        let mut out = self.fm_eliminate(xs);
        for &x in xs {
            out.constrain(x, 0, Bound::LE_ZERO);
        }
        out
    }

    /// The non-trivial constraints of a canonical zone as `(i, j, bound)`.
    /// Nonnegativity (`0 - x <= 0`) and the diagonal are left out.
    pub fn constraints(&self) -> Vec<(Clock, Clock, Bound)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i == j {
                    continue;
                }
                let b = self.get(i, j);
                if b.is_infinite() || (i == 0 && b >= Bound::LE_ZERO) {
                    continue;
                }
                out.push((i, j, b));
            }
        }
        out
    }

    /// Complement within the nonnegative orthant, one zone per negated
    /// constraint. The pieces may overlap.
    pub fn complement(&self) -> Vec<Dbm> {
        if self.is_empty() {
            return vec![Dbm::universe(self.dim)];
        }
        self.constraints()
            .into_iter()
            .map(|(i, j, b)| Dbm::universe(self.dim).constrained(j, i, b.negate()))
            .filter(|d| !d.is_empty())
            .collect()
    }

    /// `self \ other` as pairwise disjoint zones.
    pub fn subtract(&self, other: &Dbm) -> Vec<Dbm> {
        if self.is_empty() {
            return Vec::new();
        }
        if other.is_empty() {
            return vec![self.clone()];
        }
        let overlap = self.intersect(other);
        if overlap.is_empty() {
            return vec![self.clone()];
        }
        let mut pieces = Vec::new();
        let mut rest = self.clone();
        for (i, j, b) in other.constraints() {
            if rest.get(i, j) <= b {
                continue;
            }
            let outside = rest.clone().constrained(j, i, b.negate());
            if !outside.is_empty() {
                pieces.push(outside);
            }
            rest.constrain(i, j, b);
            if rest.is_empty() {
                break;
            }
        }
        pieces
    }

    /// Max-constant abstraction: bounds above `ceiling` are dropped, bounds
    /// below `-ceiling` are relaxed to `(<, -ceiling)`.
    pub fn extrapolate(&self, ceiling: i32) -> Dbm {
        if self.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        let mut changed = false;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i == j {
                    continue;
                }
                let b = out.get(i, j);
                match b.value() {
                    Some(v) if v > ceiling => {
                        out.set(i, j, Bound::INFINITY);
                        changed = true;
                    }
                    Some(v) if v < -ceiling => {
                        out.set(i, j, Bound::lt(-ceiling));
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        if changed {
            out.canonicalize();
        }
        out
    }

    /// Every clock is unbounded above.
    pub fn has_no_upper_bounds(&self) -> bool {
        !self.is_empty() && (1..self.dim).all(|x| self.get(x, 0).is_infinite())
    }

    /// Points whose immediate past (by an arbitrarily small delay) lies in
    /// the zone.
    pub fn left_limit(&self) -> Dbm {
        if self.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        for x in 1..self.dim {
            let upper = out.get(x, 0);
            if let Some(v) = upper.value() {
                out.set(x, 0, Bound::le(v));
            }
            let lower = out.get(0, x);
            out.set(0, x, Bound::lt(lower.value().expect("lower bounds are finite")));
        }
        out.canonicalized()
    }

    /// Points whose immediate future (by an arbitrarily small delay) lies in
    /// the zone.
    pub fn right_limit(&self) -> Dbm {
        if self.is_empty() {
            return self.clone();
        }
        let mut out = self.clone();
        for x in 1..self.dim {
            let upper = out.get(x, 0);
            if let Some(v) = upper.value() {
                out.set(x, 0, Bound::lt(v));
            }
            let lower = out.get(0, x);
            out.set(0, x, Bound::le(lower.value().expect("lower bounds are finite")));
        }
        out.canonicalized()
    }

    /// Appends a fresh unconstrained clock at index `dim`.
    pub fn add_clock(&self) -> Dbm {
        let n = self.dim + 1;
        if self.is_empty() {
            return Dbm::empty(n);
        }
        let mut out = Dbm::universe(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(i, j));
            }
        }
        for k in 1..self.dim {
            out.set(k, n - 1, self.get(k, 0));
        }
        out
    }

    /// Projects out clock `x` and removes it from the matrix.
    pub fn drop_clock(&self, x: Clock) -> Dbm {
        assert!(x >= 1 && x < self.dim, "unknown clock index {x}");
        let n = self.dim - 1;
        if self.is_empty() {
            return Dbm::empty(n);
        }
        let keep: Vec<Clock> = (0..self.dim).filter(|&k| k != x).collect();
        let mut out = Dbm::universe(n);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }

    /// Membership of an exact valuation given in units of `1 / scale`.
    /// `point[0]` is ignored and treated as the zero reference.
    pub fn contains_scaled(&self, point: &[i64], scale: i64) -> bool {
        if self.is_empty() {
            return false;
        }
        debug_assert_eq!(point.len(), self.dim);
        for i in 0..self.dim {
            let vi = if i == 0 { 0 } else { point[i] };
            for j in 0..self.dim {
                if i == j {
                    continue;
                }
                let vj = if j == 0 { 0 } else { point[j] };
                if !self.get(i, j).admits_scaled(vi - vj, scale) {
                    return false;
                }
            }
        }
        true
    }

    /// Human-readable constraints, using `names[k - 1]` for clock `k`.
    /// Differences implied by the two clocks' own bounds are left out.
    pub fn constraint_strings(&self, names: &[String]) -> Vec<String> {
        if self.is_empty() {
            return vec!["false".to_string()];
        }
        let name = |k: Clock| names.get(k - 1).cloned().unwrap_or_else(|| format!("c{k}"));
        let mut out: Vec<String> = self
            .constraints()
            .into_iter()
            .filter(|&(i, j, b)| i == 0 || j == 0 || self.get(i, 0).plus(self.get(0, j)) > b)
            .map(|(i, j, b)| {
                let v = b.value().expect("finite");
                let op = if b.is_strict() { "<" } else { "<=" };
                match (i, j) {
                    (0, j) => {
                        let op = if b.is_strict() { ">" } else { ">=" };
                        format!("{} {op} {}", name(j), -v)
                    }
                    (i, 0) => format!("{} {op} {v}", name(i)),
                    (i, j) => format!("{} - {} {op} {v}", name(i), name(j)),
                }
            })
            .collect();
        out.sort();
        if out.is_empty() {
            out.push("true".to_string());
        }
        out
    }
}

impl PartialOrd for Dbm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dbm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl fmt::Debug for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..self.dim).map(|k| format!("x{k}")).collect();
        write!(f, "{{{}}}", self.constraint_strings(&names).join(" && "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: Clock = 1;
    const Y: Clock = 2;

    /// Half-integer points up to `limit` for two clocks, scaled by 2.
    fn grid2(limit: i64) -> Vec<[i64; 3]> {
        let mut pts = Vec::new();
        for x in 0..=2 * limit {
            for y in 0..=2 * limit {
                pts.push([0, x, y]);
            }
        }
        pts
    }

    fn le(i: Clock, j: Clock, v: i32) -> (Clock, Clock, Bound) {
        (i, j, Bound::le(v))
    }

    #[test]
    fn bound_arithmetic() {
        assert_eq!(Bound::le(1).plus(Bound::le(2)), Bound::le(3));
        assert_eq!(Bound::lt(1).plus(Bound::le(2)), Bound::lt(3));
        assert_eq!(Bound::le(-1).plus(Bound::lt(-2)), Bound::lt(-3));
        assert!(Bound::lt(3) < Bound::le(3));
        assert!(Bound::le(3) < Bound::lt(4));
        assert_eq!(Bound::le(3).negate(), Bound::lt(-3));
        assert_eq!(Bound::lt(-2).negate(), Bound::le(2));
        assert_eq!(Bound::INFINITY.plus(Bound::le(-5)), Bound::INFINITY);
    }

    #[test]
    fn canonicalize_is_idempotent_on_canonical_input() {
        let d = Dbm::from_constraints(3, &[le(X, 0, 3), le(0, Y, -1)]);
        assert_eq!(d.clone().canonicalized(), d);
    }

    #[test]
    fn canonicalize_derives_difference_bound() {
        // x <= 3 and y >= 0 give x - y <= 3; confirmed by enumerating the
        // half-integer grid up to 4: max(x - y) over x <= 3 is 3.
        let d = Dbm::from_constraints(3, &[le(X, 0, 3)]);
        assert_eq!(d.get(X, Y), Bound::le(3));
        let best = grid2(4)
            .into_iter()
            .filter(|p| p[1] <= 6)
            .map(|p| p[1] - p[2])
            .max()
            .unwrap();
        assert_eq!(best, 6); // 3 in half units times 2
    }

    #[test]
    fn negative_cycle_is_empty() {
        let d = Dbm::from_constraints(2, &[le(X, 0, 1), le(0, X, -2)]);
        assert!(d.is_empty());
        assert_eq!(d, Dbm::empty(2));
    }

    #[test]
    fn emptiness_examples() {
        assert!(!Dbm::universe(3).is_empty());
        let strict = Dbm::from_constraints(2, &[le(0, X, -2), (X, 0, Bound::lt(2))]);
        assert!(strict.is_empty());
        let d = Dbm::from_constraints(3, &[le(X, Y, -1), le(Y, X, 2)]);
        assert!(!d.is_empty());
        // x = 0, y = 1 satisfies x - y <= -1
        assert!(d.contains_scaled(&[0, 0, 1], 1));
    }

    #[test]
    fn inclusion_examples() {
        let t = Dbm::universe(3);
        let d = Dbm::from_constraints(3, &[le(X, 0, 3)]);
        let e = Dbm::from_constraints(3, &[le(X, 0, 2), le(Y, 0, 1)]);
        assert!(t.includes(&d));
        assert!(d.includes(&Dbm::empty(3)));
        assert!(d.includes(&e));
        assert!(!e.includes(&d));
        for p in grid2(4) {
            if e.contains_scaled(&p, 2) {
                assert!(d.contains_scaled(&p, 2));
            }
        }
    }

    #[test]
    fn intersection_examples() {
        let d = Dbm::from_constraints(2, &[le(X, 0, 3)]);
        assert_eq!(Dbm::universe(2).intersect(&d), d);
        let neg = Dbm::from_constraints(2, &[(0, X, Bound::lt(-3))]);
        assert!(d.intersect(&neg).is_empty());
        let lo = Dbm::from_constraints(2, &[le(0, X, -1)]);
        let both = d.intersect(&lo);
        assert_eq!(both.get(X, 0), Bound::le(3));
        assert_eq!(both.get(0, X), Bound::le(-1));
    }

    #[test]
    fn down_examples() {
        let point = Dbm::from_constraints(2, &[le(X, 0, 3), le(0, X, -3)]);
        let past = point.down();
        assert_eq!(past, Dbm::from_constraints(2, &[le(X, 0, 3)]));
        assert!(Dbm::empty(2).down().is_empty());

        let d = Dbm::from_constraints(3, &[le(X, 0, 3), le(0, X, -3), le(Y, 0, 1), le(0, Y, -1)]);
        let past = d.down();
        assert_eq!(past.get(X, 0), Bound::le(3));
        assert_eq!(past.get(Y, 0), Bound::le(1));
        assert_eq!(past.get(X, Y), Bound::le(2));
        assert_eq!(past.get(Y, X), Bound::le(-2));
        // delays of 0, 0.5, 1 from (2, 0), (2.5, 0.5), (3, 1) all land in d
        for (x, y, delay) in [(6, 2, 0), (5, 1, 1), (4, 0, 2)] {
            assert!(past.contains_scaled(&[0, x, y], 2));
            assert!(d.contains_scaled(&[0, x + delay, y + delay], 2));
        }
    }

    #[test]
    fn elimination_examples() {
        let d = Dbm::from_constraints(3, &[le(X, 0, 0), le(Y, X, 2)]);
        let e = d.fm_eliminate(&[X]);
        assert_eq!(e, Dbm::from_constraints(3, &[le(Y, 0, 2)]));
        let only_y = Dbm::from_constraints(3, &[le(Y, 0, 4)]);
        assert_eq!(only_y.fm_eliminate(&[X]), only_y);
        assert_eq!(d.fm_eliminate(&[X, Y]), Dbm::universe(3));
    }

    #[test]
    fn reset_precondition_examples() {
        let at_zero = Dbm::from_constraints(2, &[le(X, 0, 0)]);
        assert_eq!(at_zero.reset_pre(&[X]), Dbm::universe(2));
        let at_least_one = Dbm::from_constraints(2, &[le(0, X, -1)]);
        assert!(at_least_one.reset_pre(&[X]).is_empty());
        let d = Dbm::from_constraints(3, &[le(X, 0, 0), le(X, Y, -2)]);
        assert_eq!(d.reset_pre(&[X]), Dbm::from_constraints(3, &[le(0, Y, -2)]));
    }

    #[test]
    fn complement_examples() {
        assert!(Dbm::universe(2).complement().is_empty());
        assert_eq!(Dbm::empty(2).complement(), vec![Dbm::universe(2)]);
        let d = Dbm::from_constraints(2, &[le(X, 0, 3)]);
        assert_eq!(
            d.complement(),
            vec![Dbm::from_constraints(2, &[(0, X, Bound::lt(-3))])]
        );
    }

    #[test]
    fn extrapolation_examples() {
        let d = Dbm::from_constraints(3, &[le(X, 0, 2), le(0, Y, -1)]);
        assert_eq!(d.extrapolate(2), d);
        let big = Dbm::from_constraints(2, &[le(X, 0, 7)]);
        assert_eq!(big.extrapolate(2), Dbm::universe(2));
        let above = Dbm::from_constraints(2, &[le(0, X, -5)]);
        assert_eq!(
            above.extrapolate(2),
            Dbm::from_constraints(2, &[(0, X, Bound::lt(-2))])
        );
    }

    /// Every nonempty canonical extrapolated zone over one clock with
    /// ceiling 2, by brute force over all matrices with entries in B_2.
    #[test]
    fn zone_space_is_finite_for_one_clock() {
        let mut bounds = vec![Bound::INFINITY];
        for v in -2..=2 {
            bounds.push(Bound::le(v));
            bounds.push(Bound::lt(v));
        }
        let mut zones = std::collections::BTreeSet::new();
        for &upper in &bounds {
            for &lower in &bounds {
                let d = Dbm::from_constraints(2, &[(X, 0, upper), (0, X, lower)]).extrapolate(2);
                if !d.is_empty() {
                    zones.insert(d);
                }
            }
        }
        // Independent count: the one-clock regions {0},(0,1),{1},(1,2),{2},(2,inf)
        // lie on a line and zones are their contiguous nonempty runs.
        let regions = 6;
        assert_eq!(zones.len(), regions * (regions + 1) / 2);
        assert_eq!(zones.len(), 21);
    }

    #[test]
    fn upper_bound_detection() {
        assert!(Dbm::universe(3).has_no_upper_bounds());
        assert!(!Dbm::from_constraints(3, &[le(X, 0, 5)]).has_no_upper_bounds());
        let d = Dbm::from_constraints(3, &[le(0, X, -2), le(Y, X, 1)]);
        assert!(d.has_no_upper_bounds());
    }

    #[test]
    fn add_and_drop_clock() {
        let d = Dbm::from_constraints(2, &[le(X, 0, 3), le(0, X, -1)]);
        assert_eq!(d.add_clock().drop_clock(2), d);
        assert!(Dbm::empty(2).add_clock().is_empty());
        let z = 2;
        let lifted = Dbm::from_constraints(3, &[le(0, z, -1), le(X, 0, 2)]);
        assert_eq!(lifted.drop_clock(z), Dbm::from_constraints(2, &[le(X, 0, 2)]));
    }

    #[test]
    fn limits_of_an_interval() {
        // 1 < x <= 2
        let d = Dbm::from_constraints(2, &[le(X, 0, 2), (0, X, Bound::lt(-1))]);
        let left = d.left_limit();
        assert_eq!(left.get(X, 0), Bound::le(2));
        assert_eq!(left.get(0, X), Bound::lt(-1));
        let right = d.right_limit();
        assert_eq!(right.get(X, 0), Bound::lt(2));
        assert_eq!(right.get(0, X), Bound::le(-1));
    }

    #[test]
    fn subtraction_is_exact_on_grid() {
        let a = Dbm::from_constraints(3, &[le(X, 0, 3), le(Y, 0, 3)]);
        let b = Dbm::from_constraints(3, &[le(0, X, -1), (Y, X, Bound::lt(0))]);
        let pieces = a.subtract(&b);
        for p in grid2(4) {
            let expect = a.contains_scaled(&p, 2) && !b.contains_scaled(&p, 2);
            let got = pieces.iter().any(|z| z.contains_scaled(&p, 2));
            assert_eq!(expect, got, "{p:?}");
        }
    }
}
