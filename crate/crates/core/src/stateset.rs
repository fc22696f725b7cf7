//! Federations of zones keyed by mode.

use std::fmt::Write as _;

use crate::context::{atom_zone, Context};
use crate::model::{ModeId, StatePredicate};
use crate::par;
use crate::zone::{Clock, Dbm};

/// A set of states: for every mode, a finite union of nonempty canonical
/// zones, none included in another zone of the same mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSet {
    dim: usize,
    zones: Vec<Vec<Dbm>>,
}

impl StateSet {
    pub fn empty(modes: usize, dim: usize) -> StateSet {
        StateSet {
            dim,
            zones: vec![Vec::new(); modes],
        }
    }

    pub fn universe(modes: usize, dim: usize) -> StateSet {
        StateSet {
            dim,
            zones: vec![vec![Dbm::universe(dim)]; modes],
        }
    }

    /// The empty set in the clock space of `ctx`.
    pub fn none(ctx: &Context) -> StateSet {
        StateSet::empty(ctx.modes(), ctx.dim)
    }

    /// Every state in the clock space of `ctx`, including states that
    /// violate their mode invariant.
    pub fn all(ctx: &Context) -> StateSet {
        StateSet::universe(ctx.modes(), ctx.dim)
    }

    /// All valuations of one mode.
    pub fn mode(ctx: &Context, q: ModeId) -> StateSet {
        StateSet::zone(ctx, q, Dbm::universe(ctx.dim))
    }

    /// A single zone placed in mode `q`.
    pub fn zone(ctx: &Context, q: ModeId, z: Dbm) -> StateSet {
        let mut s = StateSet::none(ctx);
        s.insert(q, z);
        s
    }

    /// The invariant of every mode.
    pub fn invariants(ctx: &Context) -> StateSet {
        StateSet {
            dim: ctx.dim,
            zones: ctx
                .invariants
                .iter()
                .map(|z| if z.is_empty() { Vec::new() } else { vec![z.clone()] })
                .collect(),
        }
    }

    /// Exact symbolic image of a state predicate.
    pub fn from_predicate(ctx: &Context, p: &StatePredicate) -> StateSet {
        match p {
            StatePredicate::True => StateSet::all(ctx),
            StatePredicate::False => StateSet::none(ctx),
            StatePredicate::Mode(q) => StateSet::mode(ctx, *q),
            StatePredicate::Clock(a) => {
                let z = atom_zone(ctx.dim, a);
                let mut s = StateSet::none(ctx);
                for q in 0..ctx.modes() {
                    s.insert(q, z.clone());
                }
                s
            }
            StatePredicate::Not(a) => StateSet::from_predicate(ctx, a).negate(),
            StatePredicate::And(a, b) => {
                StateSet::from_predicate(ctx, a).intersect(&StateSet::from_predicate(ctx, b))
            }
            StatePredicate::Or(a, b) => {
                StateSet::from_predicate(ctx, a).union(&StateSet::from_predicate(ctx, b))
            }
        }
    }

    pub fn modes(&self) -> usize {
        self.zones.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn zones(&self, q: ModeId) -> &[Dbm] {
        &self.zones[q]
    }

    /// `(mode, zone)` pairs in mode order.
    pub fn iter(&self) -> impl Iterator<Item = (ModeId, &Dbm)> {
        self.zones
            .iter()
            .enumerate()
            .flat_map(|(q, zs)| zs.iter().map(move |z| (q, z)))
    }

    pub fn zone_count(&self) -> usize {
        self.zones.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.iter().all(Vec::is_empty)
    }

    /// Adds a zone, keeping the mode's list reduced. Returns whether the
    /// zone was kept.
    pub fn insert(&mut self, q: ModeId, z: Dbm) -> bool {
        push_reduced(&mut self.zones[q], z)
    }

    fn per_mode(&self, f: impl Fn(ModeId) -> Vec<Dbm> + Sync + Send) -> StateSet {
        StateSet {
            dim: self.dim,
            zones: par::map_range(self.modes(), f),
        }
    }

    fn check_compatible(&self, other: &StateSet) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        assert_eq!(self.modes(), other.modes(), "mode count mismatch");
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.check_compatible(other);
        let mut out = self.clone();
        for (q, z) in other.iter() {
            out.insert(q, z.clone());
        }
        out
    }

    pub fn intersect(&self, other: &StateSet) -> StateSet {
        self.check_compatible(other);
        self.per_mode(|q| {
            let mut out = Vec::new();
            for a in &self.zones[q] {
                for b in &other.zones[q] {
                    let c = a.intersect(b);
                    if !c.is_empty() {
                        push_reduced(&mut out, c);
                    }
                }
            }
            out
        })
    }

    /// Conjoins a single zone into every mode.
    pub fn intersect_zone(&self, z: &Dbm) -> StateSet {
        self.map_zones(|a| a.intersect(z))
    }

    /// Complement with respect to all states of the clock space.
    pub fn negate(&self) -> StateSet {
        self.per_mode(|q| difference(&[Dbm::universe(self.dim)], &self.zones[q]))
    }

    /// `self ∧ ¬other`.
    pub fn minus(&self, other: &StateSet) -> StateSet {
        self.check_compatible(other);
        self.per_mode(|q| difference(&self.zones[q], &other.zones[q]))
    }

    /// Every state of `other` lies in `self`.
    pub fn subsumes(&self, other: &StateSet) -> bool {
        self.check_compatible(other);
        par::all_range(self.modes(), |q| {
            other.zones[q].iter().all(|z| covered(&self.zones[q], z))
        })
    }

    pub fn set_equal(&self, other: &StateSet) -> bool {
        self.subsumes(other) && other.subsumes(self)
    }

    /// `z` (in mode `q`) lies in the union of the mode's zones.
    pub fn covers(&self, q: ModeId, z: &Dbm) -> bool {
        covered(&self.zones[q], z)
    }

    /// Applies a zone transformer to every zone and re-reduces.
    pub fn map_zones(&self, f: impl Fn(&Dbm) -> Dbm + Sync + Send) -> StateSet {
        self.per_mode(|q| {
            let mut out = Vec::new();
            for z in &self.zones[q] {
                let image = f(z);
                if !image.is_empty() {
                    push_reduced(&mut out, image);
                }
            }
            out
        })
    }

    pub fn fm_eliminate(&self, xs: &[Clock]) -> StateSet {
        self.map_zones(|z| z.fm_eliminate(xs))
    }

    /// Projects out the auxiliary clock of `ctx`.
    pub fn forget_z(&self, ctx: &Context) -> StateSet {
        self.fm_eliminate(&[ctx.z])
    }

    pub fn extrapolate(&self, ceiling: i32) -> StateSet {
        self.map_zones(|z| z.extrapolate(ceiling))
    }

    /// Keeps only the zones of mode `q`.
    pub fn restrict_to_mode(&self, q: ModeId) -> StateSet {
        let mut out = StateSet::empty(self.modes(), self.dim);
        out.zones[q] = self.zones[q].clone();
        out
    }

    /// Membership of an exact valuation given in units of `1 / scale`.
    pub fn contains_scaled(&self, q: ModeId, point: &[i64], scale: i64) -> bool {
        self.zones[q].iter().any(|z| z.contains_scaled(point, scale))
    }

    /// Deterministic text listing, one `mode: c && c` line per zone,
    /// sorted by mode id and then by constraint text.
    pub fn dump(&self, ctx: &Context) -> String {
        let mut out = String::new();
        for (q, zs) in self.zones.iter().enumerate() {
            let mut lines: Vec<String> = zs
                .iter()
                .map(|z| z.constraint_strings(&ctx.clock_names).join(" && "))
                .collect();
            lines.sort();
            for l in lines {
                let _ = writeln!(out, "{}: {l}", ctx.automaton.modes[q].name);
            }
        }
        out
    }
}

/// Inserts `z` unless an existing zone includes it, dropping the zones it
/// includes.
fn push_reduced(list: &mut Vec<Dbm>, z: Dbm) -> bool {
    if z.is_empty() || list.iter().any(|y| y.includes(&z)) {
        return false;
    }
    list.retain(|y| !z.includes(y));
    list.push(z);
    true
}

/// `⋃ from \ ⋃ remove` as a list of zones.
pub fn difference(from: &[Dbm], remove: &[Dbm]) -> Vec<Dbm> {
    let mut out = Vec::new();
    for a in from {
        let mut rest = vec![a.clone()];
        for b in remove {
            if rest.is_empty() {
                break;
            }
            rest = rest.iter().flat_map(|r| r.subtract(b)).collect();
        }
        for r in rest {
            push_reduced(&mut out, r);
        }
    }
    out
}

/// `z ⊆ ⋃ by`, decided by subtracting every member of `by` from `z`.
pub fn covered(by: &[Dbm], z: &Dbm) -> bool {
    if z.is_empty() {
        return true;
    }
    if by.iter().any(|y| y.includes(z)) {
        return true;
    }
    let mut rest = vec![z.clone()];
    for y in by {
        rest = rest.iter().flat_map(|r| r.subtract(y)).collect();
        if rest.is_empty() {
            return true;
        }
    }
    false
}
