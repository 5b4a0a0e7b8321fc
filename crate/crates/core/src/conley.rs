//! F-boundaries, isolating neighborhoods, index pairs and their quotients.

use std::fmt;

use crate::cellset::CellSet;
use crate::chain::{dilate, Dilation};
use crate::error::{Error, Result};
use crate::grid::{Eps, Space};
use crate::morse::{attractor_of_inward, dual_repeller};
use crate::relation::Relation;
use crate::viability::{c_minus, c_plus};

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryReport {
    /// `closure(F(C) \ C)`.
    pub rho: CellSet,
    /// `C ∩ rho`.
    pub delta: CellSet,
    /// `F(C) ⊆ C`.
    pub plus_invariant: bool,
}

pub fn f_boundary(f: &Relation, c: &CellSet) -> Result<BoundaryReport> {
    let img = f.image(c)?;
    let rho = f.space().closure(&img.difference(c));
    let delta = rho.intersection(c);
    Ok(BoundaryReport { rho, delta, plus_invariant: img.is_subset(c) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsolatingChecks {
    pub isolating: bool,
    pub simple: bool,
    pub index_type: bool,
    pub minus_isolating: bool,
    pub plus_isolating: bool,
    pub c_pm: CellSet,
}

pub fn isolating_checks(f: &Relation, c: &CellSet) -> Result<IsolatingChecks> {
    let space = f.space();
    space.check_set(c)?;
    let interior = space.interior(c);
    let plus = c_plus(f, c);
    let minus = c_minus(f, c);
    let c_pm = plus.intersection(&minus);
    let fc = f.restrict_unchecked(c);
    let simple = fc.img(c).intersection(&fc.preimg(c)).is_subset(&interior);
    let isolating = c_pm.is_subset(&interior);
    let delta = f_boundary(f, c)?.delta;
    Ok(IsolatingChecks {
        isolating,
        simple,
        index_type: isolating && delta.is_disjoint(&plus),
        minus_isolating: minus.is_subset(&interior),
        plus_isolating: plus.is_subset(&interior),
        c_pm,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexPair {
    pub p1: CellSet,
    pub p2: CellSet,
    pub rel_neighborhood: Option<CellSet>,
    /// `(P1)±`.
    pub viable_set: CellSet,
}

/// Builds the smallest `P2` making `(P1, P2)` an index pair:
/// `δ_F(P1)` together with everything it reaches inside `P1`.
pub fn build_index_pair(f: &Relation, p1: &CellSet) -> Result<IndexPair> {
    let checks = isolating_checks(f, p1)?;
    if !checks.isolating {
        return Err(Error::Precondition("not index type: (P1)± is not inside the interior of P1".into()));
    }
    if !checks.index_type {
        return Err(Error::Precondition("not index type: δ_F(P1) meets (P1)+".into()));
    }
    let delta = f_boundary(f, p1)?.delta;
    let p2 = f.restrict_unchecked(p1).closure_unchecked(&delta);
    Ok(IndexPair { p1: p1.clone(), p2, rel_neighborhood: None, viable_set: checks.c_pm })
}

/// A violated index pair condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexCondition {
    /// `P2 ⊆ P1`.
    Nested,
    /// `P2` is forward invariant under `F_{P1}`.
    P2Invariant,
    /// `(P1)± ⊆ interior(P1) \ P2`.
    CoreInside,
    /// `δ_F(P1) ⊆ P2`.
    ExitInP2,
    /// `P2 ⊆ P1 ⊆ C`.
    RelNested,
    /// `P1` and `P2` are forward invariant under `F_C`.
    RelInvariant,
    /// `C± ⊆ interior(P1) \ P2`.
    RelCore,
    /// `P1 \ P2 ⊆ interior(C)`.
    RelInterior,
}

impl fmt::Display for IndexCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IndexCondition::Nested => "P2 is not contained in P1",
            IndexCondition::P2Invariant => "P2 is not forward invariant in P1",
            IndexCondition::CoreInside => "(P1)± is not inside interior(P1) minus P2",
            IndexCondition::ExitInP2 => "the F-boundary of P1 is not inside P2",
            IndexCondition::RelNested => "P1 is not contained in C",
            IndexCondition::RelInvariant => "P1 or P2 is not forward invariant under F_C",
            IndexCondition::RelCore => "C± is not inside interior(P1) minus P2",
            IndexCondition::RelInterior => "P1 minus P2 is not inside interior(C)",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexPairValidation {
    pub pass: bool,
    pub failed_conditions: Vec<IndexCondition>,
    /// `closure(P1 \ P2) ⊆ interior(C)`, when a neighborhood is given.
    pub strong_interior: Option<bool>,
    /// `P1 ∩ ∂C = δ_F(P1)`, when a neighborhood is given.
    pub boundary_is_exit: Option<bool>,
}

pub fn validate_index_pair(f: &Relation, pair: &IndexPair) -> Result<IndexPairValidation> {
    f.space().check_set(&pair.p1)?;
    let delta = f_boundary(f, &pair.p1)?.delta;
    validate_with_exit(f, pair, &delta)
}

/// Index pair validation with a caller-supplied exit set in place of `δ_F(P1)`.
pub(crate) fn validate_with_exit(f: &Relation, pair: &IndexPair, delta: &CellSet) -> Result<IndexPairValidation> {
    let space = f.space();
    space.check_set(&pair.p1)?;
    space.check_set(&pair.p2)?;
    let (p1, p2) = (&pair.p1, &pair.p2);
    let mut failed = Vec::new();
    if !p2.is_subset(p1) {
        failed.push(IndexCondition::Nested);
    }
    if !f.img(p2).intersection(p1).is_subset(p2) {
        failed.push(IndexCondition::P2Invariant);
    }
    let core = c_plus(f, p1).intersection(&c_minus(f, p1));
    let inner = space.interior(p1).difference(p2);
    if !core.is_subset(&inner) {
        failed.push(IndexCondition::CoreInside);
    }
    if !delta.is_subset(p2) {
        failed.push(IndexCondition::ExitInP2);
    }
    let (mut strong_interior, mut boundary_is_exit) = (None, None);
    if let Some(c) = &pair.rel_neighborhood {
        space.check_set(c)?;
        if !p2.is_subset(p1) || !p1.is_subset(c) {
            failed.push(IndexCondition::RelNested);
        }
        if !f.img(p1).intersection(c).is_subset(p1) || !f.img(p2).intersection(c).is_subset(p2) {
            failed.push(IndexCondition::RelInvariant);
        }
        let c_core = c_plus(f, c).intersection(&c_minus(f, c));
        if !c_core.is_subset(&inner) {
            failed.push(IndexCondition::RelCore);
        }
        let c_int = space.interior(c);
        let rest = p1.difference(p2);
        if !rest.is_subset(&c_int) {
            failed.push(IndexCondition::RelInterior);
        }
        strong_interior = Some(space.closure(&rest).is_subset(&c_int));
        boundary_is_exit = Some(p1.intersection(&space.boundary(c)) == *delta);
    }
    Ok(IndexPairValidation { pass: failed.is_empty(), failed_conditions: failed, strong_interior, boundary_is_exit })
}

fn require_valid(f: &Relation, pair: &IndexPair) -> Result<()> {
    let v = validate_index_pair(f, pair)?;
    if !v.pass {
        let names: Vec<String> = v.failed_conditions.iter().map(|c| c.to_string()).collect();
        return Err(Error::Certificate(names.join("; ")));
    }
    Ok(())
}

/// `(P1 ∩ Q1, P1 ∩ Q1 ∩ (P2 ∪ Q2))`.
pub fn wedge(f: &Relation, a: &IndexPair, b: &IndexPair) -> Result<IndexPair> {
    require_valid(f, a)?;
    require_valid(f, b)?;
    let p1 = a.p1.intersection(&b.p1);
    let p2 = p1.intersection(&a.p2.union(&b.p2));
    let rel_neighborhood = match (&a.rel_neighborhood, &b.rel_neighborhood) {
        (Some(c), Some(d)) => Some(c.intersection(d)),
        _ => None,
    };
    let viable_set = c_plus(f, &p1).intersection(&c_minus(f, &p1));
    Ok(IndexPair { p1, p2, rel_neighborhood, viable_set })
}

/// `Q1 ≺ P1`: `Q1 ⊆ P1` and `ρ_F(Q1)` misses `(P1)+`.
pub fn precedes(f: &Relation, q1: &CellSet, p1: &CellSet) -> Result<bool> {
    f.space().check_set(q1)?;
    f.space().check_set(p1)?;
    if !q1.is_subset(p1) {
        return Ok(false);
    }
    let p_plus = c_plus(f, p1);
    let holds = f_boundary(f, q1)?.rho.is_disjoint(&p_plus);
    if holds {
        debug_assert_eq!(c_plus(f, q1), q1.intersection(&p_plus));
    }
    Ok(holds)
}

#[derive(Clone, Debug)]
pub struct Quotient {
    /// Relation on `N + 1` abstract nodes; node `N` is the collapsed `P2`.
    pub relation: Relation,
    pub star: usize,
    /// `P1 \ P2`.
    pub nodes: CellSet,
    /// Whether `{star}` is an attractor whose dual repeller is `(P1)+`;
    /// `None` when `F` does not have full domain.
    pub star_attractor: Option<bool>,
    pub dual_repeller: Option<CellSet>,
}

/// The relation induced on `P1 / P2` with `P2` collapsed to one node.
pub fn quotient_relation(f: &Relation, pair: &IndexPair) -> Result<Quotient> {
    require_valid(f, pair)?;
    let n = f.cell_count();
    let star = n;
    let nodes = pair.p1.difference(&pair.p2);
    let sink = pair.p2.union(&f_boundary(f, &pair.p1)?.rho);
    let mut rows = vec![Vec::new(); n + 1];
    for x in nodes.iter() {
        let mut row: Vec<usize> = f.row(x).iter().copied().filter(|&y| nodes.contains(y)).collect();
        if f.row(x).iter().any(|&y| sink.contains(y)) {
            row.push(star);
        }
        rows[x] = row;
    }
    rows[star].push(star);
    let relation = Relation::from_rows(Space::discrete(n + 1), rows)?;
    let (star_attractor, dual) = if f.domain().len() == n {
        let s = CellSet::from_cells(n + 1, [star]);
        let attractor = attractor_of_inward(&relation, &s).ok();
        let repeller = dual_repeller(&relation, &s)?.repeller;
        let p_plus = c_plus(f, &pair.p1);
        let expected = CellSet::from_cells(n + 1, p_plus.iter());
        (Some(attractor == Some(s) && repeller == expected), Some(CellSet::from_cells(n, repeller.iter())))
    } else {
        (None, None)
    };
    Ok(Quotient { relation, star, nodes, star_attractor, dual_repeller: dual })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StableUnstable {
    pub ws: CellSet,
    pub wu: CellSet,
}

/// `W^s = ⋃ F^{-k}(C₊)` and `W^u = ⋃ F^k(C₋)`.
pub fn stable_unstable(f: &Relation, c: &CellSet) -> Result<StableUnstable> {
    if !isolating_checks(f, c)?.isolating {
        return Err(Error::Precondition("C is not an isolating neighborhood".into()));
    }
    let ws = f.inverse().closure_unchecked(&c_plus(f, c));
    let wu = f.closure_unchecked(&c_minus(f, c));
    Ok(StableUnstable { ws, wu })
}

/// Whether every `F₁ ⊆ V_eps ∘ F ∘ V_eps` keeps `(F₁)_C±` inside `U`.
/// Checking the largest such `F₁` suffices.
pub fn robust_at(f: &Relation, c: &CellSet, u: &CellSet, eps: Eps) -> Result<bool> {
    f.space().check_set(c)?;
    f.space().check_set(u)?;
    let g = dilate(f, eps, Dilation::TwoSided);
    Ok(c_plus(&g, c).intersection(&c_minus(&g, c)).is_subset(u))
}

/// Largest eps of the ladder at which [`robust_at`] holds, found by bisection
/// over the ladder sorted in decreasing order.
pub fn robustness_eps(f: &Relation, c: &CellSet, u: &CellSet, ladder: &[Eps]) -> Result<Option<Eps>> {
    if !u.is_subset(&f.space().interior(c)) {
        return Err(Error::Precondition("U must lie in the interior of C".into()));
    }
    let mut eps: Vec<Eps> = ladder.to_vec();
    // strict zero sits below touching zero
    eps.sort_by(|a, b| (b.value(), !b.is_strict_identity()).partial_cmp(&(a.value(), !a.is_strict_identity())).expect("finite eps"));
    // robustness is monotone: it fails above some threshold and holds below
    let (mut lo, mut hi) = (0usize, eps.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if robust_at(f, c, u, eps[mid])? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(eps.get(lo).copied())
}
