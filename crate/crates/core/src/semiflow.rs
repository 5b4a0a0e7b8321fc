//! Semiflows sampled on the time lattice `{kΔ : k ≥ 0}` with `KΔ = 1`.

use std::sync::Arc;

use crate::cellset::CellSet;
use crate::conley::{f_boundary, isolating_checks, validate_with_exit, IndexPair, IndexPairValidation, IsolatingChecks};
use crate::error::{Error, Result};
use crate::grid::{outer_approximate_map, OuterApprox, Sampler, Space};
use crate::relation::{compose_unchecked, Relation};
use crate::viability::{viability_report, Extended};

/// A semiflow given by the outer approximation of its time-`Δ` map.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiflowApprox {
    step: Relation,
    steps_per_unit: usize,
    complete: bool,
}

impl SemiflowApprox {
    pub fn new(step: Relation, steps_per_unit: usize) -> Result<Self> {
        if steps_per_unit == 0 {
            return Err(Error::Precondition("steps per unit time must be at least 1".into()));
        }
        let complete = step.domain().len() == step.cell_count();
        Ok(SemiflowApprox { step, steps_per_unit, complete })
    }

    /// Samples the time-`Δ` map `phi_delta` with `Δ = 1 / steps_per_unit`.
    pub fn from_sampler(
        space: &Arc<Space>,
        phi_delta: &dyn Sampler,
        steps_per_unit: usize,
        config: OuterApprox,
    ) -> Result<Self> {
        SemiflowApprox::new(outer_approximate_map(space, phi_delta, config)?, steps_per_unit)
    }

    pub fn step(&self) -> &Relation {
        &self.step
    }

    pub fn space(&self) -> &Arc<Space> {
        self.step.space()
    }

    pub fn steps_per_unit(&self) -> usize {
        self.steps_per_unit
    }

    pub fn delta(&self) -> f64 {
        1.0 / self.steps_per_unit as f64
    }

    /// Every cell has a successor.
    pub fn complete(&self) -> bool {
        self.complete
    }

    /// The lattice index `k` with `kΔ = t`.
    pub fn lattice_index(&self, t: f64) -> Result<usize> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::OffLattice(t));
        }
        let scaled = t * self.steps_per_unit as f64;
        let k = scaled.round();
        if (scaled - k).abs() > 1e-9 {
            return Err(Error::OffLattice(t));
        }
        Ok(k as usize)
    }

    fn window(&self, t1: f64, t2: f64) -> Result<(usize, usize)> {
        if !(t1 <= t2) {
            return Err(Error::BadWindow(t1, t2));
        }
        Ok((self.lattice_index(t1)?, self.lattice_index(t2)?))
    }
}

/// `⋃_{k=a}^{b} R^k`, with `R^0` replaced by `zero`.
fn power_union(r: &Relation, a: usize, b: usize, zero: &Relation) -> Relation {
    let mut cur = zero.clone();
    let mut out = Relation::empty(r.space().clone());
    for k in 0..=b {
        if k > 0 {
            cur = compose_unchecked(r, &cur);
        }
        if k >= a {
            out = out.union(&cur).expect("same space");
        }
    }
    out
}

/// `φ^{[t1, t2]}`: pairs joined by a lattice trajectory of duration in the window.
pub fn interval_relation(sf: &SemiflowApprox, t1: f64, t2: f64) -> Result<Relation> {
    let (a, b) = sf.window(t1, t2)?;
    Ok(power_union(&sf.step, a, b, &Relation::identity(sf.space().clone())))
}

/// `(φ_C)^{[t1, t2]}`: as [`interval_relation`] but through trajectories that
/// stay in `C`. Duration zero contributes the identity on the whole space.
pub fn restricted_interval_relation(sf: &SemiflowApprox, c: &CellSet, t1: f64, t2: f64) -> Result<Relation> {
    sf.space().check_set(c)?;
    let (a, b) = sf.window(t1, t2)?;
    let fc = sf.step.restrict_unchecked(c);
    Ok(power_union(&fc, a, b, &Relation::identity(sf.space().clone())))
}

/// Relations `φ^{kΔ}` for `k = 0..=horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedRelationTable {
    rels: Vec<Relation>,
}

impl TimedRelationTable {
    /// Entry `k` must be at time `kΔ`; entry 0 must lie inside the identity.
    pub fn new(rels: Vec<Relation>) -> Result<Self> {
        let first = rels.first().ok_or_else(|| Error::Precondition("table needs an entry at time 0".into()))?;
        let n = first.cell_count();
        for r in &rels {
            if r.cell_count() != n {
                return Err(Error::SpaceMismatch { left: n, right: r.cell_count() });
            }
        }
        if first.edges().any(|(x, y)| x != y) {
            return Err(Error::Precondition("time-0 entry is not inside the identity".into()));
        }
        Ok(TimedRelationTable { rels })
    }

    /// `step^k` for `k ≤ horizon`.
    pub fn from_step(step: &Relation, horizon: usize) -> Self {
        let mut rels = vec![Relation::identity(step.space().clone())];
        for k in 1..=horizon {
            let next = compose_unchecked(step, &rels[k - 1]);
            rels.push(next);
        }
        TimedRelationTable { rels }
    }

    pub fn horizon(&self) -> usize {
        self.rels.len() - 1
    }

    pub fn at(&self, k: usize) -> &Relation {
        &self.rels[k]
    }

    pub fn relations(&self) -> &[Relation] {
        &self.rels
    }

    /// `Ψ ∩ (C × T × C)`.
    pub fn restrict_to(&self, c: &CellSet) -> Result<Self> {
        self.rels[0].space().check_set(c)?;
        Ok(TimedRelationTable { rels: self.rels.iter().map(|r| r.restrict_unchecked(c)).collect() })
    }

    /// Checks `φ^{kΔ} ∘ φ^{jΔ} ⊆ φ^{(j+k)Δ}` up to the horizon.
    pub fn check_weak_kolmogorov(&self) -> Result<()> {
        let h = self.horizon();
        for j in 0..=h {
            for k in 0..=h - j {
                let comp = compose_unchecked(&self.rels[k], &self.rels[j]);
                let missing = comp.edges().find(|&(x, y)| !self.rels[j + k].contains(x, y));
                if let Some((x, y)) = missing {
                    return Err(Error::WeakKolmogorov { x, y, j, k, total: j + k });
                }
            }
        }
        Ok(())
    }

    /// One application of `Ψ ↦ Ψ′`: keeps `(x, kΔ, y)` only when every split
    /// `k = j + (k - j)` has a midpoint.
    pub fn refine_once(&self) -> Self {
        let rels = (0..self.rels.len())
            .map(|k| {
                let mut acc = self.rels[k].clone();
                for j in 0..=k {
                    acc = acc.intersection(&compose_unchecked(&self.rels[k - j], &self.rels[j])).expect("same space");
                }
                acc
            })
            .collect();
        TimedRelationTable { rels }
    }
}

/// Iterates [`TimedRelationTable::refine_once`] to its fixpoint, the largest
/// lattice semiflow inside the table.
pub fn refine_weak_semiflow(table: &TimedRelationTable) -> Result<TimedRelationTable> {
    table.check_weak_kolmogorov()?;
    let mut cur = table.clone();
    loop {
        let next = cur.refine_once();
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TauReport {
    /// Longest in-`C` forward time; `INFINITY` on `C+`, zero outside `C`.
    pub tau: Vec<f64>,
    /// Longest in-`C` backward time.
    pub tau_bar: Vec<f64>,
    pub terminal: CellSet,
}

pub fn tau_and_terminal(sf: &SemiflowApprox, c: &CellSet) -> Result<TauReport> {
    let report = viability_report(&sf.step, c)?;
    let scale = |v: &Extended| match v {
        Extended::Finite(k) => *k as f64 * sf.delta(),
        Extended::Infinite => f64::INFINITY,
    };
    Ok(TauReport {
        tau: report.nu.iter().map(scale).collect(),
        tau_bar: report.nu_bar.iter().map(scale).collect(),
        terminal: report.terminal,
    })
}

/// `δ_Φ(C)` at the finest lattice step: `C ∩ closure(step(C) \ C)`.
pub fn phi_boundary(sf: &SemiflowApprox, c: &CellSet) -> Result<CellSet> {
    Ok(f_boundary(&sf.step, c)?.delta)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemiflowConley {
    /// `(φ_C)^J`.
    pub relation: Relation,
    pub checks: IsolatingChecks,
    pub exit: CellSet,
    /// Present when `C` is isolating and its exit set misses `C+`.
    pub index_pair: Option<IndexPair>,
    pub validation: Option<IndexPairValidation>,
}

/// Isolation and index pair data of `C` for the semiflow, computed from
/// `F = (φ_C)^J` with the exit set `δ_Φ(C)`.
pub fn semiflow_conley(sf: &SemiflowApprox, c: &CellSet) -> Result<SemiflowConley> {
    let relation = restricted_interval_relation(sf, c, 1.0, 2.0)?;
    let mut checks = isolating_checks(&relation, c)?;
    let exit = phi_boundary(sf, c)?;
    let c_plus = crate::viability::c_plus(&relation, c);
    checks.index_type = checks.isolating && exit.is_disjoint(&c_plus);
    let (index_pair, validation) = if checks.index_type {
        let p2 = sf.step.restrict_unchecked(c).closure_unchecked(&exit);
        let pair = IndexPair { p1: c.clone(), p2, rel_neighborhood: None, viable_set: checks.c_pm.clone() };
        let v = validate_with_exit(&relation, &pair, &exit)?;
        (Some(pair), Some(v))
    } else {
        (None, None)
    };
    Ok(SemiflowConley { relation, checks, exit, index_pair, validation })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquicontinuityCheck {
    pub max_distance: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Every step edge moves at most `speed · Δ + bloat + cell width`.
pub fn equicontinuity_check(sf: &SemiflowApprox, speed: f64, bloat: f64) -> Result<EquicontinuityCheck> {
    let space = sf.space();
    let width = space
        .as_grid()
        .map(|g| (0..g.dim()).map(|a| g.width(a)).fold(0.0, f64::max))
        .unwrap_or(0.0);
    let bound = speed * sf.delta() + bloat + width;
    let max_distance = sf.step.edges().map(|(x, y)| space.dist(x, y)).fold(0.0, f64::max);
    Ok(EquicontinuityCheck { max_distance, bound, pass: max_distance <= bound + 1e-12 })
}
