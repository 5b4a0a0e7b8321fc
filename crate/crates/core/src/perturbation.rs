//! Small perturbations that destroy isolated invariant sets.

use std::sync::Arc;

use crate::cellset::CellSet;
use crate::conley::isolating_checks;
use crate::error::{Error, Result};
use crate::grid::{le_tol, v_eps_relation, Eps, Space};
use crate::relation::{compose_unchecked, Relation};
use crate::viability::{c_minus, c_plus, viability_report, Extended};

const LADDER_STEPS: usize = 40;

/// `δ = eps, eps/2, eps/4, …` followed by `δ = 0`.
fn dyadic_ladder(eps: f64) -> impl Iterator<Item = f64> {
    (0..LADDER_STEPS).map(move |j| eps / f64::powi(2.0, j as i32)).chain(std::iter::once(0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseComplement {
    /// `X \ V_δ(K)`.
    pub set: CellSet,
    pub delta: f64,
    /// `interior(closure(K)) = ∅`.
    pub nowhere_dense: bool,
}

/// `V_δ(K) = K ∪ {c : d(c, K) < δ}`.
fn open_neighborhood(space: &Space, k: &CellSet, delta: f64) -> CellSet {
    let n = space.cell_count();
    CellSet::from_cells(
        n,
        (0..n).filter(|&c| k.contains(c) || space.dist_to_set(c, k).is_some_and(|d| d < delta && !le_tol(delta, d))),
    )
}

/// The complement of the largest ladder neighborhood `V_δ(K)` that is still
/// eps-dense.
pub fn eps_dense_complement(space: &Space, k: &CellSet, eps: f64) -> Result<DenseComplement> {
    space.check_set(k)?;
    if !(eps >= 0.0) {
        return Err(Error::NegativeEps(eps));
    }
    let nowhere_dense = space.interior(&space.closure(k)).is_empty();
    for delta in dyadic_ladder(eps) {
        let set = open_neighborhood(space, k, delta).complement();
        if !set.is_empty() && space.is_eps_dense(&set, eps) {
            return Ok(DenseComplement { set, delta, nowhere_dense });
        }
    }
    let rest = k.complement();
    let radius = (0..space.cell_count())
        .map(|c| space.dist_to_set(c, &rest).unwrap_or(space.diameter() + 1.0))
        .fold(0.0, f64::max);
    Err(Error::NotDense { radius })
}

/// `R_A`: each cell outside `A` goes to its nearest cells of `A`, ties
/// kept; cells of `A` stay fixed.
pub fn retraction_relation(space: &Arc<Space>, a: &CellSet) -> Result<Relation> {
    space.check_set(a)?;
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let rows = (0..space.cell_count())
        .map(|c| {
            if a.contains(c) {
                return vec![c];
            }
            let best = space.dist_to_set(c, a).expect("A is nonempty");
            a.iter().filter(|&y| le_tol(space.dist(c, y), best)).collect()
        })
        .collect();
    Ok(Relation::from_rows_unchecked(space.clone(), rows))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationCertificate {
    pub eps: f64,
    /// `G ⊆ V_eps ∘ F`.
    pub containment_fwd: bool,
    /// `F ⊆ V_eps ∘ G`.
    pub containment_bwd: bool,
    /// Least `N` with `(G_C)^N = ∅`.
    pub annihilation_n: Option<usize>,
    pub surjective: bool,
    pub domain_full: bool,
    pub inverse_domain_full: bool,
}

impl PerturbationCertificate {
    pub fn compute(f: &Relation, g: &Relation, c: &CellSet, eps: f64) -> Result<Self> {
        let v = v_eps_relation(f.space(), Eps::new(eps)?);
        let report = viability_report(g, c)?;
        let annihilation_n = if report.c_plus.is_empty() {
            let longest = c
                .iter()
                .map(|x| match report.nu[x] {
                    Extended::Finite(v) => v as usize,
                    Extended::Infinite => unreachable!("no infinite paths once C+ is empty"),
                })
                .max();
            Some(longest.map_or(1, |l| l + 1))
        } else {
            None
        };
        let preds = g.structural_predicates();
        let n = g.cell_count();
        Ok(PerturbationCertificate {
            eps,
            containment_fwd: g.is_subset(&compose_unchecked(&v, f)),
            containment_bwd: f.is_subset(&compose_unchecked(&v, g)),
            annihilation_n,
            surjective: preds.surjective,
            domain_full: g.domain().len() == n,
            inverse_domain_full: g.range().len() == n,
        })
    }

    /// Containments hold and `C` is emptied in finitely many steps.
    pub fn eliminates(&self) -> bool {
        self.containment_fwd && self.containment_bwd && self.annihilation_n.is_some()
    }
}

/// `C` minus everything `F_C` reaches from `C \ T`: the greatest subset of
/// `T ∩ C` without `F_C`-predecessors outside itself.
fn backward_closed_core(f: &Relation, c: &CellSet, t: &CellSet) -> CellSet {
    let fc = f.restrict_unchecked(c);
    c.difference(&fc.closure_unchecked(&c.difference(t)))
}

/// The greatest subset of `T ∩ C` without `F_C`-successors outside itself.
fn forward_closed_core(f: &Relation, c: &CellSet, t: &CellSet) -> CellSet {
    let fc = f.restrict_unchecked(c).inverse();
    c.difference(&fc.closure_unchecked(&c.difference(t)))
}

fn require_isolating(f: &Relation, c: &CellSet) -> Result<()> {
    if !isolating_checks(f, c)?.isolating {
        return Err(Error::Precondition("C is not an isolating neighborhood".into()));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct RepellerElimination {
    pub g: Relation,
    pub cert: PerturbationCertificate,
    /// The retraction target `A = X \ Q`.
    pub retract_to: CellSet,
    /// Backward-closed neighborhood of `C₊` inside `C`.
    pub q: CellSet,
    /// `C \ Q`, on which `G` agrees with `F`.
    pub a1: CellSet,
    pub agrees_on_a1: bool,
}

/// `G = R_A ∘ F` with `A` the complement of a backward-closed neighborhood of
/// `C₊` whose complement is eps-dense.
pub fn eliminate_repeller(f: &Relation, c: &CellSet, eps: f64) -> Result<RepellerElimination> {
    let space = f.space().clone();
    space.check_set(c)?;
    if f.domain().len() != f.cell_count() {
        return Err(Error::Precondition("F must have full domain".into()));
    }
    require_isolating(f, c)?;
    let plus = c_plus(f, c);
    let w_plus = eps_dense_complement(&space, &plus, eps)?.set.complement();
    let q = backward_closed_core(f, c, &w_plus);
    let retract_to = q.complement();
    let a1 = c.difference(&q);
    let g = compose_unchecked(&retraction_relation(&space, &retract_to)?, f);
    let cert = PerturbationCertificate::compute(f, &g, c, eps)?;
    let agrees_on_a1 = a1.iter().all(|x| g.row(x) == f.row(x));
    Ok(RepellerElimination { g, cert, retract_to, q, a1, agrees_on_a1 })
}

/// A block `K_i` of the cover of `Q ∩ P` with its anchor `y_i ∈ Q \ P` and
/// the `F`-preimage `x_i` of the anchor.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverBlock {
    pub cells: CellSet,
    pub y: usize,
    pub x: usize,
}

#[derive(Clone, Debug)]
pub struct SaddleElimination {
    pub g_hat: Relation,
    pub cert: PerturbationCertificate,
    pub q: CellSet,
    pub p: CellSet,
    pub retract_to: CellSet,
    pub blocks: Vec<CoverBlock>,
}

/// Greedy partition of `s` into touching-connected blocks whose pairwise
/// distances stay below `eps / 2`.
fn partition(space: &Space, s: &CellSet, eps: f64) -> Vec<CellSet> {
    let n = space.cell_count();
    let mut left = s.clone();
    let mut blocks = Vec::new();
    while let Some(seed) = left.first() {
        left.remove(seed);
        let mut block = vec![seed];
        let mut head = 0;
        while head < block.len() {
            let b = block[head];
            head += 1;
            for z in space.touching(b) {
                if left.contains(z) && block.iter().all(|&w| space.dist(z, w) < eps / 2.0) {
                    left.remove(z);
                    block.push(z);
                }
            }
        }
        blocks.push(CellSet::from_cells(n, block));
    }
    blocks
}

/// Anchors for every block, if each block has one.
fn anchor_blocks(f: &Relation, blocks: Vec<CellSet>, exits: &CellSet, eps: f64) -> Option<Vec<CoverBlock>> {
    let space = f.space();
    let inv = f.inverse();
    let mut out = Vec::with_capacity(blocks.len());
    for cells in blocks {
        let y = exits.iter().find(|&y| cells.iter().all(|z| le_tol(space.dist(y, z), eps)))?;
        out.push(CoverBlock { x: inv.row(y)[0], cells, y });
    }
    Some(out)
}

/// Smallest eps at which singleton blocks could be anchored.
fn minimal_cover_eps(space: &Space, s: &CellSet, exits: &CellSet) -> f64 {
    s.iter().map(|z| space.dist_to_set(z, exits).unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
}

/// Surjective perturbation `Ĝ = R̂ ∘ F ∪ M` emptying `C`.
pub fn eliminate_saddle(f: &Relation, c: &CellSet, eps: f64) -> Result<SaddleElimination> {
    let space = f.space().clone();
    space.check_set(c)?;
    if !f.structural_predicates().surjective {
        return Err(Error::Precondition("F must be surjective".into()));
    }
    require_isolating(f, c)?;
    let plus = c_plus(f, c);
    let minus = c_minus(f, c);
    let w_plus = eps_dense_complement(&space, &plus, eps)?.set.complement();
    eps_dense_complement(&space, &minus, eps)?;
    let q = backward_closed_core(f, c, &w_plus);
    let retract_to = q.complement();
    let mut minimal = f64::INFINITY;
    for delta in dyadic_ladder(eps) {
        let w_minus = open_neighborhood(&space, &minus, delta);
        let p = forward_closed_core(f, c, &w_minus);
        let s = q.intersection(&p);
        let exits = q.difference(&p);
        match anchor_blocks(f, partition(&space, &s, eps), &exits, eps) {
            Some(blocks) => {
                let g_hat = saddle_relation(f, &s, &retract_to, &blocks)?;
                let cert = PerturbationCertificate::compute(f, &g_hat, c, eps)?;
                return Ok(SaddleElimination { g_hat, cert, q, p, retract_to, blocks });
            }
            None => minimal = minimal.min(minimal_cover_eps(&space, &s, &exits)),
        }
    }
    Err(Error::CoverInfeasible { eps, minimal })
}

fn saddle_relation(f: &Relation, s: &CellSet, retract_to: &CellSet, blocks: &[CoverBlock]) -> Result<Relation> {
    let space = f.space();
    let r_a = retraction_relation(space, retract_to)?;
    let rows = (0..f.cell_count()).map(|y| if s.contains(y) { r_a.row(y).to_vec() } else { vec![y] }).collect();
    let r_hat = Relation::from_rows_unchecked(space.clone(), rows);
    let g1 = compose_unchecked(&r_hat, f);
    let mut rows: Vec<Vec<usize>> = g1.rows().to_vec();
    for b in blocks {
        rows[b.x].push(b.y);
        rows[b.x].extend(b.cells.iter());
    }
    Ok(Relation::from_rows_unchecked(space.clone(), rows))
}
