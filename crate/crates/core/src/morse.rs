//! Inward sets, attractors, dual repellers and the attractor-repeller family
//! separating chain components.

use crate::cellset::CellSet;
use crate::chain::{chain_analysis, dilate, ChainAnalysis, Dilation};
use crate::error::{Error, Result};
use crate::graph::Condensation;
use crate::grid::Eps;
use crate::relation::Relation;
use crate::viability::{c_minus, c_plus};

/// `closure(F(U)) ⊆ interior(U)`.
pub fn is_inward(f: &Relation, u: &CellSet) -> Result<bool> {
    let img = f.image(u)?;
    let space = f.space();
    Ok(space.closure(&img).is_subset(&space.interior(u)))
}

/// The attractor `⋂ F^k(U)` of an inward set.
pub fn attractor_of_inward(f: &Relation, u: &CellSet) -> Result<CellSet> {
    if !is_inward(f, u)? {
        return Err(Error::NotInward);
    }
    Ok(c_minus(f, u))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualRepeller {
    pub repeller: CellSet,
    /// Whether `F(U) ⊆ U`, the premise under which the set is the dual repeller.
    pub forward_invariant: bool,
}

/// Greatest subset of `X \ interior(U)` in which every cell has a successor.
pub fn dual_repeller(f: &Relation, u: &CellSet) -> Result<DualRepeller> {
    let img = f.image(u)?;
    let outside = f.space().interior(u).complement();
    Ok(DualRepeller { repeller: c_plus(f, &outside), forward_invariant: img.is_subset(u) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttractorRepellerPair {
    pub attractor: CellSet,
    pub repeller: CellSet,
    /// The forward-closed set whose limit is the attractor.
    pub inward_witness: CellSet,
    /// Ids of the chain components making up the down-set.
    pub component_downset: Vec<usize>,
}

/// Chain components and their reachability order.
#[derive(Clone, Debug)]
pub struct MorseGraph {
    pub components: Vec<CellSet>,
    /// `(a, b)` when component `a` chain-reaches a distinct component `b`.
    pub edges: Vec<(usize, usize)>,
}

impl MorseGraph {
    pub fn from_analysis(chain: &ChainAnalysis) -> Self {
        let k = chain.components.len();
        let mut edges = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if a != b && chain.reaches(a, b) {
                    edges.push((a, b));
                }
            }
        }
        MorseGraph { components: chain.components.clone(), edges }
    }

    pub fn is_acyclic(&self) -> bool {
        let mut adj = vec![Vec::new(); self.components.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
        }
        Condensation::new(&adj).cyclic.iter().all(|&c| !c)
    }
}

/// Attractor-repeller pairs of `V_eps ∘ F`, one for every down-set of
/// components of the form "everything chain-reachable from a cell", plus the
/// full set, ordered by least attractor cell.
pub fn ar_family(f: &Relation, eps: Eps) -> Vec<AttractorRepellerPair> {
    let chain = chain_analysis(f, eps);
    ar_family_from(f, eps, &chain)
}

pub(crate) fn ar_family_from(f: &Relation, eps: Eps, chain: &ChainAnalysis) -> Vec<AttractorRepellerPair> {
    let n = f.cell_count();
    let k = chain.components.len();
    let g = dilate(f, eps, Dilation::OneSided);
    // components reached by each cell, in zero or more chain steps
    let reached: Vec<Vec<bool>> = (0..n)
        .map(|x| {
            let mut r = vec![false; k];
            if let Some(i) = chain.component_of[x] {
                r[i] = true;
            }
            for &y in chain.chain_relation.row(x) {
                if let Some(i) = chain.component_of[y] {
                    r[i] = true;
                }
            }
            r
        })
        .collect();
    let mut downsets: Vec<Vec<bool>> = reached.clone();
    downsets.push(vec![true; k]);
    downsets.sort();
    downsets.dedup();
    let mut family: Vec<AttractorRepellerPair> = downsets
        .into_iter()
        .map(|d| {
            let witness =
                CellSet::from_cells(n, (0..n).filter(|&x| (0..k).all(|i| !reached[x][i] || d[i])));
            let attractor = c_minus(&g, &witness);
            let repeller = c_plus(&g, &witness.complement());
            let component_downset = (0..k).filter(|&i| d[i]).collect();
            AttractorRepellerPair { attractor, repeller, inward_witness: witness, component_downset }
        })
        .collect();
    family.sort_by(|p, q| {
        let key = |s: &AttractorRepellerPair| (s.attractor.first().is_none(), s.attractor.to_vec(), s.repeller.to_vec());
        key(p).cmp(&key(q))
    });
    family.dedup_by(|p, q| p.attractor == q.attractor && p.repeller == q.repeller);
    family
}
