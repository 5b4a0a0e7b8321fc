//! The eps-chain relation, chain recurrence and chain components.

use std::collections::VecDeque;

use crate::cellset::CellSet;
use crate::error::Result;
use crate::graph::Condensation;
use crate::grid::{v_eps_relation, Eps};
use crate::relation::{compose_unchecked, Relation};
use crate::viability;

/// Which side(s) of `F` the eps-dilation is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dilation {
    /// `V_eps ∘ F`.
    #[default]
    OneSided,
    /// `V_eps ∘ F ∘ V_eps`.
    TwoSided,
}

/// `V_eps ∘ F` or `V_eps ∘ F ∘ V_eps`.
pub fn dilate(f: &Relation, eps: Eps, mode: Dilation) -> Relation {
    if eps.is_strict_identity() {
        return f.clone();
    }
    let v = v_eps_relation(f.space(), eps);
    let vf = compose_unchecked(&v, f);
    match mode {
        Dilation::OneSided => vf,
        Dilation::TwoSided => compose_unchecked(&vf, &v),
    }
}

#[derive(Clone, Debug)]
pub struct ChainAnalysis {
    pub eps: Eps,
    pub chain_relation: Relation,
    pub recurrent: CellSet,
    /// Chain components ordered by least cell.
    pub components: Vec<CellSet>,
    pub component_of: Vec<Option<usize>>,
}

impl PartialEq for ChainAnalysis {
    fn eq(&self, other: &Self) -> bool {
        self.chain_relation == other.chain_relation
            && self.recurrent == other.recurrent
            && self.components == other.components
    }
}

impl ChainAnalysis {
    /// Whether component `a` chain-reaches component `b`.
    pub fn reaches(&self, a: usize, b: usize) -> bool {
        let x = self.components[a].first().expect("components are nonempty");
        let y = self.components[b].first().expect("components are nonempty");
        self.chain_relation.contains(x, y)
    }
}

pub fn chain_analysis(f: &Relation, eps: Eps) -> ChainAnalysis {
    chain_analysis_with(f, eps, Dilation::OneSided)
}

pub fn chain_analysis_with(f: &Relation, eps: Eps, mode: Dilation) -> ChainAnalysis {
    let g = dilate(f, eps, mode);
    analyze_dilated(&g, eps)
}

/// Chain analysis of a relation that already carries its dilation.
pub(crate) fn analyze_dilated(g: &Relation, eps: Eps) -> ChainAnalysis {
    let n = g.cell_count();
    let cond = Condensation::new(g.rows());
    let reach = cond.reach_sets(n);
    let rows: Vec<Vec<usize>> = (0..n).map(|x| reach[cond.node_of[x]].ones().collect()).collect();
    let chain_relation = Relation::from_rows_unchecked(g.space().clone(), rows);
    let mut components: Vec<CellSet> = cond
        .nodes
        .iter()
        .enumerate()
        .filter(|(i, _)| cond.cyclic[*i])
        .map(|(_, comp)| CellSet::from_cells(n, comp.iter().copied()))
        .collect();
    components.sort_by_key(|c| c.first());
    let mut component_of = vec![None; n];
    let mut recurrent = CellSet::empty(n);
    for (i, comp) in components.iter().enumerate() {
        for x in comp.iter() {
            component_of[x] = Some(i);
            recurrent.insert(x);
        }
    }
    ChainAnalysis { eps, chain_relation, recurrent, components, component_of }
}

/// Whether `y` is reachable from `x` in one or more steps of `V_eps ∘ F`.
pub fn chain_reachable(f: &Relation, eps: Eps, x: usize, y: usize) -> Result<bool> {
    let n = f.cell_count();
    f.space().set([x, y])?;
    let g = dilate(f, eps, Dilation::OneSided);
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &z in g.row(x) {
        if !seen[z] {
            seen[z] = true;
            queue.push_back(z);
        }
    }
    while let Some(z) = queue.pop_front() {
        if z == y {
            return Ok(true);
        }
        for &w in g.row(z) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(false)
}

/// The restriction `F_C` dilated within the subspace `C`.
fn restricted_dilation(f: &Relation, c: &CellSet, eps: Eps) -> Relation {
    dilate(&f.restrict_unchecked(c), eps, Dilation::OneSided).restrict_unchecked(c)
}

/// Whether the chain relation of `F_C` (with the eps-dilation taken inside
/// `C`) is all of `C × C`.
pub fn chain_transitive(f: &Relation, c: &CellSet, eps: Eps) -> Result<bool> {
    f.space().check_set(c)?;
    let g = restricted_dilation(f, c, eps);
    let t = analyze_dilated(&g, eps).chain_relation;
    Ok(c.iter().all(|x| t.row(x).len() == c.len()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub pass: bool,
    pub witness: Option<(usize, usize)>,
    /// Whether the bounding relation `O(F_C) ∪ (C₊ × C₋)` is transitive.
    pub bound_transitive: bool,
}

/// Checks `chain(F_C) ⊆ O(F_C) ∪ (C₊ × C₋)`.
pub fn restricted_chain_bound_check(f: &Relation, c: &CellSet, eps: Eps) -> Result<BoundCheck> {
    f.space().check_set(c)?;
    let fc = f.restrict_unchecked(c);
    let chain = analyze_dilated(&restricted_dilation(f, c, eps), eps).chain_relation;
    let report = viability::viability_report(f, c)?;
    let bound = fc
        .orbit()
        .union(&Relation::product(f.space().clone(), &report.c_plus, &report.c_minus))
        .expect("same space");
    let witness = chain.edges().find(|&(x, y)| !bound.contains(x, y));
    Ok(BoundCheck { pass: witness.is_none(), witness, bound_transitive: bound.is_transitive() })
}

/// Chain analyses along a decreasing eps ladder, with the index from which
/// the chain relation stops changing.
pub fn chain_ladder(f: &Relation, ladder: &[Eps]) -> (Vec<ChainAnalysis>, Option<usize>) {
    let runs: Vec<ChainAnalysis> = ladder.iter().map(|&e| chain_analysis(f, e)).collect();
    let mut stable = None;
    for i in (0..runs.len()).rev() {
        if i + 1 == runs.len() || runs[i].chain_relation == runs[i + 1].chain_relation {
            stable = Some(i);
        } else {
            break;
        }
    }
    (runs, stable)
}
