//! Relations on a finite space as multivalued maps on cells.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::graph::Condensation;
use crate::grid::Space;

#[derive(Clone)]
pub struct Relation {
    space: Arc<Space>,
    rows: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuralPredicates {
    pub domain: CellSet,
    pub surjective: bool,
    pub irreducible: bool,
}

impl Relation {
    pub(crate) fn from_rows_unchecked(space: Arc<Space>, mut rows: Vec<Vec<usize>>) -> Self {
        debug_assert_eq!(rows.len(), space.cell_count());
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        Relation { space, rows }
    }

    pub fn from_rows(space: Arc<Space>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = space.cell_count();
        if rows.len() != n {
            return Err(Error::SpaceMismatch { left: n, right: rows.len() });
        }
        if let Some(&cell) = rows.iter().flatten().find(|&&c| c >= n) {
            return Err(Error::CellOutOfRange { cell, size: n });
        }
        Ok(Self::from_rows_unchecked(space, rows))
    }

    pub fn from_edges(space: Arc<Space>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = space.cell_count();
        let mut rows = vec![Vec::new(); n];
        for (x, y) in edges {
            for c in [x, y] {
                if c >= n {
                    return Err(Error::CellOutOfRange { cell: c, size: n });
                }
            }
            rows[x].push(y);
        }
        Ok(Self::from_rows_unchecked(space, rows))
    }

    /// Relation on an abstract space of `n` cells.
    pub fn abstract_from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_edges(Space::discrete(n), edges)
    }

    pub fn empty(space: Arc<Space>) -> Self {
        let n = space.cell_count();
        Relation { space, rows: vec![Vec::new(); n] }
    }

    pub fn identity(space: Arc<Space>) -> Self {
        let n = space.cell_count();
        Relation { space, rows: (0..n).map(|c| vec![c]).collect() }
    }

    /// Identity restricted to the cells of `c`.
    pub fn identity_on(space: Arc<Space>, c: &CellSet) -> Self {
        let n = space.cell_count();
        Relation { space, rows: (0..n).map(|x| if c.contains(x) { vec![x] } else { vec![] }).collect() }
    }

    pub fn full(space: Arc<Space>) -> Self {
        let n = space.cell_count();
        Relation { space, rows: vec![(0..n).collect(); n] }
    }

    /// `A × B`.
    pub fn product(space: Arc<Space>, a: &CellSet, b: &CellSet) -> Self {
        let n = space.cell_count();
        let target = b.to_vec();
        Relation { space, rows: (0..n).map(|x| if a.contains(x) { target.clone() } else { vec![] }).collect() }
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn cell_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, c: usize) -> &[usize] {
        &self.rows[c]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows.get(x).is_some_and(|r| r.binary_search(&y).is_ok())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(x, r)| r.iter().map(move |&y| (x, y)))
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    fn check_rel(&self, other: &Relation) -> Result<()> {
        if !(Arc::ptr_eq(&self.space, &other.space) || self.space == other.space) {
            return Err(Error::SpaceMismatch { left: self.cell_count(), right: other.cell_count() });
        }
        Ok(())
    }

    pub fn image(&self, a: &CellSet) -> Result<CellSet> {
        self.space.check_set(a)?;
        Ok(self.img(a))
    }

    pub(crate) fn img(&self, a: &CellSet) -> CellSet {
        let mut out = CellSet::empty(self.cell_count());
        for x in a.iter() {
            for &y in &self.rows[x] {
                out.insert(y);
            }
        }
        out
    }

    pub fn preimage(&self, b: &CellSet) -> Result<CellSet> {
        self.space.check_set(b)?;
        Ok(self.preimg(b))
    }

    pub(crate) fn preimg(&self, b: &CellSet) -> CellSet {
        CellSet::from_cells(
            self.cell_count(),
            (0..self.cell_count()).filter(|&x| self.rows[x].iter().any(|&y| b.contains(y))),
        )
    }

    /// `self ∘ f`: apply `f` first, then `self`.
    pub fn after(&self, f: &Relation) -> Result<Relation> {
        compose(self, f)
    }

    pub fn inverse(&self) -> Relation {
        let mut rows = vec![Vec::new(); self.cell_count()];
        for (x, y) in self.edges() {
            rows[y].push(x);
        }
        Relation { space: self.space.clone(), rows }
    }

    /// `F^n`; negative powers iterate the inverse and `F^0` is the identity.
    pub fn iterate(&self, n: i64) -> Relation {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Relation::identity(self.space.clone());
        for _ in 0..n.unsigned_abs() {
            out = compose_unchecked(&base, &out);
        }
        out
    }

    /// `F*(V) = {x : F(x) ⊆ V}`, including cells with empty image.
    pub fn star(&self, v: &CellSet) -> Result<CellSet> {
        self.space.check_set(v)?;
        Ok(self.star_unchecked(v))
    }

    pub(crate) fn star_unchecked(&self, v: &CellSet) -> CellSet {
        CellSet::from_cells(
            self.cell_count(),
            (0..self.cell_count()).filter(|&x| self.rows[x].iter().all(|&y| v.contains(y))),
        )
    }

    /// `F^{*n}(A)` with `F^{*1}(A) = F*(A)` and `F^{*(k+1)}(A) = F*(A ∪ F^{*k}(A))`.
    pub fn star_n(&self, a: &CellSet, n: usize) -> Result<CellSet> {
        self.space.check_set(a)?;
        if n == 0 {
            return Err(Error::Precondition("star_n needs n ≥ 1".into()));
        }
        let mut s = self.star_unchecked(a);
        for _ in 1..n {
            s = self.star_unchecked(&a.union(&s));
        }
        Ok(s)
    }

    /// `A ∪ O(F)(A)`: every cell reachable from `A` in zero or more steps.
    pub fn forward_closure(&self, a: &CellSet) -> Result<CellSet> {
        self.space.check_set(a)?;
        Ok(self.closure_unchecked(a))
    }

    pub(crate) fn closure_unchecked(&self, a: &CellSet) -> CellSet {
        let mut out = a.clone();
        let mut stack: Vec<usize> = a.to_vec();
        while let Some(x) = stack.pop() {
            for &y in &self.rows[x] {
                if !out.contains(y) {
                    out.insert(y);
                    stack.push(y);
                }
            }
        }
        out
    }

    /// Transitive closure `⋃_{n≥1} F^n`.
    pub fn orbit(&self) -> Relation {
        let cond = Condensation::new(&self.rows);
        let reach = cond.reach_sets(self.cell_count());
        let rows = (0..self.cell_count()).map(|x| self.reach_row(&cond, &reach, x)).collect();
        Relation { space: self.space.clone(), rows }
    }

    fn reach_row(&self, cond: &Condensation, reach: &[FixedBitSet], x: usize) -> Vec<usize> {
        reach[cond.node_of[x]].ones().collect()
    }

    /// Cells `x` with `(x, x) ∈ F`.
    pub fn cyclic_set(&self) -> CellSet {
        CellSet::from_cells(self.cell_count(), (0..self.cell_count()).filter(|&x| self.contains(x, x)))
    }

    /// `F_C = F ∩ (C × C)`.
    pub fn restrict(&self, c: &CellSet) -> Result<Relation> {
        self.space.check_set(c)?;
        Ok(self.restrict_unchecked(c))
    }

    pub(crate) fn restrict_unchecked(&self, c: &CellSet) -> Relation {
        let rows = (0..self.cell_count())
            .map(|x| {
                if c.contains(x) {
                    self.rows[x].iter().copied().filter(|&y| c.contains(y)).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        Relation { space: self.space.clone(), rows }
    }

    pub fn domain(&self) -> CellSet {
        CellSet::from_cells(self.cell_count(), (0..self.cell_count()).filter(|&x| !self.rows[x].is_empty()))
    }

    pub fn range(&self) -> CellSet {
        self.img(&CellSet::full(self.cell_count()))
    }

    pub fn structural_predicates(&self) -> StructuralPredicates {
        let n = self.cell_count();
        let domain = self.domain();
        let surjective = domain.len() == n && self.range().len() == n;
        let inv = self.inverse();
        let singleton_hit = |r: &Relation| (0..n).all(|y| (0..n).any(|x| r.rows[x] == [y]));
        let irreducible = surjective && singleton_hit(self) && singleton_hit(&inv);
        StructuralPredicates { domain, surjective, irreducible }
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.check_rel(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r: Vec<usize> = a.iter().chain(b).copied().collect();
                r.sort_unstable();
                r.dedup();
                r
            })
            .collect();
        Ok(Relation { space: self.space.clone(), rows })
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.check_rel(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().copied().filter(|y| b.binary_search(y).is_ok()).collect())
            .collect();
        Ok(Relation { space: self.space.clone(), rows })
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.cell_count() == other.cell_count()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.iter().all(|y| b.binary_search(y).is_ok()))
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit().is_subset(self)
    }

    /// The same edges placed on another space with the same cell count.
    pub fn with_space(&self, space: Arc<Space>) -> Result<Relation> {
        if space.cell_count() != self.cell_count() {
            return Err(Error::SpaceMismatch { left: space.cell_count(), right: self.cell_count() });
        }
        Ok(Relation { space, rows: self.rows.clone() })
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
    }
}

impl Eq for Relation {}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.rows.iter().enumerate().filter(|(_, r)| !r.is_empty())).finish()
    }
}

/// `G ∘ F = {(x, z) : (x, y) ∈ F, (y, z) ∈ G}`.
pub fn compose(g: &Relation, f: &Relation) -> Result<Relation> {
    g.check_rel(f)?;
    Ok(compose_unchecked(g, f))
}

pub(crate) fn compose_unchecked(g: &Relation, f: &Relation) -> Relation {
    let n = f.cell_count();
    let mut mark = FixedBitSet::with_capacity(n);
    let rows = f
        .rows
        .iter()
        .map(|r| {
            mark.clear();
            for &y in r {
                for &z in &g.rows[y] {
                    mark.insert(z);
                }
            }
            mark.ones().collect()
        })
        .collect();
    Relation { space: f.space.clone(), rows }
}

/// The prolongation and generalized recurrence relations coincide with the
/// orbit relation on a finite model, so both are exposed as aliases.
pub fn prolongation_relation(f: &Relation) -> Relation {
    f.orbit()
}

pub fn generalized_recurrence_relation(f: &Relation) -> Relation {
    f.orbit()
}
