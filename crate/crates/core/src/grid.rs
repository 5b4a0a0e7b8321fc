//! Cubical grids of closed boxes and the combinatorial topology they induce.

use std::sync::Arc;

use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::relation::Relation;

/// Relative slack used when comparing distances computed in floating point.
pub(crate) const TOL: f64 = 1e-9;

pub(crate) fn le_tol(a: f64, b: f64) -> bool {
    a <= b + TOL * (1.0 + b.abs())
}

/// A box `[lower, upper]` in ℝ^d cut into `divisions[a]` equal slabs per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
    divisions: Vec<usize>,
}

impl GridSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, divisions: Vec<usize>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() || lower.len() != divisions.len() {
            return Err(Error::InvalidGrid("bounds and divisions must share one positive dimension".into()));
        }
        for a in 0..lower.len() {
            if !(lower[a].is_finite() && upper[a].is_finite() && lower[a] < upper[a]) {
                return Err(Error::InvalidGrid(format!("axis {a} needs finite lower < upper")));
            }
            if divisions[a] == 0 {
                return Err(Error::InvalidGrid(format!("axis {a} has zero divisions")));
            }
        }
        Ok(GridSpace { lower, upper, divisions })
    }

    pub fn interval(lower: f64, upper: f64, cells: usize) -> Result<Self> {
        Self::new(vec![lower], vec![upper], vec![cells])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn divisions(&self) -> &[usize] {
        &self.divisions
    }

    pub fn cell_count(&self) -> usize {
        self.divisions.iter().product()
    }

    pub fn width(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / self.divisions[axis] as f64
    }

    /// Multi-index of a cell; the first axis varies slowest.
    pub fn multi_index(&self, mut cell: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = cell % self.divisions[a];
            cell /= self.divisions[a];
        }
        idx
    }

    pub fn index_of(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.divisions).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn cell_box(&self, cell: usize) -> (Vec<f64>, Vec<f64>) {
        let idx = self.multi_index(cell);
        let lo: Vec<f64> = (0..self.dim()).map(|a| self.lower[a] + idx[a] as f64 * self.width(a)).collect();
        let hi: Vec<f64> = (0..self.dim()).map(|a| self.lower[a] + (idx[a] + 1) as f64 * self.width(a)).collect();
        (lo, hi)
    }

    /// Sup-norm diameter of the whole box.
    pub fn diameter(&self) -> f64 {
        (0..self.dim()).map(|a| self.upper[a] - self.lower[a]).fold(0.0, f64::max)
    }

    fn gap_distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.multi_index(i), self.multi_index(j));
        (0..self.dim())
            .map(|ax| {
                let gap = a[ax].abs_diff(b[ax]).saturating_sub(1);
                gap as f64 * self.width(ax)
            })
            .fold(0.0, f64::max)
    }

    /// Cells whose multi-index differs from `cell` by at most `radius[a]` on each axis.
    fn stencil(&self, cell: usize, radius: &[usize]) -> Vec<usize> {
        let idx = self.multi_index(cell);
        let ranges: Vec<(usize, usize)> = (0..self.dim())
            .map(|a| (idx[a].saturating_sub(radius[a]), (idx[a] + radius[a]).min(self.divisions[a] - 1)))
            .collect();
        let mut out = Vec::new();
        let mut cur: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        loop {
            out.push(self.index_of(&cur));
            let mut a = self.dim();
            loop {
                if a == 0 {
                    return out;
                }
                a -= 1;
                if cur[a] < ranges[a].1 {
                    cur[a] += 1;
                    break;
                }
                cur[a] = ranges[a].0;
            }
        }
    }

    /// Range of cell indices on `axis` whose closed slabs meet `[lo, hi]`.
    fn axis_cells_meeting(&self, axis: usize, lo: f64, hi: f64) -> (usize, usize) {
        let w = self.width(axis);
        let n = self.divisions[axis] as f64;
        let slack = TOL * (1.0 + w);
        let first = (((lo - self.lower[axis]) / w) - 1.0 - slack).ceil().max(0.0).min(n - 1.0);
        let last = (((hi - self.lower[axis]) / w) + slack).floor().max(0.0).min(n - 1.0);
        (first as usize, last as usize)
    }
}

/// The finite metric space carrying a relation: either a grid of boxes or an
/// abstract set of cells with the discrete metric.
#[derive(Clone, Debug, PartialEq)]
pub enum Space {
    Grid(GridSpace),
    Discrete(usize),
}

/// Dilation parameter for `V_eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eps {
    value: f64,
    strict_identity: bool,
}

impl Eps {
    pub fn new(value: f64) -> Result<Self> {
        if !(value >= 0.0) {
            return Err(Error::NegativeEps(value));
        }
        Ok(Eps { value, strict_identity: false })
    }

    /// `eps = 0` read as the identity relation rather than box touching.
    pub fn strict() -> Self {
        Eps { value: 0.0, strict_identity: true }
    }

    /// `eps = 0` read as the touching relation.
    pub fn touching() -> Self {
        Eps { value: 0.0, strict_identity: false }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_strict_identity(&self) -> bool {
        self.strict_identity && self.value == 0.0
    }
}

impl Space {
    pub fn discrete(n: usize) -> Arc<Space> {
        Arc::new(Space::Discrete(n))
    }

    pub fn grid(g: GridSpace) -> Arc<Space> {
        Arc::new(Space::Grid(g))
    }

    pub fn cell_count(&self) -> usize {
        match self {
            Space::Grid(g) => g.cell_count(),
            Space::Discrete(n) => *n,
        }
    }

    pub fn as_grid(&self) -> Option<&GridSpace> {
        match self {
            Space::Grid(g) => Some(g),
            Space::Discrete(_) => None,
        }
    }

    pub fn empty_set(&self) -> CellSet {
        CellSet::empty(self.cell_count())
    }

    pub fn full_set(&self) -> CellSet {
        CellSet::full(self.cell_count())
    }

    pub fn set(&self, cells: impl IntoIterator<Item = usize>) -> Result<CellSet> {
        CellSet::try_from_cells(self.cell_count(), cells)
    }

    fn check_cell(&self, c: usize) -> Result<()> {
        if c >= self.cell_count() {
            return Err(Error::CellOutOfRange { cell: c, size: self.cell_count() });
        }
        Ok(())
    }

    pub(crate) fn check_set(&self, s: &CellSet) -> Result<()> {
        if s.universe() != self.cell_count() {
            return Err(Error::SpaceMismatch { left: self.cell_count(), right: s.universe() });
        }
        Ok(())
    }

    /// Minimum sup-norm distance between the closed boxes of two cells.
    pub fn box_distance(&self, i: usize, j: usize) -> Result<f64> {
        self.check_cell(i)?;
        self.check_cell(j)?;
        Ok(self.dist(i, j))
    }

    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        match self {
            Space::Grid(g) => g.gap_distance(i, j),
            Space::Discrete(_) => {
                if i == j {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Space::Grid(g) => g.diameter(),
            Space::Discrete(n) => {
                if *n > 1 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// The cell itself together with every cell whose box meets it.
    pub fn touching(&self, c: usize) -> Vec<usize> {
        match self {
            Space::Grid(g) => g.stencil(c, &vec![1; g.dim()]),
            Space::Discrete(_) => vec![c],
        }
    }

    /// Cells at box distance at most `eps` from `c`.
    pub fn within(&self, c: usize, eps: Eps) -> Vec<usize> {
        if eps.is_strict_identity() {
            return vec![c];
        }
        match self {
            Space::Grid(g) => {
                let radius: Vec<usize> = (0..g.dim())
                    .map(|a| {
                        let r = (eps.value / g.width(a) * (1.0 + TOL) + TOL).floor();
                        (r.min(g.divisions[a] as f64) as usize) + 1
                    })
                    .collect();
                let mut out = g.stencil(c, &radius);
                out.retain(|&d| le_tol(g.gap_distance(c, d), eps.value));
                out
            }
            Space::Discrete(n) => {
                if eps.value >= 1.0 {
                    (0..*n).collect()
                } else {
                    vec![c]
                }
            }
        }
    }

    pub fn closure(&self, s: &CellSet) -> CellSet {
        let mut out = s.clone();
        for c in s.iter() {
            for d in self.touching(c) {
                out.insert(d);
            }
        }
        out
    }

    pub fn interior(&self, s: &CellSet) -> CellSet {
        CellSet::from_cells(
            s.universe(),
            s.iter().filter(|&c| self.touching(c).iter().all(|&d| s.contains(d))),
        )
    }

    pub fn boundary(&self, s: &CellSet) -> CellSet {
        s.difference(&self.interior(s))
    }

    /// Interior of `s` relative to the subspace `c`: cells of `s` all of whose
    /// touching cells inside `c` lie in `s`.
    pub fn relative_interior(&self, s: &CellSet, c: &CellSet) -> CellSet {
        CellSet::from_cells(
            s.universe(),
            s.iter()
                .filter(|&x| self.touching(x).iter().all(|&d| !c.contains(d) || s.contains(d))),
        )
    }

    /// `A ⊂⊂ B`: the closure of `a` lies inside the interior of `b`.
    pub fn compactly_inside(&self, a: &CellSet, b: &CellSet) -> bool {
        self.closure(a).is_subset(&self.interior(b))
    }

    /// Distance from a cell to a nonempty set; `None` for the empty set.
    pub fn dist_to_set(&self, c: usize, s: &CellSet) -> Option<f64> {
        s.iter().map(|d| self.dist(c, d)).reduce(f64::min)
    }

    /// Whether every cell lies within `eps` of `a`.
    pub fn is_eps_dense(&self, a: &CellSet, eps: f64) -> bool {
        (0..self.cell_count()).all(|c| self.dist_to_set(c, a).is_some_and(|d| le_tol(d, eps)))
    }
}

/// `V_eps = {(i, j) : box_distance(i, j) ≤ eps}`.
pub fn v_eps_relation(space: &Arc<Space>, eps: Eps) -> Relation {
    let rows = (0..space.cell_count()).map(|c| space.within(c, eps)).collect();
    Relation::from_rows_unchecked(space.clone(), rows)
}

/// Hausdorff distance between the unions of the boxes of two cell sets,
/// with `d(∅, T) = D + 1` for nonempty `T` where `D` is the space diameter.
///
/// On a grid the supremum over points is taken on the half-cell lattice,
/// which is exact when all axes share one cell width.
pub fn hausdorff_distance(space: &Space, s: &CellSet, t: &CellSet) -> Result<f64> {
    space.check_set(s)?;
    space.check_set(t)?;
    let cap = space.diameter() + 1.0;
    let one_sided = |a: &CellSet, b: &CellSet| -> f64 {
        if a.is_empty() {
            return 0.0;
        }
        if b.is_empty() {
            return cap;
        }
        match space {
            Space::Discrete(_) => {
                if a.is_subset(b) {
                    0.0
                } else {
                    1.0
                }
            }
            Space::Grid(g) => a
                .iter()
                .map(|c| sup_over_box(g, c, b))
                .fold(0.0, f64::max),
        }
    };
    Ok(one_sided(s, t).max(one_sided(t, s)).min(cap))
}

fn sup_over_box(g: &GridSpace, c: usize, b: &CellSet) -> f64 {
    let (lo, hi) = g.cell_box(c);
    let targets: Vec<(Vec<f64>, Vec<f64>)> = b.iter().map(|d| g.cell_box(d)).collect();
    let dim = g.dim();
    let mut best = 0.0f64;
    let mut t = vec![0usize; dim];
    loop {
        let p: Vec<f64> = (0..dim).map(|a| lo[a] + (hi[a] - lo[a]) * t[a] as f64 / 2.0).collect();
        let d = targets
            .iter()
            .map(|(tl, th)| {
                (0..dim)
                    .map(|a| (tl[a] - p[a]).max(p[a] - th[a]).max(0.0))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        best = best.max(d);
        let mut a = 0;
        loop {
            if a == dim {
                return best;
            }
            if t[a] < 2 {
                t[a] += 1;
                break;
            }
            t[a] = 0;
            a += 1;
        }
    }
}

/// A point map sampled when building outer approximations.
pub trait Sampler {
    fn sample(&self, point: &[f64]) -> Vec<f64>;
}

impl<F: Fn(&[f64]) -> Vec<f64>> Sampler for F {
    fn sample(&self, point: &[f64]) -> Vec<f64> {
        self(point)
    }
}

/// Settings for [`outer_approximate_map`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OuterApprox {
    pub bloat: f64,
    /// Uniform subdivisions per axis of the sample stencil.
    pub subdivisions: usize,
}

impl Default for OuterApprox {
    fn default() -> Self {
        OuterApprox { bloat: 0.0, subdivisions: 2 }
    }
}

/// Combinatorial outer approximation of a point map: each cell is sent to
/// every cell meeting the bloated hull of the sampled images of its box.
pub fn outer_approximate_map(space: &Arc<Space>, sampler: &dyn Sampler, config: OuterApprox) -> Result<Relation> {
    let g = space
        .as_grid()
        .ok_or_else(|| Error::InvalidGrid("outer approximation needs a grid space".into()))?;
    if !(config.bloat >= 0.0) {
        return Err(Error::NegativeEps(config.bloat));
    }
    let dim = g.dim();
    let k = config.subdivisions.max(1);
    let mut rows = Vec::with_capacity(g.cell_count());
    for c in 0..g.cell_count() {
        let (lo, hi) = g.cell_box(c);
        let mut hull_lo = vec![f64::INFINITY; dim];
        let mut hull_hi = vec![f64::NEG_INFINITY; dim];
        let mut visit = |p: &[f64]| -> Result<()> {
            let img = sampler.sample(p);
            if img.len() != dim || img.iter().any(|v| !v.is_finite()) {
                return Err(Error::SamplerOutOfRange { cell: c });
            }
            for a in 0..dim {
                let v = img[a].clamp(g.lower[a], g.upper[a]);
                hull_lo[a] = hull_lo[a].min(v);
                hull_hi[a] = hull_hi[a].max(v);
            }
            Ok(())
        };
        let center: Vec<f64> = (0..dim).map(|a| 0.5 * (lo[a] + hi[a])).collect();
        visit(&center)?;
        let mut t = vec![0usize; dim];
        'grid: loop {
            let p: Vec<f64> = (0..dim).map(|a| lo[a] + (hi[a] - lo[a]) * t[a] as f64 / k as f64).collect();
            visit(&p)?;
            let mut a = 0;
            loop {
                if a == dim {
                    break 'grid;
                }
                if t[a] < k {
                    t[a] += 1;
                    break;
                }
                t[a] = 0;
                a += 1;
            }
        }
        let ranges: Vec<(usize, usize)> = (0..dim)
            .map(|a| g.axis_cells_meeting(a, hull_lo[a] - config.bloat, hull_hi[a] + config.bloat))
            .collect();
        let mut row = Vec::new();
        let mut cur: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        'cells: loop {
            row.push(g.index_of(&cur));
            let mut a = dim;
            loop {
                if a == 0 {
                    break 'cells;
                }
                a -= 1;
                if cur[a] < ranges[a].1 {
                    cur[a] += 1;
                    break;
                }
                cur[a] = ranges[a].0;
            }
        }
        row.sort_unstable();
        rows.push(row);
    }
    Ok(Relation::from_rows_unchecked(space.clone(), rows))
}
