//! Hybrid systems: a semiflow restricted to a flow set together with a jump
//! relation, on the same time lattice as [`crate::semiflow`].

use std::collections::VecDeque;

use crate::cellset::CellSet;
use crate::chain::chain_reachable;
use crate::conley::{f_boundary, isolating_checks, validate_with_exit, IndexPair, IndexPairValidation, IsolatingChecks};
use crate::error::{Error, Result};
use crate::grid::Eps;
use crate::lyapunov::{complete_lyapunov, verify_lyapunov, LyapunovCheck, LyapunovField};
use crate::morse::is_inward;
use crate::relation::{compose_unchecked, Relation};
use crate::semiflow::{restricted_interval_relation, SemiflowApprox};
use crate::viability::{c_plus, viability_report, ViabilityReport};

#[derive(Clone, Debug, PartialEq)]
pub struct HybridSystem {
    sf: SemiflowApprox,
    flow_set: CellSet,
    jump: Relation,
    jump_domain: CellSet,
    complete: bool,
}

impl HybridSystem {
    pub fn new(sf: SemiflowApprox, flow_set: CellSet, jump: Relation) -> Result<Self> {
        sf.space().check_set(&flow_set)?;
        if jump.cell_count() != sf.space().cell_count() {
            return Err(Error::SpaceMismatch { left: sf.space().cell_count(), right: jump.cell_count() });
        }
        let jump = jump.with_space(sf.space().clone())?;
        let jump_domain = jump.domain();
        let flow = sf.step().restrict_unchecked(&flow_set);
        let stuck = flow_set.difference(&flow.domain());
        let complete = sf.complete()
            && flow_set.union(&jump_domain).len() == flow_set.universe()
            && stuck.is_subset(&jump_domain);
        Ok(HybridSystem { sf, flow_set, jump, jump_domain, complete })
    }

    pub fn semiflow(&self) -> &SemiflowApprox {
        &self.sf
    }

    pub fn flow_set(&self) -> &CellSet {
        &self.flow_set
    }

    pub fn jump(&self) -> &Relation {
        &self.jump
    }

    pub fn jump_domain(&self) -> &CellSet {
        &self.jump_domain
    }

    /// The semiflow is complete, flow set and jump domain cover the space,
    /// and every cell of the flow set that cannot flow can jump.
    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn cell_count(&self) -> usize {
        self.flow_set.universe()
    }

    /// One lattice step of `Φ_C`.
    pub fn flow_step(&self) -> Relation {
        self.sf.step().restrict_unchecked(&self.flow_set)
    }

    fn k(&self) -> usize {
        self.sf.steps_per_unit()
    }

    fn restricted(&self, k: &CellSet) -> Result<HybridSystem> {
        self.sf.space().check_set(k)?;
        HybridSystem::new(self.sf.clone(), self.flow_set.intersection(k), self.jump.restrict_unchecked(k))
    }
}

/// A point `(t, n)` of hybrid time, with `t` counted in lattice steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HybridTime {
    pub t: usize,
    pub n: usize,
}

impl HybridTime {
    pub fn new(t: usize, n: usize) -> Self {
        HybridTime { t, n }
    }

    pub fn precedes(self, other: HybridTime) -> bool {
        self.t <= other.t && self.n <= other.n
    }

    fn horizontal_to(self, other: HybridTime) -> bool {
        self.n == other.n && self.t <= other.t
    }

    fn vertical_to(self, other: HybridTime) -> bool {
        self.t == other.t && self.n < other.n
    }
}

/// A compact hybrid time interval given by its anchor sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridTimeDomain {
    anchors: Vec<HybridTime>,
    steps_per_unit: usize,
}

impl HybridTimeDomain {
    pub fn new(anchors: Vec<HybridTime>, steps_per_unit: usize) -> Result<Self> {
        if anchors.is_empty() || steps_per_unit == 0 {
            return Err(Error::InvalidPath("a time domain needs an anchor and a positive lattice".into()));
        }
        for w in anchors.windows(2) {
            if !(w[0].horizontal_to(w[1]) || w[0].vertical_to(w[1])) {
                return Err(Error::InvalidPath(format!("anchors {:?} and {:?} are not linked", w[0], w[1])));
            }
        }
        Ok(HybridTimeDomain { anchors, steps_per_unit })
    }

    pub fn anchors(&self) -> &[HybridTime] {
        &self.anchors
    }

    pub fn start(&self) -> HybridTime {
        self.anchors[0]
    }

    pub fn end(&self) -> HybridTime {
        *self.anchors.last().expect("nonempty")
    }

    /// Horizontal length in units plus the number of jumps.
    pub fn length(&self) -> f64 {
        let (a, b) = (self.start(), self.end());
        (b.t - a.t) as f64 / self.steps_per_unit as f64 + (b.n - a.n) as f64
    }

    /// No two consecutive links of the same kind.
    pub fn is_simple(&self) -> bool {
        self.anchors.windows(3).all(|w| {
            let first_h = w[0].n == w[1].n;
            let second_h = w[1].n == w[2].n;
            first_h != second_h
        })
    }

    /// Merges consecutive links of the same kind and drops repeated anchors.
    pub fn simple(&self) -> HybridTimeDomain {
        let mut out: Vec<HybridTime> = Vec::new();
        for &a in &self.anchors {
            if out.last() == Some(&a) {
                continue;
            }
            if out.len() >= 2 {
                let (p, q) = (out[out.len() - 2], out[out.len() - 1]);
                let same = (p.n == q.n && q.n == a.n) || (p.t == q.t && q.t == a.t);
                if same {
                    out.pop();
                }
            }
            out.push(a);
        }
        HybridTimeDomain { anchors: out, steps_per_unit: self.steps_per_unit }
    }

    /// Every lattice point of the domain, in order.
    pub fn points(&self) -> Vec<HybridTime> {
        let mut out = vec![self.anchors[0]];
        for w in self.anchors.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.n == b.n {
                out.extend((a.t + 1..=b.t).map(|t| HybridTime::new(t, a.n)));
            } else {
                out.extend((a.n + 1..=b.n).map(|n| HybridTime::new(a.t, n)));
            }
        }
        out
    }
}

/// A hybrid solution path sampled at every lattice point of its domain.
/// Consecutive points differ by one flow step `(t+1, n)` inside the flow set
/// or one jump `(t, n+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridPath {
    points: Vec<(HybridTime, usize)>,
    steps_per_unit: usize,
}

impl HybridPath {
    pub fn new(hs: &HybridSystem, points: Vec<(HybridTime, usize)>) -> Result<Self> {
        let n = hs.cell_count();
        let first = points.first().ok_or_else(|| Error::InvalidPath("empty path".into()))?;
        if first.1 >= n {
            return Err(Error::CellOutOfRange { cell: first.1, size: n });
        }
        for w in points.windows(2) {
            let ((a, x), (b, y)) = (w[0], w[1]);
            if y >= n {
                return Err(Error::CellOutOfRange { cell: y, size: n });
            }
            let ok = if b == HybridTime::new(a.t + 1, a.n) {
                hs.flow_set.contains(x) && hs.flow_set.contains(y) && hs.sf.step().contains(x, y)
            } else if b == HybridTime::new(a.t, a.n + 1) {
                hs.jump.contains(x, y)
            } else {
                false
            };
            if !ok {
                return Err(Error::InvalidPath(format!("no move from {x} at {a:?} to {y} at {b:?}")));
            }
        }
        Ok(HybridPath { points, steps_per_unit: hs.k() })
    }

    /// A path of length zero at `x`.
    pub fn trivial(x: usize, steps_per_unit: usize) -> Self {
        HybridPath { points: vec![(HybridTime::new(0, 0), x)], steps_per_unit }
    }

    pub fn points(&self) -> &[(HybridTime, usize)] {
        &self.points
    }

    pub fn cells(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn start_cell(&self) -> usize {
        self.points[0].1
    }

    pub fn end_cell(&self) -> usize {
        self.points.last().expect("nonempty").1
    }

    pub fn domain(&self) -> HybridTimeDomain {
        let anchors = self.points.iter().map(|p| p.0).collect();
        HybridTimeDomain { anchors, steps_per_unit: self.steps_per_unit }.simple()
    }

    pub fn length(&self) -> f64 {
        self.domain().length()
    }

    /// Shifts the domain by `-(s, m)`.
    pub fn translate(&self, s: usize, m: usize) -> Result<Self> {
        let start = self.points[0].0;
        if s > start.t || m > start.n {
            return Err(Error::InvalidPath("translation leaves the quarter plane".into()));
        }
        let points = self.points.iter().map(|&(p, x)| (HybridTime::new(p.t - s, p.n - m), x)).collect();
        Ok(HybridPath { points, steps_per_unit: self.steps_per_unit })
    }

    /// `self ⊕ other`, with `other` translated to start where `self` ends.
    pub fn compose(&self, other: &HybridPath) -> Result<Self> {
        if self.end_cell() != other.start_cell() {
            return Err(Error::InvalidPath("paths do not meet".into()));
        }
        let end = self.points.last().expect("nonempty").0;
        let base = other.points[0].0;
        let mut points = self.points.clone();
        points.extend(
            other.points[1..]
                .iter()
                .map(|&(p, x)| (HybridTime::new(p.t - base.t + end.t, p.n - base.n + end.n), x)),
        );
        Ok(HybridPath { points, steps_per_unit: self.steps_per_unit })
    }
}

/// `H = ((φ_C)^I ∘ G ∘ (φ_C)^I) ∪ (φ_C)^J`.
pub fn associated_relation(hs: &HybridSystem) -> Relation {
    let i = restricted_interval_relation(&hs.sf, &hs.flow_set, 0.0, 1.0).expect("lattice window");
    let j = restricted_interval_relation(&hs.sf, &hs.flow_set, 1.0, 2.0).expect("lattice window");
    let h = compose_unchecked(&i, &compose_unchecked(&hs.jump, &i)).union(&j).expect("same space");
    if hs.complete {
        debug_assert_eq!(h.domain().len(), h.cell_count(), "complete system with partial H");
    }
    h
}

/// `H|K`: the associated relation of the system restricted to `K`.
pub fn restricted_associated_relation(hs: &HybridSystem, k: &CellSet) -> Result<Relation> {
    Ok(associated_relation(&hs.restricted(k)?))
}

/// Pairs joined by a hybrid path of total length in `[1, 3]`.
pub fn teel_relation(hs: &HybridSystem) -> Relation {
    let n = hs.cell_count();
    let k = hs.k();
    let flow = hs.flow_step();
    let budget = 3 * k;
    let rows = (0..n)
        .map(|x| {
            let mut row = CellSet::empty(n);
            if !hs.flow_set.contains(x) && !hs.jump_domain.contains(x) {
                return Vec::new();
            }
            let mut seen = vec![false; n * (budget + 1)];
            let mut queue = VecDeque::from([(x, 0usize)]);
            seen[x * (budget + 1)] = true;
            while let Some((y, used)) = queue.pop_front() {
                if used >= k {
                    row.insert(y);
                }
                let moves = flow.row(y).iter().map(|&z| (z, used + 1)).chain(hs.jump.row(y).iter().map(|&z| (z, used + k)));
                for (z, u) in moves {
                    if u <= budget && !seen[z * (budget + 1) + u] {
                        seen[z * (budget + 1) + u] = true;
                        queue.push_back((z, u));
                    }
                }
            }
            row.to_vec()
        })
        .collect();
    Relation::from_rows(hs.sf.space().clone(), rows).expect("cells in range")
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridPathEnumeration {
    pub paths: Vec<HybridPath>,
    pub truncated: bool,
}

/// All hybrid paths inside `K` of length at most `max_length`, depth first,
/// with flow moves before jumps and targets in increasing order.
pub fn enumerate_hybrid_paths(hs: &HybridSystem, k: &CellSet, max_length: f64, cap: usize) -> Result<HybridPathEnumeration> {
    hs.sf.space().check_set(k)?;
    let budget = hs.sf.lattice_index(max_length)?;
    let ku = hs.k();
    let flow = hs.flow_step().restrict_unchecked(k);
    let jump = hs.jump.restrict_unchecked(k);
    let mut paths = Vec::new();
    let mut truncated = false;
    let starts: Vec<usize> = k.iter().filter(|&x| hs.flow_set.contains(x) || hs.jump_domain.contains(x)).collect();
    'outer: for x in starts {
        let mut stack = vec![vec![(HybridTime::new(0, 0), x)]];
        while let Some(path) = stack.pop() {
            if paths.len() == cap {
                truncated = true;
                break 'outer;
            }
            let &(p, y) = path.last().expect("nonempty");
            let used = p.t + p.n * ku;
            let mut next = Vec::new();
            if used < budget {
                next.extend(flow.row(y).iter().map(|&z| (HybridTime::new(p.t + 1, p.n), z)));
            }
            if used + ku <= budget {
                next.extend(jump.row(y).iter().map(|&z| (HybridTime::new(p.t, p.n + 1), z)));
            }
            for step in next.into_iter().rev() {
                let mut longer = path.clone();
                longer.push(step);
                stack.push(longer);
            }
            paths.push(HybridPath { points: path, steps_per_unit: ku });
        }
    }
    Ok(HybridPathEnumeration { paths, truncated })
}

/// An `H` orbit spanned by a hybrid path.
#[derive(Clone, Debug, PartialEq)]
pub struct Spanning {
    pub k: usize,
    pub orbit: Vec<usize>,
    /// Indices into the path's points where the orbit is read off.
    pub cuts: Vec<usize>,
}

/// Splits a path of length `ℓ ≥ 1` into `k` steps of `H` with `ℓ/3 ≤ k ≤ ℓ`.
pub fn span_decomposition(hs: &HybridSystem, path: &HybridPath) -> Result<Spanning> {
    let ell = path.length();
    if ell < 1.0 - 1e-12 {
        return Err(Error::ShortPath(ell));
    }
    let ku = hs.k();
    let pts = &path.points;
    // maximal runs of flow moves and jumps, as ranges of point indices
    let mut runs: Vec<(bool, usize, usize)> = Vec::new();
    for i in 1..pts.len() {
        let flow = pts[i].0.n == pts[i - 1].0.n;
        match runs.last_mut() {
            Some(r) if r.0 == flow => r.2 = i,
            _ => runs.push((flow, i - 1, i)),
        }
    }
    let has_jump = runs.iter().any(|r| !r.0);
    let mut cuts = vec![0usize];
    for (idx, &(flow, s, e)) in runs.iter().enumerate() {
        if flow {
            let len = e - s;
            let pre = idx > 0;
            let post = idx + 1 < runs.len();
            let room = if pre { ku } else { 0 } + if post { ku } else { 0 };
            if has_jump && len <= room {
                let b = if pre { len.min(ku) } else { 0 };
                if pre {
                    cuts.push(s + b);
                }
            } else {
                if pre {
                    cuts.push(s);
                }
                let m = len / ku;
                let (q, r) = (len / m, len % m);
                let mut at = s;
                for piece in 0..m {
                    at += q + usize::from(piece < r);
                    cuts.push(at);
                }
            }
        } else {
            cuts.extend(s + 1..e);
            let next_is_flow = runs.get(idx + 1).is_some_and(|r| r.0);
            if !next_is_flow {
                cuts.push(e);
            }
        }
    }
    cuts.dedup();
    let orbit: Vec<usize> = cuts.iter().map(|&i| pts[i].1).collect();
    Ok(Spanning { k: cuts.len() - 1, orbit, cuts })
}

/// Cells reachable from `x` in exactly `j` flow steps, for `j ≤ max`.
fn flow_layers(flow: &Relation, x: usize, max: usize) -> Vec<CellSet> {
    let n = flow.cell_count();
    let mut layers = vec![CellSet::from_cells(n, [x])];
    for _ in 0..max {
        let next = flow.image(layers.last().expect("nonempty")).expect("same space");
        layers.push(next);
    }
    layers
}

/// A flow path from `x` to `y` of exactly `len` steps.
fn flow_path(flow: &Relation, x: usize, y: usize, len: usize) -> Option<Vec<usize>> {
    let layers = flow_layers(flow, x, len);
    if !layers[len].contains(y) {
        return None;
    }
    let mut path = vec![y];
    let mut cur = y;
    for j in (0..len).rev() {
        cur = layers[j].iter().find(|&z| flow.contains(z, cur)).expect("layer predecessor");
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// A hybrid path spanning the `H` orbit `orbit`, of length between `k` and `3k`.
pub fn build_spanning_path(hs: &HybridSystem, orbit: &[usize]) -> Result<HybridPath> {
    let first = *orbit.first().ok_or_else(|| Error::InvalidPath("empty orbit".into()))?;
    let ku = hs.k();
    let flow = hs.flow_step();
    let mut cells_moves: Vec<(bool, usize)> = Vec::new();
    for w in orbit.windows(2) {
        let (x, y) = (w[0], w[1]);
        if let Some(p) = (ku..=2 * ku).find_map(|len| flow_path(&flow, x, y, len)) {
            cells_moves.extend(p[1..].iter().map(|&z| (true, z)));
            continue;
        }
        let from = flow_layers(&flow, x, ku);
        let to = flow_layers(&flow.inverse(), y, ku);
        let mut found = None;
        'search: for (a, la) in from.iter().enumerate() {
            for u in la.iter() {
                for &v in hs.jump.row(u) {
                    if let Some(b) = to.iter().position(|lb| lb.contains(v)) {
                        found = Some((a, u, v, b));
                        break 'search;
                    }
                }
            }
        }
        let (a, u, v, b) = found.ok_or_else(|| Error::InvalidPath(format!("({x}, {y}) is not in H")))?;
        let before = flow_path(&flow, x, u, a).expect("layer membership");
        let after = flow_path(&flow, v, y, b).expect("layer membership");
        cells_moves.extend(before[1..].iter().map(|&z| (true, z)));
        cells_moves.push((false, v));
        cells_moves.extend(after[1..].iter().map(|&z| (true, z)));
    }
    let mut at = HybridTime::new(0, 0);
    let mut points = vec![(at, first)];
    for (is_flow, z) in cells_moves {
        at = if is_flow { HybridTime::new(at.t + 1, at.n) } else { HybridTime::new(at.t, at.n + 1) };
        points.push((at, z));
    }
    HybridPath::new(hs, points)
}

/// `K±` and path lengths for `H|K` over `K`.
pub fn hybrid_viability(hs: &HybridSystem, k: &CellSet) -> Result<ViabilityReport> {
    viability_report(&restricted_associated_relation(hs, k)?, k)
}

/// `(x, y) ∈ O(V_eps ∘ H) ∘ V_eps`.
pub fn hybrid_chain_query(hs: &HybridSystem, eps: Eps, x: usize, y: usize) -> Result<bool> {
    let h = associated_relation(hs);
    let space = hs.sf.space();
    space.set([x, y])?;
    for x0 in space.within(x, eps) {
        if chain_reachable(&h, eps, x0, y)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `δ_G(K) ∪ δ_{Φ_C}(K)`.
pub fn hybrid_boundary(hs: &HybridSystem, k: &CellSet) -> Result<CellSet> {
    let jump_part = f_boundary(&hs.jump, k)?.delta;
    let flow_part = f_boundary(&hs.flow_step(), k)?.delta;
    Ok(jump_part.union(&flow_part))
}

/// Whether every hybrid path starting in `A` stays in `A`, read from the one-move relations.
pub fn hybrid_plus_invariant(hs: &HybridSystem, a: &CellSet) -> Result<bool> {
    hs.sf.space().check_set(a)?;
    Ok(hs.jump.image(a)?.is_subset(a) && hs.flow_step().image(a)?.is_subset(a))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridConley {
    /// `H|K`.
    pub relation: Relation,
    pub checks: IsolatingChecks,
    pub exit: CellSet,
    pub index_pair: Option<IndexPair>,
    pub validation: Option<IndexPairValidation>,
}

/// Isolation and index pair data of `K` computed from `H|K` with the exit
/// set `δ_ℋ(K)`.
pub fn hybrid_conley(hs: &HybridSystem, k: &CellSet) -> Result<HybridConley> {
    let relation = restricted_associated_relation(hs, k)?;
    let mut checks = isolating_checks(&relation, k)?;
    let exit = hybrid_boundary(hs, k)?;
    checks.index_type = checks.isolating && exit.is_disjoint(&c_plus(&relation, k));
    let (index_pair, validation) = if checks.index_type {
        let moves = hs.flow_step().union(&hs.jump)?.restrict_unchecked(k);
        let p2 = moves.closure_unchecked(&exit);
        let pair = IndexPair { p1: k.clone(), p2, rel_neighborhood: None, viable_set: checks.c_pm.clone() };
        let v = validate_with_exit(&relation, &pair, &exit)?;
        (Some(pair), Some(v))
    } else {
        (None, None)
    };
    Ok(HybridConley { relation, checks, exit, index_pair, validation })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridLyapunov {
    pub field: LyapunovField,
    pub check: LyapunovCheck,
}

pub fn hybrid_lyapunov(hs: &HybridSystem, eps: Eps) -> Result<HybridLyapunov> {
    let h = associated_relation(hs);
    let field = complete_lyapunov(&h, eps);
    let check = verify_lyapunov(&h, eps, &field.values)?;
    Ok(HybridLyapunov { field, check })
}

/// Inwardness of `U` for `H` and for the hybrid system itself.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridInward {
    pub relation_inward: bool,
    pub hybrid_inward: bool,
}

/// `H`-inward, and jump and flow images of `U` inside `interior(U)`.
pub fn hybrid_inward(hs: &HybridSystem, u: &CellSet) -> Result<HybridInward> {
    let h = associated_relation(hs);
    let relation_inward = is_inward(&h, u)?;
    let interior = hs.sf.space().interior(u);
    let hybrid_inward = hs.jump.image(u)?.is_subset(&interior) && hs.flow_step().image(u)?.is_subset(&interior);
    Ok(HybridInward { relation_inward, hybrid_inward })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpace, Space};
    use crate::semiflow::semiflow_conley;

    fn line_space(n: usize) -> std::sync::Arc<Space> {
        Space::grid(GridSpace::interval(0.0, n as f64, n).unwrap())
    }

    fn set(n: usize, c: &[usize]) -> CellSet {
        CellSet::from_cells(n, c.iter().copied())
    }

    /// Flow right along a 4-cell line, jump from the right end back to 0.
    fn cycler() -> HybridSystem {
        let s = line_space(4);
        let step = Relation::from_edges(s.clone(), [(0, 1), (1, 2), (2, 3)]).unwrap();
        let sf = SemiflowApprox::new(step, 1).unwrap();
        HybridSystem::new(sf, CellSet::full(4), Relation::from_edges(s, [(3, 0)]).unwrap()).unwrap()
    }

    #[test]
    fn associated_relation_examples() {
        let hs = cycler();
        let h = associated_relation(&hs);
        assert!(hs.jump().is_subset(&h));
        for e in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 0), (2, 1), (3, 0), (3, 1)] {
            assert!(h.contains(e.0, e.1), "{e:?}");
        }
        assert_eq!(h.edge_count(), 9);
        assert_eq!(h.orbit(), Relation::full(h.space().clone()));

        let no_jump = HybridSystem::new(hs.semiflow().clone(), CellSet::full(4), Relation::empty(line_space(4))).unwrap();
        assert_eq!(
            associated_relation(&no_jump),
            restricted_interval_relation(no_jump.semiflow(), &CellSet::full(4), 1.0, 2.0).unwrap()
        );

        let s = line_space(3);
        let id = SemiflowApprox::new(Relation::identity(s.clone()), 1).unwrap();
        let g = Relation::from_edges(s.clone(), [(0, 2)]).unwrap();
        let hs = HybridSystem::new(id, CellSet::full(3), g.clone()).unwrap();
        assert!(hs.complete());
        assert_eq!(associated_relation(&hs), g.union(&Relation::identity(s)).unwrap());
    }

    #[test]
    fn teel_sandwich() {
        let hs = cycler();
        let h = associated_relation(&hs);
        let teel = teel_relation(&hs);
        let h2 = compose_unchecked(&h, &h);
        let upper = h.union(&h2).unwrap().union(&compose_unchecked(&h, &h2)).unwrap();
        assert!(h.is_subset(&teel));
        assert!(teel.is_subset(&upper));

        let empty = HybridSystem::new(
            SemiflowApprox::new(Relation::empty(line_space(3)), 1).unwrap(),
            CellSet::empty(3),
            Relation::empty(line_space(3)),
        )
        .unwrap();
        assert!(teel_relation(&empty).is_empty());
    }

    #[test]
    fn path_enumeration() {
        let hs = cycler();
        let zero = enumerate_hybrid_paths(&hs, &CellSet::full(4), 0.0, 100).unwrap();
        assert_eq!(zero.paths.len(), 4);
        let one = enumerate_hybrid_paths(&hs, &CellSet::full(4), 1.0, 100).unwrap();
        let jumps: Vec<_> = one.paths.iter().filter(|p| p.points().iter().any(|q| q.0.n > 0)).collect();
        assert_eq!(jumps.len(), 1);
        assert_eq!(jumps[0].cells(), vec![3, 0]);
        let no_target = enumerate_hybrid_paths(&hs, &set(4, &[1, 2, 3]), 3.0, 100).unwrap();
        assert!(no_target.paths.iter().all(|p| p.points().iter().all(|q| q.0.n == 0)));
        let capped = enumerate_hybrid_paths(&hs, &CellSet::full(4), 3.0, 5).unwrap();
        assert!(capped.truncated && capped.paths.len() == 5);
        for p in &one.paths {
            assert!(HybridPath::new(&hs, p.points().to_vec()).is_ok());
        }
    }

    #[test]
    fn spanning() {
        let s = line_space(4);
        let step = Relation::from_edges(s.clone(), [(0, 1), (1, 2), (2, 3)]).unwrap();
        let sf = SemiflowApprox::new(step, 2).unwrap();
        let hs = HybridSystem::new(sf, CellSet::full(4), Relation::from_edges(s, [(3, 0)]).unwrap()).unwrap();
        let flow = HybridPath::new(
            &hs,
            vec![(HybridTime::new(0, 0), 0), (HybridTime::new(1, 0), 1), (HybridTime::new(2, 0), 2), (HybridTime::new(3, 0), 3)],
        )
        .unwrap();
        assert_eq!(flow.length(), 1.5);
        let sp = span_decomposition(&hs, &flow).unwrap();
        assert_eq!(sp.k, 1);
        assert_eq!(sp.orbit, vec![0, 3]);

        let jump = HybridPath::new(&hs, vec![(HybridTime::new(0, 0), 3), (HybridTime::new(0, 1), 0)]).unwrap();
        let sp = span_decomposition(&hs, &jump).unwrap();
        assert_eq!((sp.k, sp.orbit.clone()), (1, vec![3, 0]));

        let short = HybridPath::new(&hs, vec![(HybridTime::new(0, 0), 0), (HybridTime::new(1, 0), 1)]).unwrap();
        assert!(matches!(span_decomposition(&hs, &short), Err(Error::ShortPath(_))));

        let h = associated_relation(&hs);
        let built = build_spanning_path(&hs, &[0, 2, 0, 3]).unwrap();
        let ell = built.length();
        assert!((3.0..=9.0).contains(&ell));
        let back = span_decomposition(&hs, &built).unwrap();
        assert!(back.orbit.windows(2).all(|w| h.contains(w[0], w[1])));
        assert!(built.domain().is_simple());
    }

    #[test]
    fn restriction_and_viability() {
        let hs = cycler();
        let full = CellSet::full(4);
        assert_eq!(restricted_associated_relation(&hs, &full).unwrap(), associated_relation(&hs));
        let k = set(4, &[0, 2, 3]);
        let hk = restricted_associated_relation(&hs, &k).unwrap();
        assert!(hk.is_subset(&associated_relation(&hs).restrict(&k).unwrap()));
        assert!(!hk.contains(0, 2));
        assert!(associated_relation(&hs).restrict(&k).unwrap().contains(0, 2));
        assert!(restricted_associated_relation(&hs, &CellSet::empty(4)).unwrap().is_empty());

        assert_eq!(hybrid_viability(&hs, &full).unwrap().c_pm, full);
        assert!(hybrid_viability(&hs, &set(4, &[1, 2])).unwrap().c_plus.is_empty());
    }

    #[test]
    fn chains_and_boundary() {
        let hs = cycler();
        for x in 0..4 {
            for y in 0..4 {
                assert!(hybrid_chain_query(&hs, Eps::strict(), x, y).unwrap());
            }
        }
        let flow_only = HybridSystem::new(hs.semiflow().clone(), CellSet::full(4), Relation::empty(line_space(4))).unwrap();
        assert!(!hybrid_chain_query(&flow_only, Eps::strict(), 3, 0).unwrap());
        assert!(hybrid_chain_query(&flow_only, Eps::new(4.0).unwrap(), 3, 0).unwrap());

        assert!(hybrid_boundary(&hs, &CellSet::full(4)).unwrap().is_empty());
        let k = set(4, &[1, 2]);
        let b = hybrid_boundary(&hs, &k).unwrap();
        assert_eq!(b, set(4, &[2]));
        assert!(b.is_subset(&hs.semiflow().space().boundary(&k)));
        assert!(hybrid_boundary(&hs, &CellSet::empty(4)).unwrap().is_empty());
    }

    #[test]
    fn lyapunov_on_cycler_and_spur() {
        let hs = cycler();
        let ly = hybrid_lyapunov(&hs, Eps::strict()).unwrap();
        assert!(ly.check.pass);
        assert!(ly.field.values.iter().all(|v| *v == ly.field.values[0]));

        let s = Space::discrete(5);
        let step = Relation::from_edges(s.clone(), [(0, 1), (1, 2), (2, 3), (4, 0)]).unwrap();
        let sf = SemiflowApprox::new(step, 1).unwrap();
        let hs = HybridSystem::new(sf, CellSet::full(5), Relation::from_edges(s, [(3, 0)]).unwrap()).unwrap();
        let ly = hybrid_lyapunov(&hs, Eps::strict()).unwrap();
        assert!(ly.check.pass);
        assert!(ly.field.values[4] < ly.field.values[0]);
        let level = &ly.field.values[0];
        let u = CellSet::from_cells(5, (0..5).filter(|&c| ly.field.values[c] >= *level));
        assert_eq!(u, set(5, &[0, 1, 2, 3]));
        let inward = hybrid_inward(&hs, &u).unwrap();
        assert!(inward.relation_inward && inward.hybrid_inward);
    }

    #[test]
    fn conley_delegation() {
        let s = line_space(5);
        let step = Relation::from_edges(s.clone(), [(0, 0), (1, 0), (2, 1), (2, 2), (2, 3), (3, 4), (4, 4)]).unwrap();
        let sf = SemiflowApprox::new(step, 1).unwrap();
        let g = Relation::from_edges(s.clone(), [(0, 4)]).unwrap();
        let hs = HybridSystem::new(sf.clone(), CellSet::full(5), g).unwrap();
        let k = set(5, &[1, 2, 3]);
        let hc = hybrid_conley(&hs, &k).unwrap();
        let sc = semiflow_conley(&sf, &k).unwrap();
        assert_eq!(hc.relation, sc.relation);
        assert_eq!(hc.checks, sc.checks);
        assert_eq!(hc.exit, sc.exit);
        assert_eq!(hc.index_pair, sc.index_pair);
        assert!(hc.checks.isolating);
        assert!(hc.validation.unwrap().pass);
    }

    #[test]
    fn invariance_agrees_with_relation() {
        let hs = cycler();
        let h = associated_relation(&hs);
        for bits in 0u32..16 {
            let a = CellSet::from_cells(4, (0..4).filter(|&c| bits >> c & 1 == 1));
            let by_moves = hybrid_plus_invariant(&hs, &a).unwrap();
            let i = restricted_interval_relation(hs.semiflow(), hs.flow_set(), 0.0, 1.0).unwrap();
            let by_h = i.image(&a).unwrap().is_subset(&a) && h.image(&a).unwrap().is_subset(&a);
            assert_eq!(by_moves, by_h);
        }
    }

    #[test]
    fn time_domains() {
        let d = HybridTimeDomain::new(
            vec![HybridTime::new(0, 0), HybridTime::new(1, 0), HybridTime::new(2, 0), HybridTime::new(2, 1), HybridTime::new(3, 1)],
            1,
        )
        .unwrap();
        assert!(!d.is_simple());
        let s = d.simple();
        assert!(s.is_simple());
        assert_eq!(s.anchors().len(), 4);
        assert_eq!(s.length(), 4.0);
        assert_eq!(s.points().len(), 5);
        assert!(HybridTimeDomain::new(vec![HybridTime::new(0, 0), HybridTime::new(1, 1)], 1).is_err());
        assert!(HybridTimeDomain::new(vec![HybridTime::new(0, 0), HybridTime::new(0, 0), HybridTime::new(0, 1)], 1).is_ok());
    }
}
