//! Restricted dynamics: viable cores, path lengths, limit sets and paths.

use std::collections::HashMap;
use std::fmt;

use crate::cellset::CellSet;
use crate::error::Result;
use crate::grid::Space;
use crate::relation::Relation;

/// A path length that may be unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    Finite(u64),
    Infinite,
}

impl Extended {
    pub fn is_infinite(self) -> bool {
        self == Extended::Infinite
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViabilityReport {
    pub c: CellSet,
    pub c_plus: CellSet,
    pub c_minus: CellSet,
    pub c_pm: CellSet,
    /// Longest forward path length in `F_C`; zero outside `C`.
    pub nu: Vec<Extended>,
    /// Longest backward path length in `F_C`; zero outside `C`.
    pub nu_bar: Vec<Extended>,
    pub terminal: CellSet,
}

/// Greatest `S ⊆ C` with `S ⊆ F_C⁻¹(S)`, and the longest path lengths from
/// the remaining cells.
fn forward_core(f: &Relation, c: &CellSet) -> (CellSet, Vec<Extended>) {
    let n = f.cell_count();
    let inv = f.inverse();
    let mut alive = c.clone();
    let mut count: Vec<usize> = (0..n)
        .map(|x| if c.contains(x) { f.row(x).iter().filter(|&&y| c.contains(y)).count() } else { 0 })
        .collect();
    let mut nu = vec![Extended::Finite(0); n];
    let mut queue: Vec<usize> = c.iter().filter(|&x| count[x] == 0).collect();
    let mut head = 0;
    for &x in &queue {
        alive.remove(x);
    }
    // cells leave in reverse topological order, so every successor's length
    // is final before its predecessors are processed
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let best = f
            .row(x)
            .iter()
            .filter(|&&y| c.contains(y))
            .map(|&y| match nu[y] {
                Extended::Finite(v) => v + 1,
                Extended::Infinite => unreachable!("successor of a dead cell is dead"),
            })
            .max()
            .unwrap_or(0);
        nu[x] = Extended::Finite(best);
        for &p in inv.row(x) {
            if alive.contains(p) {
                count[p] -= 1;
                if count[p] == 0 {
                    alive.remove(p);
                    queue.push(p);
                }
            }
        }
    }
    for x in alive.iter() {
        nu[x] = Extended::Infinite;
    }
    (alive, nu)
}

pub fn c_plus(f: &Relation, c: &CellSet) -> CellSet {
    forward_core(f, c).0
}

pub fn c_minus(f: &Relation, c: &CellSet) -> CellSet {
    forward_core(&f.inverse(), c).0
}

pub fn viability_report(f: &Relation, c: &CellSet) -> Result<ViabilityReport> {
    f.space().check_set(c)?;
    let (c_plus, nu) = forward_core(f, c);
    let (c_minus, nu_bar) = forward_core(&f.inverse(), c);
    let terminal = CellSet::from_cells(
        f.cell_count(),
        c.iter().filter(|&x| !f.row(x).iter().any(|&y| c.contains(y))),
    );
    Ok(ViabilityReport { c: c.clone(), c_pm: c_plus.intersection(&c_minus), c_plus, c_minus, nu, nu_bar, terminal })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvariancePredicates {
    pub plus_invariant: bool,
    pub invariant: bool,
    pub plus_viable: bool,
    pub minus_viable: bool,
    pub viable: bool,
}

pub fn invariance_predicates(f: &Relation, a: &CellSet) -> Result<InvariancePredicates> {
    let img = f.image(a)?;
    let plus_viable = c_plus(f, a) == *a;
    let minus_viable = c_minus(f, a) == *a;
    Ok(InvariancePredicates {
        plus_invariant: img.is_subset(a),
        invariant: img == *a,
        plus_viable,
        minus_viable,
        viable: plus_viable && minus_viable,
    })
}

/// Inclusion-minimal nonempty viable subsets of `C`.
///
/// A viable set contains the vertex set of a directed cycle, and such a set is
/// minimal exactly when the cycle has no chord, so the minimal viable subsets
/// are the vertex sets of chordless cycles of `F_C`. Their number can grow
/// exponentially; `cap` bounds the output and the flag reports truncation.
pub fn minimal_viable_subsets_capped(f: &Relation, c: &CellSet, cap: usize) -> Result<(Vec<CellSet>, bool)> {
    f.space().check_set(c)?;
    let n = f.cell_count();
    let core = viability_report(f, c)?.c_pm;
    let g = f.restrict_unchecked(&core);
    let mut out = Vec::new();
    for v in core.iter() {
        if g.contains(v, v) {
            out.push(CellSet::from_cells(n, [v]));
            if out.len() >= cap {
                return Ok((out, true));
            }
            continue;
        }
        // depth-first search over chordless paths starting at v with larger cells
        let mut path = vec![v];
        let mut iters: Vec<usize> = vec![0];
        while let Some(pos) = iters.last_mut() {
            let last = *path.last().unwrap();
            let succ = g.row(last);
            if *pos >= succ.len() {
                iters.pop();
                path.pop();
                continue;
            }
            let w = succ[*pos];
            *pos += 1;
            if w <= v || path.contains(&w) || g.contains(w, w) {
                continue;
            }
            let m = path.len() - 1;
            let chord_in = path[..m].iter().any(|&p| g.contains(p, w));
            let chord_out = path[1..].iter().any(|&p| g.contains(w, p));
            if chord_in || chord_out {
                continue;
            }
            if g.contains(w, v) {
                let mut cyc = path.clone();
                cyc.push(w);
                out.push(CellSet::from_cells(n, cyc));
                if out.len() >= cap {
                    return Ok((out, true));
                }
                continue;
            }
            path.push(w);
            iters.push(0);
        }
    }
    out.sort_by_key(|s| s.to_vec());
    Ok((out, false))
}

pub fn minimal_viable_subsets(f: &Relation, c: &CellSet) -> Result<Vec<CellSet>> {
    Ok(minimal_viable_subsets_capped(f, c, usize::MAX)?.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitSet {
    pub set: CellSet,
    /// Whether `Dom(F)` is the whole space, the setting in which the limit
    /// set has its usual meaning.
    pub full_domain: bool,
    pub transient: usize,
    pub period: usize,
}

/// Union over one period of the eventually periodic sequence `F^k(A)`.
pub fn omega_limsup(f: &Relation, a: &CellSet) -> Result<LimitSet> {
    f.space().check_set(a)?;
    let mut seen: HashMap<CellSet, usize> = HashMap::new();
    let mut seq = vec![a.clone()];
    seen.insert(a.clone(), 0);
    loop {
        let next = f.img(seq.last().unwrap());
        if let Some(&start) = seen.get(&next) {
            let mut set = CellSet::empty(f.cell_count());
            for s in &seq[start..] {
                set.union_with(s);
            }
            return Ok(LimitSet {
                set,
                full_domain: f.domain().len() == f.cell_count(),
                transient: start,
                period: seq.len() - start,
            });
        }
        seen.insert(next.clone(), seq.len());
        seq.push(next);
    }
}

/// Backward limit set, computed as the forward limit set of the inverse.
pub fn alpha_limsup(f: &Relation, a: &CellSet) -> Result<LimitSet> {
    omega_limsup(&f.inverse(), a)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Derivative {
    /// Edges of `F` in lexicographic order; node `i` of the derivative is edge `i`.
    pub edge_index: Vec<(usize, usize)>,
    pub relation: Relation,
}

/// `F′`: edges of `F` as nodes, with `e₁ → e₂` when `e₁` ends where `e₂` starts.
pub fn derivative_relation(f: &Relation) -> Derivative {
    let edge_index: Vec<(usize, usize)> = f.edges().collect();
    let mut first = vec![0usize; f.cell_count() + 1];
    for &(x, _) in &edge_index {
        first[x + 1] += 1;
    }
    for i in 0..f.cell_count() {
        first[i + 1] += first[i];
    }
    let rows = edge_index.iter().map(|&(_, y)| (first[y]..first[y + 1]).collect()).collect();
    let relation = Relation::from_rows_unchecked(Space::discrete(edge_index.len()), rows);
    Derivative { edge_index, relation }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathEnumeration {
    pub paths: Vec<Vec<usize>>,
    pub truncated: bool,
}

/// All `F_C` paths with exactly `len` steps, in lexicographic order, up to `cap`.
pub fn enumerate_paths(f: &Relation, c: &CellSet, len: usize, cap: usize) -> Result<PathEnumeration> {
    f.space().check_set(c)?;
    let g = f.restrict_unchecked(c);
    let mut paths = Vec::new();
    for start in c.iter() {
        let mut path = vec![start];
        let mut iters: Vec<usize> = vec![0];
        loop {
            if path.len() == len + 1 {
                if paths.len() == cap {
                    return Ok(PathEnumeration { paths, truncated: true });
                }
                paths.push(path.clone());
                path.pop();
                iters.pop();
                if path.is_empty() {
                    break;
                }
                continue;
            }
            let Some(pos) = iters.last_mut() else { break };
            let last = *path.last().unwrap();
            if *pos >= g.row(last).len() {
                iters.pop();
                path.pop();
                if path.is_empty() {
                    break;
                }
                continue;
            }
            let next = g.row(last)[*pos];
            *pos += 1;
            path.push(next);
            iters.push(0);
        }
    }
    Ok(PathEnumeration { paths, truncated: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(n: usize, e: &[(usize, usize)]) -> Relation {
        Relation::abstract_from_edges(n, e.iter().copied()).unwrap()
    }

    fn set(n: usize, c: &[usize]) -> CellSet {
        CellSet::from_cells(n, c.iter().copied())
    }

    #[test]
    fn report_on_chain_and_cycle() {
        let l3 = rel(3, &[(0, 1), (1, 2)]);
        let r = viability_report(&l3, &CellSet::full(3)).unwrap();
        assert!(r.c_plus.is_empty());
        assert_eq!(r.terminal.to_vec(), vec![2]);
        assert_eq!(r.nu, vec![Extended::Finite(2), Extended::Finite(1), Extended::Finite(0)]);
        assert_eq!(r.nu_bar, vec![Extended::Finite(0), Extended::Finite(1), Extended::Finite(2)]);

        let c2 = rel(2, &[(0, 1), (1, 0)]);
        let r = viability_report(&c2, &CellSet::full(2)).unwrap();
        assert_eq!(r.c_plus, CellSet::full(2));
        assert_eq!(r.c_pm, CellSet::full(2));
        assert!(r.nu.iter().all(|v| v.is_infinite()));

        let r = viability_report(&c2, &CellSet::empty(2)).unwrap();
        assert!(r.c_plus.is_empty() && r.c_minus.is_empty() && r.terminal.is_empty());
    }

    #[test]
    fn invariance_examples() {
        let c2 = rel(2, &[(0, 1), (1, 0)]);
        let p = invariance_predicates(&c2, &CellSet::full(2)).unwrap();
        assert!(p.invariant && p.viable);
        let l3 = rel(3, &[(0, 1), (1, 2)]);
        let p = invariance_predicates(&l3, &set(3, &[1, 2])).unwrap();
        assert!(p.plus_invariant && !p.viable);
        let p = invariance_predicates(&l3, &CellSet::empty(3)).unwrap();
        assert!(p.plus_invariant && p.invariant && p.viable);
    }

    #[test]
    fn minimal_viable_examples() {
        let c2 = rel(2, &[(0, 1), (1, 0)]);
        assert_eq!(minimal_viable_subsets(&c2, &CellSet::full(2)).unwrap(), vec![CellSet::full(2)]);
        let two = rel(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]);
        assert_eq!(minimal_viable_subsets(&two, &CellSet::full(4)).unwrap(), vec![set(4, &[0, 1]), set(4, &[2, 3])]);
        let l3 = rel(3, &[(0, 1), (1, 2)]);
        assert!(minimal_viable_subsets(&l3, &CellSet::full(3)).unwrap().is_empty());
        // a chord shortcuts the triangle
        let tri = rel(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]);
        assert_eq!(minimal_viable_subsets(&tri, &CellSet::full(3)).unwrap(), vec![set(3, &[0, 2])]);
    }

    #[test]
    fn limit_sets() {
        let c2 = rel(2, &[(0, 1), (1, 0)]);
        let w = omega_limsup(&c2, &set(2, &[0])).unwrap();
        assert_eq!(w.set, CellSet::full(2));
        assert_eq!(w.period, 2);
        assert_eq!(omega_limsup(&rel(1, &[(0, 0)]), &set(1, &[0])).unwrap().set.to_vec(), vec![0]);
        let l3 = rel(3, &[(0, 1), (1, 2)]);
        let w = omega_limsup(&l3, &set(3, &[0])).unwrap();
        assert!(w.set.is_empty());
        assert!(!w.full_domain);
        assert_eq!(alpha_limsup(&l3, &set(3, &[2])).unwrap().set, CellSet::empty(3));
    }

    #[test]
    fn derivative_examples() {
        let d = derivative_relation(&rel(2, &[(0, 1), (1, 0)]));
        assert_eq!(d.edge_index, vec![(0, 1), (1, 0)]);
        assert_eq!(d.relation.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        let d = derivative_relation(&rel(3, &[(0, 1), (1, 2)]));
        assert_eq!(d.relation.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let d = derivative_relation(&rel(3, &[]));
        assert_eq!(d.relation.cell_count(), 0);
    }

    #[test]
    fn path_enumeration() {
        let c2 = rel(2, &[(0, 1), (1, 0)]);
        let p = enumerate_paths(&c2, &CellSet::full(2), 2, 100).unwrap();
        assert_eq!(p.paths, vec![vec![0, 1, 0], vec![1, 0, 1]]);
        let p = enumerate_paths(&c2, &CellSet::full(2), 0, 100).unwrap();
        assert_eq!(p.paths, vec![vec![0], vec![1]]);
        let l3 = rel(3, &[(0, 1), (1, 2)]);
        assert!(enumerate_paths(&l3, &CellSet::full(3), 3, 100).unwrap().paths.is_empty());
        let p = enumerate_paths(&c2, &CellSet::full(2), 2, 1).unwrap();
        assert!(p.truncated && p.paths.len() == 1);
    }
}
