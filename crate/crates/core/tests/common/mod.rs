#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use reldyn::grid::{GridSpace, Space};
use reldyn::{CellSet, Relation};
use reldyn_oracle::Mat;

pub fn line(n: usize) -> Arc<Space> {
    Space::grid(GridSpace::interval(0.0, n as f64, n).unwrap())
}

pub fn from_mat(space: Arc<Space>, m: &Mat) -> Relation {
    Relation::from_edges(space, reldyn_oracle::edges(m)).unwrap()
}

pub fn to_mat(f: &Relation) -> Mat {
    let n = f.cell_count();
    reldyn_oracle::from_edges(n, &f.edges().collect::<Vec<_>>())
}

pub fn mask(s: &CellSet) -> Vec<bool> {
    s.to_mask()
}

pub fn set_of(m: &[bool]) -> CellSet {
    CellSet::from_mask(m)
}

/// Dense boolean matrix with edge probability `p`.
pub fn mat(n: usize, p: f64) -> impl Strategy<Value = Mat> {
    proptest::collection::vec(proptest::collection::vec(proptest::bool::weighted(p), n), n)
}

/// A random relation on a line grid of at most `max_n` cells.
pub fn line_relation(max_n: usize) -> impl Strategy<Value = Relation> {
    (1..=max_n).prop_flat_map(|n| mat(n, 0.25)).prop_map(|m| from_mat(line(m.len()), &m))
}

/// A random relation with a random subset of its cells.
pub fn relation_and_set(max_n: usize) -> impl Strategy<Value = (Relation, CellSet)> {
    (1..=max_n)
        .prop_flat_map(|n| (mat(n, 0.25), proptest::collection::vec(any::<bool>(), n)))
        .prop_map(|(m, c)| (from_mat(line(m.len()), &m), set_of(&c)))
}
