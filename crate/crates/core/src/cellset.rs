use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A set of cell indices drawn from a universe of `universe()` cells.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellSet {
    bits: FixedBitSet,
}

impl CellSet {
    pub fn empty(n: usize) -> Self {
        CellSet { bits: FixedBitSet::with_capacity(n) }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        CellSet { bits }
    }

    pub fn try_from_cells(n: usize, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = CellSet::empty(n);
        for c in cells {
            if c >= n {
                return Err(Error::CellOutOfRange { cell: c, size: n });
            }
            s.bits.insert(c);
        }
        Ok(s)
    }

    /// Panics when a cell is out of range.
    pub fn from_cells(n: usize, cells: impl IntoIterator<Item = usize>) -> Self {
        Self::try_from_cells(n, cells).expect("cell index out of range")
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Self::from_cells(mask.len(), mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.bits.contains(c)
    }

    pub fn insert(&mut self, c: usize) {
        self.bits.insert(c);
    }

    pub fn remove(&mut self, c: usize) {
        self.bits.set(c, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn to_mask(&self) -> Vec<bool> {
        (0..self.universe()).map(|i| self.contains(i)).collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.ones().next()
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        CellSet { bits }
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        CellSet { bits }
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        CellSet { bits }
    }

    pub fn complement(&self) -> CellSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        CellSet { bits }
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn union_with(&mut self, other: &CellSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &CellSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &CellSet) {
        self.bits.difference_with(&other.bits);
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
