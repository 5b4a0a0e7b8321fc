//! Reference maps on `[-1, 1]^d` and their outer approximations.

use crate::cellset::CellSet;
use crate::grid::{outer_approximate_map, GridSpace, OuterApprox, Space};
use crate::relation::Relation;

/// `x ↦ clamp(2x)` on `[-1, 1]`.
pub fn doubling(p: &[f64]) -> Vec<f64> {
    vec![(2.0 * p[0]).clamp(-1.0, 1.0)]
}

/// `(x, y) ↦ (clamp(2x), y/2)`.
pub fn saddle(p: &[f64]) -> Vec<f64> {
    vec![(2.0 * p[0]).clamp(-1.0, 1.0), p[1] / 2.0]
}

/// `(x, y) ↦ (clamp(2x), s(y))` where `s` halves `y` near 0 and is
/// stretched near `±1` so that the map is onto `[-1, 1]^2`.
pub fn saddle_onto(p: &[f64]) -> Vec<f64> {
    let y = p[1];
    let s = if y.abs() <= 0.5 { y / 2.0 } else { y.signum() * (1.5 * y.abs() - 0.5) };
    vec![(2.0 * p[0]).clamp(-1.0, 1.0), s]
}

/// Euler step of length `dt` for `x' = x, y' = -y`, clamped to the square.
pub fn saddle_euler(dt: f64) -> impl Fn(&[f64]) -> Vec<f64> {
    move |p: &[f64]| vec![((1.0 + dt) * p[0]).clamp(-1.0, 1.0), (1.0 - dt) * p[1]]
}

/// Outer approximation of [`doubling`] on `cells` equal intervals.
pub fn dbl(cells: usize) -> Relation {
    let space = Space::grid(GridSpace::interval(-1.0, 1.0, cells).expect("valid interval"));
    outer_approximate_map(&space, &doubling, OuterApprox::default()).expect("doubling stays in range")
}

fn square(side: usize) -> std::sync::Arc<Space> {
    Space::grid(GridSpace::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![side, side]).expect("valid square"))
}

/// Outer approximation of [`saddle`] on a `side × side` grid.
pub fn sdl(side: usize) -> Relation {
    outer_approximate_map(&square(side), &saddle, OuterApprox::default()).expect("saddle stays in range")
}

/// Outer approximation of [`saddle_onto`] on a `side × side` grid.
pub fn sdl_onto(side: usize) -> Relation {
    outer_approximate_map(&square(side), &saddle_onto, OuterApprox::default()).expect("saddle stays in range")
}

/// Cells whose boxes lie inside `[-h, h]^d`.
pub fn central_cube(space: &Space, h: f64) -> CellSet {
    let n = space.cell_count();
    match space.as_grid() {
        Some(g) => CellSet::from_cells(
            n,
            (0..n).filter(|&c| {
                let (lo, hi) = g.cell_box(c);
                lo.iter().zip(&hi).all(|(a, b)| *a >= -h - 1e-12 && *b <= h + 1e-12)
            }),
        ),
        None => CellSet::full(n),
    }
}

/// Cells whose boxes meet the point `p`.
pub fn cells_at(space: &Space, p: &[f64]) -> CellSet {
    let n = space.cell_count();
    match space.as_grid() {
        Some(g) => CellSet::from_cells(
            n,
            (0..n).filter(|&c| {
                let (lo, hi) = g.cell_box(c);
                p.iter().zip(lo.iter().zip(&hi)).all(|(x, (a, b))| *a <= *x && *x <= *b)
            }),
        ),
        None => CellSet::empty(n),
    }
}
