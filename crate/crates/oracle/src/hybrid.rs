//! Reference computations for hybrid systems on a time lattice with `k`
//! flow steps per unit time.

use crate::{compose, empty, power, restrict, union, Mat};

/// Whether every pair of lattice points is comparable under the product order.
pub fn is_totally_ordered(points: &[(usize, usize)]) -> bool {
    points.iter().all(|&(a, b)| {
        points
            .iter()
            .all(|&(c, d)| (a <= c && b <= d) || (c <= a && d <= b))
    })
}

/// Whether `points` is a maximal totally ordered subset of the lattice
/// rectangle `[0, t_max] × [0, n_max]`.
pub fn is_maximal_chain(points: &[(usize, usize)], t_max: usize, n_max: usize) -> bool {
    if points.iter().any(|&(t, n)| t > t_max || n > n_max) || !is_totally_ordered(points) {
        return false;
    }
    for t in 0..=t_max {
        for n in 0..=n_max {
            if points.contains(&(t, n)) {
                continue;
            }
            let mut extended = points.to_vec();
            extended.push((t, n));
            if is_totally_ordered(&extended) {
                return false;
            }
        }
    }
    true
}

/// Union of `restrict(step, c)^j` for `j` in `[lo, hi]`; the zero power is the
/// identity on every cell.
pub fn restricted_window(step: &Mat, c: &[bool], lo: usize, hi: usize) -> Mat {
    let sc = restrict(step, c);
    let mut out = empty(step.len());
    for j in lo..=hi {
        out = union(&out, &power(&sc, j));
    }
    out
}

/// `((φ_C)^I ∘ G ∘ (φ_C)^I) ∪ (φ_C)^J` from the definition.
pub fn associated(step: &Mat, c: &[bool], jump: &Mat, k: usize) -> Mat {
    let i = restricted_window(step, c, 0, k);
    let j = restricted_window(step, c, k, 2 * k);
    union(&compose(&i, &compose(jump, &i)), &j)
}

/// Pairs joined by a hybrid path whose length (flow steps / k + jumps) lies in
/// `[1, 3]`, found by exhaustive depth-first search over move sequences.
pub fn teel(step: &Mat, c: &[bool], jump: &Mat, k: usize) -> Mat {
    let n = step.len();
    let mut out = empty(n);
    let jd: Vec<bool> = (0..n).map(|x| jump[x].iter().any(|&b| b)).collect();
    for x in 0..n {
        if !c[x] && !jd[x] {
            continue;
        }
        let mut stack = vec![(x, 0usize)];
        let mut seen = std::collections::HashSet::new();
        while let Some((y, used)) = stack.pop() {
            if !seen.insert((y, used)) {
                continue;
            }
            if used >= k {
                out[x][y] = true;
            }
            for z in 0..n {
                if used < 3 * k && c[y] && c[z] && step[y][z] {
                    stack.push((z, used + 1));
                }
                if used + k <= 3 * k && jump[y][z] {
                    stack.push((z, used + k));
                }
            }
        }
    }
    out
}

/// `H ∪ H² ∪ H³`.
pub fn up_to_cube(h: &Mat) -> Mat {
    let h2 = compose(h, h);
    let h3 = compose(h, &h2);
    union(&union(h, &h2), &h3)
}
