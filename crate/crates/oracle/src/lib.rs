//! Naive reference implementations over dense boolean matrices.
//!
//! Everything here is deliberately slow and written without reference to the
//! main library so the two can be compared in tests.

pub mod hybrid;

/// Dense relation: `m[x][y]` is true when `(x, y)` is an edge.
pub type Mat = Vec<Vec<bool>>;

pub fn empty(n: usize) -> Mat {
    vec![vec![false; n]; n]
}

pub fn identity(n: usize) -> Mat {
    let mut m = empty(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    m
}

pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Mat {
    let mut m = empty(n);
    for &(x, y) in edges {
        m[x][y] = true;
    }
    m
}

pub fn edges(m: &Mat) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (x, row) in m.iter().enumerate() {
        for (y, &b) in row.iter().enumerate() {
            if b {
                out.push((x, y));
            }
        }
    }
    out
}

/// `g ∘ f`: first `f`, then `g`.
pub fn compose(g: &Mat, f: &Mat) -> Mat {
    let n = f.len();
    let mut out = empty(n);
    for x in 0..n {
        for y in 0..n {
            if f[x][y] {
                for z in 0..n {
                    if g[y][z] {
                        out[x][z] = true;
                    }
                }
            }
        }
    }
    out
}

pub fn inverse(f: &Mat) -> Mat {
    let n = f.len();
    let mut out = empty(n);
    for x in 0..n {
        for y in 0..n {
            out[y][x] = f[x][y];
        }
    }
    out
}

pub fn union(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&p, &q)| p || q).collect())
        .collect()
}

pub fn subset(a: &Mat, b: &Mat) -> bool {
    a.iter()
        .zip(b)
        .all(|(ra, rb)| ra.iter().zip(rb).all(|(&p, &q)| !p || q))
}

pub fn power(f: &Mat, k: usize) -> Mat {
    let mut out = identity(f.len());
    for _ in 0..k {
        out = compose(f, &out);
    }
    out
}

pub fn image(f: &Mat, a: &[bool]) -> Vec<bool> {
    let n = f.len();
    (0..n).map(|y| (0..n).any(|x| a[x] && f[x][y])).collect()
}

pub fn preimage(f: &Mat, b: &[bool]) -> Vec<bool> {
    let n = f.len();
    (0..n).map(|x| (0..n).any(|y| b[y] && f[x][y])).collect()
}

/// `{x : F(x) ⊆ V}`.
pub fn star(f: &Mat, v: &[bool]) -> Vec<bool> {
    let n = f.len();
    (0..n).map(|x| (0..n).all(|y| !f[x][y] || v[y])).collect()
}

pub fn restrict(f: &Mat, c: &[bool]) -> Mat {
    let n = f.len();
    let mut out = empty(n);
    for x in 0..n {
        for y in 0..n {
            out[x][y] = f[x][y] && c[x] && c[y];
        }
    }
    out
}

/// Transitive closure (no reflexive part) by Floyd–Warshall.
pub fn floyd_warshall(f: &Mat) -> Mat {
    let n = f.len();
    let mut r = f.clone();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Cells reachable from `x` in one or more steps, by breadth-first search.
pub fn bfs_reach(f: &Mat, x: usize) -> Vec<bool> {
    let n = f.len();
    let mut seen = vec![false; n];
    let mut queue: std::collections::VecDeque<usize> = (0..n).filter(|&y| f[x][y]).collect();
    for &y in &queue {
        seen[y] = true;
    }
    while let Some(y) = queue.pop_front() {
        for z in 0..n {
            if f[y][z] && !seen[z] {
                seen[z] = true;
                queue.push_back(z);
            }
        }
    }
    seen
}

/// Whether a path with exactly `len` edges inside `c` starts at `x`.
fn walk_from(f: &Mat, c: &[bool], len: usize) -> Vec<bool> {
    let n = f.len();
    let mut ok: Vec<bool> = c.to_vec();
    for _ in 0..len {
        ok = (0..n)
            .map(|x| c[x] && (0..n).any(|y| c[y] && f[x][y] && ok[y]))
            .collect();
    }
    ok
}

/// Cells of `c` with an infinite forward path in `c`: a path with `|c|` edges
/// must revisit a cell, so that horizon suffices.
pub fn c_plus(f: &Mat, c: &[bool]) -> Vec<bool> {
    let size = c.iter().filter(|&&b| b).count();
    walk_from(f, c, size)
}

pub fn c_minus(f: &Mat, c: &[bool]) -> Vec<bool> {
    c_plus(&inverse(f), c)
}

/// Longest path length in `F_C` starting from each cell of `c`; `None` when
/// unbounded. Cells outside `c` get `Some(0)`.
pub fn longest_paths(f: &Mat, c: &[bool]) -> Vec<Option<usize>> {
    let n = f.len();
    let size = c.iter().filter(|&&b| b).count();
    let inf = c_plus(f, c);
    (0..n)
        .map(|x| {
            if !c[x] {
                return Some(0);
            }
            if inf[x] {
                return None;
            }
            let mut best = 0;
            for len in 1..=size {
                let w = walk_from(f, c, len);
                if w[x] {
                    best = len;
                }
            }
            Some(best)
        })
        .collect()
}

/// Mutual-reachability classes of recurrent cells, each sorted, listed by
/// least member.
pub fn recurrent_classes(f: &Mat) -> Vec<Vec<usize>> {
    let n = f.len();
    let t = floyd_warshall(f);
    let mut done = vec![false; n];
    let mut out = Vec::new();
    for x in 0..n {
        if done[x] || !t[x][x] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&y| y == x || (t[x][y] && t[y][x])).collect();
        for &y in &class {
            done[y] = true;
        }
        out.push(class);
    }
    out
}

/// Whether every cell of `a` has an `F_a` successor and predecessor.
pub fn is_viable(f: &Mat, a: &[bool]) -> bool {
    let n = f.len();
    (0..n).filter(|&x| a[x]).all(|x| {
        (0..n).any(|y| a[y] && f[x][y]) && (0..n).any(|y| a[y] && f[y][x])
    })
}

pub fn mask_from_bits(n: usize, bits: u64) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

/// All inclusion-minimal nonempty viable subsets of `c`, by enumerating every
/// subset. Only usable for small `n`.
pub fn minimal_viable_subsets(f: &Mat, c: &[bool]) -> Vec<Vec<usize>> {
    let n = f.len();
    let mut viable: Vec<u64> = Vec::new();
    for bits in 1u64..(1u64 << n) {
        let a = mask_from_bits(n, bits);
        if (0..n).any(|i| a[i] && !c[i]) {
            continue;
        }
        if is_viable(f, &a) {
            viable.push(bits);
        }
    }
    let mut out: Vec<Vec<usize>> = viable
        .iter()
        .filter(|&&b| !viable.iter().any(|&o| o != b && o & b == o))
        .map(|&b| (0..n).filter(|&i| b >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

/// A brute-force Lyapunov checker along the edges of `g`.
///
/// Returns `(monotone, critical, separates)` where `critical` is the set of
/// cells incident to an edge with equal values.
pub fn lyapunov_check<T: PartialOrd + Clone>(g: &Mat, values: &[T]) -> (bool, Vec<bool>, bool) {
    let n = g.len();
    let mut monotone = true;
    let mut critical = vec![false; n];
    for x in 0..n {
        for y in 0..n {
            if !g[x][y] {
                continue;
            }
            if values[y] < values[x] {
                monotone = false;
            }
            if values[y] == values[x] {
                critical[x] = true;
                critical[y] = true;
            }
        }
    }
    let classes = recurrent_classes(g);
    let mut separates = true;
    for (i, a) in classes.iter().enumerate() {
        for b in classes.iter().skip(i + 1) {
            if values[a[0]] == values[b[0]] {
                separates = false;
            }
        }
        if a.iter().any(|&x| values[x] != values[a[0]]) {
            separates = false;
        }
    }
    (monotone, critical, separates)
}
