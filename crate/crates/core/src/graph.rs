//! Strongly connected components and condensation helpers.

use fixedbitset::FixedBitSet;

/// Strongly connected components of a digraph given by adjacency lists.
///
/// Components are returned in reverse topological order (every edge between
/// distinct components points from a later to an earlier entry).
pub fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    let mut next = 0usize;
    // (vertex, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// SCC decomposition together with the node id of every vertex.
pub struct Condensation {
    /// Components in reverse topological order.
    pub nodes: Vec<Vec<usize>>,
    pub node_of: Vec<usize>,
    /// Whether the component carries a cycle (size > 1 or a self-loop).
    pub cyclic: Vec<bool>,
    /// Successor node ids, excluding the node itself.
    pub succ: Vec<Vec<usize>>,
}

impl Condensation {
    pub fn new(adj: &[Vec<usize>]) -> Self {
        let nodes = tarjan_scc(adj);
        let mut node_of = vec![0; adj.len()];
        for (i, comp) in nodes.iter().enumerate() {
            for &v in comp {
                node_of[v] = i;
            }
        }
        let mut cyclic = vec![false; nodes.len()];
        let mut succ = vec![Vec::new(); nodes.len()];
        for (v, row) in adj.iter().enumerate() {
            let a = node_of[v];
            for &w in row {
                let b = node_of[w];
                if a == b {
                    cyclic[a] = true;
                } else {
                    succ[a].push(b);
                }
            }
        }
        for (i, comp) in nodes.iter().enumerate() {
            if comp.len() > 1 {
                cyclic[i] = true;
            }
            succ[i].sort_unstable();
            succ[i].dedup();
        }
        Condensation { nodes, node_of, cyclic, succ }
    }

    /// For every node, the set of vertices reachable in one or more steps
    /// from any of its vertices.
    pub fn reach_sets(&self, n: usize) -> Vec<FixedBitSet> {
        let mut reach: Vec<FixedBitSet> = Vec::with_capacity(self.nodes.len());
        for (i, comp) in self.nodes.iter().enumerate() {
            let mut r = FixedBitSet::with_capacity(n);
            if self.cyclic[i] {
                for &v in comp {
                    r.insert(v);
                }
            }
            for &j in &self.succ[i] {
                // successors come earlier in reverse topological order
                r.union_with(&reach[j]);
                for &v in &self.nodes[j] {
                    r.insert(v);
                }
            }
            reach.push(r);
        }
        reach
    }
}
