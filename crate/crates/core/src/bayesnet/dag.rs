use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Parent sets over `n` nodes; an edge `p -> c` means `p` is listed in
/// `parents(c)`.
///
/// For a static network the graph is acyclic (see [`Dag::is_acyclic`]). For a
/// transition network every edge runs from slice `t - 1` to slice `t`, so the
/// unrolled graph is acyclic whatever the index graph looks like.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Fresh,
    Open,
    Done,
}

impl Dag {
    pub fn empty(nodes: usize) -> Self {
        Self {
            parents: vec![Vec::new(); nodes],
        }
    }

    /// Validates indices, self loops and duplicate parents. Cycles are allowed
    /// here; use [`Dag::is_acyclic`] to check.
    pub fn from_parents(parents: Vec<Vec<usize>>) -> Result<Self> {
        let n = parents.len();
        for (child, pa) in parents.iter().enumerate() {
            for (i, &p) in pa.iter().enumerate() {
                if p >= n {
                    return Err(Error::InvalidNode { index: p, nodes: n });
                }
                if p == child {
                    return Err(Error::SelfParent(child));
                }
                if pa[..i].contains(&p) {
                    return Err(Error::DuplicateParent(p));
                }
            }
        }
        Ok(Self { parents })
    }

    pub fn nodes(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn parent_sets(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.parents[child].contains(&parent)
    }

    /// `(parent, child)` pairs sorted by child, then parent.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (c, pa) in self.parents.iter().enumerate() {
            let mut sorted = pa.clone();
            sorted.sort_unstable();
            out.extend(sorted.into_iter().map(|p| (p, c)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub(crate) fn remove_edge(&mut self, parent: usize, child: usize) {
        self.parents[child].retain(|p| *p != parent);
    }

    fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.nodes()];
        for (c, pa) in self.parents.iter().enumerate() {
            for &p in pa {
                ch[p].push(c);
            }
        }
        for list in &mut ch {
            list.sort_unstable();
        }
        ch
    }

    /// Kahn's algorithm, lowest index first; `None` if there is a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes();
        let children = self.children();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).rev().collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = ready.pop() {
            order.push(u);
            for &v in &children[u] {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    ready.push(v);
                    ready.sort_unstable_by(|a, b| b.cmp(a));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Edges `(parent, child)` of the first cycle met by a depth-first search
    /// from node 0 upwards, in traversal order.
    pub fn find_cycle(&self) -> Option<Vec<(usize, usize)>> {
        let children = self.children();
        let mut mark = vec![Mark::Fresh; self.nodes()];
        let mut path = Vec::new();
        for start in 0..self.nodes() {
            if mark[start] == Mark::Fresh {
                if let Some(c) = visit(start, &children, &mut mark, &mut path) {
                    return Some(c);
                }
            }
        }
        None
    }
}

fn visit(
    u: usize,
    children: &[Vec<usize>],
    mark: &mut [Mark],
    path: &mut Vec<usize>,
) -> Option<Vec<(usize, usize)>> {
    mark[u] = Mark::Open;
    path.push(u);
    for &v in &children[u] {
        match mark[v] {
            Mark::Open => {
                let start = path.iter().position(|x| *x == v).unwrap_or(0);
                let nodes = &path[start..];
                let mut cycle: Vec<(usize, usize)> = nodes.windows(2).map(|w| (w[0], w[1])).collect();
                cycle.push((u, v));
                return Some(cycle);
            }
            Mark::Fresh => {
                if let Some(c) = visit(v, children, mark, path) {
                    return Some(c);
                }
            }
            Mark::Done => {}
        }
    }
    path.pop();
    mark[u] = Mark::Done;
    None
}
