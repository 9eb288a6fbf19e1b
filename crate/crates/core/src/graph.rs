//! Forests: validated construction, paths and traversal orders.

use crate::error::{Error, Result};

/// An undirected forest on vertices `0..n`.
///
/// Neighbor lists are sorted ascending and stored contiguously; every
/// traversal in the crate visits neighbors in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    component: Vec<usize>,
    component_count: usize,
    edges: Vec<(usize, usize)>,
}

#[inline(always)]
pub(crate) fn prefetch<T>(x: &T) {
    #[cfg(target_arch = "x86_64")]
    unsafe {
        use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        _mm_prefetch(x as *const T as *const i8, _MM_HINT_T0);
    }
}

/// Disjoint-set forest used to detect cycles while edges are inserted.
struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

impl Forest {
    /// Builds a forest from unordered edges, rejecting loops, repeated
    /// edges and cycles.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut canonical = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::LoopEdge(u));
            }
            canonical.push((u.min(v), u.max(v)));
        }
        let mut sorted = canonical.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut uf = UnionFind::new(n);
        for &(u, v) in &canonical {
            if !uf.union(u, v) {
                return Err(Error::Cycle(u, v));
            }
        }

        let mut degree = vec![0usize; n];
        for &(u, v) in &sorted {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0; 2 * sorted.len()];
        for &(u, v) in &sorted {
            targets[fill[u]] = v;
            fill[u] += 1;
        }
        for &(u, v) in &sorted {
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }

        let mut component = vec![usize::MAX; n];
        let mut component_count = 0;
        let mut stack = Vec::new();
        for root in 0..n {
            if component[root] != usize::MAX {
                continue;
            }
            component[root] = component_count;
            stack.push(root);
            while let Some(x) = stack.pop() {
                for &y in &targets[offsets[x]..offsets[x + 1]] {
                    if component[y] == usize::MAX {
                        component[y] = component_count;
                        stack.push(y);
                    }
                }
            }
            component_count += 1;
        }

        Ok(Forest {
            offsets,
            targets,
            component,
            component_count,
            edges: sorted,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.component.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Position of `(u, w)` in the flat adjacency storage, if it is an edge.
    pub fn slot(&self, u: usize, w: usize) -> Option<usize> {
        self.neighbors(u)
            .binary_search(&w)
            .ok()
            .map(|i| self.offsets[u] + i)
    }

    pub(crate) fn slot_range(&self, u: usize) -> std::ops::Range<usize> {
        self.offsets[u]..self.offsets[u + 1]
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.slot(u, w).is_some()
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component[v]
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// Components in order of their smallest vertex; each list ascending.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.component_count];
        for (v, &c) in self.component.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Smallest vertex of every component, in component order.
    pub fn component_roots(&self) -> Vec<usize> {
        let mut roots = vec![usize::MAX; self.component_count];
        for (v, &c) in self.component.iter().enumerate() {
            if roots[c] == usize::MAX {
                roots[c] = v;
            }
        }
        roots
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.vertex_count(),
            })
        }
    }

    /// The unique path from `v` to `w`, starting at `v`.
    pub fn path(&self, v: usize, w: usize) -> Result<Vec<usize>> {
        self.check_vertex(v)?;
        self.check_vertex(w)?;
        if self.component[v] != self.component[w] {
            return Err(Error::DifferentComponents(v, w));
        }
        let walk = self.bfs(w);
        let mut path = vec![v];
        let mut x = v;
        while x != w {
            x = walk.parent[x];
            path.push(x);
        }
        Ok(path)
    }

    /// The vertex after `v` on the path from `v` to `w`.
    pub fn second_vertex(&self, v: usize, w: usize) -> Result<usize> {
        if v == w {
            self.check_vertex(v)?;
            return Err(Error::TrivialPath(v));
        }
        Ok(self.path(v, w)?[1])
    }

    /// Breadth-first traversal of the component containing `root`.
    pub fn bfs(&self, root: usize) -> Traversal {
        self.bfs_from(&[root])
    }

    /// Breadth-first traversal of the components containing `roots`, one
    /// root per component.
    pub fn bfs_from(&self, roots: &[usize]) -> Traversal {
        let n = self.vertex_count();
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::new();
        for &root in roots {
            parent[root] = root;
            order.push(root);
        }
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &y in self.neighbors(x) {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    order.push(y);
                }
            }
        }
        Traversal { order, parent }
    }

    /// Depth-first post-order of every component, each rooted at its
    /// smallest vertex, children visited in ascending order. Parents of
    /// roots are `None`.
    pub fn dfs_post_order(&self) -> (Vec<usize>, Vec<Option<usize>>) {
        let n = self.vertex_count();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for root in self.component_roots() {
            seen[root] = true;
            stack.push((root, 0));
            while let Some(top) = stack.last_mut() {
                let x = top.0;
                let nbrs = self.neighbors(x);
                if let Some(&y) = nbrs.get(top.1) {
                    top.1 += 1;
                    if !seen[y] {
                        seen[y] = true;
                        parent[y] = Some(x);
                        stack.push((y, 0));
                    }
                } else {
                    order.push(x);
                    stack.pop();
                }
            }
        }
        (order, parent)
    }

    /// The same forest with vertices renumbered in breadth-first order:
    /// components by smallest vertex, each searched from that vertex with
    /// children in ascending order. Returns the new forest, the old id of
    /// every new vertex and the old adjacency slot of every new slot.
    ///
    /// Ancestors precede descendants and siblings keep their relative
    /// order, so traversals of the result touch memory almost sequentially.
    pub(crate) fn bfs_relabeled(&self) -> (Forest, Vec<usize>, Vec<usize>) {
        const NONE: usize = usize::MAX;
        let n = self.vertex_count();
        let mut old_of = Vec::with_capacity(n);
        let mut new_of = vec![u32::MAX; n];
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(self.targets.len());
        let mut old_slot = Vec::with_capacity(self.targets.len());
        let mut component = Vec::with_capacity(n);
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut c = 0;
        for root in 0..n {
            if new_of[root] != u32::MAX {
                continue;
            }
            // Components are numbered by smallest vertex, as in `new`.
            new_of[root] = old_of.len() as u32;
            old_of.push(root);
            let mut head = old_of.len() - 1;
            // Rows are written as vertices are dequeued, i.e. in new-id
            // order. The one already numbered neighbor is the parent and
            // goes first; children get consecutive ids.
            while head < old_of.len() {
                let (i, x) = (head, old_of[head]);
                head += 1;
                // The queue is known ahead of time; fetch rows early.
                if let Some(&far) = old_of.get(head + 8) {
                    prefetch(&self.offsets[far]);
                }
                if let Some(&near) = old_of.get(head + 4) {
                    if let Some(t) = self.targets.get(self.offsets[near]) {
                        prefetch(t);
                    }
                }
                let start = targets.len();
                if x != root {
                    targets.push(NONE);
                    old_slot.push(NONE);
                }
                for s in self.slot_range(x) {
                    let y = self.targets[s];
                    if new_of[y] == u32::MAX {
                        let j = old_of.len();
                        new_of[y] = j as u32;
                        old_of.push(y);
                        targets.push(j);
                        old_slot.push(s);
                        edges.push((i, j));
                    } else {
                        targets[start] = new_of[y] as usize;
                        old_slot[start] = s;
                    }
                }
                offsets.push(targets.len());
                component.push(c);
            }
            c += 1;
        }
        let forest = Forest {
            offsets,
            targets,
            component,
            component_count: self.component_count,
            edges,
        };
        (forest, old_of, old_slot)
    }

    /// The subgraph induced on `vertices`, together with the map from new
    /// ids back to old ones. New ids follow ascending old ids.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<(Forest, Vec<usize>)> {
        let mut old_ids: Vec<usize> = vertices.to_vec();
        old_ids.sort_unstable();
        old_ids.dedup();
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in old_ids.iter().enumerate() {
            self.check_vertex(v)?;
            new_id[v] = i;
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
            .map(|&(u, v)| (new_id[u], new_id[v]))
            .collect();
        let forest = Forest::new(old_ids.len(), &edges)?;
        Ok((forest, old_ids))
    }
}

/// A rooted traversal: visiting order and parent pointers (the root is its
/// own parent; vertices outside the component have `usize::MAX`).
#[derive(Clone, Debug)]
pub struct Traversal {
    pub order: Vec<usize>,
    pub parent: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p3() -> Forest {
        Forest::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn bfs_relabeling_is_an_isomorphism() {
        let f = Forest::new(7, &[(5, 1), (1, 3), (3, 0), (1, 6), (2, 4)]).unwrap();
        let (g, old, old_slot) = f.bfs_relabeled();
        assert_eq!(old, vec![0, 3, 1, 5, 6, 2, 4]);
        let rebuilt: Vec<_> = g
            .edges()
            .iter()
            .map(|&(a, b)| (old[a].min(old[b]), old[a].max(old[b])))
            .collect();
        let mut rebuilt = rebuilt;
        rebuilt.sort_unstable();
        assert_eq!(rebuilt, f.edges());
        assert_eq!(g, Forest::new(7, g.edges()).unwrap());
        for i in 0..7 {
            for (s, &j) in g.slot_range(i).zip(g.neighbors(i)) {
                assert_eq!(f.slot(old[i], old[j]), Some(old_slot[s]));
            }
        }
    }

    fn star() -> Forest {
        Forest::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn builds_and_labels_components() {
        let f = p3();
        assert_eq!(f.component_count(), 1);
        assert_eq!(f.neighbors(1), &[0, 2]);
        let g = Forest::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.component_count(), 2);
        let h = Forest::new(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(h.connected_components(), vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(matches!(
            Forest::new(3, &[(0, 1), (1, 2), (0, 2)]),
            Err(Error::Cycle(0, 2))
        ));
        assert!(matches!(Forest::new(3, &[(1, 1)]), Err(Error::LoopEdge(1))));
        assert!(matches!(
            Forest::new(3, &[(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Forest::new(2, &[(0, 2)]),
            Err(Error::VertexOutOfRange { vertex: 2, n: 2 })
        ));
    }

    #[test]
    fn paths_are_directed() {
        let f = p3();
        assert_eq!(f.path(0, 2).unwrap(), vec![0, 1, 2]);
        assert_eq!(f.path(2, 0).unwrap(), vec![2, 1, 0]);
        assert_eq!(f.path(1, 1).unwrap(), vec![1]);
        let g = Forest::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            g.path(0, 3),
            Err(Error::DifferentComponents(0, 3))
        ));
    }

    #[test]
    fn second_vertex_examples() {
        let f = p3();
        assert_eq!(f.second_vertex(1, 0).unwrap(), 0);
        assert_eq!(f.second_vertex(0, 2).unwrap(), 1);
        assert_eq!(star().second_vertex(2, 3).unwrap(), 0);
        assert!(matches!(f.second_vertex(1, 1), Err(Error::TrivialPath(1))));
    }

    #[test]
    fn induced_subgraph_examples() {
        let (g, ids) = p3().induced_subgraph(&[0, 2]).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(ids, vec![0, 2]);
        let (h, _) = star().induced_subgraph(&[0, 3]).unwrap();
        assert_eq!(h.edges(), &[(0, 1)]);
    }

    #[test]
    fn post_order_visits_children_first() {
        let (order, parent) = star().dfs_post_order();
        assert_eq!(order, vec![1, 2, 3, 0]);
        assert_eq!(parent, vec![None, Some(0), Some(0), Some(0)]);
    }

    /// Random forest from a parent array: vertex i > 0 attaches to an
    /// earlier vertex unless `cut` says otherwise.
    fn arb_forest() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..40).prop_flat_map(|n| {
            prop::collection::vec(
                (any::<prop::sample::Index>(), prop::bool::weighted(0.15)),
                n,
            )
            .prop_map(move |picks| {
                let edges = (1..n)
                    .filter(|&i| !picks[i].1)
                    .map(|i| (picks[i].0.index(i), i))
                    .collect();
                (n, edges)
            })
        })
    }

    proptest! {
        #[test]
        fn forest_invariants((n, edges) in arb_forest(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
            let f = Forest::new(n, &edges).unwrap();
            prop_assert_eq!(f.edge_count(), n - f.component_count());
            for u in 0..n {
                for &w in f.neighbors(u) {
                    prop_assert!(f.neighbors(w).contains(&u));
                }
                prop_assert!(f.neighbors(u).windows(2).all(|p| p[0] < p[1]));
            }
            let (u, w) = (a.index(n), b.index(n));
            if f.component_of(u) == f.component_of(w) {
                let mut forward = f.path(u, w).unwrap();
                forward.reverse();
                prop_assert_eq!(forward, f.path(w, u).unwrap());
            }
            let half: Vec<usize> = (0..n).filter(|v| v % 2 == 0 || v % 3 == 0).collect();
            prop_assert!(f.induced_subgraph(&half).is_ok());
        }
    }
}
