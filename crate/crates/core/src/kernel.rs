//! Combinatorics of the forest itself: a deterministic maximum matching,
//! the null support of A(F), and a sparsest {-1, 0, 1} basis of Null(A(F)).

use crate::field::Field;
use crate::graph::Forest;
use crate::matrix::SparseVector;

/// A maximum matching of a forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingInfo {
    pub partner: Vec<Option<usize>>,
    pub nu: usize,
    /// Unmatched vertices, ascending.
    pub exposed: Vec<usize>,
}

/// Greedy leaf-up matching: vertices are processed in DFS post-order (each
/// component rooted at its smallest vertex) and a vertex is matched to its
/// parent when both are still free. On a forest this is maximum.
///
/// Whether a vertex is still free when its turn comes depends only on its
/// subtree, so the same matching results from giving every vertex, children
/// before parents, its smallest free child. That is what runs here, over a
/// breadth-first order, which avoids an explicit DFS stack.
pub fn maximum_matching(forest: &Forest) -> MatchingInfo {
    let walk = forest.bfs_from(&forest.component_roots());
    greedy_matching(forest, walk.order.iter().rev().copied(), |c, p| {
        walk.parent[c] == p
    })
}

/// [`maximum_matching`] for a forest numbered breadth-first from each
/// component's smallest vertex, where the children of `p` are exactly its
/// neighbors above `p`.
pub(crate) fn maximum_matching_numbered(forest: &Forest) -> MatchingInfo {
    greedy_matching(forest, (0..forest.vertex_count()).rev(), |c, p| c > p)
}

fn greedy_matching(
    forest: &Forest,
    bottom_up: impl Iterator<Item = usize>,
    is_child: impl Fn(usize, usize) -> bool,
) -> MatchingInfo {
    let n = forest.vertex_count();
    let mut partner: Vec<Option<usize>> = vec![None; n];
    let mut nu = 0;
    for p in bottom_up {
        let child = forest
            .neighbors(p)
            .iter()
            .copied()
            .find(|&c| is_child(c, p) && partner[c].is_none());
        if let Some(c) = child {
            partner[c] = Some(p);
            partner[p] = Some(c);
            nu += 1;
        }
    }
    let exposed = (0..n).filter(|&v| partner[v].is_none()).collect();
    MatchingInfo {
        partner,
        nu,
        exposed,
    }
}

/// Null support of a forest, its neighborhood (the core) and their union
/// (the S-set). All lists are ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportInfo {
    pub supp: Vec<usize>,
    pub core: Vec<usize>,
    pub s_set: Vec<usize>,
    in_supp: Vec<bool>,
}

impl SupportInfo {
    pub fn contains(&self, v: usize) -> bool {
        self.in_supp[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.in_supp.len()
    }

    pub fn null_dimension(&self) -> usize {
        self.supp.len() - self.core.len()
    }

    pub(crate) fn membership(&self) -> &[bool] {
        &self.in_supp
    }
}

/// Vertices reachable from an exposed vertex by an even alternating path
/// (first edge unmatched). `true` marks membership.
fn even_reachable(forest: &Forest, matching: &MatchingInfo) -> Vec<bool> {
    let mut even = vec![false; forest.vertex_count()];
    let mut stack = matching.exposed.clone();
    for &u in &stack {
        even[u] = true;
    }
    while let Some(w) = stack.pop() {
        for &a in forest.neighbors(w) {
            if matching.partner[w] == Some(a) {
                continue;
            }
            let b = matching.partner[a].expect("neighbor of an even vertex is matched");
            if !even[b] {
                even[b] = true;
                stack.push(b);
            }
        }
    }
    even
}

/// Null support of A(F), computed from the maximum matching.
pub fn support(forest: &Forest) -> SupportInfo {
    support_with(forest, &maximum_matching(forest))
}

pub fn support_with(forest: &Forest, matching: &MatchingInfo) -> SupportInfo {
    let n = forest.vertex_count();
    let in_supp = even_reachable(forest, matching);
    let mut in_core = vec![false; n];
    for v in (0..n).filter(|&v| in_supp[v]) {
        for &w in forest.neighbors(v) {
            in_core[w] = true;
        }
    }
    let supp: Vec<usize> = (0..n).filter(|&v| in_supp[v]).collect();
    let core: Vec<usize> = (0..n).filter(|&v| in_core[v]).collect();
    let s_set = (0..n).filter(|&v| in_supp[v] || in_core[v]).collect();
    SupportInfo {
        supp,
        core,
        s_set,
        in_supp,
    }
}

pub fn null_dimension(forest: &Forest) -> usize {
    forest.vertex_count() - 2 * maximum_matching(forest).nu
}

/// An ordered list of vectors in a common ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis<T> {
    ambient: usize,
    vectors: Vec<SparseVector<T>>,
}

impl<T: Clone> Basis<T> {
    pub fn new(ambient: usize, vectors: Vec<SparseVector<T>>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.dim() == ambient));
        Basis { ambient, vectors }
    }

    pub fn ambient_dimension(&self) -> usize {
        self.ambient
    }

    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[SparseVector<T>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<SparseVector<T>> {
        self.vectors
    }

    pub fn total_nonzeros(&self) -> usize {
        self.vectors.iter().map(SparseVector::nnz).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Re-matches every core vertex `a` to a support neighbor `w` minimising
/// the size of the cheapest circuit completion entering `w` from `a`.
///
/// Circuits of Null(A(F)) are subtrees of the support/core forest in which
/// each support vertex keeps all its core neighbors and each core vertex
/// keeps exactly two support neighbors. With `c(a -> w)` the fewest support
/// vertices such a subtree can use on the `w` side of `a`, the choices
/// `argmin_w c(a -> w)` are pairwise distinct, so they form a matching that
/// saturates the core. Ties keep the greedy partner, then the smallest id.
///
/// Returned partners are set on core and matched support vertices only.
pub fn core_matching(
    forest: &Forest,
    supp: &SupportInfo,
    greedy: &MatchingInfo,
) -> Vec<Option<usize>> {
    core_matching_by(forest, supp, greedy, |v| v)
}

/// [`core_matching`] with ties among equal-cost, non-greedy candidates
/// broken by the smallest `key`.
pub(crate) fn core_matching_by(
    forest: &Forest,
    supp: &SupportInfo,
    greedy: &MatchingInfo,
    key: impl Fn(usize) -> usize,
) -> Vec<Option<usize>> {
    let walk = forest.bfs_from(&forest.component_roots());
    let parent = |v: usize| {
        if walk.parent[v] == v {
            usize::MAX
        } else {
            walk.parent[v]
        }
    };
    rerooted_choices(
        forest,
        supp,
        greedy,
        key,
        walk.order.iter().copied(),
        parent,
    )
}

/// [`core_matching_by`] for a forest numbered so that every vertex comes
/// after its parent, e.g. breadth-first. The parent is then the first
/// neighbor when that is smaller.
pub(crate) fn core_matching_numbered(
    forest: &Forest,
    supp: &SupportInfo,
    greedy: &MatchingInfo,
    key: impl Fn(usize) -> usize,
) -> Vec<Option<usize>> {
    let parent = |v: usize| match forest.neighbors(v).first() {
        Some(&p) if p < v => p,
        _ => usize::MAX,
    };
    rerooted_choices(forest, supp, greedy, key, 0..forest.vertex_count(), parent)
}

/// The rerooting DP behind [`core_matching`]. `order` lists every vertex
/// after its forest parent `parent(v)` (`usize::MAX` for roots).
///
/// The support/core forest H keeps the edges with a support endpoint, so a
/// vertex's H-parent is its forest parent when that edge survives. Costs
/// count vertices, so they fit the u32 scratch arrays.
fn rerooted_choices(
    forest: &Forest,
    supp: &SupportInfo,
    greedy: &MatchingInfo,
    key: impl Fn(usize) -> usize,
    order: impl DoubleEndedIterator<Item = usize> + Clone,
    parent: impl Fn(usize) -> usize,
) -> Vec<Option<usize>> {
    const NONE: usize = usize::MAX;
    const INF: u32 = u32::MAX;
    let n = forest.vertex_count();
    assert!(n < INF as usize, "forest too large");
    let in_supp = supp.membership();
    let h_parent = |v: usize| {
        let p = parent(v);
        if p != NONE && (in_supp[v] || in_supp[p]) {
            p
        } else {
            NONE
        }
    };

    // down[v]: cost looking away from the H-parent. For a support vertex it
    // is 1 + the sum over its core children; for a core vertex the cheapest
    // child. acc[v] holds that child sum, or for a core vertex the cheapest
    // child's cost, the child itself and the runner-up cost.
    let mut down = vec![0u32; n];
    let mut acc = vec![[INF; 3]; n];
    for &v in &supp.supp {
        acc[v][0] = 0;
    }
    for v in order.clone().rev() {
        down[v] = if in_supp[v] { 1 + acc[v][0] } else { acc[v][0] };
        let p = h_parent(v);
        if p == NONE {
            continue;
        }
        let (d, a) = (down[v], &mut acc[p]);
        if in_supp[p] {
            a[0] += d;
        } else if (d, v as u32) < (a[0], a[1]) {
            *a = [d, v as u32, a[0]];
        } else if d < a[2] {
            a[2] = d;
        }
    }

    // Core a: c(a -> H-parent). Support w: cheapest completion at its
    // H-parent avoiding w, or 0 at an H-root.
    let mut outward = vec![INF; n];
    for v in order {
        let p = h_parent(v);
        outward[v] = match (p == NONE, in_supp[v]) {
            (true, true) => 0,
            (true, false) => INF,
            (false, true) => {
                let sibling = if acc[p][1] as usize == v {
                    acc[p][2]
                } else {
                    acc[p][0]
                };
                outward[p].min(sibling)
            }
            (false, false) => (1 + acc[p][0] - down[v]).saturating_add(outward[p]),
        };
    }

    let mut partner = vec![None; n];
    for &a in &supp.core {
        let preferred = greedy.partner[a];
        let up = h_parent(a);
        let mut choice = (up, outward[a]);
        for &w in forest.neighbors(a) {
            if w == up || !in_supp[w] {
                continue;
            }
            let cost = down[w];
            let better = cost < choice.1
                || (cost == choice.1
                    && Some(choice.0) != preferred
                    && (Some(w) == preferred || key(w) < key(choice.0)));
            if better {
                choice = (w, cost);
            }
        }
        let w = choice.0;
        debug_assert!(partner[w].is_none(), "cheapest completions collide");
        partner[a] = Some(w);
        partner[w] = Some(a);
    }
    partner
}

/// A sparsest basis of Null(A(F)) with entries in {-1, 0, 1}.
///
/// Alternating-path vectors relative to [`core_matching`]: one vector per
/// support vertex `u` it leaves unmatched, in ascending order of `u`, with
/// `x_u = 1`, and each step along an unmatched edge `(w, a)` followed by the
/// matching edge `(a, b)` sets `x_b = -x_w`. Each vector is a smallest
/// circuit through its `u`, which no basis can beat vector for vector.
pub fn sparsest_null_basis<F: Field>(field: &F, forest: &Forest) -> Basis<F::Elem> {
    let greedy = maximum_matching(forest);
    let supp = support_with(forest, &greedy);
    sparsest_null_basis_with(field, forest, &supp, &greedy)
}

pub fn sparsest_null_basis_with<F: Field>(
    field: &F,
    forest: &Forest,
    supp: &SupportInfo,
    greedy: &MatchingInfo,
) -> Basis<F::Elem> {
    let n = forest.vertex_count();
    let partner = core_matching(forest, supp, greedy);
    let vectors = supp
        .supp
        .iter()
        .filter(|&&u| partner[u].is_none())
        .map(|&u| {
            let mut pairs = circuit(field, forest, &partner, u);
            pairs.sort_unstable_by_key(|(v, _)| *v);
            SparseVector::from_sorted_unchecked(n, pairs)
        })
        .collect();
    Basis::new(n, vectors)
}

/// The alternating-path vector of the unmatched support vertex `u`, as
/// unsorted `(vertex, ±1)` pairs.
pub(crate) fn circuit<F: Field>(
    field: &F,
    forest: &Forest,
    partner: &[Option<usize>],
    u: usize,
) -> Vec<(usize, F::Elem)> {
    let one = field.one();
    let minus_one = field.neg(&one);
    let mut pairs = vec![(u, one.clone())];
    let mut stack = vec![(u, true)];
    while let Some((w, positive)) = stack.pop() {
        for &a in forest.neighbors(w) {
            if partner[w] == Some(a) {
                continue;
            }
            let b = partner[a].expect("core vertex is matched");
            pairs.push((
                b,
                if positive {
                    minus_one.clone()
                } else {
                    one.clone()
                },
            ));
            stack.push((b, !positive));
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use num_rational::BigRational;

    fn path(n: usize) -> Forest {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Forest::new(n, &edges).unwrap()
    }

    fn star() -> Forest {
        Forest::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn dense(basis: &Basis<BigRational>) -> Vec<Vec<i64>> {
        basis
            .vectors()
            .iter()
            .map(|v| {
                v.to_dense(&Rationals)
                    .iter()
                    .map(|x| x.to_integer().try_into().unwrap())
                    .collect()
            })
            .collect()
    }

    /// The matching rule run literally: DFS post-order, match to the parent.
    fn post_order_matching(forest: &Forest) -> Vec<Option<usize>> {
        let (order, parent) = forest.dfs_post_order();
        let mut partner = vec![None; forest.vertex_count()];
        for v in order {
            if let (None, Some(p)) = (partner[v], parent[v]) {
                if partner[p].is_none() {
                    partner[v] = Some(p);
                    partner[p] = Some(v);
                }
            }
        }
        partner
    }

    #[test]
    fn breadth_first_rule_equals_post_order_rule() {
        use crate::generate::{labeled_trees, random_forest, Shape};
        use rand::SeedableRng;
        for n in 1..=7 {
            for edges in labeled_trees(n) {
                let f = Forest::new(n, &edges).unwrap();
                assert_eq!(
                    maximum_matching(&f).partner,
                    post_order_matching(&f),
                    "{edges:?}"
                );
            }
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for k in 1..30 {
            let f = random_forest(200, Shape::Forest(k), &mut rng).unwrap();
            assert_eq!(maximum_matching(&f).partner, post_order_matching(&f));
        }
    }

    #[test]
    fn matching_examples() {
        let m = maximum_matching(&path(3));
        assert_eq!(m.nu, 1);
        assert_eq!(m.exposed, vec![0]);
        let m = maximum_matching(&path(5));
        assert_eq!((m.nu, m.exposed.len()), (2, 1));
        let m = maximum_matching(&star());
        assert_eq!(m.nu, 1);
        assert_eq!(m.partner[0], Some(1));
        assert_eq!(m.exposed, vec![2, 3]);
    }

    #[test]
    fn support_examples() {
        let s = support(&path(3));
        assert_eq!((s.supp.clone(), s.core.clone()), (vec![0, 2], vec![1]));
        let s = support(&path(4));
        assert!(s.supp.is_empty() && s.core.is_empty() && s.s_set.is_empty());
        let s = support(&star());
        assert_eq!((s.supp.clone(), s.core.clone()), (vec![1, 2, 3], vec![0]));
        assert_eq!(s.s_set, vec![0, 1, 2, 3]);
    }

    #[test]
    fn basis_examples() {
        let f = Rationals;
        assert_eq!(
            dense(&sparsest_null_basis(&f, &path(5))),
            vec![vec![-1, 0, 1, 0, -1]]
        );
        let b = sparsest_null_basis(&f, &star());
        assert_eq!(dense(&b), vec![vec![0, -1, 1, 0], vec![0, -1, 0, 1]]);
        assert_eq!(b.total_nonzeros(), 4);
        assert!(sparsest_null_basis(&f, &path(4)).is_empty());
    }

    #[test]
    fn null_dimension_examples() {
        assert_eq!(null_dimension(&path(3)), 1);
        assert_eq!(null_dimension(&path(4)), 0);
        assert_eq!(null_dimension(&path(1)), 1);
        assert_eq!(null_dimension(&star()), 2);
    }

    #[test]
    fn isolated_vertices_give_unit_vectors() {
        let f = Forest::new(3, &[(0, 1)]).unwrap();
        let b = sparsest_null_basis(&Rationals, &f);
        assert_eq!(dense(&b), vec![vec![0, 0, 1]]);
        assert!(support(&f).contains(2));
    }
}
