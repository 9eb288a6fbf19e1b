//! Seeded random instances and exhaustive enumeration of small forests.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals};
use crate::graph::Forest;
use crate::matrix::AcyclicMatrix;

/// Fields that can draw uniformly random nonzero scalars.
pub trait SampleNonzero: Field {
    fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
}

impl SampleNonzero for Rationals {
    /// Numerator and denominator uniform in [-9, 9] \ {0}.
    fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let mut draw = || {
            let k: i64 = rng.random_range(1..=18);
            if k <= 9 {
                k
            } else {
                9 - k
            }
        };
        let (num, den) = (draw(), draw());
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl SampleNonzero for PrimeField {
    /// Uniform in [1, p - 1].
    fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(1..self.modulus())
    }
}

/// Shape of a random pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Tree,
    /// A forest with exactly this many components.
    Forest(usize),
}

impl std::str::FromStr for Shape {
    type Err = Error;

    /// `tree`, `forest:<k>` or `forest<k>`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "tree" {
            return Ok(Shape::Tree);
        }
        s.strip_prefix("forest")
            .map(|k| k.trim_start_matches([':', '(']).trim_end_matches(')'))
            .and_then(|k| k.parse().ok())
            .filter(|&k| k >= 1)
            .map(Shape::Forest)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown shape {s:?}")))
    }
}

/// Decodes a Prüfer sequence over `0..n` (length `n - 2`) into tree edges,
/// in linear time.
pub fn prufer_decode(n: usize, seq: &[usize]) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return if seq.is_empty() {
            Ok(Vec::new())
        } else {
            Err(Error::InvalidParameter("Prüfer sequence too long".into()))
        };
    }
    if seq.len() != n - 2 || seq.iter().any(|&a| a >= n) {
        return Err(Error::InvalidParameter("malformed Prüfer sequence".into()));
    }
    let mut degree = vec![1usize; n];
    for &a in seq {
        degree[a] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = (0..n).find(|&v| degree[v] == 1).unwrap();
    let mut leaf = ptr;
    for &a in seq {
        edges.push((leaf, a));
        degree[a] -= 1;
        if degree[a] == 1 && a < ptr {
            leaf = a;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, n - 1));
    Ok(edges)
}

/// Edges of a uniformly random labeled tree on `0..n`.
pub fn random_tree_edges<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    prufer_decode(n, &seq).expect("valid sequence")
}

/// A random pattern of the given shape.
pub fn random_forest<R: Rng + ?Sized>(n: usize, shape: Shape, rng: &mut R) -> Result<Forest> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut edges = random_tree_edges(n, rng);
    if let Shape::Forest(k) = shape {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!(
                "cannot split {n} vertices into {k} components"
            )));
        }
        let mut cut: Vec<usize> = index::sample(rng, edges.len(), k - 1).into_vec();
        cut.sort_unstable();
        for i in cut.into_iter().rev() {
            edges.swap_remove(i);
        }
    }
    Forest::new(n, &edges)
}

/// Random nonzero values on both orientations of every pattern edge.
pub fn random_values<F, R>(field: F, forest: &Forest, rng: &mut R) -> AcyclicMatrix<F>
where
    F: SampleNonzero,
    R: Rng + ?Sized,
{
    let triples = forest
        .edges()
        .iter()
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .map(|(u, v)| (u, v, field.sample_nonzero(rng)))
        .collect();
    AcyclicMatrix::from_entries(field, forest.vertex_count(), triples).expect("valid pattern")
}

/// A random matrix, fully determined by `(n, seed, field, shape)`.
pub fn gen_random<F: SampleNonzero>(
    field: F,
    n: usize,
    seed: u64,
    shape: Shape,
) -> Result<AcyclicMatrix<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forest = random_forest(n, shape, &mut rng)?;
    Ok(random_values(field, &forest, &mut rng))
}

/// Canonical string of the subtree at `v` (AHU encoding).
fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut codes: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_code(adj, w, v))
        .collect();
    codes.sort();
    format!("({})", codes.concat())
}

/// Isomorphism-invariant code of a tree given as adjacency lists.
fn tree_code(adj: &[Vec<usize>]) -> String {
    let n = adj.len();
    if n == 1 {
        return "()".into();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer
        .iter()
        .map(|&c| rooted_code(adj, c, usize::MAX))
        .min()
        .unwrap()
}

/// One representative of every isomorphism class of trees on `n >= 1`
/// vertices, as edge lists over `0..n`.
pub fn nonisomorphic_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    assert!(n >= 1);
    let mut current: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for edges in &current {
            for attach in 0..size - 1 {
                let mut grown = edges.clone();
                grown.push((attach, size - 1));
                let mut adj = vec![Vec::new(); size];
                for &(a, b) in &grown {
                    adj[a].push(b);
                    adj[b].push(a);
                }
                if seen.insert(tree_code(&adj)) {
                    next.push(grown);
                }
            }
        }
        current = next;
    }
    current
}

/// One representative of every isomorphism class of forests on `n`
/// vertices. Components occupy consecutive vertex ranges.
pub fn nonisomorphic_forests(n: usize) -> Vec<Forest> {
    let trees: Vec<Vec<Vec<(usize, usize)>>> = (0..=n)
        .map(|k| {
            if k == 0 {
                Vec::new()
            } else {
                nonisomorphic_trees(k)
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut parts = Vec::new();
    forests_rec(n, (n, usize::MAX), &trees, &mut parts, &mut out);
    out
}

/// Components are chosen in non-increasing (size, index) order so every
/// multiset appears once.
fn forests_rec(
    left: usize,
    max: (usize, usize),
    trees: &[Vec<Vec<(usize, usize)>>],
    parts: &mut Vec<(usize, usize)>,
    out: &mut Vec<Forest>,
) {
    if left == 0 {
        let mut edges = Vec::new();
        let mut offset = 0;
        for &(size, idx) in parts.iter() {
            edges.extend(
                trees[size][idx]
                    .iter()
                    .map(|&(a, b)| (a + offset, b + offset)),
            );
            offset += size;
        }
        out.push(Forest::new(offset, &edges).expect("disjoint trees"));
        return;
    }
    for size in (1..=left.min(max.0)).rev() {
        let last = trees[size].len() - 1;
        let limit = if size == max.0 { max.1.min(last) } else { last };
        for idx in (0..=limit).rev() {
            parts.push((size, idx));
            forests_rec(left - size, (size, idx), trees, parts, out);
            parts.pop();
        }
    }
}

/// Every labeled tree on `0..n` (there are `n^(n-2)`), via Prüfer codes.
pub fn labeled_trees(n: usize) -> impl Iterator<Item = Vec<(usize, usize)>> {
    let len = n.saturating_sub(2);
    let count = if n < 2 { 1 } else { n.pow(len as u32) };
    (0..count).map(move |mut code| {
        let seq: Vec<usize> = (0..len)
            .map(|_| {
                let d = code % n;
                code /= n;
                d
            })
            .collect();
        prufer_decode(n, &seq).expect("valid sequence")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts_match_known_sequence() {
        let counts: Vec<usize> = (1..=10).map(|n| nonisomorphic_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
    }

    #[test]
    fn forest_counts_match_known_sequence() {
        let counts: Vec<usize> = (1..=9).map(|n| nonisomorphic_forests(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 6, 10, 20, 37, 76, 153]);
    }

    #[test]
    fn labeled_tree_count() {
        assert_eq!(labeled_trees(5).count(), 125);
        let distinct: BTreeSet<Vec<(usize, usize)>> = labeled_trees(5)
            .map(|e| Forest::new(5, &e).unwrap().edges().to_vec())
            .collect();
        assert_eq!(distinct.len(), 125);
    }

    #[test]
    fn prufer_examples() {
        // Star centered at 0.
        let e = prufer_decode(4, &[0, 0]).unwrap();
        assert_eq!(Forest::new(4, &e).unwrap().degree(0), 3);
        assert!(prufer_decode(4, &[0]).is_err());
        assert!(prufer_decode(1, &[]).unwrap().is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let f = PrimeField::new(5).unwrap();
        let a = gen_random(f, 50, 7, Shape::Tree).unwrap();
        let b = gen_random(f, 50, 7, Shape::Tree).unwrap();
        assert_eq!(a, b);
        let c = gen_random(Rationals, 30, 3, Shape::Forest(4)).unwrap();
        assert_eq!(c, gen_random(Rationals, 30, 3, Shape::Forest(4)).unwrap());
        assert_eq!(c.pattern().component_count(), 4);
    }

    #[test]
    fn generation_examples() {
        let one = gen_random(Rationals, 1, 0, Shape::Tree).unwrap();
        assert_eq!((one.n(), one.nnz()), (1, 0));
        let big = gen_random(PrimeField::new(5).unwrap(), 1000, 42, Shape::Tree).unwrap();
        assert_eq!(big.pattern().edge_count(), 999);
        assert!(gen_random(Rationals, 0, 0, Shape::Tree).is_err());
        assert!(gen_random(Rationals, 3, 0, Shape::Forest(4)).is_err());
    }

    #[test]
    fn shape_syntax() {
        assert_eq!("tree".parse::<Shape>().unwrap(), Shape::Tree);
        assert_eq!("forest:3".parse::<Shape>().unwrap(), Shape::Forest(3));
        assert!("forest:0".parse::<Shape>().is_err());
        assert!("cycle".parse::<Shape>().is_err());
    }
}
