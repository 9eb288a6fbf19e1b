//! Zero-diagonal matrices whose nonzero pattern is a forest, and sparse
//! vectors indexed by vertex.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::graph::Forest;

/// A vertex-indexed vector storing only its nonzero coordinates, sorted by
/// vertex. The stored values are never zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseVector<T> {
    dim: usize,
    entries: Vec<(usize, T)>,
}

impl<T: Clone> SparseVector<T> {
    pub fn zero(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    /// Builds a vector from `(vertex, value)` pairs, dropping zeros and
    /// summing repeated vertices.
    pub fn from_pairs<F>(field: &F, dim: usize, pairs: Vec<(usize, T)>) -> Result<Self>
    where
        F: Field<Elem = T>,
    {
        let mut pairs = pairs;
        pairs.sort_by_key(|(v, _)| *v);
        let mut entries: Vec<(usize, T)> = Vec::with_capacity(pairs.len());
        for (v, x) in pairs {
            if v >= dim {
                return Err(Error::VertexOutOfRange { vertex: v, n: dim });
            }
            match entries.last_mut() {
                Some((last, acc)) if *last == v => *acc = field.add(acc, &x),
                _ => entries.push((v, x)),
            }
        }
        entries.retain(|(_, x)| !field.is_zero(x));
        Ok(SparseVector { dim, entries })
    }

    /// `pairs` must be sorted by vertex, in range and free of zeros.
    pub(crate) fn from_sorted_unchecked(dim: usize, entries: Vec<(usize, T)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.last().is_none_or(|(v, _)| *v < dim));
        SparseVector { dim, entries }
    }

    /// The standard basis vector `e_v`.
    pub fn unit<F: Field<Elem = T>>(field: &F, dim: usize, v: usize) -> Self {
        SparseVector {
            dim,
            entries: vec![(v, field.one())],
        }
    }

    pub fn from_dense<F: Field<Elem = T>>(field: &F, values: &[T]) -> Self {
        SparseVector {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, x)| !field.is_zero(x))
                .map(|(v, x)| (v, x.clone()))
                .collect(),
        }
    }

    pub fn to_dense<F: Field<Elem = T>>(&self, field: &F) -> Vec<T> {
        let mut out = vec![field.zero(); self.dim];
        for (v, x) in &self.entries {
            out[*v] = x.clone();
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Vertices carrying a nonzero coordinate, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|(v, _)| *v).collect()
    }

    pub fn get(&self, v: usize) -> Option<&T> {
        self.entries
            .binary_search_by_key(&v, |(w, _)| *w)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn scale<F: Field<Elem = T>>(&self, field: &F, c: &T) -> Self {
        if field.is_zero(c) {
            return Self::zero(self.dim);
        }
        SparseVector {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(v, x)| (*v, field.mul(x, c)))
                .collect(),
        }
    }

    /// Dot product with another vector of the same dimension.
    pub fn dot<F: Field<Elem = T>>(&self, field: &F, other: &Self) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let (mut i, mut j) = (0, 0);
        let mut acc = field.zero();
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i].0, other.entries[j].0);
            if a == b {
                acc = field.add(&acc, &field.mul(&self.entries[i].1, &other.entries[j].1));
                i += 1;
                j += 1;
            } else if a < b {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok(acc)
    }
}

/// A square matrix in M_{F,0}(F): zero diagonal, symmetric nonzero pattern,
/// and that pattern a forest. Values need not be symmetric.
///
/// Values are stored aligned with the pattern's adjacency slots:
/// `values[pattern.slot(u, w)]` is the entry in row `u`, column `w`.
#[derive(Clone, Debug)]
pub struct AcyclicMatrix<F: Field> {
    field: F,
    pattern: Forest,
    values: Vec<F::Elem>,
}

impl<F: Field> AcyclicMatrix<F> {
    /// Validates `(row, column, value)` triples (0-based) and derives the
    /// forest pattern.
    pub fn from_entries(field: F, n: usize, triples: Vec<(usize, usize, F::Elem)>) -> Result<Self> {
        let mut triples = triples;
        for (u, v, x) in &triples {
            for &w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                if field.is_zero(x) {
                    return Err(Error::ExplicitZero(*u, *v));
                }
                return Err(Error::NonzeroDiagonal(*u));
            }
            if field.is_zero(x) {
                return Err(Error::ExplicitZero(*u, *v));
            }
        }
        triples.sort_by_key(|(u, v, _)| (*u, *v));
        if let Some(w) = triples
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(Error::DuplicateEntry(w[0].0, w[0].1));
        }
        let present = |u: usize, v: usize| {
            triples
                .binary_search_by_key(&(u, v), |(a, b, _)| (*a, *b))
                .is_ok()
        };
        let mut edges = Vec::with_capacity(triples.len() / 2);
        for (u, v, _) in &triples {
            if !present(*v, *u) {
                return Err(Error::AsymmetricPattern(*u, *v));
            }
            if u < v {
                edges.push((*u, *v));
            }
        }
        let pattern = Forest::new(n, &edges)?;
        let mut values = vec![field.zero(); 2 * pattern.edge_count()];
        for (u, v, x) in triples {
            let slot = pattern.slot(u, v).expect("pattern edge");
            values[slot] = x;
        }
        Ok(AcyclicMatrix {
            field,
            pattern,
            values,
        })
    }

    /// The adjacency matrix A(F): every pattern entry equal to one.
    pub fn adjacency(field: F, forest: &Forest) -> Self {
        let values = vec![field.one(); 2 * forest.edge_count()];
        AcyclicMatrix {
            field,
            pattern: forest.clone(),
            values,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.pattern.vertex_count()
    }

    pub fn pattern(&self) -> &Forest {
        &self.pattern
    }

    /// Entry in row `u`, column `w`; `None` when it is zero.
    pub fn get(&self, u: usize, w: usize) -> Option<&F::Elem> {
        self.pattern.slot(u, w).map(|s| &self.values[s])
    }

    /// Entry `M_{u,w}` for a known pattern edge.
    pub(crate) fn entry(&self, u: usize, w: usize) -> &F::Elem {
        self.get(u, w)
            .unwrap_or_else(|| panic!("({u}, {w}) is not a pattern edge"))
    }

    /// Row `u` as `(column, value)` pairs in ascending column order.
    pub fn row(&self, u: usize) -> impl Iterator<Item = (usize, &F::Elem)> {
        self.pattern
            .neighbors(u)
            .iter()
            .copied()
            .zip(&self.values[self.pattern.slot_range(u)])
    }

    /// All nonzero entries as `(row, column, value)`, sorted.
    pub fn triples(&self) -> Vec<(usize, usize, F::Elem)> {
        (0..self.n())
            .flat_map(|u| self.row(u).map(move |(w, x)| (u, w, x.clone())))
            .collect()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Exact product `M x`.
    pub fn apply(&self, x: &SparseVector<F::Elem>) -> Result<SparseVector<F::Elem>> {
        if x.dim() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.dim(),
            });
        }
        let f = &self.field;
        // Column w of M is supported on the neighbors of w.
        let mut pairs = Vec::new();
        for (w, xw) in x.entries() {
            for &u in self.pattern.neighbors(*w) {
                pairs.push((u, f.mul(self.entry(u, *w), xw)));
            }
        }
        SparseVector::from_pairs(f, self.n(), pairs)
    }

    /// True iff `M x = 0`.
    pub fn annihilates(&self, x: &SparseVector<F::Elem>) -> Result<bool> {
        Ok(self.apply(x)?.is_zero())
    }

    /// Same field and same nonzero pattern.
    pub fn ensure_same_pattern(&self, other: &Self) -> Result<()> {
        self.field.ensure_same(&other.field)?;
        if self.pattern == other.pattern {
            Ok(())
        } else {
            Err(Error::PatternMismatch)
        }
    }

    /// The principal submatrix M[G] on `vertices`, with the map from new ids
    /// to old ones.
    pub fn induced(&self, vertices: &[usize]) -> Result<(Self, Vec<usize>)> {
        let (pattern, old_ids) = self.pattern.induced_subgraph(vertices)?;
        let mut values = vec![self.field.zero(); 2 * pattern.edge_count()];
        for (i, &old_u) in old_ids.iter().enumerate() {
            for (slot, &j) in pattern.slot_range(i).zip(pattern.neighbors(i)) {
                values[slot] = self.entry(old_u, old_ids[j]).clone();
            }
        }
        Ok((
            AcyclicMatrix {
                field: self.field.clone(),
                pattern,
                values,
            },
            old_ids,
        ))
    }

    /// The matrix with vertices renumbered by [`Forest`]'s breadth-first
    /// relabeling, and the old id of every new vertex.
    pub(crate) fn bfs_relabeled(&self) -> (Self, Vec<usize>) {
        let (pattern, old_of, old_slot) = self.pattern.bfs_relabeled();
        let values = old_slot
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                if let Some(&ahead) = old_slot.get(i + 8) {
                    crate::graph::prefetch(&self.values[ahead]);
                }
                self.values[s].clone()
            })
            .collect();
        let m = AcyclicMatrix {
            field: self.field.clone(),
            pattern,
            values,
        };
        (m, old_of)
    }

    /// Dense row-major copy, for oracles and display.
    pub fn to_dense(&self) -> Vec<Vec<F::Elem>> {
        let n = self.n();
        let mut rows = vec![vec![self.field.zero(); n]; n];
        for (u, row) in rows.iter_mut().enumerate() {
            for (w, x) in self.row(u) {
                row[w] = x.clone();
            }
        }
        rows
    }
}

impl<F: Field> PartialEq for AcyclicMatrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field.spec() == other.field.spec()
            && self.pattern == other.pattern
            && self.values == other.values
    }
}
