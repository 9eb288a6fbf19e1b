//! Brute-force ground truth for the fast algorithms.
//!
//! Nothing here calls into the matching, support, scalation or rank-basis
//! code: null spaces come from dense exact elimination, matching numbers
//! from a tree dynamic program, and independent sets from exhaustive
//! enumeration.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::graph::Forest;
use crate::kernel::Basis;
use crate::matrix::{AcyclicMatrix, SparseVector};

/// Environment variable overriding [`Oracle::DEFAULT_BOUND`].
pub const BOUND_ENV: &str = "FORESTNULL_ORACLE_BOUND";

/// Size caps for the brute-force routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    bound: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            bound: Self::DEFAULT_BOUND,
        }
    }
}

impl Oracle {
    pub const DEFAULT_BOUND: usize = 512;
    /// Largest n accepted by [`Oracle::min_support_total`].
    pub const MIN_SUPPORT_BOUND: usize = 10;
    /// Largest n accepted by [`Oracle::support_by_mis`].
    pub const MIS_BOUND: usize = 12;

    pub fn new(bound: usize) -> Self {
        Oracle { bound }
    }

    /// Reads the bound from `FORESTNULL_ORACLE_BOUND`, falling back to the
    /// default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(BOUND_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(Oracle::new)
            .unwrap_or_default()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    fn check(&self, n: usize, bound: usize) -> Result<()> {
        if n > bound {
            Err(Error::OracleBound { n, bound })
        } else {
            Ok(())
        }
    }

    /// Basis of `{x : M x = 0}` read off the reduced row echelon form.
    pub fn dense_null_space<F: Field>(&self, m: &AcyclicMatrix<F>) -> Result<Basis<F::Elem>> {
        self.check(m.n(), self.bound)?;
        Ok(null_space(m.field(), m.to_dense(), m.n()))
    }

    /// Nonzero rows of the reduced row echelon form of M.
    pub fn dense_row_space<F: Field>(&self, m: &AcyclicMatrix<F>) -> Result<Basis<F::Elem>> {
        self.check(m.n(), self.bound)?;
        Ok(row_space(m.field(), m.to_dense(), m.n()))
    }

    /// Span of the columns of M, i.e. the row space of its transpose.
    pub fn dense_column_space<F: Field>(&self, m: &AcyclicMatrix<F>) -> Result<Basis<F::Elem>> {
        self.check(m.n(), self.bound)?;
        let rows = m.to_dense();
        let n = m.n();
        let transposed = (0..n)
            .map(|j| (0..n).map(|i| rows[i][j].clone()).collect())
            .collect();
        Ok(row_space(m.field(), transposed, n))
    }

    pub fn rank<F: Field>(&self, m: &AcyclicMatrix<F>) -> Result<usize> {
        Ok(self.dense_row_space(m)?.dimension())
    }

    /// Vertices carrying a nonzero coordinate in some null vector of M.
    pub fn dense_null_support<F: Field>(&self, m: &AcyclicMatrix<F>) -> Result<Vec<usize>> {
        let basis = self.dense_null_space(m)?;
        let mut hit = vec![false; m.n()];
        for v in basis.vectors() {
            for (w, _) in v.entries() {
                hit[*w] = true;
            }
        }
        Ok((0..m.n()).filter(|&v| hit[v]).collect())
    }

    /// Minimum total number of nonzeros over all bases of Null(M).
    ///
    /// Enumerates the elementary (support-minimal) null vectors by solving
    /// M restricted to every column subset, then runs the matroid greedy
    /// over them in order of support size.
    pub fn min_support_total<F: Field>(&self, m: &AcyclicMatrix<F>) -> Result<usize> {
        let n = m.n();
        self.check(n, Self::MIN_SUPPORT_BOUND.min(self.bound))?;
        let field = m.field();
        let rows = m.to_dense();
        let target = null_space(field, rows.clone(), n).dimension();

        let mut subsets: Vec<u32> = (1u32..(1 << n)).collect();
        subsets.sort_by_key(|s| s.count_ones());
        let mut circuits: Vec<SparseVector<F::Elem>> = Vec::new();
        for s in subsets {
            let cols: Vec<usize> = (0..n).filter(|&j| s >> j & 1 == 1).collect();
            let restricted: Vec<Vec<F::Elem>> = rows
                .iter()
                .map(|r| cols.iter().map(|&j| r[j].clone()).collect())
                .collect();
            let kernel = null_space(field, restricted, cols.len());
            if kernel.dimension() != 1 {
                continue;
            }
            let y = &kernel.vectors()[0];
            if y.nnz() != cols.len() {
                continue;
            }
            let pairs = y
                .entries()
                .iter()
                .map(|(i, x)| (cols[*i], x.clone()))
                .collect();
            circuits.push(SparseVector::from_pairs(field, n, pairs)?);
        }

        let mut chosen: Vec<SparseVector<F::Elem>> = Vec::new();
        let mut total = 0;
        for c in circuits {
            if chosen.len() == target {
                break;
            }
            chosen.push(c);
            if span_rank(field, &chosen) == chosen.len() {
                total += chosen.last().unwrap().nnz();
            } else {
                chosen.pop();
            }
        }
        debug_assert_eq!(chosen.len(), target);
        Ok(total)
    }

    /// `{v : nu(F - v) = nu(F)}`, by recomputing the matching number with
    /// each vertex deleted.
    pub fn support_by_matching(&self, forest: &Forest) -> Result<Vec<usize>> {
        self.check(forest.vertex_count(), self.bound)?;
        let nu = matching_number(forest, None);
        Ok((0..forest.vertex_count())
            .filter(|&v| matching_number(forest, Some(v)) == nu)
            .collect())
    }

    /// Intersection of all maximum independent sets, by enumeration.
    pub fn support_by_mis(&self, forest: &Forest) -> Result<Vec<usize>> {
        let n = forest.vertex_count();
        self.check(n, Self::MIS_BOUND.min(self.bound))?;
        let nbr: Vec<u32> = (0..n)
            .map(|v| forest.neighbors(v).iter().fold(0, |m, &w| m | 1 << w))
            .collect();
        let mut best = 0;
        let mut common = 0u32;
        for s in 0u32..(1 << n) {
            if (0..n).any(|v| s >> v & 1 == 1 && nbr[v] & s != 0) {
                continue;
            }
            let size = s.count_ones();
            if size > best {
                best = size;
                common = s;
            } else if size == best {
                common &= s;
            }
        }
        Ok((0..n).filter(|&v| common >> v & 1 == 1).collect())
    }

    /// Matching number, for cross-checking dimension laws.
    pub fn matching_number(&self, forest: &Forest) -> usize {
        matching_number(forest, None)
    }
}

/// Maximum matching size of the forest with `removed` deleted, by the
/// two-state tree DP (best with the root free / best overall).
fn matching_number(forest: &Forest, removed: Option<usize>) -> usize {
    let n = forest.vertex_count();
    let mut visited = vec![false; n];
    let mut free = vec![0usize; n];
    let mut any = vec![0usize; n];
    let mut total = 0;
    if let Some(r) = removed {
        visited[r] = true;
    }
    for root in 0..n {
        if visited[root] {
            continue;
        }
        // Explicit stack of (vertex, parent, expanded?) pairs.
        let mut stack = vec![(root, usize::MAX, false)];
        visited[root] = true;
        while let Some((v, parent, expanded)) = stack.pop() {
            if !expanded {
                stack.push((v, parent, true));
                for &w in forest.neighbors(v) {
                    if !visited[w] {
                        visited[w] = true;
                        stack.push((w, v, false));
                    }
                }
                continue;
            }
            let children = forest
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| w != parent && Some(w) != removed);
            let sum_any: usize = children.clone().map(|c| any[c]).sum();
            free[v] = sum_any;
            let gain = children.map(|c| 1 + free[c] - any[c]).max().unwrap_or(0);
            any[v] = sum_any + gain;
        }
        total += any[root];
    }
    total
}

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row. Pivots are the first nonzero entry found scanning down.
fn rref<F: Field>(field: &F, rows: &mut [Vec<F::Elem>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = field.inv(&rows[r][c]).expect("pivot is nonzero");
        let support: Vec<usize> = (c..cols).filter(|&j| !field.is_zero(&rows[r][j])).collect();
        for &j in &support {
            rows[r][j] = field.mul(&rows[r][j], &inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || field.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for &j in &support {
                row[j] = field.sub(&row[j], &field.mul(&factor, &pivot_row[j]));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn null_space<F: Field>(field: &F, mut rows: Vec<Vec<F::Elem>>, cols: usize) -> Basis<F::Elem> {
    let pivots = rref(field, &mut rows, cols);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let vectors = (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut pairs = vec![(free, field.one())];
            for (r, &c) in pivots.iter().enumerate() {
                if !field.is_zero(&rows[r][free]) {
                    pairs.push((c, field.neg(&rows[r][free])));
                }
            }
            SparseVector::from_pairs(field, cols, pairs).expect("in range")
        })
        .collect();
    Basis::new(cols, vectors)
}

fn row_space<F: Field>(field: &F, mut rows: Vec<Vec<F::Elem>>, cols: usize) -> Basis<F::Elem> {
    let rank = rref(field, &mut rows, cols).len();
    let vectors = rows[..rank]
        .iter()
        .map(|r| SparseVector::from_dense(field, r))
        .collect();
    Basis::new(cols, vectors)
}

fn span_rank<F: Field>(field: &F, vectors: &[SparseVector<F::Elem>]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let cols = first.dim();
    let mut rows: Vec<Vec<F::Elem>> = vectors.iter().map(|v| v.to_dense(field)).collect();
    rref(field, &mut rows, cols).len()
}

/// Rank of a list of vectors of equal dimension.
pub fn rank_of<F: Field>(field: &F, vectors: &[SparseVector<F::Elem>]) -> usize {
    span_rank(field, vectors)
}

/// True iff the two bases span the same subspace.
pub fn same_span<F: Field>(field: &F, a: &Basis<F::Elem>, b: &Basis<F::Elem>) -> Result<bool> {
    if a.ambient_dimension() != b.ambient_dimension() {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dimension(),
            found: b.ambient_dimension(),
        });
    }
    let ra = span_rank(field, a.vectors());
    let rb = span_rank(field, b.vectors());
    let both: Vec<_> = a.vectors().iter().chain(b.vectors()).cloned().collect();
    Ok(ra == rb && span_rank(field, &both) == ra)
}

/// True iff `x` lies in the span of `basis`.
pub fn in_span<F: Field>(field: &F, basis: &Basis<F::Elem>, x: &SparseVector<F::Elem>) -> bool {
    let r = span_rank(field, basis.vectors());
    let mut with = basis.vectors().to_vec();
    with.push(x.clone());
    span_rank(field, &with) == r
}
