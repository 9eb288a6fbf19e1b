//! The row space of M: the structured basis built from unit vectors and
//! supported-neighborhood vectors, and the diagonal rank-normalization that
//! carries Rank(A(F)) onto Rank(M).
//!
//! "Rank" here always means the row space. For non-symmetric M the column
//! space generally differs and is not what these bases span.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::kernel::{self, Basis, SupportInfo};
use crate::matrix::{AcyclicMatrix, SparseVector};
use crate::scalation::{self, DiagonalScaling};

/// `s_v(M) = sum of M[v][w] e_w` over support neighbors `w` of `v`.
pub fn supported_neighborhood_vector<F: Field>(
    m: &AcyclicMatrix<F>,
    supp: &SupportInfo,
    v: usize,
) -> Result<SparseVector<F::Elem>> {
    if v >= m.n() {
        return Err(Error::VertexOutOfRange {
            vertex: v,
            n: m.n(),
        });
    }
    if supp.contains(v) {
        return Err(Error::InSupport(v));
    }
    let entries = m
        .row(v)
        .filter(|(w, _)| supp.contains(*w))
        .map(|(w, x)| (w, x.clone()))
        .collect();
    Ok(SparseVector::from_sorted_unchecked(m.n(), entries))
}

/// Basis of the row space of M: `e_v` for every vertex outside the
/// support (ascending), then every nonzero `s_v(M)` (ascending `v`).
pub fn rank_basis<F: Field>(m: &AcyclicMatrix<F>) -> Basis<F::Elem> {
    let supp = kernel::support(m.pattern());
    rank_basis_with(m, &supp)
}

pub fn rank_basis_with<F: Field>(m: &AcyclicMatrix<F>, supp: &SupportInfo) -> Basis<F::Elem> {
    let n = m.n();
    let outside: Vec<usize> = (0..n).filter(|&v| !supp.contains(v)).collect();
    let mut vectors: Vec<_> = outside
        .iter()
        .map(|&v| SparseVector::unit(m.field(), n, v))
        .collect();
    for &v in &outside {
        let s = supported_neighborhood_vector(m, supp, v).expect("vertex outside the support");
        if !s.is_zero() {
            vectors.push(s);
        }
    }
    Basis::new(n, vectors)
}

/// `C^(M,v)`: `C[w] = M[v][second vertex of the path v..w]` on the
/// component of `v`, 1 at `v` itself and elsewhere.
pub fn v_normalization<F: Field>(
    m: &AcyclicMatrix<F>,
    supp: &SupportInfo,
    v: usize,
) -> Result<DiagonalScaling<F::Elem>> {
    if v >= m.n() {
        return Err(Error::VertexOutOfRange {
            vertex: v,
            n: m.n(),
        });
    }
    if supp.contains(v) {
        return Err(Error::InSupport(v));
    }
    let f = m.field();
    let walk = m.pattern().bfs(v);
    let mut diag = vec![f.one(); m.n()];
    for &t in walk.order.iter().skip(1) {
        let s = walk.parent[t];
        diag[t] = if s == v {
            m.entry(v, t).clone()
        } else {
            diag[s].clone()
        };
    }
    DiagonalScaling::new(f, diag)
}

/// `R^M`: the product of `C^(M,v)` over all `v` outside the support.
///
/// Computed in one pass per component. Rooting the component at `r`, a
/// non-support vertex `v` contributes `M[v][parent(v)]` to every `w` that
/// is not in its subtree, and `M[v][c]` to the subtree of its child `c`.
/// So `R[w]` is the product of all parent factors, corrected along the
/// root path of `w`, with `w`'s own factor removed.
pub fn rank_normalization<F: Field>(m: &AcyclicMatrix<F>) -> DiagonalScaling<F::Elem> {
    let supp = kernel::support(m.pattern());
    rank_normalization_with(m, &supp)
}

pub fn rank_normalization_with<F: Field>(
    m: &AcyclicMatrix<F>,
    supp: &SupportInfo,
) -> DiagonalScaling<F::Elem> {
    let f = m.field();
    let forest = m.pattern();
    let n = m.n();
    let walk = forest.bfs_from(&forest.component_roots());

    // up[x] = M[x][parent(x)] for non-support non-roots, else 1.
    let mut up = vec![f.one(); n];
    let mut base = vec![f.one(); forest.component_count()];
    for &x in &walk.order {
        let p = walk.parent[x];
        if p != x && !supp.contains(x) {
            up[x] = m.entry(x, p).clone();
            let c = forest.component_of(x);
            base[c] = f.mul(&base[c], &up[x]);
        }
    }
    let up_inv: Vec<F::Elem> = up
        .iter()
        .map(|u| f.inv(u).expect("nonzero entry"))
        .collect();

    // along[x] = product over non-support proper ancestors a of x of
    // M[a][child toward x] / up[a].
    let mut along = vec![f.one(); n];
    let mut diag = vec![f.one(); n];
    for &x in &walk.order {
        let p = walk.parent[x];
        if p != x {
            along[x] = if supp.contains(p) {
                along[p].clone()
            } else {
                f.mul(&along[p], &f.mul(m.entry(p, x), &up_inv[p]))
            };
        }
        let mut r = f.mul(&base[forest.component_of(x)], &along[x]);
        if !supp.contains(x) {
            r = f.mul(&r, &up_inv[x]);
        }
        diag[x] = r;
    }
    DiagonalScaling::new(f, diag).expect("product of nonzero entries")
}

/// True iff `x` lies in the row space of M, i.e. is orthogonal to every
/// vector of Null(M).
pub fn row_space_contains<F: Field>(
    m: &AcyclicMatrix<F>,
    x: &SparseVector<F::Elem>,
) -> Result<bool> {
    if x.dim() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: x.dim(),
        });
    }
    let f = m.field();
    for b in scalation::null_basis(m).vectors() {
        if !f.is_zero(&b.dot(f, x)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Maps `x` in Rank(M) to `R^N (R^M)^-1 x` in Rank(N), for M and N
/// sharing a pattern.
pub fn transfer_rank<F: Field>(
    m: &AcyclicMatrix<F>,
    n: &AcyclicMatrix<F>,
    x: &SparseVector<F::Elem>,
) -> Result<SparseVector<F::Elem>> {
    m.ensure_same_pattern(n)?;
    if !row_space_contains(m, x)? {
        return Err(Error::NotInRowSpace);
    }
    let f = m.field();
    let supp = kernel::support(m.pattern());
    let rm = rank_normalization_with(m, &supp);
    let rn = rank_normalization_with(n, &supp);
    let entries = x
        .entries()
        .iter()
        .map(|(v, a)| Ok((*v, f.mul(a, &f.div(rn.get(*v), rm.get(*v))?))))
        .collect::<Result<_>>()?;
    Ok(SparseVector::from_sorted_unchecked(x.dim(), entries))
}

/// Vertices with at least one neighbor in the support.
pub fn core_vertices<F: Field>(m: &AcyclicMatrix<F>, supp: &SupportInfo) -> Vec<usize> {
    (0..m.n())
        .filter(|&v| m.pattern().neighbors(v).iter().any(|&w| supp.contains(w)))
        .collect()
}
