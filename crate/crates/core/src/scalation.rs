//! Diagonal scalings that carry Null(M) onto Null(A(F)), and the sparsest
//! null basis of M obtained by pulling back the forest's basis.
//!
//! Edge-factor convention for non-symmetric M: walking a directed tree edge
//! `(s, t)` away from the root multiplies the running diagonal value by
//! `M[s][t]` when `t` is in the null support, by `1 / M[t][s]` when `s` is,
//! and by 1 otherwise. In both cases the entry used has its row at the
//! non-support endpoint. With this choice every vertex `u` satisfies
//! `D[w] / D[w'] = M[u][w] / M[u][w']` for its support neighbors `w, w'`,
//! which is what makes `A(F) D x = 0` equivalent to `M x = 0`.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::kernel::{self, Basis, SupportInfo};
use crate::matrix::{AcyclicMatrix, SparseVector};

/// A nonsingular diagonal matrix, stored as its diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalScaling<T> {
    diag: Vec<T>,
}

impl<T: Clone> DiagonalScaling<T> {
    pub fn identity<F: Field<Elem = T>>(field: &F, n: usize) -> Self {
        DiagonalScaling {
            diag: vec![field.one(); n],
        }
    }

    /// Fails with [`Error::DivisionByZero`] if any entry is zero.
    pub fn new<F: Field<Elem = T>>(field: &F, diag: Vec<T>) -> Result<Self> {
        if diag.iter().any(|d| field.is_zero(d)) {
            return Err(Error::DivisionByZero);
        }
        Ok(DiagonalScaling { diag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diag
    }

    pub fn get(&self, v: usize) -> &T {
        &self.diag[v]
    }

    pub fn inverse<F: Field<Elem = T>>(&self, field: &F) -> Self {
        DiagonalScaling {
            diag: self
                .diag
                .iter()
                .map(|d| field.inv(d).expect("diagonal entries are nonzero"))
                .collect(),
        }
    }

    /// Entrywise product.
    pub fn compose<F: Field<Elem = T>>(&self, field: &F, other: &Self) -> Self {
        DiagonalScaling {
            diag: self
                .diag
                .iter()
                .zip(&other.diag)
                .map(|(a, b)| field.mul(a, b))
                .collect(),
        }
    }

    /// `D x`; the support of `x` is preserved.
    pub fn apply<F: Field<Elem = T>>(
        &self,
        field: &F,
        x: &SparseVector<T>,
    ) -> Result<SparseVector<T>> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let entries = x
            .entries()
            .iter()
            .map(|(v, a)| (*v, field.mul(a, &self.diag[*v])))
            .collect();
        Ok(SparseVector::from_sorted_unchecked(x.dim(), entries))
    }
}

/// Numerators and denominators of the edge-factor products, run outward
/// from each root (one per component); root-less components keep 1/1.
/// Only multiplications happen here, so inverses can be batched.
fn scale_parts<F: Field>(
    m: &AcyclicMatrix<F>,
    supp: &SupportInfo,
    roots: &[usize],
) -> (Vec<F::Elem>, Vec<F::Elem>) {
    let f = m.field();
    let in_supp = supp.membership();
    let walk = m.pattern().bfs_from(roots);
    let mut num = vec![f.one(); m.n()];
    let mut den = vec![f.one(); m.n()];
    for &t in &walk.order {
        let s = walk.parent[t];
        if s == t {
            continue;
        }
        let (n, d) = match (in_supp[s], in_supp[t]) {
            (false, true) => (f.mul(&num[s], m.entry(s, t)), den[s].clone()),
            (true, false) => (num[s].clone(), f.mul(&den[s], m.entry(t, s))),
            (false, false) => (num[s].clone(), den[s].clone()),
            (true, true) => unreachable!("support vertices {s} and {t} are adjacent"),
        };
        num[t] = n;
        den[t] = d;
    }
    (num, den)
}

fn scale_from_roots<F: Field>(
    m: &AcyclicMatrix<F>,
    supp: &SupportInfo,
    roots: &[usize],
) -> Vec<F::Elem> {
    let f = m.field();
    let (num, mut den) = scale_parts(m, supp, roots);
    f.inv_all(&mut den).expect("pattern entries are nonzero");
    num.iter().zip(&den).map(|(a, b)| f.mul(a, b)).collect()
}

/// The v-scalation D^(M,v) for `v` in the null support.
pub fn v_scalation<F: Field>(
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
    if !supp.contains(v) {
        return Err(Error::NotInSupport(v));
    }
    Ok(DiagonalScaling {
        diag: scale_from_roots(m, supp, &[v]),
    })
}

/// The smallest support vertex of every component that meets the support.
pub fn supp_transversal<F: Field>(m: &AcyclicMatrix<F>, supp: &SupportInfo) -> Vec<usize> {
    let forest = m.pattern();
    let mut taken = vec![false; forest.component_count()];
    let mut out = Vec::new();
    for &v in &supp.supp {
        let c = forest.component_of(v);
        if !taken[c] {
            taken[c] = true;
            out.push(v);
        }
    }
    out
}

fn check_transversal<F: Field>(
    m: &AcyclicMatrix<F>,
    supp: &SupportInfo,
    u: &[usize],
) -> Result<()> {
    let forest = m.pattern();
    let mut covered = vec![false; forest.component_count()];
    for &v in u {
        if v >= m.n() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: m.n(),
            });
        }
        if !supp.contains(v) {
            return Err(Error::NotTransversal(format!(
                "vertex {} is not in the support",
                v + 1
            )));
        }
        let c = forest.component_of(v);
        if covered[c] {
            return Err(Error::NotTransversal(format!(
                "two chosen vertices share the component of vertex {}",
                v + 1
            )));
        }
        covered[c] = true;
    }
    if let Some(&v) = supp
        .supp
        .iter()
        .find(|&&v| !covered[forest.component_of(v)])
    {
        return Err(Error::NotTransversal(format!(
            "no chosen vertex in the component of support vertex {}",
            v + 1
        )));
    }
    Ok(())
}

/// The U-scalation D^(M,U): the product of the v-scalations over `u`,
/// each acting on its own component.
pub fn u_scalation<F: Field>(
    m: &AcyclicMatrix<F>,
    supp: &SupportInfo,
    u: &[usize],
) -> Result<DiagonalScaling<F::Elem>> {
    check_transversal(m, supp, u)?;
    Ok(DiagonalScaling {
        diag: scale_from_roots(m, supp, u),
    })
}

/// (D^(M,U))^-1 on the support of a breadth-first numbered matrix, where
/// `roots[c]` is the transversal vertex of component `c` (or `usize::MAX`).
/// Entries off the support are left at 1.
///
/// Edge factors are antisymmetric, factor(t, s) = 1 / factor(s, t), so the
/// product from a root r to v is P(v) / P(r) for products P taken from the
/// component's first vertex. In this numbering a vertex's parent is its
/// first neighbor, so P is one forward pass.
fn inverse_on_support<F: Field>(
    m: &AcyclicMatrix<F>,
    supp: &SupportInfo,
    roots: &[usize],
) -> Vec<F::Elem> {
    let f = m.field();
    let forest = m.pattern();
    let in_supp = supp.membership();
    let mut num: Vec<F::Elem> = Vec::with_capacity(m.n());
    let mut den: Vec<F::Elem> = Vec::with_capacity(m.n());
    for t in 0..m.n() {
        let (a, b) = match forest.neighbors(t).first() {
            Some(&s) if s < t => match (in_supp[s], in_supp[t]) {
                (false, true) => (f.mul(&num[s], m.entry(s, t)), den[s].clone()),
                (true, false) => (num[s].clone(), f.mul(&den[s], m.entry(t, s))),
                (false, false) => (num[s].clone(), den[s].clone()),
                (true, true) => unreachable!("support vertices {s} and {t} are adjacent"),
            },
            _ => (f.one(), f.one()),
        };
        num.push(a);
        den.push(b);
    }
    // D_v = num_v den_r / (den_v num_r), so D_v^-1 = den_v num_r / (num_v den_r).
    let mut bottom: Vec<F::Elem> = supp
        .supp
        .iter()
        .map(|&v| f.mul(&num[v], &den[roots[forest.component_of(v)]]))
        .collect();
    f.inv_all(&mut bottom).expect("scaling entries are nonzero");
    let mut out = vec![f.one(); m.n()];
    for (&v, b) in supp.supp.iter().zip(&bottom) {
        let r = roots[forest.component_of(v)];
        out[v] = f.mul(&f.mul(&den[v], &num[r]), b);
    }
    out
}

/// A sparsest basis of Null(M): the forest's {-1, 0, 1} basis with every
/// coordinate divided by the U-scalation. Vector order and supports match
/// [`kernel::sparsest_null_basis`] on the pattern.
pub fn null_basis<F: Field>(m: &AcyclicMatrix<F>) -> Basis<F::Elem> {
    // Work on a breadth-first renumbering for memory locality. Every choice
    // that depends on ids compares original ids, so the output is the same
    // as on `m` itself.
    let (local, old) = m.bfs_relabeled();
    let f = m.field();
    let forest = local.pattern();
    let matching = kernel::maximum_matching_numbered(forest);
    let supp = kernel::support_with(forest, &matching);
    let partner = kernel::core_matching_numbered(forest, &supp, &matching, |v| old[v]);

    let mut roots = vec![usize::MAX; forest.component_count()];
    for &v in &supp.supp {
        let r = &mut roots[forest.component_of(v)];
        if *r == usize::MAX || old[v] < old[*r] {
            *r = v;
        }
    }
    let scale = inverse_on_support(&local, &supp, &roots);

    // Walk the circuits in local order, where they are cache-friendly, and
    // only then put them in order of original id.
    let mut keyed: Vec<(usize, SparseVector<F::Elem>)> = supp
        .supp
        .iter()
        .filter(|&&u| partner[u].is_none())
        .map(|&u| {
            let mut pairs: Vec<_> = kernel::circuit(f, forest, &partner, u)
                .into_iter()
                .map(|(v, x)| (old[v], f.mul(&x, &scale[v])))
                .collect();
            pairs.sort_unstable_by_key(|(v, _)| *v);
            (old[u], SparseVector::from_sorted_unchecked(m.n(), pairs))
        })
        .collect();
    keyed.sort_unstable_by_key(|(k, _)| *k);
    let vectors = keyed.into_iter().map(|(_, x)| x).collect();
    Basis::new(m.n(), vectors)
}

/// Maps `x` in Null(M) to `D^(N,U)^-1 D^(M,U) x` in Null(N), for M and N
/// sharing a pattern.
pub fn transfer_null<F: Field>(
    m: &AcyclicMatrix<F>,
    n: &AcyclicMatrix<F>,
    x: &SparseVector<F::Elem>,
) -> Result<SparseVector<F::Elem>> {
    m.ensure_same_pattern(n)?;
    if !m.annihilates(x)? {
        return Err(Error::NotInNullSpace);
    }
    let f = m.field();
    let supp = kernel::support(m.pattern());
    let roots = supp_transversal(m, &supp);
    let dm = scale_from_roots(m, &supp, &roots);
    let dn = scale_from_roots(n, &supp, &roots);
    let entries = x
        .entries()
        .iter()
        .map(|(v, a)| Ok((*v, f.mul(a, &f.div(&dm[*v], &dn[*v])?))))
        .collect::<Result<_>>()?;
    Ok(SparseVector::from_sorted_unchecked(x.dim(), entries))
}

/// True iff `x` vanishes off the S-set and its restriction to the S-set is
/// annihilated by the principal submatrix M[S].
pub fn restriction_check<F: Field>(
    m: &AcyclicMatrix<F>,
    x: &SparseVector<F::Elem>,
) -> Result<bool> {
    if x.dim() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: x.dim(),
        });
    }
    let info = kernel::support(m.pattern());
    let mut new_id = vec![usize::MAX; m.n()];
    for (i, &v) in info.s_set.iter().enumerate() {
        new_id[v] = i;
    }
    if x.entries().iter().any(|(v, _)| new_id[*v] == usize::MAX) {
        return Ok(false);
    }
    let (sub, _) = m.induced(&info.s_set)?;
    let restricted = SparseVector::from_sorted_unchecked(
        info.s_set.len(),
        x.entries()
            .iter()
            .map(|(v, a)| (new_id[*v], a.clone()))
            .collect(),
    );
    sub.annihilates(&restricted)
}
