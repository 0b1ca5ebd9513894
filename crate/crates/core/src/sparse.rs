//! Column-compressed sparse square matrices over an arbitrary [`Scalar`].
//!
//! Entries of a column are stored with strictly increasing row index and no
//! stored zeros, so iteration order and serialization are deterministic.

use std::collections::BTreeMap;
use std::fmt;

use crate::lattice::{Config, Sector};
use crate::scalar::Scalar;

/// Which basis the rows and columns refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Ternary ordering of all `3^{2L}` configurations.
    Full { l: usize },
    /// Sorted configurations of one sector.
    Sector(Sector),
}

impl Basis {
    pub fn l(&self) -> usize {
        match self {
            Basis::Full { l } => *l,
            Basis::Sector(s) => s.l,
        }
    }

    pub fn configs(&self) -> Vec<Config> {
        match self {
            Basis::Full { l } => crate::lattice::all_configs(*l).collect(),
            Basis::Sector(s) => s.enumerate(),
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct SparseOp<S> {
    dim: usize,
    basis: Basis,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    vals: Vec<S>,
}

impl<S: Scalar> SparseOp<S> {
    pub fn zero(dim: usize, basis: Basis) -> Self {
        Self {
            dim,
            basis,
            col_ptr: vec![0; dim + 1],
            rows: vec![],
            vals: vec![],
        }
    }

    pub fn identity(dim: usize, basis: Basis) -> Self {
        Self::diagonal((0..dim).map(|_| S::one()).collect(), basis)
    }

    pub fn diagonal(diag: Vec<S>, basis: Basis) -> Self {
        let dim = diag.len();
        Self::from_entries(dim, basis, diag.into_iter().enumerate().map(|(i, v)| (i, i, v)))
    }

    /// Builds from `(row, col, value)` triples; duplicates are summed and
    /// zeros dropped.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize, S)>>(
        dim: usize,
        basis: Basis,
        entries: I,
    ) -> Self {
        let mut cols: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in entries {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside dimension {dim}");
            match cols[c].remove(&r) {
                Some(old) => {
                    cols[c].insert(r, old + v);
                }
                None => {
                    cols[c].insert(r, v);
                }
            }
        }
        Self::from_columns(dim, basis, cols)
    }

    fn from_columns(dim: usize, basis: Basis, cols: Vec<BTreeMap<usize, S>>) -> Self {
        let mut col_ptr = Vec::with_capacity(dim + 1);
        let mut rows = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0);
        for col in cols {
            for (r, v) in col {
                if !v.is_zero() {
                    rows.push(r);
                    vals.push(v);
                }
            }
            col_ptr.push(rows.len());
        }
        Self {
            dim,
            basis,
            col_ptr,
            rows,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }

    /// Entries of column `c` as `(row, value)`.
    pub fn column(&self, c: usize) -> impl Iterator<Item = (usize, &S)> + '_ {
        let r = self.col_ptr[c]..self.col_ptr[c + 1];
        self.rows[r.clone()].iter().copied().zip(&self.vals[r])
    }

    /// All entries as `(row, col, value)` in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        (0..self.dim).flat_map(move |c| self.column(c).map(move |(r, v)| (r, c, v)))
    }

    pub fn get(&self, row: usize, col: usize) -> S {
        let r = self.col_ptr[col]..self.col_ptr[col + 1];
        match self.rows[r.clone()].binary_search(&row) {
            Ok(i) => self.vals[r.start + i].clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_entries(
            self.dim,
            self.basis,
            self.entries().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    pub fn map<T: Scalar, F: Fn(&S) -> T>(&self, f: F) -> SparseOp<T> {
        SparseOp::from_entries(self.dim, self.basis, self.entries().map(|(r, c, v)| (r, c, f(v))))
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_entries(
            self.dim,
            self.basis,
            self.entries()
                .chain(other.entries())
                .map(|(r, c, v)| (r, c, v.clone())),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_entries(
            self.dim,
            self.basis,
            self.entries()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(other.entries().map(|(r, c, v)| (r, c, -v.clone()))),
        )
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let cols = (0..self.dim)
            .map(|j| {
                let mut acc: BTreeMap<usize, S> = BTreeMap::new();
                for (k, bkj) in other.column(j) {
                    for (i, aik) in self.column(k) {
                        let t = aik.clone() * bkj.clone();
                        match acc.remove(&i) {
                            Some(old) => acc.insert(i, old + t),
                            None => acc.insert(i, t),
                        };
                    }
                }
                acc
            })
            .collect();
        Self::from_columns(self.dim, self.basis, cols)
    }

    /// `[self, other] = self other - other self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// `v^T A` for a sparse row vector `v` given as `(index, value)` pairs.
    pub fn row_action(&self, row: &BTreeMap<usize, S>) -> BTreeMap<usize, S> {
        let mut out = BTreeMap::new();
        for c in 0..self.dim {
            let mut acc = S::zero();
            for (r, v) in self.column(c) {
                if let Some(x) = row.get(&r) {
                    acc = acc + x.clone() * v.clone();
                }
            }
            if !acc.is_zero() {
                out.insert(c, acc);
            }
        }
        out
    }

    /// `A v` for a dense vector.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        for (r, c, a) in self.entries() {
            out[r] = out[r].clone() + a.clone() * v[c].clone();
        }
        out
    }

    /// First entry where `self` and `other` differ, with the residual
    /// `self - other` there.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize, S)> {
        self.sub(other)
            .entries()
            .next()
            .map(|(r, c, v)| (r, c, v.clone()))
    }

    /// First nonzero entry, if any.
    pub fn first_nonzero(&self) -> Option<(usize, usize, S)> {
        self.entries().next().map(|(r, c, v)| (r, c, v.clone()))
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }

    /// Restriction to the index subset `idx` (in the given order).
    pub fn restrict(&self, idx: &[usize], basis: Basis) -> Self {
        let mut pos = vec![usize::MAX; self.dim];
        for (i, &g) in idx.iter().enumerate() {
            pos[g] = i;
        }
        let entries = idx.iter().enumerate().flat_map(|(cj, &g)| {
            let pos = &pos;
            self.column(g)
                .filter(move |(r, _)| pos[*r] != usize::MAX)
                .map(move |(r, v)| (pos[r], cj, v.clone()))
        });
        Self::from_entries(idx.len(), basis, entries.collect::<Vec<_>>())
    }
}

impl SparseOp<f64> {
    /// Dense row-major copy.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = *v;
        }
        m
    }
}

impl<S: Scalar + fmt::Display> SparseOp<S> {
    /// Dump format: header `dim basis L N M r ell`, then one
    /// `row col value` line per nonzero with 1-based indices.
    pub fn dump(&self, rates: (&str, &str)) -> String {
        let (kind, l, n, m) = match self.basis {
            Basis::Full { l } => ("full", l, "*".to_string(), "*".to_string()),
            Basis::Sector(s) => ("sector", s.l, s.n.to_string(), s.m.to_string()),
        };
        let mut out = format!(
            "{} {} {} {} {} {} {}\n",
            self.dim, kind, l, n, m, rates.0, rates.1
        );
        for (r, c, v) in self.entries() {
            out.push_str(&format!("{} {} {}\n", r + 1, c + 1, v));
        }
        out
    }
}

impl<S: Scalar> fmt::Debug for SparseOp<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SparseOp")
            .field("dim", &self.dim)
            .field("basis", &self.basis)
            .field("nnz", &self.nnz())
            .finish()
    }
}
