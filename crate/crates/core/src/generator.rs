//! The Markov generator in quantum-Hamiltonian form,
//! `H_{eta' eta} = -w(eta -> eta')` off the diagonal and the total exit
//! rate on it, so that `|P_t> = exp(-H t) |P_0>`.
//!
//! In the exact ring `H` is stored divided by the time scale `w = sqrt(r l)`,
//! i.e. with hopping weights `q` and `q^{-1}`.

use crate::error::{Error, Result};
use crate::lattice::{all_configs, bonds, full_dim, Config, Occ, Sector, Site};
use crate::scalar::Scalar;
use crate::sparse::{Basis, SparseOp};
use crate::QPoly;

/// Largest half-length for which the full exact generator is built.
pub const MAX_EXACT_FULL_L: usize = 3;
/// Largest half-length for which the full floating-point generator is built.
pub const MAX_FLOAT_FULL_L: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ring {
    Exact,
    Float,
}

/// Lattice size and hopping rates. `r` drives `A0 -> 0A`, `0B -> B0`,
/// `AB -> BA`; `ell` the reverse moves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub l: usize,
    pub r: f64,
    pub ell: f64,
}

impl ModelParams {
    pub fn new(l: usize, r: f64, ell: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidLattice("L must be positive".into()));
        }
        if !(r.is_finite() && ell.is_finite() && r > 0.0 && ell > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rates must be positive and finite, got r={r}, ell={ell}"
            )));
        }
        Ok(Self { l, r, ell })
    }

    /// From asymmetry `q = sqrt(r/ell)` and time scale `w = sqrt(r ell)`.
    pub fn from_q_w(l: usize, q: f64, w: f64) -> Result<Self> {
        Self::new(l, w * q, w / q)
    }

    pub fn q(&self) -> f64 {
        (self.r / self.ell).sqrt()
    }

    pub fn w(&self) -> f64 {
        (self.r * self.ell).sqrt()
    }

    pub fn float_rates(&self) -> Rates<f64> {
        Rates {
            right: self.r,
            left: self.ell,
        }
    }
}

/// Rate pair in some scalar ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Rates<S> {
    pub right: S,
    pub left: S,
}

impl Rates<QPoly> {
    /// `(q, q^{-1})`: the exact rates with `w` factored out.
    pub fn exact() -> Self {
        Rates {
            right: QPoly::q(),
            left: QPoly::q_pow(-1),
        }
    }
}

/// Direction class of an allowed exchange on a bond.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// Rate `r`.
    Right,
    /// Rate `ell`.
    Left,
}

/// Which exchange (if any) bond `(k, k+1)` allows.
pub fn bond_move(c: &Config, k: Site) -> Result<Option<Move>> {
    if !bonds(c.l()).contains(&k) {
        return Err(Error::BondOutOfRange(k));
    }
    Ok(match (c.get(k), c.get(k + 1)) {
        (Occ::A, Occ::V) | (Occ::V, Occ::B) | (Occ::A, Occ::B) => Some(Move::Right),
        (Occ::V, Occ::A) | (Occ::B, Occ::V) | (Occ::B, Occ::A) => Some(Move::Left),
        _ => None,
    })
}

/// Local hopping rate `w^{k,k+1}(eta)`.
pub fn local_rate<S: Scalar>(c: &Config, k: Site, rates: &Rates<S>) -> Result<S> {
    Ok(match bond_move(c, k)? {
        Some(Move::Right) => rates.right.clone(),
        Some(Move::Left) => rates.left.clone(),
        None => S::zero(),
    })
}

/// Outgoing transitions of `c` as `(target, rate)`.
pub fn transitions<S: Scalar>(c: &Config, rates: &Rates<S>) -> Vec<(Config, S)> {
    bonds(c.l())
        .filter_map(|k| {
            let rate = local_rate(c, k, rates).expect("bond in range");
            (!rate.is_zero()).then(|| (c.swap(k).expect("bond in range"), rate))
        })
        .collect()
}

fn assemble<S: Scalar>(
    configs: &[Config],
    index: impl Fn(&Config) -> usize,
    basis: Basis,
    rates: &Rates<S>,
) -> SparseOp<S> {
    let mut entries = Vec::new();
    for (j, c) in configs.iter().enumerate() {
        let mut exit = S::zero();
        for (target, rate) in transitions(c, rates) {
            entries.push((index(&target), j, -rate.clone()));
            exit = exit + rate;
        }
        entries.push((j, j, exit));
    }
    SparseOp::from_entries(configs.len(), basis, entries)
}

/// Generator on the full ternary basis.
pub fn build_h<S: Scalar>(l: usize, rates: &Rates<S>) -> SparseOp<S> {
    let configs: Vec<Config> = all_configs(l).collect();
    assemble(&configs, Config::basis_index, Basis::Full { l }, rates)
}

/// Generator restricted to one sector, in the sorted sector basis.
pub fn build_h_sector<S: Scalar>(sector: Sector, rates: &Rates<S>) -> SparseOp<S> {
    let configs = sector.enumerate();
    let pos: std::collections::HashMap<usize, usize> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| (c.basis_index(), i))
        .collect();
    assemble(&configs, |c| pos[&c.basis_index()], Basis::Sector(sector), rates)
}

/// Exact full generator `H / w`, capped at [`MAX_EXACT_FULL_L`].
pub fn build_h_exact(l: usize) -> Result<SparseOp<QPoly>> {
    if l == 0 || l > MAX_EXACT_FULL_L {
        return Err(Error::InvalidArgument(format!(
            "exact full generator supports 1 <= L <= {MAX_EXACT_FULL_L}, got {l}"
        )));
    }
    Ok(build_h(l, &Rates::exact()))
}

/// Floating-point full generator with the time scale attached, capped at
/// [`MAX_FLOAT_FULL_L`].
pub fn build_h_float(p: &ModelParams) -> Result<SparseOp<f64>> {
    if p.l > MAX_FLOAT_FULL_L {
        return Err(Error::InvalidArgument(format!(
            "float full generator supports L <= {MAX_FLOAT_FULL_L}, got {}",
            p.l
        )));
    }
    Ok(build_h(p.l, &p.float_rates()))
}

/// `(L f)(eta) = sum_k w^{k,k+1}(eta) [f(eta^{k,k+1}) - f(eta)]`.
pub fn apply_generator<S: Scalar, F: Fn(&Config) -> S>(f: F, c: &Config, rates: &Rates<S>) -> S {
    let here = f(c);
    transitions(c, rates)
        .into_iter()
        .fold(S::zero(), |acc, (t, rate)| acc + rate * (f(&t) - here.clone()))
}

/// Dimension of the full space for half-length `l`.
pub fn dim(l: usize) -> usize {
    full_dim(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn cfg(s: &str) -> Config {
        s.parse().unwrap()
    }

    #[test]
    fn rate_table() {
        let r = Rates {
            right: 2.0,
            left: 0.5,
        };
        assert_eq!(local_rate(&cfg("A0"), 0, &r).unwrap(), 2.0);
        assert_eq!(local_rate(&cfg("BA"), 0, &r).unwrap(), 0.5);
        assert_eq!(local_rate(&cfg("AA"), 0, &r).unwrap(), 0.0);
        assert_eq!(local_rate(&cfg("0B"), 0, &r).unwrap(), 2.0);
        assert_eq!(local_rate(&cfg("AB"), 0, &r).unwrap(), 2.0);
        assert_eq!(local_rate(&cfg("0A"), 0, &r).unwrap(), 0.5);
        assert_eq!(local_rate(&cfg("B0"), 0, &r).unwrap(), 0.5);
        assert_eq!(local_rate(&cfg("A0"), 1, &r), Err(Error::BondOutOfRange(1)));
    }

    #[test]
    fn params() {
        let p = ModelParams::new(2, 2.0, 0.5).unwrap();
        assert_eq!(p.q(), 2.0);
        assert_eq!(p.w(), 1.0);
        assert_eq!(ModelParams::from_q_w(2, 2.0, 1.0).unwrap(), p);
        assert!(ModelParams::new(0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn small_generator_structure() {
        let h = build_h_exact(1).unwrap();
        assert_eq!(h.dim(), 9);
        assert_eq!(h.nnz(), 12);
        assert_eq!(h.entries().filter(|(r, c, _)| r != c).count(), 6);
        // column (A,V), row (V,A): -q
        let col = cfg("A0").basis_index();
        let row = cfg("0A").basis_index();
        assert_eq!(h.get(row, col), -QPoly::q());
        let hf = build_h_float(&ModelParams::new(1, 2.0, 0.5).unwrap()).unwrap();
        assert_eq!(hf.get(row, col), -2.0);
    }

    #[test]
    fn column_sums_vanish() {
        for l in 1..=3 {
            let h = build_h_exact(l).unwrap();
            for c in 0..h.dim() {
                let s = h.column(c).fold(QPoly::zero(), |a, (_, v)| &a + v);
                assert!(s.is_zero(), "L={l} column {c}");
            }
        }
    }

    #[test]
    fn sign_structure() {
        let h = build_h_float(&ModelParams::new(2, 2.0, 0.5).unwrap()).unwrap();
        for (r, c, v) in h.entries() {
            if r == c {
                assert!(*v >= 0.0);
            } else {
                assert!(*v <= 0.0);
            }
        }
    }

    #[test]
    fn symmetric_when_rates_equal() {
        let one = Rates {
            right: QPoly::one(),
            left: QPoly::one(),
        };
        let h = build_h(2, &one);
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn sectors_reassemble_full_generator() {
        let rates = Rates::exact();
        let h = build_h(2, &rates);
        let s = Sector::new(2, 1, 1).unwrap();
        assert_eq!(build_h_sector(s, &rates).dim(), 12);
        let empty = build_h_sector(Sector::new(2, 0, 0).unwrap(), &rates);
        assert_eq!(empty.dim(), 1);
        assert!(empty.is_zero());
        let mut total = 0;
        for s in Sector::all(2) {
            let idx: Vec<usize> = s.enumerate().iter().map(Config::basis_index).collect();
            let block = build_h_sector(s, &rates);
            assert_eq!(block, h.restrict(&idx, Basis::Sector(s)));
            total += block.nnz();
        }
        // no entry connects different sectors
        assert_eq!(total, h.nnz());
    }

    #[test]
    fn generator_action_matches_matrix() {
        let p = ModelParams::new(2, 2.0, 0.5).unwrap();
        let rates = p.float_rates();
        let h = build_h_float(&p).unwrap();
        let f = |c: &Config| (c.basis_index() as f64).sin() + c.n() as f64;
        let fv: Vec<f64> = all_configs(2).map(|c| f(&c)).collect();
        let ht = h.transpose();
        let minus_hf = ht.apply(&fv);
        for c in all_configs(2) {
            let lhs = apply_generator(f, &c, &rates);
            assert!((lhs + minus_hf[c.basis_index()]).abs() < 1e-12);
            assert_eq!(apply_generator(|_| 1.0, &c, &rates), 0.0);
            assert_eq!(apply_generator(|x| x.n() as f64, &c, &rates), 0.0);
            // delta function at c' reads off -H_{c' c}
            for (r, v) in h.column(c.basis_index()) {
                let delta = apply_generator(|x| f64::from(x.basis_index() == r), &c, &rates);
                assert_eq!(delta, -v);
            }
        }
    }
}
