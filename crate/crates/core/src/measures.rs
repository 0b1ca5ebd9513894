//! Reversible, canonical and grandcanonical measures, the pure product
//! measures and their shock profiles.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::generator::{build_h_sector, ModelParams};
use crate::lattice::{all_configs, sites, Config, Occ, Positions, Sector, Site, Species};
use crate::qring::{q_multinomial, rogers_szego_y};
use crate::report::Report;
use crate::scalar::{Real, Scalar};
use crate::sparse::{Basis, SparseOp};
use crate::{ExactOp, QPoly};

/// Exponent of `pi(eta)` in the occupation form:
/// `sum_k (2k-1)(a_k - b_k) + sum_{k<L} sum_{l<=k} (a_l b_{k+1} - b_l a_{k+1})`.
pub fn pi_exponent(c: &Config) -> i64 {
    let mut e = 0;
    for k in c.sites() {
        e += (2 * k - 1) * (c.a(k) - c.b(k));
    }
    // running prefix counts of A and B over l <= k
    let (mut na, mut nb) = (0, 0);
    let last = *c.sites().end();
    for k in c.sites() {
        na += c.a(k);
        nb += c.b(k);
        if k < last {
            e += na * c.b(k + 1) - nb * c.a(k + 1);
        }
    }
    e
}

/// Exponent of `pi` in the position form
/// `sum_i [2x_i - 1 - M_{x_i}] - sum_i [2y_i - 1 - N_{y_i}]`.
pub fn pi_exponent_positions(z: &Positions) -> i64 {
    let m_left = |k: Site| z.y.iter().filter(|&&y| y < k).count() as i64;
    let n_left = |k: Site| z.x.iter().filter(|&&x| x < k).count() as i64;
    let ea: i64 = z.x.iter().map(|&x| 2 * x - 1 - m_left(x)).sum();
    let eb: i64 = z.y.iter().map(|&y| 2 * y - 1 - n_left(y)).sum();
    ea - eb
}

/// Unnormalized reversible weight `pi(eta)`, a monomial in `q`.
pub fn pi_unnormalized(c: &Config) -> QPoly {
    QPoly::q_pow(pi_exponent(c))
}

pub fn pi_from_positions(z: &Positions) -> QPoly {
    QPoly::q_pow(pi_exponent_positions(z))
}

/// `pi(eta)` at a numeric `q`.
pub fn pi_value<F: Real>(c: &Config, q: F) -> F {
    q.powi(pi_exponent(c) as i32)
}

/// `Z_{2L}(N, M) = C_{2L}(N, M)`.
pub fn partition_function(s: Sector) -> QPoly {
    q_multinomial(2 * s.l as u32, s.n as u32, s.m as u32).expect("sector is valid")
}

/// What a measure is supported on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Full {
        l: usize,
    },
    Sector(Sector),
    /// Configurations free of the other species.
    Pure {
        l: usize,
        species: Species,
    },
}

/// Weights on an explicit list of configurations together with the
/// normalizer; probabilities are `weights / partition`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure<S> {
    pub support: Support,
    pub configs: Vec<Config>,
    pub weights: Vec<S>,
    pub partition: S,
}

impl<S: Scalar> Measure<S> {
    pub fn l(&self) -> usize {
        match self.support {
            Support::Full { l } | Support::Pure { l, .. } => l,
            Support::Sector(s) => s.l,
        }
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Config, &S)> {
        self.configs.iter().zip(&self.weights)
    }

    /// Weight of `c`, zero off the support.
    pub fn weight(&self, c: &Config) -> S {
        self.configs
            .binary_search_by_key(&c.basis_index(), Config::basis_index)
            .map(|i| self.weights[i].clone())
            .unwrap_or_else(|_| S::zero())
    }

    /// Weights as a vector over the ternary basis of all `3^{2L}` configurations.
    pub fn full_vector(&self) -> Vec<S> {
        let mut v = vec![S::zero(); crate::lattice::full_dim(self.l())];
        for (c, w) in self.iter() {
            v[c.basis_index()] = w.clone();
        }
        v
    }

    /// Sum of `weight * f` over the support (unnormalized expectation).
    pub fn weighted_sum<F: Fn(&Config) -> S>(&self, f: F) -> S {
        self.iter().fold(S::zero(), |acc, (c, w)| acc + w.clone() * f(c))
    }
}

impl<F: Real> Measure<F> {
    pub fn is_normalized(&self) -> bool {
        self.partition == F::one()
    }

    pub fn probability(&self, c: &Config) -> F {
        self.weight(c) / self.partition
    }

    pub fn expectation<G: Fn(&Config) -> F>(&self, f: G) -> F {
        self.weighted_sum(f) / self.partition
    }

    /// `<a_k>` or `<b_k>`.
    pub fn marginal(&self, k: Site, species: Species) -> F {
        let o = species.occ();
        self.expectation(|c| if c.get(k) == o { F::one() } else { F::zero() })
    }

    /// Divides the weights by their sum.
    pub fn normalized(mut self) -> Self {
        let total = self.weights.iter().fold(F::zero(), |a, &w| a + w);
        for w in &mut self.weights {
            *w = *w / total;
        }
        self.partition = F::one();
        self
    }
}

impl Measure<QPoly> {
    /// Normalized probabilities at a numeric `q`.
    pub fn evaluate(&self, q: f64) -> Measure<f64> {
        let z = self.partition.eval(q);
        Measure {
            support: self.support,
            configs: self.configs.clone(),
            weights: self.weights.iter().map(|w| w.eval(q) / z).collect(),
            partition: 1.0,
        }
    }
}

/// Canonical measure `pi*_{N,M}` kept unnormalized in the ring; the stored
/// partition function is the brute-force weight sum.
pub fn canonical(s: Sector) -> Measure<QPoly> {
    let configs = s.enumerate();
    let weights: Vec<QPoly> = configs.iter().map(pi_unnormalized).collect();
    let partition = weights.iter().fold(QPoly::zero(), |acc, w| &acc + w);
    Measure {
        support: Support::Sector(s),
        configs,
        weights,
        partition,
    }
}

/// Normalized canonical measure at a numeric `q`.
pub fn canonical_float<F: Real>(s: Sector, q: F) -> Measure<F> {
    let configs = s.enumerate();
    let weights = configs.iter().map(|c| pi_value(c, q)).collect();
    Measure {
        support: Support::Sector(s),
        configs,
        weights,
        partition: F::one(),
    }
    .normalized()
}

fn fugacity<F: Real>(chem: F, count: usize) -> F {
    if count == 0 {
        F::one()
    } else {
        (chem * F::from_usize(count).unwrap()).exp()
    }
}

/// `Q*_{nu,mu}(eta) = e^{nu N + mu M} pi(eta) / Y_{2L}(nu, mu)`.
///
/// `nu` or `mu` may be `-inf`, which removes the corresponding species.
pub fn grandcanonical<F: Real>(nu: F, mu: F, l: usize, q: F) -> Measure<F> {
    let configs: Vec<Config> = all_configs(l)
        .filter(|c| (nu != F::neg_infinity() || c.n() == 0) && (mu != F::neg_infinity() || c.m() == 0))
        .collect();
    let weights = configs
        .iter()
        .map(|c| fugacity(nu, c.n()) * fugacity(mu, c.m()) * pi_value(c, q))
        .collect();
    let y = rogers_szego_y::<BigRational, F>(2 * l as u32, nu, mu, q);
    let support = if nu == F::neg_infinity() {
        Support::Pure {
            l,
            species: Species::B,
        }
    } else if mu == F::neg_infinity() {
        Support::Pure {
            l,
            species: Species::A,
        }
    } else {
        Support::Full { l }
    };
    let mut m = Measure {
        support,
        configs,
        weights,
        partition: F::one(),
    };
    for w in &mut m.weights {
        *w = *w / y;
    }
    m
}

/// The same measure assembled as the convex combination
/// `sum_{N,M} e^{nu N + mu M} Z_{2L}(N,M) / Y_{2L} * pi*_{N,M}`.
pub fn grandcanonical_mixture<F: Real>(nu: F, mu: F, l: usize, q: F) -> Measure<F> {
    let y = rogers_szego_y::<BigRational, F>(2 * l as u32, nu, mu, q);
    let mut weights = vec![F::zero(); crate::lattice::full_dim(l)];
    for s in Sector::all(l) {
        let z = F::from_f64(partition_function(s).eval(q.to_f64().unwrap())).unwrap();
        let coef = fugacity(nu, s.n) * fugacity(mu, s.m) * z / y;
        if coef == F::zero() {
            continue;
        }
        for (c, w) in canonical_float(s, q).iter() {
            weights[c.basis_index()] = coef * *w;
        }
    }
    let configs = all_configs(l).collect();
    Measure {
        support: Support::Full { l },
        configs,
        weights,
        partition: F::one(),
    }
}

/// Pure grandcanonical measure of one species (the other fugacity sent to zero).
pub fn pure_measure<F: Real>(species: Species, chem_pot: F, l: usize, q: F) -> Measure<F> {
    match species {
        Species::A => grandcanonical(chem_pot, F::neg_infinity(), l, q),
        Species::B => grandcanonical(F::neg_infinity(), chem_pot, l, q),
    }
}

/// Closed-form one-site marginal of the pure measure:
/// `e^nu q^{2k-1} / (1 + e^nu q^{2k-1})` for A, `e^mu q^{1-2k} / (1 + ...)` for B.
pub fn pure_marginal<F: Real>(species: Species, chem_pot: F, k: Site, q: F) -> F {
    let s = match species {
        Species::A => 2 * k - 1,
        Species::B => 1 - 2 * k,
    };
    let x = chem_pot.exp() * q.powi(s as i32);
    x / (F::one() + x)
}

/// Density profile `1/2 [1 +- tanh((k - kappa)/xi)]` of a pure measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShockProfile {
    pub kappa: f64,
    /// `1 / ln q`; negative for `q < 1`, where the shock faces the other way.
    pub xi: f64,
    pub species: Species,
}

impl ShockProfile {
    pub fn new(species: Species, chem_pot: f64, q: f64) -> Result<Self> {
        if q.is_nan() || q <= 0.0 || q == 1.0 {
            return Err(Error::DegenerateWidth);
        }
        let lq = q.ln();
        let kappa = match species {
            Species::A => (1.0 - chem_pot / lq) / 2.0,
            Species::B => (1.0 + chem_pot / lq) / 2.0,
        };
        Ok(Self {
            kappa,
            xi: 1.0 / lq,
            species,
        })
    }

    pub fn width(&self) -> f64 {
        self.xi.abs()
    }

    pub fn density(&self, k: f64) -> f64 {
        let t = ((k - self.kappa) / self.xi).tanh();
        match self.species {
            Species::A => 0.5 * (1.0 + t),
            Species::B => 0.5 * (1.0 - t),
        }
    }
}

pub fn shock_profile(species: Species, chem_pot: f64, p: &ModelParams) -> Result<ShockProfile> {
    ShockProfile::new(species, chem_pot, p.q())
}

/// Diagonal matrix `pi-hat` over the full basis.
pub fn pi_matrix(l: usize) -> ExactOp {
    SparseOp::diagonal(
        all_configs(l).map(|c| pi_unnormalized(&c)).collect(),
        Basis::Full { l },
    )
}

/// Detailed balance in matrix form, `H pi-hat = pi-hat H^T`.
pub fn check_reversibility(h: &ExactOp) -> Report {
    let l = h.basis().l();
    let pi = match h.basis() {
        Basis::Full { .. } => pi_matrix(l),
        b @ Basis::Sector(s) => SparseOp::diagonal(s.enumerate().iter().map(pi_unnormalized).collect(), b),
    };
    let mut r = Report::new();
    r.record(
        format!("reversibility[L={l}]"),
        h.mul(&pi).first_difference(&pi.mul(&h.transpose())),
    );
    r
}

/// Right null space of a dense matrix by Gaussian elimination with partial
/// pivoting. Columns without a pivot above `tol` are free.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let scale = a.amax().max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) =
            (r..rows)
                .map(|i| (i, a[(i, c)].abs()))
                .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol * scale {
            continue;
        }
        a.swap_rows(r, best);
        let p = a[(r, c)];
        for j in c..cols {
            a[(r, j)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in c..cols {
                        a[(i, j)] -= f * a[(r, j)];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = DVector::zeros(cols);
            v[f] = 1.0;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[(i, f)];
            }
            v
        })
        .collect()
}

/// The kernel of the sector generator is one-dimensional and spanned by the
/// canonical weights.
pub fn check_uniqueness(p: &ModelParams, tol: f64) -> Report {
    let mut report = Report::new();
    for s in Sector::all(p.l) {
        let name = format!("uniqueness[L={},N={},M={}]", p.l, s.n, s.m);
        let h = build_h_sector(s, &p.float_rates()).to_dense();
        let kernel = null_space(&h, 1e-12);
        if kernel.len() != 1 {
            report.fail(name, 0, 0, format!("kernel dimension {}", kernel.len()));
            continue;
        }
        let v = &kernel[0];
        let v = v / v.sum();
        let pi = canonical_float(s, p.q());
        let (i, res) = v
            .iter()
            .zip(&pi.weights)
            .map(|(a, b)| (a - b).abs())
            .enumerate()
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if res < tol {
            report.pass(name);
        } else {
            report.fail(name, i + 1, 1, format!("{res:e}"));
        }
    }
    report
}

/// `sum_{eta in sector} pi(eta) = C_{2L}(N, M)` for every sector with `L <= lmax`.
pub fn check_partition_functions(lmax: usize) -> Report {
    let mut report = Report::new();
    for l in 1..=lmax {
        for s in Sector::all(l) {
            let brute = canonical(s).partition;
            let name = format!("partition[2L={},N={},M={}]", 2 * l, s.n, s.m);
            let diff = &brute - &partition_function(s);
            report.record(name, (!diff.is_zero()).then_some((0, 0, diff)));
        }
    }
    report
}

/// `Z_{2L}(N, M) = Z_{2L}(N, 0) Z_{2L-N}(0, M)` for `L <= lmax`.
pub fn check_partition_factorization(lmax: usize) -> Report {
    let mut report = Report::new();
    for l in 1..=lmax {
        for s in Sector::all(l) {
            let lhs = canonical(s).partition;
            let z_a = canonical(Sector { l, n: s.n, m: 0 }).partition;
            let z_b = q_multinomial::<BigRational>((2 * l - s.n) as u32, 0, s.m as u32).unwrap();
            let diff = &lhs - &(&z_a * &z_b);
            report.record(
                format!("factorization[2L={},N={},M={}]", 2 * l, s.n, s.m),
                (!diff.is_zero()).then_some((0, 0, diff)),
            );
        }
    }
    report
}

/// Canonical A-correlations `<a_{k_1} ... a_{k_n}>_{N,M}` (n <= 2) do not
/// depend on `M`. Compared exactly by cross-multiplying the ratios.
pub fn check_a_marginal_independence(l: usize) -> Report {
    let mut report = Report::new();
    let site_sets: Vec<Vec<Site>> = sites(l)
        .map(|k| vec![k])
        .chain(sites(l).flat_map(|j| sites(l).filter(move |&k| k > j).map(move |k| vec![j, k])))
        .collect();
    for s in Sector::all(l) {
        if s.m == 0 {
            continue;
        }
        let mu = canonical(s);
        let mu0 = canonical(Sector { l, n: s.n, m: 0 });
        let mut first = None;
        for set in &site_sets {
            let ind = |c: &Config| {
                if set.iter().all(|&k| c.get(k) == Occ::A) {
                    QPoly::one()
                } else {
                    QPoly::zero()
                }
            };
            let lhs = &mu.weighted_sum(ind) * &mu0.partition;
            let rhs = &mu0.weighted_sum(ind) * &mu.partition;
            let diff = &lhs - &rhs;
            if !diff.is_zero() && first.is_none() {
                first = Some((set[0] as usize, *set.last().unwrap() as usize, diff));
            }
        }
        report.record(format!("a-marginals[L={l},N={},M={}]", s.n, s.m), first);
    }
    report
}

/// `config,weight` CSV (probabilities; exact weights are printed as polynomials).
pub fn measure_csv<S: Scalar + std::fmt::Display>(m: &Measure<S>) -> String {
    let mut out = String::from("config,weight\n");
    for (c, w) in m.iter() {
        writeln!(out, "{c},{w}").unwrap();
    }
    out
}

/// `site,density` CSV.
pub fn profile_csv(rows: &[(Site, f64)]) -> String {
    let mut out = String::from("site,density\n");
    for (k, d) in rows {
        writeln!(out, "{k},{d}").unwrap();
    }
    out
}

/// Residual `max |H w|` of a weight vector under the full float generator.
pub fn stationarity_residual(h: &SparseOp<f64>, w: &[f64]) -> f64 {
    h.apply(w).iter().fold(0.0, |m, x| m.max(x.abs()))
}
