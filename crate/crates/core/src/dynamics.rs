//! Time evolution: transition kernels by uniformization, Gillespie
//! trajectories and Monte-Carlo estimates of `<Q_z(t)>` checked against the
//! duality prediction.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::duality::qz_exponent;
use crate::error::{Error, Result};
use crate::generator::{build_h_sector, local_rate, ModelParams, Rates};
use crate::lattice::{bonds, Config, Positions, Sector};
use crate::measures::Measure;
use crate::sparse::{Basis, SparseOp};

/// Poisson tail mass below which the uniformization series is cut.
pub const TAIL_TOLERANCE: f64 = 1e-14;
/// Largest `lambda t` handled by a single series; longer times are halved
/// and the kernel squared back up.
const MAX_SERIES_LAMBDA_T: f64 = 64.0;

/// `P(eta', t | eta, 0) = <eta'| exp(-H t) |eta>`; column `eta` is the
/// distribution at time `t` started from `eta`.
#[derive(Clone, Debug)]
pub struct TransitionKernel {
    pub basis: Basis,
    pub t: f64,
    pub matrix: DMatrix<f64>,
}

impl TransitionKernel {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn prob(&self, to: usize, from: usize) -> f64 {
        self.matrix[(to, from)]
    }

    /// Largest deviation of a column sum from one.
    pub fn stochasticity_defect(&self) -> f64 {
        self.matrix
            .column_iter()
            .map(|c| (c.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Kernel for `t1 + t2` from kernels at `t1` and `t2`.
    pub fn compose(&self, other: &TransitionKernel) -> TransitionKernel {
        TransitionKernel {
            basis: self.basis,
            t: self.t + other.t,
            matrix: &self.matrix * &other.matrix,
        }
    }
}

fn uniformized_series(p: &DMatrix<f64>, lt: f64) -> Result<DMatrix<f64>> {
    let n = p.nrows();
    let budget = (10.0 * lt).ceil() as usize + 50;
    let mut weight = (-lt).exp();
    let mut mass = weight;
    let mut power = DMatrix::identity(n, n);
    let mut acc = &power * weight;
    let mut k = 0;
    while 1.0 - mass >= TAIL_TOLERANCE {
        k += 1;
        if k > budget {
            return Err(Error::NonConvergence { terms: budget });
        }
        power = &power * p;
        weight *= lt / k as f64;
        mass += weight;
        acc += &power * weight;
    }
    Ok(acc)
}

/// `exp(-H t)` by uniformization: with `lambda` the largest exit rate and
/// `P = I - H/lambda`, `exp(-H t) = sum_k Poisson(k; lambda t) P^k`.
pub fn evolve(h: &SparseOp<f64>, t: f64) -> Result<TransitionKernel> {
    if t.is_nan() || t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    let n = h.dim();
    let lambda = (0..n).map(|i| h.get(i, i)).fold(0.0, f64::max);
    if t == 0.0 || lambda == 0.0 {
        return Ok(TransitionKernel {
            basis: h.basis(),
            t,
            matrix: DMatrix::identity(n, n),
        });
    }
    let p = DMatrix::identity(n, n) - h.to_dense() / lambda;
    let mut squarings = 0;
    let mut lt = lambda * t;
    while lt > MAX_SERIES_LAMBDA_T {
        lt /= 2.0;
        squarings += 1;
    }
    let mut m = uniformized_series(&p, lt)?;
    for _ in 0..squarings {
        m = &m * &m;
    }
    Ok(TransitionKernel {
        basis: h.basis(),
        t,
        matrix: m,
    })
}

/// Sector kernel for the float generator of `p`.
pub fn evolve_sector(s: Sector, p: &ModelParams, t: f64) -> Result<TransitionKernel> {
    evolve(&build_h_sector(s, &p.float_rates()), t)
}

/// One trajectory: configuration, clock and its own random stream.
#[derive(Clone, Debug)]
pub struct SimState {
    pub config: Config,
    pub time: f64,
    pub rng: ChaCha8Rng,
}

/// Random stream of trajectory `index` under `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

impl SimState {
    pub fn new(config: Config, master_seed: u64, index: u64) -> Self {
        Self {
            config,
            time: 0.0,
            rng: stream(master_seed, index),
        }
    }

    /// Total exit rate and per-bond rates of the current configuration.
    fn bond_rates(&self, rates: &Rates<f64>) -> (f64, Vec<f64>) {
        let rs: Vec<f64> = bonds(self.config.l())
            .map(|k| local_rate(&self.config, k, rates).expect("bond in range"))
            .collect();
        (rs.iter().sum(), rs)
    }

    /// Advances by one jump unless that would pass `horizon`; the clock then
    /// stops at `horizon`. Returns whether a jump happened.
    pub fn step(&mut self, rates: &Rates<f64>, horizon: f64) -> bool {
        let (total, rs) = self.bond_rates(rates);
        if total == 0.0 {
            self.time = horizon.max(self.time);
            return false;
        }
        let u: f64 = self.rng.gen();
        let dt = -(1.0 - u).ln() / total;
        if self.time + dt > horizon {
            self.time = horizon.max(self.time);
            return false;
        }
        self.time += dt;
        let mut target = self.rng.gen::<f64>() * total;
        let first = *bonds(self.config.l()).start();
        let mut chosen = rs.len() - 1;
        for (i, r) in rs.iter().enumerate() {
            if *r > 0.0 {
                if target < *r {
                    chosen = i;
                    break;
                }
                target -= r;
            }
        }
        // guard against rounding landing past the last enabled bond
        while rs[chosen] == 0.0 {
            chosen -= 1;
        }
        self.config = self.config.swap(first + chosen as i64).expect("bond in range");
        true
    }

    /// Runs until `horizon`.
    pub fn run_until(&mut self, rates: &Rates<f64>, horizon: f64) {
        while self.time < horizon && self.step(rates, horizon) {}
    }

    /// Runs until `horizon`, returning a `time,config` CSV log of every jump.
    pub fn run_logged(&mut self, rates: &Rates<f64>, horizon: f64) -> String {
        let mut out = String::from("time,config\n");
        writeln!(out, "{},{}", self.time, self.config).unwrap();
        while self.time < horizon && self.step(rates, horizon) {
            writeln!(out, "{},{}", self.time, self.config).unwrap();
        }
        out
    }
}

/// A single Gillespie update of the model `p`, up to an infinite horizon.
pub fn gillespie_step(mut s: SimState, p: &ModelParams) -> SimState {
    s.step(&p.float_rates(), f64::INFINITY);
    s
}

/// Draws a configuration from a measure by a linear scan of the CDF.
pub fn sample<R: Rng>(m: &Measure<f64>, rng: &mut R) -> Config {
    let total: f64 = m.weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let last = m
        .weights
        .iter()
        .rposition(|w| *w > 0.0)
        .expect("measure has positive mass");
    for (i, w) in m.weights.iter().enumerate() {
        if u < *w {
            return m.configs[i].clone();
        }
        u -= w;
    }
    m.configs[last].clone()
}

/// `Q_z(eta)` at a numeric `q`.
pub fn qz_value(z: &Positions, c: &Config, q: f64) -> f64 {
    qz_exponent(z, c).map_or(0.0, |e| q.powi(e as i32))
}

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    /// Welford accumulation; identical samples give their value as the mean exactly.
    pub fn from_samples(xs: &[f64]) -> Self {
        let (mut mean, mut m2) = (0.0, 0.0);
        for (i, &x) in xs.iter().enumerate() {
            let d = x - mean;
            mean += d / (i + 1) as f64;
            m2 += d * (x - mean);
        }
        let n = xs.len();
        let stderr = if n > 1 {
            (m2 / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, n }
    }

    /// `(mean - prediction) / stderr`; zero when both agree to rounding and
    /// the estimate has no spread.
    pub fn z_score(&self, prediction: f64) -> f64 {
        let d = self.mean - prediction;
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d.abs() <= 1e-12 * prediction.abs().max(1.0) {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }
}

/// Final configurations of `trajectories` runs from `p0` up to time `t`.
/// Trajectory `i` uses stream `i` of `seed` for both the initial draw and
/// the dynamics.
pub fn simulate_endpoints(
    p0: &Measure<f64>,
    p: &ModelParams,
    t: f64,
    trajectories: usize,
    seed: u64,
) -> Vec<Config> {
    let rates = p.float_rates();
    (0..trajectories as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let c = sample(p0, &mut rng);
            let mut s = SimState {
                config: c,
                time: 0.0,
                rng,
            };
            s.run_until(&rates, t);
            s.config
        })
        .collect()
}

/// Monte-Carlo estimates of `<Q_z(t)>` for several `z`, all from the same trajectories.
pub fn estimate_q_many(
    zs: &[Positions],
    p0: &Measure<f64>,
    p: &ModelParams,
    t: f64,
    trajectories: usize,
    seed: u64,
) -> Vec<Estimate> {
    let ends = simulate_endpoints(p0, p, t, trajectories, seed);
    let q = p.q();
    zs.iter()
        .map(|z| {
            let xs: Vec<f64> = ends.iter().map(|c| qz_value(z, c, q)).collect();
            Estimate::from_samples(&xs)
        })
        .collect()
}

pub fn estimate_q(
    z: &Positions,
    p0: &Measure<f64>,
    p: &ModelParams,
    t: f64,
    trajectories: usize,
    seed: u64,
) -> Estimate {
    estimate_q_many(std::slice::from_ref(z), p0, p, t, trajectories, seed)[0]
}

/// Exact `<Q_z>` under `p0`.
pub fn expect_q(z: &Positions, p0: &Measure<f64>, q: f64) -> f64 {
    p0.expectation(|c| qz_value(z, c, q))
}

/// Duality prediction `<Q_z(t)>_{P0} = sum_{z'} <z| exp(-H t) |z'> <Q_{z'}>_{P0}`
/// with the kernel of the sector `(N(z), M(z))`.
pub fn duality_rhs(z: &Positions, p0: &Measure<f64>, p: &ModelParams, t: f64) -> Result<f64> {
    let s = Sector::new(p.l, z.n(), z.m())?;
    let kernel = evolve_sector(s, p, t)?;
    let dual = s.enumerate();
    let zc = z.to_config()?;
    let row = dual
        .iter()
        .position(|c| *c == zc)
        .expect("z lies in its own sector");
    let q = p.q();
    Ok(dual
        .iter()
        .enumerate()
        .map(|(j, c)| kernel.prob(row, j) * expect_q(&c.to_positions(), p0, q))
        .sum())
}

/// One row of the simulation output.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateRecord {
    pub z: String,
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub prediction: f64,
    pub z_score: f64,
}

impl EstimateRecord {
    pub fn new(z: &Positions, t: f64, e: &Estimate, prediction: f64) -> Result<Self> {
        Ok(Self {
            z: z.to_config()?.to_string(),
            t,
            mean: e.mean,
            stderr: e.stderr,
            n: e.n,
            prediction,
            z_score: e.z_score(prediction),
        })
    }
}

/// Estimates and predictions on a grid of dual coordinates and times.
pub fn duality_closure(
    zs: &[Positions],
    times: &[f64],
    p0: &Measure<f64>,
    p: &ModelParams,
    trajectories: usize,
    seed: u64,
) -> Result<Vec<EstimateRecord>> {
    let mut out = Vec::new();
    for &t in times {
        let ests = estimate_q_many(zs, p0, p, t, trajectories, seed);
        for (z, e) in zs.iter().zip(&ests) {
            out.push(EstimateRecord::new(z, t, e, duality_rhs(z, p0, p, t)?)?);
        }
    }
    Ok(out)
}

/// Point mass at `c`.
pub fn point_mass(c: &Config) -> Measure<f64> {
    Measure {
        support: crate::measures::Support::Sector(c.sector()),
        configs: vec![c.clone()],
        weights: vec![1.0],
        partition: 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::{duality_matrix, DualitySource};
    use crate::generator::build_h_float;
    use crate::measures::{canonical_float, partition_function, pi_exponent_positions};
    use approx::assert_relative_eq;

    fn params(l: usize) -> ModelParams {
        ModelParams::from_q_w(l, 2.0, 1.0).unwrap()
    }

    #[test]
    fn kernel_basics() {
        let s = Sector::new(2, 1, 1).unwrap();
        let p = params(2);
        let k0 = evolve_sector(s, &p, 0.0).unwrap();
        assert_eq!(k0.matrix, DMatrix::identity(12, 12));
        let k1 = evolve_sector(s, &p, 1.0).unwrap();
        assert!(k1.stochasticity_defect() < 1e-12);
        assert!(k1.matrix.iter().all(|&x| (-1e-15..=1.0 + 1e-12).contains(&x)));
        let k05 = evolve_sector(s, &p, 0.5).unwrap();
        let k15 = evolve_sector(s, &p, 1.5).unwrap();
        assert!((k05.compose(&k1).matrix - &k15.matrix).amax() < 1e-10);
        let full = evolve(&build_h_float(&p).unwrap(), 1.0).unwrap();
        assert!(full.stochasticity_defect() < 1e-12);
        assert!(evolve_sector(s, &p, -1.0).is_err());
    }

    #[test]
    fn long_time_limit_is_canonical() {
        for (l, n, m) in [(1, 1, 0), (2, 1, 1)] {
            let s = Sector::new(l, n, m).unwrap();
            let p = params(l);
            let k = evolve_sector(s, &p, 1e3).unwrap();
            let pi = canonical_float(s, 2.0);
            for col in 0..k.dim() {
                for (row, w) in pi.weights.iter().enumerate() {
                    assert!((k.prob(row, col) - w).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn single_move_and_frozen_state() {
        let p = ModelParams::from_q_w(1, 2.0, 1.0).unwrap();
        let s = SimState::new("A0".parse().unwrap(), 7, 0);
        let s = gillespie_step(s, &p);
        assert_eq!(s.config.to_string(), "0A");
        assert!(s.time > 0.0);
        let mut s = SimState::new(Config::vacant(1), 7, 0);
        assert!(!s.step(&p.float_rates(), 3.0));
        assert_eq!(s.time, 3.0);
        let full: Config = "AABB".parse().unwrap();
        let mut s = SimState::new(full.clone(), 1, 1);
        s.run_until(&p.float_rates(), 2.0);
        assert_ne!(s.config, full);
    }

    #[test]
    fn trajectories_are_reproducible() {
        let p = params(2);
        let c: Config = "AB0A".parse().unwrap();
        let run = |idx| {
            let mut s = SimState::new(c.clone(), 99, idx);
            s.run_logged(&p.float_rates(), 5.0)
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }

    #[test]
    fn gillespie_matches_kernel() {
        let s = Sector::new(2, 1, 1).unwrap();
        let p = params(2);
        let start: Config = "AB00".parse().unwrap();
        let n = 100_000;
        let ends = simulate_endpoints(&point_mass(&start), &p, 1.0, n, 11);
        let k = evolve_sector(s, &p, 1.0).unwrap();
        let cfgs = s.enumerate();
        let col = cfgs.iter().position(|c| *c == start).unwrap();
        for (row, c) in cfgs.iter().enumerate() {
            let pr = k.prob(row, col);
            let freq = ends.iter().filter(|e| *e == c).count() as f64 / n as f64;
            let sigma = (pr * (1.0 - pr) / n as f64).sqrt();
            assert!((freq - pr).abs() <= 3.0 * sigma + 1e-12, "{c}: {freq} vs {pr}");
        }
    }

    #[test]
    fn estimator_trivial_cases() {
        let p = params(2);
        let c: Config = "AA0B".parse().unwrap();
        let p0 = point_mass(&c);
        let e = estimate_q(&Positions::empty(2), &p0, &p, 1.0, 1000, 5);
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        let z = Positions::new(2, vec![0], vec![2]).unwrap();
        let e = estimate_q(&z, &p0, &p, 0.0, 100, 5);
        assert_eq!(e.mean, qz_value(&z, &c, 2.0));
        assert_eq!(e.z_score(duality_rhs(&z, &p0, &p, 0.0).unwrap()), 0.0);
    }

    #[test]
    fn duality_rhs_properties() {
        let p = params(2);
        let s = Sector::new(2, 2, 1).unwrap();
        let p0 = canonical_float(s, 2.0);
        let z = Positions::new(2, vec![1], vec![-1]).unwrap();
        let at0 = duality_rhs(&z, &p0, &p, 0.0).unwrap();
        assert_relative_eq!(at0, expect_q(&z, &p0, 2.0), epsilon = 1e-14);
        for t in [0.5, 1.0, 2.0] {
            assert!((duality_rhs(&z, &p0, &p, t).unwrap() - at0).abs() < 1e-10);
        }
        // canonical start: <Q_z> = lambda pi*_{N',M'}(z)
        let rule = crate::duality::sum_rule(s, Sector::new(2, 1, 1).unwrap()).unwrap();
        let zs = Sector::new(2, 1, 1).unwrap();
        let pi_star = 2f64.powi(pi_exponent_positions(&z) as i32) / partition_function(zs).eval(2.0);
        assert_relative_eq!(at0, rule.lambda.eval(2.0) * pi_star, epsilon = 1e-12);
        // long times from a point mass approach the same value
        let c: Config = "AB0A".parse().unwrap();
        let late = duality_rhs(&z, &point_mass(&c), &p, 200.0).unwrap();
        assert_relative_eq!(late, at0, epsilon = 1e-9);
    }

    #[test]
    fn dynamic_duality_identity() {
        // D exp(-H t) = exp(-H^T t) D with the float generator
        for q in [1.0, 2.0] {
            let p = ModelParams::from_q_w(1, q, 1.0).unwrap();
            let h = build_h_float(&p).unwrap();
            let k = evolve(&h, 0.7).unwrap().matrix;
            let d = duality_matrix(DualitySource::ClosedForm, 1)
                .unwrap()
                .map(|v| v.eval(q))
                .to_dense();
            let lhs = &d * &k;
            let rhs = k.transpose() * &d;
            assert!((lhs - rhs).amax() < 1e-10);
        }
    }
}
