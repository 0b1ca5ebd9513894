//! Self-duality of the two-component ASEP: the functions `Q_z`, the
//! duality matrix in closed form and from the quantum-group symmetry, and
//! the sum rule linking canonical expectations of `Q_z` across sectors.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{all_configs, full_dim, Config, Occ, Positions, Sector, Site};
use crate::measures::{pi_exponent, pi_exponent_positions};
use crate::qring::{q_factorial, q_number};
use crate::qsym::{build_y, Sign, TensorOp};
use crate::report::Report;
use crate::sparse::{Basis, SparseOp};
use crate::{ExactOp, QPoly};

/// Exponent of `Q^A_x(eta)`, `None` when `x` carries no A particle.
pub fn qa_exponent(x: Site, c: &Config) -> Option<i64> {
    (c.get(x) == Occ::A).then(|| c.count_left_of(x, Occ::A) - c.count_right_of(x, Occ::A))
}

/// Exponent of `Q^B_y(eta)`, `None` when `y` carries no B particle.
pub fn qb_exponent(y: Site, c: &Config) -> Option<i64> {
    (c.get(y) == Occ::B).then(|| c.count_right_of(y, Occ::B) - c.count_left_of(y, Occ::B))
}

fn monomial_or_zero(e: Option<i64>) -> QPoly {
    e.map_or_else(QPoly::zero, QPoly::q_pow)
}

pub fn qa(x: Site, c: &Config) -> QPoly {
    monomial_or_zero(qa_exponent(x, c))
}

pub fn qb(y: Site, c: &Config) -> QPoly {
    monomial_or_zero(qb_exponent(y, c))
}

/// Exponent of `Q_z(eta) = prod_i Q^A_{x_i} prod_i Q^B_{y_i}`.
pub fn qz_exponent(z: &Positions, c: &Config) -> Option<i64> {
    let ea: Option<i64> = z.x.iter().map(|&x| qa_exponent(x, c)).sum();
    let eb: Option<i64> = z.y.iter().map(|&y| qb_exponent(y, c)).sum();
    Some(ea? + eb?)
}

pub fn qz(z: &Positions, c: &Config) -> QPoly {
    monomial_or_zero(qz_exponent(z, c))
}

/// `D(z, eta) = pi(z)^{-1} Q_z(eta)`.
pub fn duality_exponent(z: &Positions, c: &Config) -> Option<i64> {
    qz_exponent(z, c).map(|e| e - pi_exponent_positions(z))
}

pub fn duality_function(z: &Positions, c: &Config) -> QPoly {
    monomial_or_zero(duality_exponent(z, c))
}

/// `Q~^A_x = q^{2 sum_{k<x} a_k} a_x` and `Q~^B_y = q^{-2 sum_{k<y} b_k} b_y`, multiplied over `z`.
pub fn tilde_exponent(z: &Positions, c: &Config) -> Option<i64> {
    let ea: Option<i64> =
        z.x.iter()
            .map(|&x| (c.get(x) == Occ::A).then(|| 2 * c.count_left_of(x, Occ::A)))
            .sum();
    let eb: Option<i64> =
        z.y.iter()
            .map(|&y| (c.get(y) == Occ::B).then(|| -2 * c.count_left_of(y, Occ::B)))
            .sum();
    Some(ea? + eb?)
}

pub fn tilde_duality(z: &Positions, c: &Config) -> QPoly {
    monomial_or_zero(tilde_exponent(z, c))
}

fn q_fact(n: u32) -> QPoly {
    q_factorial::<BigRational>(n)
}

/// Divided-power sum `sum_n X^n / [n]_q!` with exact division of every entry.
fn divided_power_sum(x: &ExactOp, max: u32) -> Result<ExactOp> {
    let dim = x.dim();
    let mut power = ExactOp::identity(dim, x.basis());
    let mut acc = power.clone();
    for n in 1..=max {
        power = power.mul(x);
        if power.is_zero() {
            break;
        }
        let f = q_fact(n);
        let mut entries = Vec::with_capacity(power.nnz());
        for (r, c, v) in power.entries() {
            entries.push((r, c, v.exact_div(&f)?));
        }
        acc = acc.add(&SparseOp::from_entries(dim, x.basis(), entries));
    }
    Ok(acc)
}

/// `S = sum_{n,m} (Y_1^-)^n/[n]! (Y_2^+)^m/[m]!`, assembled as the product of
/// the two divided-power sums.
pub fn build_s(l: usize) -> Result<TensorOp> {
    let y1m = build_y(1, Sign::Minus, l)?;
    let y2p = build_y(2, Sign::Plus, l)?;
    let two_l = 2 * l as u32;
    let a = divided_power_sum(&y1m, two_l)?;
    let b = divided_power_sum(&y2p, two_l)?;
    Ok(TensorOp::new("S", a.mul(&b)))
}

/// Row `<z| S` using only the terms with `n + m <= 2L - N(z) - M(z)`.
pub fn s_row_truncated(z: &Config) -> Result<Vec<(usize, QPoly)>> {
    let l = z.l();
    let y1m = build_y(1, Sign::Minus, l)?;
    let y2p = build_y(2, Sign::Plus, l)?;
    let cutoff = 2 * l - z.n() - z.m();
    let mut row = std::collections::BTreeMap::new();
    row.insert(z.basis_index(), QPoly::one());
    let mut total = std::collections::BTreeMap::new();
    let mut left = row.clone();
    for n in 0..=cutoff {
        if n > 0 {
            // already divided by [n-1]!, so one more factor [n]
            left = y1m.row_action(&left);
            let f = q_number::<BigRational>(n as i64);
            for v in left.values_mut() {
                *v = v.exact_div(&f)?;
            }
        }
        let mut cur = left.clone();
        for m in 0..=cutoff - n {
            if m > 0 {
                cur = y2p.row_action(&cur);
                let f = q_number::<BigRational>(m as i64);
                for v in cur.values_mut() {
                    *v = v.exact_div(&f)?;
                }
            }
            for (k, v) in &cur {
                let e = total.entry(*k).or_insert_with(QPoly::zero);
                *e = &*e + v;
            }
        }
    }
    Ok(total
        .into_iter()
        .filter(|(_, v): &(usize, QPoly)| !v.is_zero())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualitySource {
    ClosedForm,
    FromSymmetry,
}

/// Rows are dual coordinates `z` (in the configuration index space), columns
/// configurations `eta`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityMatrix {
    pub source: DualitySource,
    pub op: ExactOp,
}

impl std::ops::Deref for DualityMatrix {
    type Target = ExactOp;
    fn deref(&self) -> &ExactOp {
        &self.op
    }
}

/// Diagonal `pi-hat^{-1}`.
fn pi_inverse(l: usize) -> ExactOp {
    SparseOp::diagonal(
        all_configs(l).map(|c| QPoly::q_pow(-pi_exponent(&c))).collect(),
        Basis::Full { l },
    )
}

pub fn duality_matrix(source: DualitySource, l: usize) -> Result<DualityMatrix> {
    let op = match source {
        DualitySource::ClosedForm => {
            let configs: Vec<Config> = all_configs(l).collect();
            let mut entries = Vec::new();
            for zc in &configs {
                let z = zc.to_positions();
                for c in &configs {
                    if let Some(e) = duality_exponent(&z, c) {
                        entries.push((zc.basis_index(), c.basis_index(), QPoly::q_pow(e)));
                    }
                }
            }
            SparseOp::from_entries(full_dim(l), Basis::Full { l }, entries)
        }
        DualitySource::FromSymmetry => pi_inverse(l).mul(&build_s(l)?.op),
    };
    Ok(DualityMatrix { source, op })
}

/// `D H = H^T D`.
pub fn check_intertwining(d: &ExactOp, h: &ExactOp) -> Report {
    let mut r = Report::new();
    r.record("DH=HtD", d.mul(h).first_difference(&h.transpose().mul(d)));
    r
}

/// Closed form equals `pi-hat^{-1} S` entrywise.
pub fn check_constructions_agree(l: usize) -> Result<Report> {
    let closed = duality_matrix(DualitySource::ClosedForm, l)?;
    let sym = duality_matrix(DualitySource::FromSymmetry, l)?;
    let mut r = Report::new();
    r.record(
        format!("closedform=pi^-1*S[L={l}]"),
        closed.first_difference(&sym),
    );
    Ok(r)
}

/// `<z| S = <s| Q_z` for every `z`, the vacuum row being the summation vector.
pub fn check_bra_identity(s: &ExactOp) -> Report {
    let l = s.basis().l();
    let mut first = None;
    for zc in all_configs(l) {
        let z = zc.to_positions();
        for c in all_configs(l) {
            let lhs = s.get(zc.basis_index(), c.basis_index());
            let rhs = qz(&z, &c);
            if lhs != rhs {
                first.get_or_insert((zc.basis_index(), c.basis_index(), &lhs - &rhs));
            }
        }
    }
    let mut r = Report::new();
    r.record(format!("<z|S=<s|Qz[L={l}]"), first);
    let vac = Config::vacant(l).basis_index();
    let ones = (0..s.dim()).all(|c| s.get(vac, c).is_one());
    r.check(format!("<0|S=<s|[L={l}]"), ones);
    r
}

/// `D_{z,eta} = 0` unless `N(z) <= N(eta)` and `M(z) <= M(eta)`.
pub fn check_sector_blocks(d: &ExactOp) -> Report {
    let l = d.basis().l();
    let bad = d.entries().find(|(r, c, _)| {
        let z = Config::from_basis_index(l, *r);
        let e = Config::from_basis_index(l, *c);
        z.n() > e.n() || z.m() > e.m()
    });
    let mut r = Report::new();
    r.record(
        format!("sector-blocks[L={l}]"),
        bad.map(|(a, b, v)| (a, b, v.clone())),
    );
    r
}

/// Truncating the sums in `S` at `n + m <= 2L - N - M` leaves every row unchanged.
pub fn check_cutoff(s: &ExactOp) -> Result<Report> {
    let l = s.basis().l();
    let mut first = None;
    for zc in all_configs(l) {
        let full: Vec<(usize, QPoly)> = s
            .transpose()
            .column(zc.basis_index())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        let trunc = s_row_truncated(&zc)?;
        if full != trunc {
            first.get_or_insert((zc.basis_index(), 0, "row differs".to_string()));
        }
    }
    let mut r = Report::new();
    r.record(format!("cutoff[L={l}]"), first);
    Ok(r)
}

/// Outcome of the sum rule for one pair of sectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SumRule {
    pub from: Sector,
    pub to: Sector,
    pub lambda: QPoly,
}

/// Sum rule between canonical expectations of `Q_z` in sector `from = (N, M)`
/// and dual coordinates `z` in sector `to = (N', M')`.
///
/// The right side `sum_{z' in to} Q_{z'}(eta)` must be the same for every
/// `eta` in `from`, and the left side
/// `pi*_{N',M'}(z)^{-1} sum_{eta'} pi*_{N,M}(eta') Q_z(eta')` the same for every
/// `z` in `to`; both equal `lambda`.
pub fn sum_rule(from: Sector, to: Sector) -> Result<SumRule> {
    if from.l != to.l {
        return Err(Error::InvalidArgument("sectors on different lattices".into()));
    }
    let from_cfgs = from.enumerate();
    let to_pos: Vec<(Config, Positions)> = to
        .enumerate()
        .into_iter()
        .map(|c| {
            let p = c.to_positions();
            (c, p)
        })
        .collect();

    let mut lambda: Option<QPoly> = None;
    let mut agree = |v: QPoly, what: String| -> Result<()> {
        match &lambda {
            None => {
                lambda = Some(v);
                Ok(())
            }
            Some(l0) if *l0 == v => Ok(()),
            Some(l0) => Err(Error::NotConstant(format!("{what}: {v} != {l0}"))),
        }
    };

    for c in &from_cfgs {
        let rhs = to_pos.iter().fold(QPoly::zero(), |acc, (_, z)| &acc + &qz(z, c));
        agree(rhs, format!("right side at eta={c}"))?;
    }

    let z_from = crate::measures::partition_function(from);
    let z_to = crate::measures::partition_function(to);
    for (zc, z) in &to_pos {
        let sum = from_cfgs.iter().fold(QPoly::zero(), |acc, c| {
            &acc + &(&crate::measures::pi_unnormalized(c) * &qz(z, c))
        });
        let num = &z_to * &sum;
        let den = &QPoly::q_pow(pi_exponent_positions(z)) * &z_from;
        let lhs = num
            .exact_div(&den)
            .map_err(|_| Error::NotConstant(format!("left side at z={zc} is not a Laurent polynomial")))?;
        agree(lhs, format!("left side at z={zc}"))?;
    }
    Ok(SumRule {
        from,
        to,
        lambda: lambda.unwrap_or_else(QPoly::zero),
    })
}

/// Sum rule over all pairs of sectors of a lattice. Failures are recorded,
/// never skipped.
pub fn check_sum_rules(l: usize) -> (Report, Vec<SumRule>) {
    let mut report = Report::new();
    let mut rules = Vec::new();
    for from in Sector::all(l) {
        for to in Sector::all(l) {
            let name = format!("sumrule[L={l},N={},M={},N'={},M'={}]", from.n, from.m, to.n, to.m);
            match sum_rule(from, to) {
                Ok(rule) => {
                    let expect_zero = to.n > from.n || to.m > from.m;
                    let expect_one = to.n == 0 && to.m == 0;
                    if (expect_zero && !rule.lambda.is_zero()) || (expect_one && !rule.lambda.is_one()) {
                        report.fail(name, 0, 0, &rule.lambda);
                    } else {
                        report.pass(name);
                    }
                    rules.push(rule);
                }
                Err(e) => report.fail(name, 0, 0, e),
            }
        }
    }
    (report, rules)
}

/// `N,M,Nprime,Mprime,lambda_poly` CSV.
pub fn lambda_csv(rules: &[SumRule]) -> String {
    let mut out = String::from("N,M,Nprime,Mprime,lambda_poly\n");
    for r in rules {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.from.n, r.from.m, r.to.n, r.to.m, r.lambda
        )
        .unwrap();
    }
    out
}
