//! q-numbers, q-factorials, q-multinomials and Rogers–Szegő sums.

use num_traits::{One, ToPrimitive};

use super::LaurentPoly;
use crate::error::{Error, Result};
use crate::scalar::{Coefficient, Real};

/// Symmetric q-number `[n]_q = (q^n - q^{-n}) / (q - q^{-1})`.
///
/// For `n >= 1` this is `sum_{k=0}^{n-1} q^{2k-n+1}`; `[-n]_q = -[n]_q`.
pub fn q_number<C: Coefficient>(n: i64) -> LaurentPoly<C> {
    let m = n.abs();
    let p = LaurentPoly::from_half_terms((0..m).map(|k| (2 * (2 * k - m + 1), C::one())));
    if n < 0 {
        -p
    } else {
        p
    }
}

pub fn q_factorial<C: Coefficient>(n: u32) -> LaurentPoly<C> {
    (1..=n as i64).fold(LaurentPoly::one(), |acc, k| &acc * &q_number(k))
}

/// Gaussian binomial `C_K(N) = [K]! / ([N]! [K-N]!)`.
pub fn q_binomial<C: Coefficient>(k: u32, n: u32) -> Result<LaurentPoly<C>> {
    if n > k {
        return Err(Error::InvalidArgument(format!(
            "q-binomial needs N <= K, got K={k}, N={n}"
        )));
    }
    let den = &q_factorial::<C>(n) * &q_factorial(k - n);
    q_factorial::<C>(k).exact_div(&den)
}

/// q-multinomial `C_K(N, M) = [K]! / ([N]! [M]! [K-N-M]!)`.
pub fn q_multinomial<C: Coefficient>(k: u32, n: u32, m: u32) -> Result<LaurentPoly<C>> {
    if n + m > k {
        return Err(Error::InvalidArgument(format!(
            "q-multinomial needs N+M <= K, got K={k}, N={n}, M={m}"
        )));
    }
    let den = &(&q_factorial::<C>(n) * &q_factorial(m)) * &q_factorial(k - n - m);
    q_factorial::<C>(k).exact_div(&den)
}

fn fugacity<F: Real>(chem: F, count: u32) -> F {
    // count == 0 must give 1 even for chem = -inf
    if count == 0 {
        F::one()
    } else {
        (chem * F::from_u32(count).unwrap()).exp()
    }
}

fn eval_at<C: Coefficient + ToPrimitive, F: Real>(p: &LaurentPoly<C>, q0: F) -> F {
    F::from_f64(p.eval(q0.to_f64().unwrap())).unwrap()
}

/// Rogers–Szegő sum `X_{2L}(alpha) = sum_K e^{alpha K} C_{2L}(K)` at `q = q0`.
pub fn rogers_szego_x<C, F>(two_l: u32, alpha: F, q0: F) -> F
where
    C: Coefficient + ToPrimitive,
    F: Real,
{
    (0..=two_l).fold(F::zero(), |acc, k| {
        let c = q_binomial::<C>(two_l, k).expect("K <= 2L");
        acc + fugacity(alpha, k) * eval_at(&c, q0)
    })
}

/// Bivariate sum `Y_{2L}(nu, mu) = sum_{N,M} e^{nu N + mu M} C_{2L}(N, M)` at `q = q0`.
pub fn rogers_szego_y<C, F>(two_l: u32, nu: F, mu: F, q0: F) -> F
where
    C: Coefficient + ToPrimitive,
    F: Real,
{
    let mut acc = F::zero();
    for n in 0..=two_l {
        for m in 0..=two_l - n {
            let c = q_multinomial::<C>(two_l, n, m).expect("N+M <= 2L");
            acc = acc + fugacity(nu, n) * fugacity(mu, m) * eval_at(&c, q0);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::QPoly;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn q(e: i64) -> QPoly {
        QPoly::q_pow(e)
    }

    #[test]
    fn q_numbers() {
        assert!(q_number::<BigRational>(0).is_zero());
        assert_eq!(q_number::<BigRational>(2), q(1) + q(-1));
        assert_eq!(q_number::<BigRational>(3), q(2) + q(0) + q(-2));
        assert_eq!(q_number::<BigRational>(-3), -(q(2) + q(0) + q(-2)));
    }

    #[test]
    fn q_number_matches_quotient_definition() {
        for n in 1..8 {
            let num = q(n) - q(-n);
            let den = q(1) - q(-1);
            assert_eq!(num.exact_div(&den).unwrap(), q_number::<BigRational>(n));
        }
    }

    #[test]
    fn q_number_at_one() {
        for n in 0..=12 {
            assert_eq!(q_number::<BigRational>(n).eval(1.0), n as f64);
        }
    }

    #[test]
    fn factorials() {
        assert_eq!(q_factorial::<BigRational>(0), QPoly::one());
        assert_eq!(q_factorial::<BigRational>(2), q(1) + q(-1));
        let three = &(q(1) + q(-1)) * &(q(2) + q(0) + q(-2));
        assert_eq!(q_factorial::<BigRational>(3), three);
        // [4]!/[2]! = [3][4]
        let lhs = q_factorial::<BigRational>(4).exact_div(&q_factorial(2)).unwrap();
        assert_eq!(lhs, &q_number::<BigRational>(3) * &q_number(4));
    }

    #[test]
    fn binomials_and_multinomials() {
        for k in 0..5 {
            assert_eq!(q_multinomial::<BigRational>(k, 0, 0).unwrap(), QPoly::one());
        }
        assert_eq!(q_binomial::<BigRational>(2, 1).unwrap(), q(1) + q(-1));
        assert_eq!(q_multinomial::<BigRational>(2, 1, 1).unwrap(), q(1) + q(-1));
        assert!(q_binomial::<BigRational>(2, 3).is_err());
        assert!(q_multinomial::<BigRational>(3, 2, 2).is_err());
    }

    #[test]
    fn binomial_symmetry() {
        for k in 0..=8 {
            for n in 0..=k {
                assert_eq!(
                    q_binomial::<BigRational>(k, n).unwrap(),
                    q_binomial::<BigRational>(k, k - n).unwrap()
                );
            }
        }
    }

    #[test]
    fn multinomial_factorizes() {
        for k in 0..=8 {
            for n in 0..=k {
                for m in 0..=k - n {
                    let lhs = q_multinomial::<BigRational>(k, n, m).unwrap();
                    let rhs = &q_binomial::<BigRational>(k, n).unwrap() * &q_binomial(k - n, m).unwrap();
                    assert_eq!(lhs, rhs, "K={k} N={n} M={m}");
                }
            }
        }
    }

    #[test]
    fn rogers_szego_values() {
        assert_eq!(rogers_szego_x::<BigRational, f64>(2, 0.0, 1.0), 4.0);
        assert_eq!(rogers_szego_y::<BigRational, f64>(2, 0.0, 0.0, 1.0), 9.0);
        let y = rogers_szego_y::<BigRational, f64>(2, f64::NEG_INFINITY, f64::NEG_INFINITY, 2.0);
        assert_eq!(y, 1.0);
        // X_2(alpha) = 1 + e^alpha (q + 1/q) + e^{2 alpha} at q = 2
        let a = 0.3f64;
        let x = rogers_szego_x::<BigRational, f64>(2, a, 2.0);
        assert!((x - (1.0 + a.exp() * 2.5 + (2.0 * a).exp())).abs() < 1e-12);
    }
}
