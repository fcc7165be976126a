//! The extended hypergeometric identity
//!
//! ```text
//! C(N, beta) 2F1(alpha, -beta; c; -1) = sum_{i >= 0} C(N, beta - i) (alpha)_i / i!
//! ```
//!
//! with `c = k alpha + k beta + 1` and `N = k alpha + k beta + beta`, checked
//! exactly for integer parameters and in `f64` for real `alpha`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::count::{binom, hyp2f1_terminating, pochhammer, ExactRational};
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::Domain(format!(
            "log_gamma needs a finite x > 0, got {x}"
        )));
    }
    if x < 0.5 {
        // Gamma(x) = Gamma(x + 1) / x
        return Ok(lanczos(x + 1.0) - x.ln());
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut a = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `Gamma(x + 1) / (Gamma(y + 1) Gamma(x - y + 1))` for positive Gamma
/// arguments.
pub fn extended_binomial(x: f64, y: f64) -> Result<f64> {
    let l = log_gamma(x + 1.0)? - log_gamma(y + 1.0)? - log_gamma(x - y + 1.0)?;
    Ok(l.exp())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KummerExact {
    #[serde(serialize_with = "as_string")]
    pub lhs: ExactRational,
    #[serde(serialize_with = "as_string")]
    pub rhs: ExactRational,
    pub equal: bool,
}

fn as_string<S: serde::Serializer>(
    q: &ExactRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(q)
}

/// Both sides as exact rationals; `k, alpha >= 1`, `beta >= 0`.
pub fn kummer_like_exact(k: u32, alpha: u32, beta: u32) -> Result<KummerExact> {
    if k == 0 || alpha == 0 {
        return Err(Error::InvalidParams(format!(
            "exact mode needs k >= 1 and alpha >= 1, got k={k}, alpha={alpha}"
        )));
    }
    let (k, a, b) = (k as i64, alpha as i64, beta as i64);
    let top = k * a + k * b + b;
    let aq = BigRational::from_integer(BigInt::from(a));
    let c = BigRational::from_integer(BigInt::from(k * a + k * b + 1));
    let f = hyp2f1_terminating(&aq, -b, &c, &BigRational::from_integer(BigInt::from(-1)))?;
    let lhs = BigRational::from_integer(binom(top, b)) * f;

    let mut rhs = BigRational::zero();
    let mut fact = BigRational::one();
    for i in 0..=b {
        if i > 0 {
            fact *= BigRational::from_integer(BigInt::from(i));
        }
        rhs += BigRational::from_integer(binom(top, b - i)) * pochhammer(&aq, i as u32) / &fact;
    }
    let equal = lhs == rhs;
    Ok(KummerExact { lhs, rhs, equal })
}

pub const FLOAT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KummerFloat {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub pass: bool,
}

/// Both sides in `f64`. `beta` must be a non-negative integer so that both
/// sums terminate.
pub fn kummer_like_float(k: u32, alpha: f64, beta: f64) -> Result<KummerFloat> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be positive".into()));
    }
    if beta.is_nan() || beta < 0.0 || beta.fract() != 0.0 || beta > 1e6 {
        return Err(Error::Domain(format!(
            "beta must be a non-negative integer, got {beta}"
        )));
    }
    let kf = k as f64;
    let c = kf * alpha + kf * beta + 1.0;
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::Domain(format!(
            "c = {c} is zero or a negative integer"
        )));
    }
    let top = kf * alpha + kf * beta + beta;
    let terms = beta as u32;

    // 2F1(alpha, -beta; c; -1), term ratio (alpha + m)(m - beta)(-1) / ((c + m)(m + 1))
    let mut f = 0.0;
    let mut term = 1.0;
    for m in 0..=terms {
        f += term;
        let mf = m as f64;
        term *= -((alpha + mf) * (mf - beta)) / ((c + mf) * (mf + 1.0));
    }
    let lhs = extended_binomial(top, beta)? * f;

    let mut rhs = 0.0;
    let mut rising = 1.0;
    for i in 0..=terms {
        let fi = i as f64;
        if i > 0 {
            rising *= (alpha + fi - 1.0) / fi;
        }
        rhs += extended_binomial(top, beta - fi)? * rising;
    }
    let rel_err = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
    Ok(KummerFloat {
        lhs,
        rhs,
        rel_err,
        pass: rel_err <= FLOAT_TOLERANCE,
    })
}

/// Fixed sweep of 50 real parameter points: `k <= 4`, `alpha` in
/// `[0.5, 5]`, integer `beta <= 10`.
pub fn float_grid() -> Vec<(u32, f64, u32)> {
    (0..50u32)
        .map(|i| {
            let k = 1 + i % 4;
            let beta = (3 * i) % 11;
            let alpha = 0.5 + 4.5 * f64::from((17 * i) % 50) / 49.0;
            (k, alpha, beta)
        })
        .collect()
}

/// Tower totals as an instance of the identity: with width `k >= 2`,
/// `alpha = 1`, `beta = n - 1` and identity parameter `k - 1`, the right side
/// is `sum_b C(kn - 1, n - b)`.
pub fn tower_total_instance(k: usize, n: usize) -> Result<KummerExact> {
    if k < 2 || n == 0 {
        return Err(Error::InvalidParams(format!(
            "need k >= 2 and n >= 1, got k={k}, n={n}"
        )));
    }
    kummer_like_exact(k as u32 - 1, 1, n as u32 - 1)
}

/// Decimal rendering of an exact rational for reports.
pub fn approx(q: &ExactRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::{count_all_closed, rational};

    fn ln_factorial(n: u32) -> f64 {
        (2..=n).map(|i| f64::from(i).ln()).sum()
    }

    /// `ln Gamma(n + 1/2) = ln sqrt(pi) + sum_{i=1..n} ln(i - 1/2)`.
    fn ln_gamma_half(n: u32) -> f64 {
        0.5 * std::f64::consts::PI.ln() + (1..=n).map(|i| (f64::from(i) - 0.5).ln()).sum::<f64>()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!(close(log_gamma(5.0).unwrap(), 24f64.ln(), 1e-14));
        assert!(close(
            log_gamma(0.5).unwrap(),
            0.572_364_942_924_700_1,
            1e-14
        ));
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_accuracy_on_grid() {
        for n in 1..=100u32 {
            let got = log_gamma(f64::from(n)).unwrap();
            assert!(close(got, ln_factorial(n - 1), 1e-12), "x={n}: {got}");
        }
        for n in 0..100u32 {
            let x = f64::from(n) + 0.5;
            let got = log_gamma(x).unwrap();
            assert!(close(got, ln_gamma_half(n), 1e-12), "x={x}: {got}");
        }
        // small arguments through the shift
        assert!(close(
            log_gamma(0.25).unwrap(),
            1.288_022_524_698_077_5,
            1e-12
        ));
    }

    #[test]
    fn extended_binomial_examples() {
        assert!(close(extended_binomial(3.0, 1.0).unwrap(), 3.0, 1e-12));
        assert!(close(extended_binomial(2.5, 0.0).unwrap(), 1.0, 1e-12));
        assert!(close(extended_binomial(7.0, 2.0).unwrap(), 21.0, 1e-10));
        assert!(extended_binomial(-3.0, 0.5).is_err());
    }

    #[test]
    fn exact_examples() {
        let r = kummer_like_exact(1, 1, 1).unwrap();
        assert_eq!(
            (r.lhs.clone(), r.rhs.clone()),
            (rational(4, 1), rational(4, 1))
        );
        assert!(r.equal);
        let r = kummer_like_exact(2, 2, 1).unwrap();
        assert_eq!(r.lhs, rational(9, 1));
        assert!(r.equal);
        for k in 1..=3 {
            for a in 1..=3 {
                let r = kummer_like_exact(k, a, 0).unwrap();
                assert_eq!(r.lhs, rational(1, 1));
                assert!(r.equal);
            }
        }
        assert!(kummer_like_exact(0, 1, 1).is_err());
    }

    #[test]
    fn float_examples() {
        let r = kummer_like_float(1, 1.0, 1.0).unwrap();
        assert!(close(r.lhs, 4.0, 1e-10) && r.rel_err < 1e-10);
        let r = kummer_like_float(2, 2.0, 1.0).unwrap();
        assert!(close(r.rhs, 9.0, 1e-10));
        assert!(kummer_like_float(3, 1.5, 2.0).unwrap().pass);
        assert!(kummer_like_float(1, 1.0, 1.5).is_err());
        assert!(kummer_like_float(1, 1.0, -1.0).is_err());
    }

    #[test]
    fn float_agrees_with_exact_on_integers() {
        for k in 1..=3 {
            for a in 1..=4 {
                for b in 0..=5 {
                    let e = kummer_like_exact(k, a, b).unwrap();
                    let f = kummer_like_float(k, f64::from(a), f64::from(b)).unwrap();
                    assert!(close(f.lhs, approx(&e.lhs), 1e-9));
                }
            }
        }
    }

    #[test]
    fn tower_totals_are_an_instance() {
        for k in 2..=5 {
            for n in 1..=12 {
                let r = tower_total_instance(k, n).unwrap();
                assert!(r.equal);
                assert_eq!(
                    r.rhs,
                    BigRational::from_integer(count_all_closed(k, n).unwrap())
                );
            }
        }
    }

    #[test]
    fn grid_is_fixed() {
        let g = float_grid();
        assert_eq!(g.len(), 50);
        assert!(g
            .iter()
            .all(|&(k, a, b)| (1..=4).contains(&k) && (0.5..=5.0).contains(&a) && b <= 10));
    }
}
