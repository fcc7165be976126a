//! Truncated power series over exact rationals and the bivariate tower
//! generating function check.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::count::{binom, ExactRational};
use crate::error::{Error, Result};

/// `sum_{i <= order} c_i x^i`, exact modulo `x^(order + 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<ExactRational>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// Pads or truncates `coeffs` to the given order.
    pub fn from_coeffs(order: usize, coeffs: impl IntoIterator<Item = ExactRational>) -> Self {
        let mut c: Vec<ExactRational> = coeffs.into_iter().take(order + 1).collect();
        c.resize(order + 1, BigRational::zero());
        PowerSeries { coeffs: c }
    }

    pub fn from_ints(order: usize, coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            order,
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c))),
        )
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> ExactRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(order, self.coeffs.iter().cloned())
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::InvalidParams(format!(
                "series orders differ: {} vs {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        Ok(self * other)
    }

    /// `self / other`; `other` needs a non-zero constant term.
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let c0 = &other.coeffs[0];
        if c0.is_zero() {
            return Err(Error::Domain(
                "division by a series with zero constant term".into(),
            ));
        }
        let n = self.coeffs.len();
        let mut q: Vec<ExactRational> = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.coeffs[i].clone();
            for (j, qj) in q.iter().enumerate() {
                acc -= qj * &other.coeffs[i - j];
            }
            q.push(acc / c0);
        }
        Ok(PowerSeries { coeffs: q })
    }

    /// Square root with constant term 1, by Newton iteration
    /// `r <- (r + s / r) / 2` with the working precision doubled each round.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Domain(format!(
                "series square root needs constant term 1, got {}",
                self.coeffs[0]
            )));
        }
        let target = self.order();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut r = PowerSeries::one(0);
        let mut prec = 0;
        while prec < target {
            prec = (2 * prec + 1).min(target);
            let r_ext = r.truncate(prec);
            let s = self.truncate(prec);
            let q = s.try_div(&r_ext)?;
            r = (&r_ext + &q).scale(&half);
        }
        Ok(r.truncate(target))
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        PowerSeries {
            coeffs: (0..=order)
                .map(|i| &self.coeffs[i] + &rhs.coeffs[i])
                .collect(),
        }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        self + &(-rhs)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let order = self.order().min(rhs.order());
        let mut out = vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        PowerSeries { coeffs: out }
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{} + O(x^{})", terms.join(" + "), self.order() + 1)
        }
    }
}

/// Series in `x` whose coefficients are polynomials in `y`.
///
/// `coeffs[n][b]` is the coefficient of `x^n y^b`; the `y` polynomials are
/// dense and of any degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiSeries {
    coeffs: Vec<Vec<ExactRational>>,
}

impl BiSeries {
    pub fn zero(order: usize) -> Self {
        BiSeries {
            coeffs: vec![Vec::new(); order + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Single term `c x^n y^b` (dropped when `n > order`).
    pub fn monomial(order: usize, n: usize, b: usize, c: ExactRational) -> Self {
        let mut s = Self::zero(order);
        s.add_term(n, b, c);
        s
    }

    fn add_term(&mut self, n: usize, b: usize, c: ExactRational) {
        if n >= self.coeffs.len() {
            return;
        }
        let row = &mut self.coeffs[n];
        if row.len() <= b {
            row.resize(b + 1, BigRational::zero());
        }
        row[b] += c;
    }

    /// Embeds a series in `x` times `y^b`.
    pub fn from_x_series(s: &PowerSeries, b: usize) -> Self {
        let mut out = Self::zero(s.order());
        for (n, c) in s.coeffs().iter().enumerate() {
            if !c.is_zero() {
                out.add_term(n, b, c.clone());
            }
        }
        out
    }

    pub fn coeff(&self, n: usize, b: usize) -> ExactRational {
        self.coeffs
            .get(n)
            .and_then(|row| row.get(b))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Highest `y` power with a non-zero coefficient at `x^n`.
    pub fn y_degree(&self, n: usize) -> Option<usize> {
        self.coeffs.get(n)?.iter().rposition(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for src in [self, other] {
            for (n, row) in src.coeffs.iter().enumerate().take(order + 1) {
                for (b, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        out.add_term(n, b, c.clone());
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for (n1, r1) in self.coeffs.iter().enumerate() {
            for (b1, c1) in r1.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (n2, r2) in other
                    .coeffs
                    .iter()
                    .enumerate()
                    .take(order + 1 - n1.min(order + 1))
                {
                    for (b2, c2) in r2.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        out.add_term(n1 + n2, b1 + b2, c1 * c2);
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        BiSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|a| a * c).collect())
                .collect(),
        }
    }
}

/// `(x / 2) (1 - sqrt(1 - 4x)) / sqrt(1 - 4x)` expanded through `x^order`.
pub fn helper_series(order: usize) -> Result<PowerSeries> {
    if order == 0 {
        return Err(Error::InvalidParams("order must be at least 1".into()));
    }
    let one = PowerSeries::one(order);
    let root = PowerSeries::from_ints(order, &[1, -4]).sqrt()?;
    let ratio = (&one - &root).try_div(&root)?;
    let half_x = PowerSeries::from_coeffs(
        order,
        [
            BigRational::zero(),
            BigRational::new(BigInt::one(), BigInt::from(2)),
        ],
    );
    Ok(&half_x * &ratio)
}

/// `sum_{n <= order} sum_{b = 1..n} C(2n - 1, n - b) x^n y^b`.
pub fn d2_table(order: usize) -> BiSeries {
    let mut out = BiSeries::zero(order);
    for n in 1..=order {
        for b in 1..=n {
            let c = binom(2 * n as i64 - 1, (n - b) as i64);
            out.add_term(n, b, BigRational::from_integer(c));
        }
    }
    out
}

/// First coefficient where the two sides disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoeffMismatch {
    pub n: usize,
    pub b: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GfCheck {
    pub order: usize,
    pub holds: bool,
    pub mismatch: Option<CoeffMismatch>,
}

/// Verifies the bivariate generating function through `x^order` in the
/// denominator-free form
/// `(y - x - 2xy - xy^2) D = x y^2 + (y^2 - y) H`,
/// with `D` the tabulated counts and `H` the [`helper_series`].
pub fn d2_closed_form_check(order: usize) -> Result<GfCheck> {
    let helper = helper_series(order)?;
    let r = |v: i64| BigRational::from_integer(BigInt::from(v));
    let mono = |n, b, c| BiSeries::monomial(order, n, b, r(c));

    let factor = mono(0, 1, 1)
        .add(&mono(1, 0, -1))
        .add(&mono(1, 1, -2))
        .add(&mono(1, 2, -1));
    let lhs = factor.mul(&d2_table(order));

    let h = BiSeries::from_x_series(&helper, 0);
    let rhs = mono(1, 2, 1).add(&mono(0, 2, 1).add(&mono(0, 1, -1)).mul(&h));

    for n in 0..=order {
        let deg = lhs.y_degree(n).max(rhs.y_degree(n)).unwrap_or(0);
        for b in 0..=deg {
            let (a, c) = (lhs.coeff(n, b), rhs.coeff(n, b));
            if a != c {
                return Ok(GfCheck {
                    order,
                    holds: false,
                    mismatch: Some(CoeffMismatch {
                        n,
                        b,
                        lhs: a.to_string(),
                        rhs: c.to_string(),
                    }),
                });
            }
        }
    }
    Ok(GfCheck {
        order,
        holds: true,
        mismatch: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::rational;

    #[test]
    fn arithmetic_examples() {
        let a = PowerSeries::from_ints(4, &[1, 1]);
        let b = PowerSeries::from_ints(4, &[1, -1]);
        assert_eq!(
            a.try_mul(&b).unwrap(),
            PowerSeries::from_ints(4, &[1, 0, -1])
        );
        let one = PowerSeries::one(4);
        assert_eq!(
            one.try_div(&b).unwrap(),
            PowerSeries::from_ints(4, &[1, 1, 1, 1, 1])
        );
        let c = PowerSeries::from_ints(4, &[1, 0, -1]);
        assert_eq!(c.try_div(&b).unwrap(), a);
        assert!(one.try_div(&PowerSeries::from_ints(4, &[0, 1])).is_err());
        assert!(one.try_add(&PowerSeries::one(3)).is_err());
    }

    /// Coefficients of `(1 + t)^(1/2)` at `t = -4x` from the generalized
    /// binomial series, computed without any series arithmetic.
    fn sqrt_1_minus_4x_oracle(order: usize) -> Vec<BigRational> {
        let half = rational(1, 2);
        let mut out = Vec::new();
        let mut gb = rational(1, 1);
        for n in 0..=order {
            out.push(&gb * num_traits::pow(rational(-4, 1), n));
            gb = gb * (&half - rational(n as i64, 1)) / rational(n as i64 + 1, 1);
        }
        out
    }

    #[test]
    fn sqrt_examples() {
        let s = PowerSeries::from_ints(12, &[1, -4]);
        let r = s.sqrt().unwrap();
        assert_eq!(r.coeffs(), sqrt_1_minus_4x_oracle(12).as_slice());
        assert_eq!(
            &r.coeffs()[..5],
            PowerSeries::from_ints(4, &[1, -2, -2, -4, -10]).coeffs()
        );
        assert_eq!(r.try_mul(&r).unwrap(), s);
        assert_eq!(PowerSeries::one(5).sqrt().unwrap(), PowerSeries::one(5));
        assert_eq!(PowerSeries::one(0).sqrt().unwrap(), PowerSeries::one(0));
        assert!(PowerSeries::from_ints(3, &[4, 1]).sqrt().is_err());
    }

    #[test]
    fn helper_coefficients() {
        let h = helper_series(10).unwrap();
        assert_eq!(h.coeff(0), rational(0, 1));
        assert_eq!(h.coeff(1), rational(0, 1));
        assert_eq!(h.coeff(2), rational(1, 1));
        assert_eq!(h.coeff(3), rational(3, 1));
        assert_eq!(h.coeff(4), rational(10, 1));
        for n in 2..=10 {
            assert_eq!(
                h.coeff(n),
                BigRational::from_integer(binom(2 * n as i64 - 3, n as i64 - 1))
            );
        }
        assert!(helper_series(0).is_err());
    }

    #[test]
    fn d2_table_rows() {
        let d = d2_table(3);
        let row = |n: usize| (0..=n).map(|b| d.coeff(n, b)).collect::<Vec<_>>();
        let ints = |v: &[i64]| v.iter().map(|&c| rational(c, 1)).collect::<Vec<_>>();
        assert_eq!(row(1), ints(&[0, 1]));
        assert_eq!(row(2), ints(&[0, 3, 1]));
        assert_eq!(row(3), ints(&[0, 10, 5, 1]));
    }

    #[test]
    fn gf_identity_holds() {
        for order in 1..=10 {
            let c = d2_closed_form_check(order).unwrap();
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn gf_check_reports_mismatch() {
        // the tabulated series with one perturbed coefficient must fail
        let order = 4;
        let helper = helper_series(order).unwrap();
        let mut d = d2_table(order);
        d.add_term(3, 2, rational(1, 1));
        let r = |v: i64| rational(v, 1);
        let mono = |n, b, c| BiSeries::monomial(order, n, b, r(c));
        let factor = mono(0, 1, 1)
            .add(&mono(1, 0, -1))
            .add(&mono(1, 1, -2))
            .add(&mono(1, 2, -1));
        let lhs = factor.mul(&d);
        let rhs = mono(1, 2, 1).add(
            &mono(0, 2, 1)
                .add(&mono(0, 1, -1))
                .mul(&BiSeries::from_x_series(&helper, 0)),
        );
        assert_ne!(lhs, rhs);
    }
}
