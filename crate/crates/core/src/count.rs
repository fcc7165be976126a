//! Exact tower counts: closed binomial form, terminating hypergeometric form,
//! and the linear recurrence over base size.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate::TowerClassParams;
use crate::error::{Error, Result};

pub type ExactInteger = BigInt;
pub type ExactRational = BigRational;

/// `C(m, j)`, zero outside `0 <= j <= m`. The upper index must be non-negative.
pub fn binomial(m: i64, j: i64) -> Result<ExactInteger> {
    if m < 0 {
        return Err(Error::NegativeUpperIndex(m));
    }
    if j < 0 || j > m {
        return Ok(BigInt::zero());
    }
    let j = j.min(m - j);
    let mut acc = BigInt::one();
    for i in 0..j {
        // acc * (m - i) is divisible by i + 1: acc is C(m, i) at this point.
        acc = acc * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    Ok(acc)
}

/// Binomial where callers have already established `m >= 0`.
pub(crate) fn binom(m: i64, j: i64) -> ExactInteger {
    binomial(m, j).expect("non-negative upper index")
}

/// Rising factorial `x (x + 1) ... (x + m - 1)`; `(x)_0 = 1`.
pub fn pochhammer(x: &ExactRational, m: u32) -> ExactRational {
    let mut acc = BigRational::one();
    let mut term = x.clone();
    for _ in 0..m {
        acc *= &term;
        term += BigRational::one();
    }
    acc
}

pub fn rational(n: i64, d: i64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `2F1(a, b; c; z)` for `b` a non-positive integer, summed exactly.
pub fn hyp2f1_terminating(
    a: &ExactRational,
    b: i64,
    c: &ExactRational,
    z: &ExactRational,
) -> Result<ExactRational> {
    if b > 0 {
        return Err(Error::InvalidParams(format!(
            "b = {b} must be a non-positive integer"
        )));
    }
    let terms = (-b) as u32;
    // Any vanishing (c)_m with m <= -b poisons the sum.
    for i in 0..terms {
        let ci = c + BigRational::from_integer(BigInt::from(i));
        if ci.is_zero() {
            return Err(Error::ZeroDenominator {
                c: c.to_string(),
                m: i + 1,
            });
        }
    }
    let bq = BigRational::from_integer(BigInt::from(b));
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for m in 0..=terms {
        sum += &term;
        if m == terms {
            break;
        }
        let mi = BigRational::from_integer(BigInt::from(m));
        term = term * (a + &mi) * (&bq + &mi) / (c + &mi) * z / (&mi + BigRational::one());
    }
    Ok(sum)
}

/// Number of `(n, b)` towers: `C(kn - 1, n - b)`.
pub fn count_towers_closed(p: TowerClassParams) -> ExactInteger {
    let (k, n, b) = (p.k as i64, p.n as i64, p.b as i64);
    binom(k * n - 1, n - b)
}

/// Number of towers of area `kn`, all bases: `sum_b C(kn - 1, n - b)`.
pub fn count_all_closed(k: usize, n: usize) -> Result<ExactInteger> {
    check_kn(k, n)?;
    let (k, n) = (k as i64, n as i64);
    Ok((1..=n).map(|b| binom(k * n - 1, n - b)).sum())
}

/// The same total as `C(kn - 1, n - 1) * 2F1(1, 1 - n; (k - 1) n + 1; -1)`.
pub fn count_all_hypergeometric(k: usize, n: usize) -> Result<ExactInteger> {
    check_kn(k, n)?;
    let (ki, ni) = (k as i64, n as i64);
    let f = hyp2f1_terminating(
        &rational(1, 1),
        1 - ni,
        &rational((ki - 1) * ni + 1, 1),
        &rational(-1, 1),
    )?;
    let total = BigRational::from_integer(binom(ki * ni - 1, ni - 1)) * f;
    if !total.is_integer() {
        return Err(Error::Internal(format!(
            "hypergeometric count for k={k}, n={n} is not an integer: {total}"
        )));
    }
    Ok(total.to_integer())
}

fn check_kn(k: usize, n: usize) -> Result<()> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParams(format!(
            "need k, n >= 1, got k={k}, n={n}"
        )));
    }
    Ok(())
}

/// Triangle `d_b(n)` for one block width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub k: usize,
    entries: BTreeMap<(usize, usize), ExactInteger>,
    n_max: usize,
}

impl CountTable {
    pub fn get(&self, n: usize, b: usize) -> Option<&ExactInteger> {
        self.entries.get(&(n, b))
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Row `n` as `[d_1(n), ..., d_n(n)]`.
    pub fn row(&self, n: usize) -> Vec<ExactInteger> {
        (1..=n).filter_map(|b| self.get(n, b).cloned()).collect()
    }

    pub fn to_json(&self) -> String {
        let rows = (1..=self.n_max)
            .map(|n| TableRow {
                n,
                d: self.row(n).iter().map(ToString::to_string).collect(),
            })
            .collect();
        serde_json::to_string(&TableJson { k: self.k, rows }).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<CountTable> {
        let raw: TableJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for row in &raw.rows {
            for (i, d) in row.d.iter().enumerate() {
                let v: BigInt = d
                    .parse()
                    .map_err(|_| Error::Json(format!("bad integer {d:?}")))?;
                entries.insert((row.n, i + 1), v);
            }
        }
        Ok(CountTable {
            k: raw.k,
            n_max: raw.rows.iter().map(|r| r.n).max().unwrap_or(0),
            entries,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    k: usize,
    rows: Vec<TableRow>,
}

#[derive(Serialize, Deserialize)]
struct TableRow {
    n: usize,
    d: Vec<String>,
}

/// Fills `d_b(n)` row by row from
/// `d_b(n) = sum_{i=0..k} C(k, i) T_{b+i-1}(n - 1)`, where `T_beta(m)` is the
/// table entry for `beta >= 1` and the formal binomial `C(km - 1, m)` for
/// `beta = 0`.
pub fn recurrence_table(k: usize, n_max: usize) -> Result<CountTable> {
    check_kn(k, n_max)?;
    let mut entries: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
    entries.insert((1, 1), BigInt::one());
    let ki = k as i64;
    let weights: Vec<BigInt> = (0..=ki).map(|i| binom(ki, i)).collect();
    for n in 2..=n_max {
        let m = n - 1;
        let prev = |beta: usize| -> BigInt {
            if beta == 0 {
                binom(ki * m as i64 - 1, m as i64)
            } else {
                entries.get(&(m, beta)).cloned().unwrap_or_default()
            }
        };
        let row: Vec<BigInt> = (1..=n)
            .map(|b| {
                weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * prev(b + i - 1))
                    .sum()
            })
            .collect();
        for (b, v) in row.into_iter().enumerate() {
            entries.insert((n, b + 1), v);
        }
    }
    Ok(CountTable { k, entries, n_max })
}

/// The closed-form triangle, for comparison with [`recurrence_table`].
pub fn closed_table(k: usize, n_max: usize) -> Result<CountTable> {
    check_kn(k, n_max)?;
    let mut entries = BTreeMap::new();
    for n in 1..=n_max {
        for b in 1..=n {
            entries.insert((n, b), count_towers_closed(TowerClassParams { k, n, b }));
        }
    }
    Ok(CountTable { k, entries, n_max })
}

/// Both sides of the single-block-base identity
/// `C(k(n-1) - 1, n - 1) = (k - 1) C(k(n-1) - 1, idx)` for a chosen lower
/// index `idx` on the right.
pub fn base_one_sides(k: usize, n: usize, rhs_lower: i64) -> (ExactInteger, ExactInteger) {
    let m = (k * (n - 1)) as i64 - 1;
    let lhs = binom(m, n as i64 - 1);
    let rhs = BigInt::from(k as i64 - 1) * binom(m, rhs_lower);
    (lhs, rhs)
}

/// Checks `C(k(n-1) - 1, n - 1) = (k - 1) C(k(n-1) - 1, n - 2)`.
pub fn base_one_identity_check(k: usize, n: usize) -> Result<bool> {
    if k < 2 || n < 2 {
        return Err(Error::InvalidParams(format!(
            "need k, n >= 2, got k={k}, n={n}"
        )));
    }
    let (lhs, rhs) = base_one_sides(k, n, n as i64 - 2);
    Ok(lhs == rhs)
}

/// Checks `C(kn - 1, n - b) = sum_{i=0..k} C(k, i) C(k(n-1) - 1, (n-1) - (b+i-1))`.
pub fn vandermonde_check(k: usize, n: usize, b: usize) -> Result<bool> {
    if k == 0 || n < 2 || b == 0 {
        return Err(Error::InvalidParams(format!(
            "need k >= 1, n >= 2, b >= 1, got k={k}, n={n}, b={b}"
        )));
    }
    let (ki, ni, bi) = (k as i64, n as i64, b as i64);
    let lhs = binom(ki * ni - 1, ni - bi);
    let rhs: BigInt = (0..=ki)
        .map(|i| binom(ki, i) * binom(ki * (ni - 1) - 1, (ni - 1) - (bi + i - 1)))
        .sum();
    Ok(lhs == rhs)
}

/// `2^(n-1)`-style powers for tests and reports.
pub fn pow(base: u32, exp: u32) -> ExactInteger {
    num_traits::pow(BigInt::from(base), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// Pascal's triangle built by addition only.
    fn pascal(m: usize) -> Vec<Vec<BigInt>> {
        let mut rows = vec![vec![int(1)]];
        for r in 1..=m {
            let prev = &rows[r - 1];
            let mut row = vec![int(1); r + 1];
            for j in 1..r {
                row[j] = &prev[j - 1] + &prev[j];
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(7, 2).unwrap(), int(21));
        assert_eq!(binomial(5, 0).unwrap(), int(1));
        assert_eq!(binomial(3, 5).unwrap(), int(0));
        assert_eq!(binomial(3, -1).unwrap(), int(0));
        assert_eq!(binomial(-1, 0), Err(Error::NegativeUpperIndex(-1)));
    }

    #[test]
    fn binomial_matches_pascal() {
        let p = pascal(60);
        for (m, row) in p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(&binomial(m as i64, j as i64).unwrap(), v);
            }
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&rational(7, 3), 0), rational(1, 1));
        assert_eq!(pochhammer(&rational(1, 1), 4), rational(24, 1));
        assert_eq!(pochhammer(&rational(-3, 1), 2), rational(6, 1));
        assert_eq!(pochhammer(&rational(1, 2), 2), rational(3, 4));
    }

    /// Term-by-term oracle using the definition directly.
    fn hyp_oracle(a: &BigRational, b: i64, c: &BigRational, z: &BigRational) -> BigRational {
        let bq = BigRational::from_integer(int(b));
        (0..=(-b) as u32)
            .map(|m| {
                let fact = pochhammer(&rational(1, 1), m);
                pochhammer(a, m) * pochhammer(&bq, m) / pochhammer(c, m)
                    * num_traits::pow(z.clone(), m as usize)
                    / fact
            })
            .sum()
    }

    #[test]
    fn hyp2f1_examples() {
        let one = rational(1, 1);
        let m1 = rational(-1, 1);
        assert_eq!(
            hyp2f1_terminating(&one, -3, &rational(5, 1), &m1).unwrap(),
            rational(64, 35)
        );
        assert_eq!(
            hyp2f1_terminating(&one, -1, &rational(5, 1), &m1).unwrap(),
            rational(6, 5)
        );
        assert_eq!(
            hyp2f1_terminating(&rational(3, 7), 0, &rational(-2, 9), &rational(5, 1)).unwrap(),
            one
        );
        for (a, b, c, z) in [
            (rational(1, 2), -4, rational(3, 2), rational(2, 3)),
            (rational(-5, 3), -6, rational(7, 4), rational(-1, 1)),
        ] {
            assert_eq!(
                hyp2f1_terminating(&a, b, &c, &z).unwrap(),
                hyp_oracle(&a, b, &c, &z)
            );
        }
    }

    #[test]
    fn hyp2f1_zero_denominator() {
        let r = hyp2f1_terminating(&rational(1, 1), -3, &rational(-1, 1), &rational(1, 1));
        assert!(matches!(r, Err(Error::ZeroDenominator { .. })));
        // (c)_m only runs to m = -b, so c = -3 with b = -3 is fine
        assert!(hyp2f1_terminating(&rational(1, 1), -3, &rational(-3, 1), &rational(1, 1)).is_ok());
        assert!(hyp2f1_terminating(&rational(1, 1), 2, &rational(1, 1), &rational(1, 1)).is_err());
    }

    #[test]
    fn closed_counts() {
        let p = |k, n, b| TowerClassParams::new(k, n, b).unwrap();
        assert_eq!(count_towers_closed(p(2, 4, 2)), int(21));
        assert_eq!(count_towers_closed(p(3, 2, 1)), int(5));
        assert_eq!(count_towers_closed(p(5, 6, 6)), int(1));
        assert_eq!(count_all_closed(2, 4).unwrap(), int(64));
        assert_eq!(count_all_closed(3, 2).unwrap(), int(6));
        for n in 1..=30 {
            assert_eq!(count_all_closed(1, n).unwrap(), pow(2, n as u32 - 1));
            assert_eq!(count_all_closed(2, n).unwrap(), pow(4, n as u32 - 1));
        }
        assert!(count_all_closed(0, 3).is_err());
    }

    #[test]
    fn hypergeometric_counts() {
        assert_eq!(count_all_hypergeometric(2, 4).unwrap(), int(64));
        assert_eq!(count_all_hypergeometric(3, 2).unwrap(), int(6));
        for k in 1..=6 {
            assert_eq!(count_all_hypergeometric(k, 1).unwrap(), int(1));
        }
    }

    #[test]
    fn recurrence_examples() {
        let t = recurrence_table(2, 6).unwrap();
        assert_eq!(t.get(4, 2), Some(&int(21)));
        assert_eq!(t.get(3, 1), Some(&int(10)));
        for n in 2..=6 {
            let d1 =
                int(3) * t.get(n - 1, 1).unwrap() + t.get(n - 1, 2).cloned().unwrap_or_default();
            assert_eq!(t.get(n, 1), Some(&d1));
        }
        for k in 1..=4 {
            let t = recurrence_table(k, 12).unwrap();
            for n in 1..=12 {
                assert_eq!(t.get(n, n), Some(&int(1)));
            }
            assert_eq!(t, closed_table(k, 12).unwrap());
        }
    }

    #[test]
    fn table_json_round_trip() {
        let t = recurrence_table(2, 3).unwrap();
        let s = t.to_json();
        assert_eq!(
            s,
            r#"{"k":2,"rows":[{"n":1,"d":["1"]},{"n":2,"d":["3","1"]},{"n":3,"d":["10","5","1"]}]}"#
        );
        assert_eq!(CountTable::from_json(&s).unwrap(), t);
    }

    #[test]
    fn base_one_identity() {
        assert_eq!(base_one_sides(3, 3, 1), (int(10), int(10)));
        assert!(base_one_identity_check(3, 3).unwrap());
        assert!(base_one_identity_check(2, 3).unwrap());
        assert!(base_one_identity_check(2, 2).unwrap());
        // printed lower index n: 10 vs 2 * C(5, 3) = 20
        assert_eq!(base_one_sides(3, 3, 3), (int(10), int(20)));
        assert!(base_one_identity_check(1, 3).is_err());
    }

    #[test]
    fn vandermonde_examples() {
        assert!(vandermonde_check(2, 4, 2).unwrap());
        assert!(vandermonde_check(4, 3, 1).unwrap());
        assert_eq!(binom(11, 2), int(55));
        for k in 1..=5 {
            assert!(vandermonde_check(k, 5, 5).unwrap());
        }
    }
}
