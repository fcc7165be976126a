//! Verification suites and their machine-readable reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bijection::{classify_domino, composition_sum_check, fiber_histogram, DominoClass};
use crate::count::{
    base_one_identity_check, binom, closed_table, count_all_closed, count_all_hypergeometric,
    count_towers_closed, recurrence_table, vandermonde_check,
};
use crate::enumerate::{count_by_enumeration_parallel, enumerate_towers, TowerClassParams};
use crate::error::{Error, Result};
use crate::hyperid::{float_grid, kummer_like_exact, kummer_like_float, tower_total_instance};
use crate::series::{d2_closed_form_check, helper_series};

/// One verified fact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub parameters: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(suite: &str, parameters: Value) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            parameters,
            checks: Vec::new(),
            pass: true,
            wall_time_ms: None,
        }
    }

    /// Records a check that passes when `expected == actual`.
    pub fn expect_eq(
        &mut self,
        id: impl Into<String>,
        expected: impl ToString,
        actual: impl ToString,
    ) {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let pass = expected == actual;
        self.push(Check {
            id: id.into(),
            expected,
            actual,
            pass,
            detail: None,
        });
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    /// Appends the checks of a sub-suite, prefixing their ids.
    pub fn absorb(&mut self, other: VerificationReport) {
        for mut c in other.checks {
            c.id = format!("{}/{}", other.suite, c.id);
            self.push(c);
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            if c.pass {
                let _ = writeln!(out, "PASS {}: {}", c.id, c.actual);
            } else {
                let _ = writeln!(
                    out,
                    "FAIL {}: expected {}, got {}",
                    c.id, c.expected, c.actual
                );
            }
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = write!(
            out,
            "{}: {}/{} checks passed",
            self.suite,
            passed,
            self.checks.len()
        );
        if let Some(ms) = self.wall_time_ms {
            let _ = write!(out, " in {ms} ms");
        }
        out
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "fails"
    }
}

/// Enumeration counts against `C(kn - 1, n - b)` for every class with
/// `k <= max_k`, `n <= max_n`.
pub fn enumeration_suite(max_k: usize, max_n: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("enumeration", json!({"max_k": max_k, "max_n": max_n}));
    for k in 1..=max_k {
        for n in 1..=max_n {
            for b in 1..=n {
                let p = TowerClassParams::new(k, n, b)?;
                r.expect_eq(
                    format!("k={k},n={n},b={b}"),
                    count_towers_closed(p),
                    count_by_enumeration_parallel(p),
                );
            }
        }
    }
    Ok(r)
}

/// Recurrence table, Vandermonde split and the single-block-base identity.
pub fn recurrence_suite(max_k: usize, max_n: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("recurrence", json!({"max_k": max_k, "max_n": max_n}));
    for k in 1..=max_k {
        let rec = recurrence_table(k, max_n)?;
        let closed = closed_table(k, max_n)?;
        for n in 1..=max_n {
            let show = |row: Vec<_>| {
                row.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            };
            r.expect_eq(
                format!("table/k={k},n={n}"),
                show(closed.row(n)),
                show(rec.row(n)),
            );
        }
        for n in 2..=max_n {
            for b in 1..=n {
                r.expect_eq(
                    format!("vandermonde/k={k},n={n},b={b}"),
                    verdict(true),
                    verdict(vandermonde_check(k, n, b)?),
                );
            }
            if k >= 2 {
                r.expect_eq(
                    format!("base-one/k={k},n={n}"),
                    verdict(true),
                    verdict(base_one_identity_check(k, n)?),
                );
            }
        }
    }
    Ok(r)
}

/// Totals from the terminating hypergeometric form against the closed sum.
pub fn hypergeometric_suite(max_k: usize, max_n: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("hypergeometric", json!({"max_k": max_k, "max_n": max_n}));
    for k in 1..=max_k {
        for n in 1..=max_n {
            r.expect_eq(
                format!("k={k},n={n}"),
                count_all_closed(k, n)?,
                count_all_hypergeometric(k, n)?,
            );
        }
    }
    Ok(r)
}

/// Reduce/expand round trips and fiber sizes for every `(n, b)` class with
/// `2 <= n <= max_n`.
pub fn bijection_suite(k: usize, max_n: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("bijection", json!({"k": k, "max_n": max_n}));
    for n in 2..=max_n {
        for b in 1..=n {
            let f = fiber_histogram(k, n, b)?;
            let actual = if f.ok {
                "consistent".to_string()
            } else {
                format!(
                    "{} round-trip failures, {} unexpected categories",
                    f.round_trip_failures.len(),
                    f.unexpected.len()
                )
            };
            r.push(Check {
                id: format!("k={k},n={n},b={b}"),
                expected: "consistent".into(),
                actual,
                pass: f.ok,
                detail: Some(serde_json::to_value(&f).expect("fiber report serializes")),
            });
        }
    }
    Ok(r)
}

/// Expected sizes of the four domino classes of `(n, b)` towers.
pub fn domino_class_sizes(n: usize, b: usize) -> [u64; 4] {
    let m = 2 * n as i64 - 3;
    let (n, b) = (n as i64, b as i64);
    let c = |j: i64| u64::try_from(binom(m, j)).unwrap_or(0);
    [c(n - b), c(n - b - 1), c(n - b - 1), c(n - b - 2)]
}

/// Domino class sizes by direct classification for `2 <= n <= max_n`.
pub fn domino_suite(max_n: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("domino", json!({"max_n": max_n}));
    for n in 2..=max_n {
        for b in 1..=n {
            let mut sizes = [0u64; 4];
            for t in enumerate_towers(TowerClassParams::new(2, n, b)?) {
                let i = match classify_domino(&t)? {
                    DominoClass::A => 0,
                    DominoClass::B => 1,
                    DominoClass::C => 2,
                    DominoClass::D => 3,
                };
                sizes[i] += 1;
            }
            r.expect_eq(
                format!("n={n},b={b}"),
                format!("{:?}", domino_class_sizes(n, b)),
                format!("{sizes:?}"),
            );
        }
    }
    Ok(r)
}

/// Compositions of `k` weighted by their first part, for every `k <= max_k`.
pub fn composition_suite(max_k: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("composition", json!({"max_k": max_k}));
    for k in 1..=max_k {
        for j in 0..k {
            r.expect_eq(
                format!("k={k},j={j}"),
                verdict(true),
                verdict(composition_sum_check(k, j)?),
            );
        }
    }
    Ok(r)
}

/// Denominator-cleared generating function check for every order up to
/// `max_order`, plus the helper coefficients.
pub fn gf_suite(max_order: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("gf", json!({"max_order": max_order}));
    for order in 1..=max_order {
        let g = d2_closed_form_check(order)?;
        let actual = match &g.mismatch {
            None => verdict(true).to_string(),
            Some(m) => format!("x^{} y^{}: {} != {}", m.n, m.b, m.lhs, m.rhs),
        };
        r.expect_eq(format!("order={order}"), verdict(true), actual);
    }
    let h = helper_series(max_order)?;
    for n in 2..=max_order {
        let n = n as i64;
        r.expect_eq(
            format!("helper/n={n}"),
            binom(2 * n - 3, n - 1),
            h.coeff(n as usize),
        );
    }
    Ok(r)
}

/// One point of an identity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityPoint {
    pub k: u32,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub float: bool,
}

fn as_exact(v: f64, min: u32, name: &str) -> Result<u32> {
    if v.fract() == 0.0 && v >= f64::from(min) && v <= f64::from(u32::MAX) {
        Ok(v as u32)
    } else {
        Err(Error::Domain(format!(
            "exact mode needs integer {name} >= {min}, got {v}; use float mode"
        )))
    }
}

fn identity_check(p: IdentityPoint) -> Result<Check> {
    let id = format!(
        "{}/k={},alpha={},beta={}",
        if p.float { "float" } else { "exact" },
        p.k,
        p.alpha,
        p.beta
    );
    if p.float {
        let f = kummer_like_float(p.k, p.alpha, p.beta)?;
        Ok(Check {
            id,
            expected: format!("rel_err <= {:e}", crate::hyperid::FLOAT_TOLERANCE),
            actual: format!("lhs={} rhs={} rel_err={:e}", f.lhs, f.rhs, f.rel_err),
            pass: f.pass,
            detail: None,
        })
    } else {
        let e = kummer_like_exact(
            p.k,
            as_exact(p.alpha, 1, "alpha")?,
            as_exact(p.beta, 0, "beta")?,
        )?;
        Ok(Check {
            id,
            expected: e.lhs.to_string(),
            actual: e.rhs.to_string(),
            pass: e.equal,
            detail: None,
        })
    }
}

/// The hypergeometric identity at the given points.
pub fn identity_points_suite(points: &[IdentityPoint]) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("identity", json!({"points": points.len()}));
    for &p in points {
        r.push(identity_check(p)?);
    }
    Ok(r)
}

/// Exact identity on the integer box `k <= max_k`, `alpha, beta <= max_ab`,
/// the fixed real grid, and tower totals as identity instances.
pub fn identity_suite(max_k: u32, max_ab: u32) -> Result<VerificationReport> {
    let mut points = Vec::new();
    for k in 1..=max_k {
        for alpha in 1..=max_ab {
            for beta in 0..=max_ab {
                points.push(IdentityPoint {
                    k,
                    alpha: f64::from(alpha),
                    beta: f64::from(beta),
                    float: false,
                });
            }
        }
    }
    points.extend(
        float_grid()
            .into_iter()
            .map(|(k, alpha, beta)| IdentityPoint {
                k,
                alpha,
                beta: f64::from(beta),
                float: true,
            }),
    );
    let mut r = identity_points_suite(&points)?;
    r.parameters = json!({"max_k": max_k, "max_ab": max_ab, "float_points": 50});
    for k in 2..=6 {
        for n in 1..=12 {
            let e = tower_total_instance(k, n)?;
            r.expect_eq(
                format!("totals/k={k},n={n}"),
                count_all_closed(k, n)?,
                &e.rhs,
            );
            r.expect_eq(format!("totals-lhs/k={k},n={n}"), &e.rhs, &e.lhs);
        }
    }
    Ok(r)
}

/// Every suite at the given scale.
pub fn all_suites(max_k: usize, max_n: usize) -> Result<VerificationReport> {
    let mut r = VerificationReport::new("all", json!({"max_k": max_k, "max_n": max_n}));
    r.absorb(enumeration_suite(max_k, max_n)?);
    r.absorb(recurrence_suite(max_k, max_n)?);
    r.absorb(hypergeometric_suite(max_k, max_n)?);
    for k in 1..=max_k {
        r.absorb(bijection_suite(k, max_n)?);
    }
    r.absorb(domino_suite(max_n)?);
    r.absorb(composition_suite(10)?);
    r.absorb(gf_suite(10)?);
    r.absorb(identity_suite(4, 8)?);
    Ok(r)
}
