//! Closed-form sample-complexity, utility, and compression bounds.
//!
//! Natural logarithms throughout. The asymptotic statements carry no
//! explicit constants, so every report records the constant it used.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Realizable,
    Agnostic,
    Compression,
    Utility,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Realizable => "realizable",
            BoundKind::Agnostic => "agnostic",
            BoundKind::Compression => "compression",
            BoundKind::Utility => "utility",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: BoundKind,
    pub inputs: BTreeMap<String, f64>,
    pub value: f64,
    pub constant: f64,
}

impl BoundReport {
    fn new(name: BoundKind, inputs: &[(&str, f64)], value: f64, constant: f64) -> Self {
        Self {
            name,
            inputs: inputs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            value,
            constant,
        }
    }
}

fn in_unit(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} not in (0, 1]")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} must be positive")))
    }
}

fn bracket(d: usize, epsilon: f64, alpha: f64, beta: f64) -> f64 {
    let d = d as f64;
    d * d * (d / (epsilon * alpha)).ln() + (1.0 / beta).ln()
}

fn sample_inputs(d: usize, epsilon: f64, alpha: f64, beta: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    in_unit("epsilon", epsilon)?;
    in_unit("alpha", alpha)?;
    in_unit("beta", beta)
}

/// `c (d² ln(d/(εα)) + ln(1/β)) / (εα)`.
pub fn realizable_sample_bound(d: usize, epsilon: f64, alpha: f64, beta: f64, c: f64) -> Result<BoundReport> {
    sample_inputs(d, epsilon, alpha, beta)?;
    positive("c", c)?;
    let value = c * bracket(d, epsilon, alpha, beta) / (epsilon * alpha);
    if value <= 0.0 {
        return Err(Error::DegenerateParameters(format!(
            "realizable bound evaluates to {value} at d={d}, epsilon={epsilon}, alpha={alpha}, beta={beta}"
        )));
    }
    Ok(BoundReport::new(
        BoundKind::Realizable,
        &[("d", d as f64), ("epsilon", epsilon), ("alpha", alpha), ("beta", beta)],
        value,
        c,
    ))
}

/// `c (d² ln(d/(εα)) + ln(1/β)) · max(1/α², 1/(εα))`.
pub fn agnostic_sample_bound(d: usize, epsilon: f64, alpha: f64, beta: f64, c: f64) -> Result<BoundReport> {
    sample_inputs(d, epsilon, alpha, beta)?;
    positive("c", c)?;
    let rate = (1.0 / (alpha * alpha)).max(1.0 / (epsilon * alpha));
    let value = c * bracket(d, epsilon, alpha, beta) * rate;
    if value <= 0.0 {
        return Err(Error::DegenerateParameters(format!(
            "agnostic bound evaluates to {value} at d={d}, epsilon={epsilon}, alpha={alpha}, beta={beta}"
        )));
    }
    Ok(BoundReport::new(
        BoundKind::Agnostic,
        &[("d", d as f64), ("epsilon", epsilon), ("alpha", alpha), ("beta", beta)],
        value,
        c,
    ))
}

/// `sqrt(err · 4k ln(n/β) / n) + 8k ln(n/β) / n + 2k / n`.
pub fn compression_bound(k: u64, n: u64, beta: f64, emp_err: f64) -> Result<BoundReport> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} must satisfy 1 <= k <= n = {n}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::OutOfRange(format!("beta = {beta} not in (0, 1)")));
    }
    if !(0.0..=1.0).contains(&emp_err) {
        return Err(Error::OutOfRange(format!("empirical error {emp_err} not in [0, 1]")));
    }
    let (kf, nf) = (k as f64, n as f64);
    let l = (nf / beta).ln();
    let value = (emp_err * 4.0 * kf * l / nf).sqrt() + 8.0 * kf * l / nf + 2.0 * kf / nf;
    Ok(BoundReport::new(
        BoundKind::Compression,
        &[("k", kf), ("n", nf), ("beta", beta), ("emp_err", emp_err)],
        value,
        1.0,
    ))
}

/// `(2 / (ε n)) (ln |G| + ln(1/β))`.
pub fn mechanism_utility_bound(class_size: u128, epsilon: f64, n: u64, beta: f64) -> Result<BoundReport> {
    if class_size == 0 {
        return Err(Error::OutOfRange("class size must be at least 1".into()));
    }
    positive("epsilon", epsilon)?;
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    in_unit("beta", beta)?;
    let value = 2.0 / (epsilon * n as f64) * ((class_size as f64).ln() + (1.0 / beta).ln());
    Ok(BoundReport::new(
        BoundKind::Utility,
        &[
            ("class_size", class_size as f64),
            ("epsilon", epsilon),
            ("n", n as f64),
            ("beta", beta),
        ],
        value,
        2.0,
    ))
}

/// Smallest `α ∈ (0, 1]` whose sample bound does not exceed `n`, by
/// bisection; `None` when even `α = 1` needs more than `n` samples.
pub fn implied_alpha(kind: BoundKind, d: usize, epsilon: f64, beta: f64, c: f64, n: f64) -> Option<f64> {
    let eval = |alpha: f64| -> Option<f64> {
        let r = match kind {
            BoundKind::Realizable => realizable_sample_bound(d, epsilon, alpha, beta, c),
            BoundKind::Agnostic => agnostic_sample_bound(d, epsilon, alpha, beta, c),
            _ => return None,
        };
        match r {
            Ok(r) => Some(r.value),
            Err(Error::DegenerateParameters(_)) => Some(0.0),
            Err(_) => None,
        }
    };
    if eval(1.0)? > n {
        return None;
    }
    // the bounds decrease in α wherever they are positive
    let (mut lo, mut hi) = (1e-12, 1.0);
    if eval(lo)? <= n {
        return Some(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? <= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn realizable_examples() {
        assert!(matches!(
            realizable_sample_bound(1, 1.0, 1.0, 1.0, 1.0),
            Err(Error::DegenerateParameters(_))
        ));
        let r = realizable_sample_bound(2, 0.5, 0.1, 0.05, 1.0).unwrap();
        assert_relative_eq!(r.value, (4.0 * 40f64.ln() + 20f64.ln()) / 0.05, max_relative = 1e-12);
        assert_relative_eq!(r.value, 355.025, epsilon = 0.001);
        assert_eq!(r.constant, 1.0);
        assert!(realizable_sample_bound(2, 1.5, 0.1, 0.05, 1.0).is_err());
        assert!(realizable_sample_bound(0, 0.5, 0.1, 0.05, 1.0).is_err());
    }

    #[test]
    fn doubling_d_quadruples_square_term() {
        // d / (εα) held fixed by doubling ε alongside d
        let a = realizable_sample_bound(2, 0.25, 0.1, 1.0, 1.0).unwrap();
        let b = realizable_sample_bound(4, 0.5, 0.1, 1.0, 1.0).unwrap();
        // with β = 1 the value is d² ln(80) / (εα); εα doubles
        assert_relative_eq!(b.value * 0.05 / (a.value * 0.025), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn agnostic_branches() {
        let a = agnostic_sample_bound(2, 1.0, 0.1, 0.05, 1.0).unwrap();
        let br = 4.0 * 20f64.ln() + 20f64.ln();
        assert_relative_eq!(a.value, br * 100.0, max_relative = 1e-12);
        let r = realizable_sample_bound(2, 1.0, 0.1, 0.05, 1.0).unwrap();
        assert_relative_eq!(a.value / r.value, 10.0, max_relative = 1e-12);
        let small_eps = agnostic_sample_bound(2, 0.05, 0.1, 0.05, 1.0).unwrap();
        let br = 4.0 * 400f64.ln() + 20f64.ln();
        assert_relative_eq!(small_eps.value, br / 0.005, max_relative = 1e-12);
    }

    #[test]
    fn compression_examples() {
        let z = compression_bound(4, 10_000, 0.05, 0.0).unwrap();
        let l = (10_000.0f64 / 0.05).ln();
        assert_relative_eq!(z.value, 32.0 * l / 1e4 + 8.0 / 1e4, max_relative = 1e-12);
        assert_relative_eq!(z.value, 0.039855, epsilon = 1e-5);
        let half = compression_bound(4, 20_000, 0.05, 0.0).unwrap();
        assert!(half.value < z.value);
        assert!(compression_bound(5, 4, 0.05, 0.0).is_err());
        assert!(compression_bound(1, 4, 0.05, 1.5).is_err());
    }

    #[test]
    fn utility_examples() {
        assert_eq!(mechanism_utility_bound(1, 1.0, 10, 1.0).unwrap().value, 0.0);
        let u = mechanism_utility_bound(11, 1.0, 100, 0.05).unwrap();
        assert_relative_eq!(u.value, 0.02 * (11f64.ln() + 20f64.ln()), max_relative = 1e-12);
        assert_relative_eq!(u.value, 0.10787, epsilon = 1e-5);
        assert_eq!(u.constant, 2.0);
    }

    #[test]
    fn implied_alpha_inverts() {
        let a = implied_alpha(BoundKind::Realizable, 1, 1.0, 0.05, 1.0, 1000.0).unwrap();
        let v = realizable_sample_bound(1, 1.0, a, 0.05, 1.0).unwrap().value;
        assert!((v - 1000.0).abs() < 1e-6 * 1000.0);
        assert_eq!(implied_alpha(BoundKind::Realizable, 3, 0.1, 0.05, 1.0, 5.0), None);
    }

    proptest! {
        #[test]
        fn monotone_directions(
            d in 1usize..5,
            eps in 0.01f64..0.9,
            alpha in 0.01f64..0.9,
            beta in 0.01f64..0.9,
            bump in 1.01f64..1.1,
        ) {
            for f in [realizable_sample_bound, agnostic_sample_bound] {
                let base = f(d, eps, alpha, beta, 1.0).unwrap().value;
                prop_assert!(f(d, (eps * bump).min(1.0), alpha, beta, 1.0).unwrap().value < base);
                prop_assert!(f(d, eps, (alpha * bump).min(1.0), beta, 1.0).unwrap().value < base);
                prop_assert!(f(d, eps, alpha, (beta * bump).min(1.0), 1.0).unwrap().value < base);
                prop_assert!(f(d + 1, eps, alpha, beta, 1.0).unwrap().value > base);
            }
        }

        #[test]
        fn compression_and_utility_monotone(
            k in 1u64..10,
            n in 10u64..10_000,
            beta in 0.01f64..0.9,
            err in 0.0f64..1.0,
            size in 1u128..1_000_000,
            eps in 0.01f64..2.0,
        ) {
            let c = compression_bound(k, n, beta, err).unwrap().value;
            prop_assert!(compression_bound(k, 2 * n, beta, err).unwrap().value < c);
            prop_assert!(compression_bound(k, n, beta / 2.0, err).unwrap().value > c);
            let u = mechanism_utility_bound(size, eps, n, beta).unwrap().value;
            prop_assert!(mechanism_utility_bound(size, eps, 2 * n, beta).unwrap().value < u);
            prop_assert!(mechanism_utility_bound(size, eps * 1.5, n, beta).unwrap().value < u);
            prop_assert!(mechanism_utility_bound(size + 1, eps, n, beta).unwrap().value > u);
        }
    }
}
