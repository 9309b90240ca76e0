//! Analytic bounds on the concurrence of states violating the CHSH
//! inequality under one-sided inefficiency.
//!
//! The inequality `tr[ρ𝓑] > 2(1+κ)` forces `0 > αC⁴ + βC² + γ`, whose larger
//! root in C² is the main bound. The derivation squares the estimate twice
//! and is valid on the window 1/2 ≤ η ≤ (1+κ)/√2; callers can evaluate the
//! closed forms outside that window with [`Window::Relaxed`], which is how
//! the η = 1 tightness case `C² < κ(2+κ)` is reproduced.

use crate::error::{Error, Result};

/// Coefficients of the quartic inequality 0 > αC⁴ + βC² + γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Whether to enforce the derivation window 1/2 ≤ η ≤ (1+κ)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Reject efficiencies outside the window where the squaring steps are
    /// justified.
    Strict,
    /// Evaluate the closed form anyway; results outside the window carry no
    /// derivation guarantee and are labeled accordingly by the CLI.
    Relaxed,
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::EfficiencyOutOfRange(eta));
    }
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa < 0.0 || !kappa.is_finite() {
        return Err(Error::OutOfRange {
            name: "kappa",
            value: kappa,
            range: "[0, inf)",
        });
    }
    Ok(())
}

/// α = (1−2η+2η²)², β = −2(2η−1)(κ(2+κ)+2η(1−η)),
/// γ = κ(2+κ)(κ(2+κ)+4η(1−η)).
pub fn quartic_coefficients(eta: f64, kappa: f64) -> Result<QuarticCoefficients> {
    check_eta(eta)?;
    check_kappa(kappa)?;
    let k2 = kappa * (2.0 + kappa);
    let ee = 2.0 * eta * (1.0 - eta);
    Ok(QuarticCoefficients {
        alpha: (1.0 - 2.0 * eta + 2.0 * eta * eta).powi(2),
        beta: -2.0 * (2.0 * eta - 1.0) * (k2 + ee),
        gamma: k2 * (k2 + 2.0 * ee),
    })
}

/// True iff 1/2 ≤ η ≤ (1+κ)/√2, the window on which the bound is derived.
pub fn in_derivation_window(eta: f64, kappa: f64) -> bool {
    eta >= 0.5 && eta <= (1.0 + kappa) / std::f64::consts::SQRT_2
}

/// Upper bound on C² for states with `tr[ρ𝓑] > 2(1+κ)`:
/// `[(2η−1)(κ(2+κ)+2η(1−η)) + 2η(1−η)(1+κ)√(1−κ(2+κ)−4η(1−η))]
///  / (1−2η+2η²)²`, the larger root of the quartic.
pub fn main_bound(eta: f64, kappa: f64, window: Window) -> Result<f64> {
    check_eta(eta)?;
    check_kappa(kappa)?;
    if window == Window::Strict {
        if eta < 0.5 {
            return Err(Error::WindowLow { eta });
        }
        let limit = (1.0 + kappa) / std::f64::consts::SQRT_2;
        if eta > limit {
            return Err(Error::WindowHigh { eta, limit });
        }
    }
    let k2 = kappa * (2.0 + kappa);
    let ee = 2.0 * eta * (1.0 - eta);
    let radicand = 1.0 - k2 - 2.0 * ee;
    if radicand < 0.0 {
        return Err(Error::NegativeDiscriminant { value: radicand });
    }
    let denominator = (1.0 - 2.0 * eta + 2.0 * eta * eta).powi(2);
    Ok(((2.0 * eta - 1.0) * (k2 + ee) + ee * (1.0 + kappa) * radicand.sqrt()) / denominator)
}

/// The κ = 0 bound 4η(1−η)(2η−1)/(1−2η+2η²)² on C² for any violation of the
/// locality threshold.
pub fn violation_ub(eta: f64, window: Window) -> Result<f64> {
    check_eta(eta)?;
    if window == Window::Strict {
        if eta < 0.5 {
            return Err(Error::WindowLow { eta });
        }
        let limit = 1.0 / std::f64::consts::SQRT_2;
        if eta > limit {
            return Err(Error::WindowHigh { eta, limit });
        }
    }
    let denominator = (1.0 - 2.0 * eta + 2.0 * eta * eta).powi(2);
    Ok(4.0 * eta * (1.0 - eta) * (2.0 * eta - 1.0) / denominator)
}

/// Evaluates `violation_ub(1/2 + ε)` for each ε. The leading behaviour is
/// 8ε + o(ε), so the sequence decreases toward the zero limit.
pub fn violation_ub_limit_check(epsilons: &[f64]) -> Result<Vec<(f64, f64)>> {
    for pair in epsilons.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::OutOfRange {
                name: "epsilons",
                value: pair[1],
                range: "strictly decreasing",
            });
        }
    }
    epsilons
        .iter()
        .map(|&eps| {
            if eps <= 0.0 || eps > 0.5 {
                return Err(Error::OutOfRange {
                    name: "epsilon",
                    value: eps,
                    range: "(0, 1/2]",
                });
            }
            let eta = 0.5 + eps;
            Ok((eta, violation_ub(eta, Window::Relaxed)?))
        })
        .collect()
}

/// Upper bound on κ_max for pure states with ⟨φ|𝓑′|φ⟩ > 2:
/// `[√2 − √(1+η²+2η cosθ_A cosθ_B+(1−η²)sinθ_A)] / [2(1−η)√(1−sinθ_A)] + 1/2`.
/// Returned raw, without clamping into [1/2, 1].
pub fn kappa_max_bound_single(eta: f64, theta_a: f64, theta_b: f64) -> Result<f64> {
    check_eta(eta)?;
    if eta >= 1.0 {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            range: "[0, 1) (denominator vanishes at eta = 1)",
        });
    }
    let sa = theta_a.sin();
    if (1.0 - sa).sqrt() * 2.0 * (1.0 - eta) < 1e-12 {
        return Err(Error::OutOfRange {
            name: "theta_a",
            value: theta_a,
            range: "theta_a != pi/2 (denominator vanishes)",
        });
    }
    let inner =
        1.0 + eta * eta + 2.0 * eta * theta_a.cos() * theta_b.cos() + (1.0 - eta * eta) * sa;
    // The radicand touches zero inside the domain; clip roundoff noise.
    let numerator = std::f64::consts::SQRT_2 - inner.max(0.0).sqrt();
    Ok(numerator / (2.0 * (1.0 - eta) * (1.0 - sa).sqrt()) + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_examples() {
        let q = quartic_coefficients(0.5, 0.0).unwrap();
        assert!((q.alpha - 0.25).abs() < 1e-15);
        assert_eq!(q.beta, 0.0);
        assert_eq!(q.gamma, 0.0);

        let q = quartic_coefficients(0.75, 0.0).unwrap();
        assert!((q.alpha - 0.390625).abs() < 1e-15);
        assert!((q.beta + 0.375).abs() < 1e-15);
        assert_eq!(q.gamma, 0.0);

        for eta in [0.0, 0.3, 0.6, 0.9] {
            for kappa in [0.0, 0.1, 0.5, 2.0] {
                assert!(quartic_coefficients(eta, kappa).unwrap().alpha >= 0.0);
            }
        }
        assert!(quartic_coefficients(1.2, 0.0).is_err());
        assert!(quartic_coefficients(0.5, -0.1).is_err());
    }

    #[test]
    fn main_bound_examples() {
        assert!(main_bound(0.5, 0.0, Window::Strict).unwrap().abs() < 1e-15);
        // η = 0.75 sits above 1/√2, so only the relaxed window admits it.
        assert!(matches!(
            main_bound(0.75, 0.0, Window::Strict),
            Err(Error::WindowHigh { .. })
        ));
        let b = main_bound(0.75, 0.0, Window::Relaxed).unwrap();
        assert!((b - 0.96).abs() < 1e-12);
    }

    #[test]
    fn main_bound_matches_quartic_root() {
        for eta in [0.55, 0.6, 0.65, 0.7] {
            for kappa in [0.0, 0.02, 0.05, 0.1] {
                if !in_derivation_window(eta, kappa) {
                    continue;
                }
                let bound = match main_bound(eta, kappa, Window::Strict) {
                    Ok(b) => b,
                    Err(Error::NegativeDiscriminant { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let q = quartic_coefficients(eta, kappa).unwrap();
                let disc = q.beta * q.beta - 4.0 * q.alpha * q.gamma;
                assert!(disc >= -1e-12);
                let root = (-q.beta + disc.max(0.0).sqrt()) / (2.0 * q.alpha);
                assert!(
                    (bound - root).abs() < 1e-9,
                    "eta={eta} kappa={kappa}: {bound} vs {root}"
                );
            }
        }
    }

    #[test]
    fn main_bound_tight_case_at_full_efficiency() {
        // Analytic continuation at η = 1 gives C² < κ(2+κ).
        for kappa in [0.0, 0.05, 0.1, 0.2, 0.4] {
            let b = main_bound(1.0, kappa, Window::Relaxed).unwrap();
            assert!((b - kappa * (2.0 + kappa)).abs() < 1e-12, "kappa={kappa}");
        }
    }

    #[test]
    fn violation_ub_examples() {
        assert_eq!(violation_ub(0.5, Window::Strict).unwrap(), 0.0);
        assert!((violation_ub(0.6, Window::Strict).unwrap() - 0.192 / 0.2704).abs() < 1e-10);
        assert!(matches!(
            violation_ub(0.75, Window::Strict),
            Err(Error::WindowHigh { .. })
        ));
        assert!((violation_ub(0.75, Window::Relaxed).unwrap() - 0.375 / 0.390625).abs() < 1e-12);
        assert!(matches!(
            violation_ub(0.4, Window::Strict),
            Err(Error::WindowLow { .. })
        ));
    }

    #[test]
    fn violation_ub_equals_main_bound_at_zero_kappa() {
        let mut eta = 0.5;
        while eta <= 1.0 / std::f64::consts::SQRT_2 {
            let a = violation_ub(eta, Window::Strict).unwrap();
            let b = main_bound(eta, 0.0, Window::Strict).unwrap();
            assert!((a - b).abs() < 1e-12, "eta={eta}");
            eta += 0.01;
        }
    }

    #[test]
    fn limit_check_decreases_to_zero() {
        let eps = [0.1, 0.01, 1e-3, 1e-4, 1e-6];
        let rows = violation_ub_limit_check(&eps).unwrap();
        assert!((rows[0].1 - 0.7100591715976331).abs() < 1e-10);
        assert!((rows[1].1 - 0.0799).abs() < 1e-3);
        for pair in rows.windows(2) {
            assert!(pair[1].1 < pair[0].1);
        }
        for (&eps, &(_, bound)) in eps.iter().zip(&rows) {
            if eps <= 0.01 {
                assert!(bound <= 20.0 * eps, "eps={eps}: bound={bound}");
            }
        }
        assert!(rows.last().unwrap().1 < 2e-5);

        assert!(violation_ub_limit_check(&[0.01, 0.1]).is_err());
        assert!(violation_ub_limit_check(&[0.1, -0.2]).is_err());
    }

    #[test]
    fn kappa_bound_examples() {
        // Limit η→0, θ_A→−π/2⁺ converges to 1.
        let b = kappa_max_bound_single(1e-6, -std::f64::consts::FRAC_PI_2 + 1e-6, 0.3).unwrap();
        assert!((b - 1.0).abs() < 1e-4);

        let b = kappa_max_bound_single(0.5, 0.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((b - (std::f64::consts::SQRT_2 - 1.25f64.sqrt() + 0.5)).abs() < 1e-12);

        // Raw formula may fall below 1/2; no clamping is applied.
        let b = kappa_max_bound_single(0.5, 0.0, 0.0).unwrap();
        assert!((b - (std::f64::consts::SQRT_2 - 1.0)).abs() < 1e-12);
        assert!(b < 0.5);
    }

    #[test]
    fn kappa_bound_domain_errors() {
        assert!(kappa_max_bound_single(1.0, 0.0, 0.0).is_err());
        assert!(kappa_max_bound_single(0.5, std::f64::consts::FRAC_PI_2, 0.0).is_err());
        assert!(kappa_max_bound_single(-0.1, 0.0, 0.0).is_err());
    }
}
