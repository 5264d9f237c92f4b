//! The data-driven penalty λ, hard-threshold selection, assembly of the
//! thresholded series, and the sample-size regularity diagnostics.

use serde::{Deserialize, Serialize};

use crate::basis::BasisId;
use crate::coeffs::CoefficientEstimate;
use crate::error::{Error, Result};
use crate::numerics::std_normal_quantile;
use crate::sparsity::SeriesDensity;

/// Result of hard-thresholding a coefficient estimate.
///
/// `selected` is ascending and 1-based; `theta_tilde[j-1]` keeps θ̂_j for
/// selected j and is zero otherwise. `forced_constant` records that the
/// constant term failed |θ̂₁| ≥ multiplier·λ and was retained anyway; the
/// estimator cannot integrate to one without it.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub lambda: f64,
    pub multiplier: f64,
    pub selected: Vec<usize>,
    pub theta_tilde: Vec<f64>,
    pub forced_constant: bool,
}

/// Condition checks for the (n, J) pairing.
///
/// `p` solves J = n^p; `holds_ii` is p > 0, `holds_iii` is M_J² ≤ n/log n,
/// and `holds_iv` is (J·M_J/n)·√α_n ≤ n^{-(2k-1)/(2k)} with
/// α_n = (Jn)⁻² + 2n⁻³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityCheck {
    pub p: f64,
    pub holds_ii: bool,
    pub holds_iii: bool,
    pub holds_iv: bool,
    pub alpha_n: f64,
}

/// The penalty λ = √(log J / n) · Φ⁻¹(1 - (1/(2√(2π)))·(1/√(2 log J))·(1/J))
/// · max_j √(second_moments[j]).
///
/// Needs J ≥ 2 (log J must be positive) and n ≥ 2. The association of the
/// final product is fixed so that scaling every second moment by 4 scales λ
/// by exactly 2.
pub fn compute_lambda(est: &CoefficientEstimate) -> Result<f64> {
    let j = est.j_max();
    if j < 2 {
        return Err(Error::CutoffTooSmall { j });
    }
    if est.n < 2 {
        return Err(Error::SampleTooSmall { n: est.n });
    }
    let jf = j as f64;
    let log_j = jf.ln();
    let tail_mass = 1.0 / (2.0 * (2.0 * std::f64::consts::PI).sqrt())
        / (2.0 * log_j).sqrt()
        / jf;
    let quantile = std_normal_quantile(1.0 - tail_mass);
    let rate = (log_j / est.n as f64).sqrt();
    let max_sm = est.second_moments.iter().fold(0.0, |m, &s| f64::max(m, s));
    Ok(rate * quantile * max_sm.sqrt())
}

/// Keeps every coefficient with |θ̂_j| ≥ multiplier·λ, ties included, plus
/// the constant term unconditionally.
pub fn select(est: &CoefficientEstimate, lambda: f64, multiplier: f64) -> ThresholdReport {
    assert!(
        lambda >= 0.0 && lambda.is_finite(),
        "lambda must be finite and nonnegative, got {lambda}"
    );
    assert!(
        multiplier > 0.0 && multiplier.is_finite(),
        "multiplier must be positive, got {multiplier}"
    );
    let cut = multiplier * lambda;
    let mut selected = Vec::new();
    let mut theta_tilde = vec![0.0; est.theta_hat.len()];
    let mut forced_constant = false;
    for (i, &t) in est.theta_hat.iter().enumerate() {
        let keep = t.abs() >= cut || i == 0;
        if keep {
            if i == 0 && t.abs() < cut {
                forced_constant = true;
            }
            selected.push(i + 1);
            theta_tilde[i] = t;
        }
    }
    ThresholdReport {
        lambda,
        multiplier,
        selected,
        theta_tilde,
        forced_constant,
    }
}

/// The thresholded series Σ_{j∈T} θ̂_j φ_j as an evaluable series.
pub fn build_estimator(report: &ThresholdReport, basis: BasisId) -> SeriesDensity {
    SeriesDensity::new(basis, report.theta_tilde.clone())
}

/// Evaluates the sample-size conditions for a cutoff J, sup bound M_J, and
/// smoothness k > 1/2. Panics for n < 3 (log n must exceed 1).
pub fn check_regularity(n: usize, j: usize, m_j: f64, k: f64) -> RegularityCheck {
    assert!(n >= 3, "regularity check needs n >= 3, got {n}");
    assert!(j >= 1, "cutoff must be >= 1, got {j}");
    assert!(k > 0.5, "smoothness k must exceed 1/2, got {k}");
    let nf = n as f64;
    let jf = j as f64;
    let p = jf.ln() / nf.ln();
    let jn = jf * nf;
    let alpha_n = 1.0 / (jn * jn) + 2.0 / nf.powi(3);
    let holds_ii = p > 0.0;
    let holds_iii = m_j * m_j <= nf / nf.ln();
    let holds_iv = (jf * m_j / nf) * alpha_n.sqrt() <= nf.powf(-(2.0 * k - 1.0) / (2.0 * k));
    RegularityCheck {
        p,
        holds_ii,
        holds_iii,
        holds_iv,
        alpha_n,
    }
}
