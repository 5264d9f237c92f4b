//! Finite coefficient series, the approximate-sparsity class checks, and the
//! ten-term design density used throughout the simulation study.

use serde::{Deserialize, Serialize};

use crate::basis::BasisId;

/// Parameters (A, k, C) of the sparsity classes: A caps the sorted
/// coefficient decay A·j^{-k}, C caps the tail sums C·J^{-2k+1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityParams {
    pub a: f64,
    pub k: f64,
    pub c: f64,
}

impl SparsityParams {
    /// Validates A > 0, k > 1/2, C > 0.
    pub fn new(a: f64, k: f64, c: f64) -> crate::Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(crate::Error::InvalidConfig {
                reason: format!("sparsity parameter A must be positive, got {a}"),
            });
        }
        if !(k > 0.5 && k.is_finite()) {
            return Err(crate::Error::InvalidConfig {
                reason: format!("sparsity parameter k must exceed 1/2, got {k}"),
            });
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(crate::Error::InvalidConfig {
                reason: format!("sparsity parameter C must be positive, got {c}"),
            });
        }
        Ok(SparsityParams { a, k, c })
    }
}

/// Pointwise evaluation shared by series densities and their projections.
pub trait Density {
    fn density_at(&self, x: f64) -> f64;
}

/// A finite orthogonal series Σ θ_j φ_j. `theta[0]` is the coefficient of
/// the constant term φ₁; everything beyond the stored vector is zero.
///
/// The struct does not promise the series is a density: thresholded
/// estimates dip negative, and only the sampler insists on θ₁ = 1 and
/// nonnegativity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDensity {
    pub basis: BasisId,
    pub theta: Vec<f64>,
}

impl SeriesDensity {
    /// Panics if any coefficient is not finite.
    pub fn new(basis: BasisId, theta: Vec<f64>) -> Self {
        assert!(
            theta.iter().all(|t| t.is_finite()),
            "series coefficients must be finite"
        );
        SeriesDensity { basis, theta }
    }

    /// Number of stored coefficients (trailing zeros included).
    pub fn support_len(&self) -> usize {
        self.theta.len()
    }

    /// 1-based coefficient lookup; zero beyond the stored support.
    pub fn coefficient(&self, j: usize) -> f64 {
        assert!(j >= 1, "coefficient index is 1-based, got 0");
        self.theta.get(j - 1).copied().unwrap_or(0.0)
    }

    /// Σ θ_j φ_j(x). Zero coefficients are skipped, which makes evaluation
    /// cheap for thresholded series. Panics for x outside [0,1].
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &t) in self.theta.iter().enumerate() {
            if t != 0.0 {
                acc += t * self.basis.eval(i + 1, x);
            }
        }
        acc
    }

    /// ∫₀¹ Σ θ_j φ_j computed from the antiderivatives. Every non-constant
    /// cosine term integrates to exactly zero, so this returns θ₁ without
    /// quadrature error.
    pub fn exact_integral(&self) -> f64 {
        let mut acc = 0.0;
        for (i, &t) in self.theta.iter().enumerate() {
            if t != 0.0 {
                let j = i + 1;
                acc += t * (self.basis.antiderivative(j, 1.0) - self.basis.antiderivative(j, 0.0));
            }
        }
        acc
    }

    /// Minimum of the series over the uniform grid i/(points-1),
    /// i = 0..points (endpoints included). Panics if points < 2.
    pub fn min_on_grid(&self, points: usize) -> f64 {
        assert!(points >= 2, "grid needs at least 2 points, got {points}");
        let denom = (points - 1) as f64;
        (0..points)
            .map(|i| self.eval(i as f64 / denom))
            .fold(f64::INFINITY, f64::min)
    }
}

impl Density for SeriesDensity {
    fn density_at(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

/// The ten-term cosine-series density of the simulation study: θ₁ = 1 and
/// nine further coefficients whose sorted magnitudes are exactly 2·r^{-2}
/// for ranks r = 2..10, scattered over indices up to 15.
pub fn design_density() -> SeriesDensity {
    let theta = vec![
        1.0,
        2.0 / 4.0,
        2.0 / 9.0,
        0.0,
        2.0 / 100.0,
        0.0,
        2.0 / 49.0,
        2.0 / 64.0,
        0.0,
        0.0,
        2.0 / 16.0,
        0.0,
        2.0 / 36.0,
        2.0 / 25.0,
        2.0 / 81.0,
    ];
    SeriesDensity::new(BasisId::Cosine, theta)
}

/// The uniform density on [0,1]: the constant term alone.
pub fn uniform_density() -> SeriesDensity {
    SeriesDensity::new(BasisId::Cosine, vec![1.0])
}

/// Outcome of the two-part sparsity-class check.
///
/// `first_violation` is the 1-based rank of the first sorted-order decay
/// violation when `ordered_ok` fails, otherwise the first cutoff J whose
/// tail sum is too large when `tail_ok` fails, otherwise `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub ordered_ok: bool,
    pub tail_ok: bool,
    pub first_violation: Option<usize>,
}

/// J^{2k-1} · Σ_{j>J} θ_j² for J = 1..=len; element J-1 belongs to cutoff J.
/// Both the tail check and the minimal constant reduce to this vector, so
/// "minimal_tail_constant(θ,k) ≤ C" and "tail_ok at C" agree bit for bit.
fn tail_products(theta: &[f64], k: f64) -> Vec<f64> {
    let len = theta.len();
    let mut products = vec![0.0; len];
    let mut tail = 0.0;
    for jj in (1..=len).rev() {
        products[jj - 1] = (jj as f64).powf(2.0 * k - 1.0) * tail;
        tail += theta[jj - 1] * theta[jj - 1];
    }
    products
}

/// Magnitudes sorted descending; ties keep ascending original index
/// (stable sort), though nothing downstream depends on the tie order.
fn sorted_magnitudes(theta: &[f64]) -> Vec<f64> {
    let mut mags: Vec<f64> = theta.iter().map(|t| t.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).expect("finite coefficients"));
    mags
}

/// Checks both conditions of the approximate-sparsity class on a finitely
/// supported coefficient vector: the magnitude-sorted decay |θ_(j)| ≤ A·j^{-k}
/// and the tail bound Σ_{j>J} θ_j² ≤ C·J^{-2k+1} for every J ≥ 1. Finite
/// support makes both quantifiers exact.
pub fn check_membership_theta(theta: &[f64], params: SparsityParams) -> MembershipReport {
    let mut ordered_violation = None;
    for (rank0, mag) in sorted_magnitudes(theta).iter().enumerate() {
        let j = rank0 + 1;
        if *mag > params.a / (j as f64).powf(params.k) {
            ordered_violation = Some(j);
            break;
        }
    }
    let products = tail_products(theta, params.k);
    let tail_violation = products.iter().position(|&v| v > params.c).map(|p| p + 1);
    MembershipReport {
        ordered_ok: ordered_violation.is_none(),
        tail_ok: tail_violation.is_none(),
        first_violation: ordered_violation.or(tail_violation),
    }
}

/// Unordered per-index decay: |θ_j| ≤ A·j^{-k} for every j ≥ 1.
pub fn check_membership_ek(theta: &[f64], a: f64, k: f64) -> bool {
    theta
        .iter()
        .enumerate()
        .all(|(i, t)| t.abs() <= a / ((i + 1) as f64).powf(k))
}

/// The enclosing class: |θ₁| ≤ A together with the tail bound alone.
pub fn check_membership_ak(theta: &[f64], a: f64, k: f64, c: f64) -> bool {
    let first_ok = theta.first().is_none_or(|t| t.abs() <= a);
    first_ok && tail_products(theta, k).iter().all(|&v| v <= c)
}

/// max over J ≥ 1 of J^{2k-1}·Σ_{j>J} θ_j²: the smallest C for which the
/// tail condition holds.
pub fn minimal_tail_constant(theta: &[f64], k: f64) -> f64 {
    tail_products(theta, k).into_iter().fold(0.0, f64::max)
}
