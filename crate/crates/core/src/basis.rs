//! Orthonormal bases of L²([0,1]) with evaluation, antiderivatives, and
//! sup-norm bounds. Only the cosine system ships; indices are 1-based.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Identifies an orthonormal basis of L²([0,1]).
///
/// `Cosine` is φ₁ ≡ 1, φ_j(x) = √2·cos(π(j−1)x) for j ≥ 2. The enum exists so
/// new bases can slot in behind the same id without touching the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisId {
    Cosine,
}

impl BasisId {
    /// Evaluates φ_j(x).
    ///
    /// Panics when j < 1 or x is outside [0, 1].
    pub fn eval(self, j: usize, x: f64) -> f64 {
        check_domain(j, x);
        match self {
            BasisId::Cosine => {
                if j == 1 {
                    1.0
                } else {
                    SQRT_2 * (PI * (j - 1) as f64 * x).cos()
                }
            }
        }
    }

    /// Evaluates ∫₀ˣ φ_j(t) dt.
    ///
    /// The sine factor vanishes exactly whenever (j−1)·x is an integer, so
    /// cumulative integrals hit 0 at x = 0 and 0 at x = 1 without rounding
    /// dust; the CDF of a unit-coefficient series is then exactly x at the
    /// endpoints. Panics on the same domain violations as [`BasisId::eval`].
    pub fn antiderivative(self, j: usize, x: f64) -> f64 {
        check_domain(j, x);
        match self {
            BasisId::Cosine => {
                if j == 1 {
                    return x;
                }
                let m = (j - 1) as f64;
                let t = m * x;
                if t.fract() == 0.0 {
                    0.0
                } else {
                    SQRT_2 * (PI * t).sin() / (PI * m)
                }
            }
        }
    }

    /// Tightest known bound M_J on max_{1 ≤ j ≤ J} sup |φ_j|.
    pub fn sup_bound(self, j_max: usize) -> f64 {
        assert!(j_max >= 1, "cutoff must be >= 1, got {j_max}");
        match self {
            BasisId::Cosine => {
                if j_max == 1 {
                    1.0
                } else {
                    SQRT_2
                }
            }
        }
    }

    /// Sup-norm bounds for a set of cutoffs.
    pub fn bound_profile(self, cutoffs: &[usize]) -> BasisBoundProfile {
        let m_of_j = cutoffs.iter().map(|&j| (j, self.sup_bound(j))).collect();
        BasisBoundProfile { m_of_j }
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisId::Cosine => f.write_str("cosine"),
        }
    }
}

impl FromStr for BasisId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cosine" => Ok(BasisId::Cosine),
            other => Err(format!("unknown basis {other:?} (expected \"cosine\")")),
        }
    }
}

/// Sup-norm bounds M_J keyed by cutoff J; nondecreasing in J.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisBoundProfile {
    pub m_of_j: BTreeMap<usize, f64>,
}

fn check_domain(j: usize, x: f64) {
    assert!(j >= 1, "basis index must be >= 1, got {j}");
    assert!(
        (0.0..=1.0).contains(&x),
        "basis argument {x} outside [0, 1]"
    );
}
