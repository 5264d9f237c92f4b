//! Samples on [0,1] and sample-mean Fourier coefficient estimates, together
//! with the residual second moments that feed the threshold penalty.

use std::f64::consts::{PI, SQRT_2};
use std::io::{BufRead, Write};

use crate::basis::BasisId;
use crate::error::{Error, Result};

/// A nonempty i.i.d. sample with every value in [0,1]. When the sample came
/// out of the library's own generator, `seed_provenance` records the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    seed_provenance: Option<u64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Sample::with_provenance(values, None)
    }

    /// Validates and wraps the values; `line` in errors is the 1-based
    /// position within the vector.
    pub fn with_provenance(values: Vec<f64>, seed: Option<u64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::SampleOutOfRange {
                    line: i + 1,
                    value: v,
                });
            }
        }
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Sample {
            values,
            seed_provenance: seed,
        })
    }

    /// Reads one value per line; blank lines are ignored, anything else must
    /// parse as a real in [0,1]. Errors carry the offending line number.
    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut values = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            let v: f64 = text.parse().map_err(|_| Error::SampleParse {
                line: idx + 1,
                text: text.to_string(),
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::SampleOutOfRange {
                    line: idx + 1,
                    value: v,
                });
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Sample {
            values,
            seed_provenance: None,
        })
    }

    /// Writes one value per line at 17 significant digits, enough to
    /// round-trip every f64 bit pattern.
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        for v in &self.values {
            writeln!(w, "{v:.16e}")?;
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed_provenance(&self) -> Option<u64> {
        self.seed_provenance
    }
}

/// Sample-mean coefficient estimates θ̂_j = n⁻¹Σφ_j(Xᵢ) for j = 1..=J
/// (index 0 holds j = 1), with the centered second moments
/// n⁻¹Σ(φ_j(Xᵢ) - θ̂_j)² alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientEstimate {
    pub theta_hat: Vec<f64>,
    pub second_moments: Vec<f64>,
    pub n: usize,
    pub basis: BasisId,
}

impl CoefficientEstimate {
    pub fn j_max(&self) -> usize {
        self.theta_hat.len()
    }
}

/// Estimates the first `j_max` coefficients from the sample.
///
/// The constant term is handled analytically: θ̂₁ = 1 and its residual
/// moment is 0, with no estimation error. For the cosine terms the per-sample
/// column (φ_2(x), ..., φ_J(x)) comes from the three-term recurrence
/// cos(m t) = 2 cos(t) cos((m-1)t) - cos((m-2)t), one multiply-add per entry
/// instead of a cosine call; a unit test pins the recurrence against direct
/// evaluation. Second moments use n⁻¹Σφ² - θ̂² in one pass, clamping the
/// tiny negative values cancellation can leave on near-constant columns.
pub fn estimate_coefficients(sample: &Sample, basis: BasisId, j_max: usize) -> CoefficientEstimate {
    assert!(j_max >= 1, "need at least the constant term, got J = 0");
    let n = sample.len();
    let nf = n as f64;
    let mut sums = vec![0.0; j_max];
    let mut sums_sq = vec![0.0; j_max];
    match basis {
        BasisId::Cosine => {
            for &x in sample.values() {
                let c1 = (PI * x).cos();
                let two_c1 = 2.0 * c1;
                let mut c_prev = 1.0; // cos(0)
                let mut c = c1; // cos(pi x)
                for j in 2..=j_max {
                    let phi = SQRT_2 * c;
                    sums[j - 1] += phi;
                    sums_sq[j - 1] += phi * phi;
                    (c_prev, c) = (c, two_c1 * c - c_prev);
                }
            }
        }
    }
    let mut theta_hat = vec![0.0; j_max];
    let mut second_moments = vec![0.0; j_max];
    theta_hat[0] = 1.0;
    for j in 2..=j_max {
        let mean = sums[j - 1] / nf;
        let sm = sums_sq[j - 1] / nf - mean * mean;
        debug_assert!(
            sm >= -1e-12,
            "second moment of column {j} is {sm}, far below zero"
        );
        theta_hat[j - 1] = mean;
        second_moments[j - 1] = if sm < 0.0 { 0.0 } else { sm };
    }
    CoefficientEstimate {
        theta_hat,
        second_moments,
        n,
        basis,
    }
}

/// max_j |θ̂_j - θ_j| against a truth vector of the same length.
pub fn max_deviation(est: &CoefficientEstimate, truth: &[f64]) -> Result<f64> {
    if est.theta_hat.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: est.theta_hat.len(),
            right: truth.len(),
        });
    }
    Ok(est
        .theta_hat
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
