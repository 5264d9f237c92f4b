//! Inverse-transform sampling from nonnegative series densities, with the
//! closed-form CDF that the basis antiderivatives provide, plus the
//! Kolmogorov-Smirnov statistic used to check sampler fidelity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffs::Sample;
use crate::error::{Error, Result};
use crate::sparsity::SeriesDensity;

/// How samples are generated; only inversion of the analytic CDF ships.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMethod {
    InverseTransform,
}

/// Sampler settings: base seed, method, and the tolerance on |F(x) - u|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub method: SamplingMethod,
    pub root_tol: f64,
}

impl SamplerConfig {
    /// Inverse transform with the default 1e-12 inversion tolerance.
    pub fn new(seed: u64) -> Self {
        SamplerConfig {
            seed,
            method: SamplingMethod::InverseTransform,
            root_tol: 1e-12,
        }
    }
}

/// F(x) = Σ θ_j ∫₀ˣ φ_j. Exactly 0 at x = 0 and exactly θ₁ at x = 1, since
/// every sine factor vanishes at both endpoints.
pub fn cdf(f: &SeriesDensity, x: f64) -> f64 {
    let mut acc = 0.0;
    for (i, &t) in f.theta.iter().enumerate() {
        if t != 0.0 {
            acc += t * f.basis.antiderivative(i + 1, x);
        }
    }
    acc
}

/// Number of cells in the precomputed CDF bracket grid. 256 cells keep the
/// per-draw Newton iteration down to two or three steps.
const GRID_CELLS: usize = 256;

/// Density floor below which the CDF is treated as flat: no Newton step and
/// no |F(x) - u| convergence claim, only bisection toward the left endpoint
/// of the flat stretch.
const FLAT_DENSITY: f64 = 1e-8;

/// Generic monotone-CDF inverter: a coarse precomputed grid supplies the
/// initial bracket, regula falsi supplies the first candidate, and a
/// safeguarded Newton iteration maintains F(hi) >= u > F(lo) throughout.
struct CdfInverter<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    cdf: F,
    pdf: G,
    grid_x: Vec<f64>,
    grid_f: Vec<f64>,
    root_tol: f64,
}

impl<F, G> CdfInverter<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    fn new(cdf: F, pdf: G, root_tol: f64) -> Self {
        let grid_x: Vec<f64> = (0..=GRID_CELLS)
            .map(|g| g as f64 / GRID_CELLS as f64)
            .collect();
        let mut grid_f: Vec<f64> = grid_x.iter().map(|&x| (cdf)(x)).collect();
        // Rounding can leave ulp-level dips; partition_point needs the
        // array itself to be nondecreasing.
        for g in 1..grid_f.len() {
            grid_f[g] = grid_f[g].max(grid_f[g - 1]);
        }
        CdfInverter {
            cdf,
            pdf,
            grid_x,
            grid_f,
            root_tol,
        }
    }

    /// Solves F(x) = u for u in [0, 1).
    fn invert(&self, u: f64) -> Result<f64> {
        let idx = self.grid_f.partition_point(|&fv| fv < u);
        if idx == 0 {
            return Ok(self.grid_x[0]);
        }
        if idx == self.grid_f.len() {
            return Err(Error::RootSearch { u });
        }
        let mut lo = self.grid_x[idx - 1];
        let mut hi = self.grid_x[idx];
        let (f_lo, f_hi) = (self.grid_f[idx - 1], self.grid_f[idx]);
        let mut x = if f_hi > f_lo {
            lo + (u - f_lo) * (hi - lo) / (f_hi - f_lo)
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..200 {
            let r = (self.cdf)(x) - u;
            let dens = (self.pdf)(x);
            if r.abs() <= self.root_tol && dens > FLAT_DENSITY {
                return Ok(x);
            }
            if r >= 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            // On a flat stretch F(x) >= u holds all the way down to the left
            // endpoint of the preimage, so the shrinking bracket converges
            // there; hand back that endpoint.
            if hi - lo <= 1e-14 {
                return Ok(hi);
            }
            let newton = x - r / dens;
            x = if dens > FLAT_DENSITY && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(Error::RootSearch { u })
    }
}

/// Checks θ₁ = 1 and grid nonnegativity, the two requirements for the
/// series to be an invertible distribution.
fn validate_density(f: &SeriesDensity) -> Result<()> {
    let first = f.coefficient(1);
    if (first - 1.0).abs() > 1e-9 {
        return Err(Error::NotADensity {
            reason: format!("constant coefficient is {first}, so the total mass is not 1"),
        });
    }
    let min = f.min_on_grid(10_001);
    if min < -1e-9 {
        return Err(Error::NotADensity {
            reason: format!("negative values on [0,1] (grid minimum {min:e})"),
        });
    }
    Ok(())
}

/// Inverts the analytic CDF at a single point; used by tests and diagnostic
/// tooling. Builds the bracket grid on every call, so prefer [`draw`] for
/// bulk generation.
pub fn invert_cdf(f: &SeriesDensity, u: f64, root_tol: f64) -> Result<f64> {
    assert!((0.0..1.0).contains(&u), "u must lie in [0,1), got {u}");
    validate_density(f)?;
    CdfInverter::new(|x| cdf(f, x), |x| f.eval(x), root_tol).invert(u)
}

/// Draws n values from the density using the config's base seed with the
/// generator's stream parameter left at zero.
pub fn draw(f: &SeriesDensity, n: usize, cfg: &SamplerConfig) -> Result<Sample> {
    draw_with_stream(f, n, cfg, 0)
}

/// Draws n values on a numbered generator stream. Streams are independent
/// for distinct ids under the same seed, which gives every Monte-Carlo
/// replication its own reproducible randomness.
pub fn draw_with_stream(
    f: &SeriesDensity,
    n: usize,
    cfg: &SamplerConfig,
    stream: u64,
) -> Result<Sample> {
    assert!(n >= 1, "cannot draw an empty sample");
    validate_density(f)?;
    let SamplingMethod::InverseTransform = cfg.method;
    let inverter = CdfInverter::new(|x| cdf(f, x), |x| f.eval(x), cfg.root_tol);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen();
        values.push(inverter.invert(u)?);
    }
    Sample::with_provenance(values, Some(cfg.seed))
}

/// Two-sided Kolmogorov-Smirnov statistic of the sample against the
/// analytic CDF of `truth`: sup_x |F_n(x) - F(x)| over the sorted sample.
pub fn ks_statistic(sample: &Sample, truth: &SeriesDensity) -> f64 {
    let mut sorted = sample.values().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples are finite"));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let fx = cdf(truth, x);
        let below = fx - i as f64 / n;
        let above = (i + 1) as f64 / n - fx;
        d = d.max(below).max(above);
    }
    d
}
