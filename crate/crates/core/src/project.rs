//! Projection of a raw thresholded series onto the probability densities:
//! clip below zero, compare the mass to one, shift, repeat. The fixed point
//! is max{0, f + c} with a single scalar shift c.

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureRule};
use crate::sparsity::{Density, SeriesDensity};

/// Stop once the clipped mass is within this distance of one.
pub const DEFAULT_E_STAR: f64 = 1e-6;

/// Iteration guard; the loop contracts fast enough that hitting this means
/// something is genuinely wrong with the input.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// A projected density max{0, base(x) + shift}.
///
/// The base series and shift are immutable after construction, so pointwise
/// evaluation stays exact; the quadrature grid recorded in `grid` was used
/// only to measure the mass during iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedDensity {
    base: SeriesDensity,
    shift: f64,
    grid: usize,
    iterations: usize,
}

impl ProjectedDensity {
    pub fn base(&self) -> &SeriesDensity {
        &self.base
    }

    /// The accumulated constant c.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Panel count of the rule that measured the mass.
    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Number of corrective shifts applied; zero means the input already
    /// integrated to one.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// max{0, base(x) + shift}. Panics outside [0,1].
    pub fn eval(&self, x: f64) -> f64 {
        (self.base.eval(x) + self.shift).max(0.0)
    }
}

impl Density for ProjectedDensity {
    fn density_at(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

/// Runs the projection loop on `f0`.
///
/// Each pass measures C = ∫ max{0, f0 + shift} with `rule`; if |C - 1| is
/// below `e_star` the algorithm stops, otherwise the excess C - 1 is
/// subtracted from the shift. The map shift ↦ C is monotone with slope equal
/// to the measure of the positive region, so the iteration contracts toward
/// the unique mass-one shift; `max_iter` guards the pathological inputs.
pub fn p_algorithm(
    f0: &SeriesDensity,
    rule: QuadratureRule,
    e_star: f64,
    max_iter: usize,
) -> Result<ProjectedDensity> {
    assert!(
        e_star > 0.0 && e_star.is_finite(),
        "stopping tolerance must be positive, got {e_star}"
    );
    assert!(max_iter >= 1, "need at least one iteration");
    let mut shift = 0.0;
    let mut iterations = 0usize;
    loop {
        let c = integrate(|x| (f0.eval(x) + shift).max(0.0), rule);
        let residual = (c - 1.0).abs();
        if residual < e_star {
            break;
        }
        if iterations >= max_iter {
            return Err(Error::ProjectionDiverged {
                iterations,
                residual,
            });
        }
        shift -= c - 1.0;
        iterations += 1;
    }
    Ok(ProjectedDensity {
        base: f0.clone(),
        shift,
        grid: rule.panels(),
        iterations,
    })
}
