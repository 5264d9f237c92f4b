//! Quadrature on [0,1] and the standard-normal CDF, survival function, and
//! quantile. Everything here is self-contained: the error function comes from
//! its power series and continued fraction, and the quantile from a rational
//! initial guess polished by Halley steps.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

/// Quadrature scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    CompositeSimpson,
}

/// Default panel count used throughout the simulation harness.
pub const DEFAULT_PANELS: usize = 4096;

/// A quadrature rule on [0,1]: scheme plus grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    panels: usize,
}

impl QuadratureRule {
    /// Composite Simpson with the given number of panels.
    ///
    /// Panics unless `panels` is even and at least 2.
    pub fn composite_simpson(panels: usize) -> Self {
        assert!(
            panels >= 2 && panels.is_multiple_of(2),
            "Simpson needs an even panel count >= 2, got {panels}"
        );
        QuadratureRule {
            kind: QuadratureKind::CompositeSimpson,
            panels,
        }
    }

    pub fn panels(self) -> usize {
        self.panels
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::composite_simpson(DEFAULT_PANELS)
    }
}

/// Approximates ∫₀¹ f(x) dx with the given rule.
///
/// Nodes are i/panels, so the endpoints are exactly 0 and 1 and a power-of-two
/// panel count integrates constants without rounding error. Panics if f is
/// not finite at a node.
pub fn integrate<F: Fn(f64) -> f64>(f: F, rule: QuadratureRule) -> f64 {
    match rule.kind {
        QuadratureKind::CompositeSimpson => {
            let n = rule.panels;
            let nf = n as f64;
            let mut acc = 0.0;
            for i in 0..=n {
                let x = i as f64 / nf;
                let y = f(x);
                assert!(y.is_finite(), "integrand is not finite at x = {x}: {y}");
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * y;
            }
            acc * (1.0 / nf) / 3.0
        }
    }
}

/// Maclaurin-type series for erf on [0, 2]: every term is positive, so there
/// is no cancellation; the exp(-z^2) prefactor keeps the sum moderate.
fn erf_series(z: f64) -> f64 {
    debug_assert!((0.0..=2.0).contains(&z));
    let z2 = z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 1u32;
    while term > 1e-18 * sum && n < 200 {
        term *= 2.0 * z2 / (2.0 * f64::from(n) + 1.0);
        sum += term;
        n += 1;
    }
    FRAC_2_SQRT_PI * z * (-z2).exp() * sum
}

/// Continued fraction for erfc on (2, inf), evaluated by the modified Lentz
/// scheme: sqrt(pi) e^{z^2} erfc(z) = 1/(z+ (1/2)/(z+ 1/(z+ (3/2)/(z+ ...)))).
fn erfc_cf(z: f64) -> f64 {
    debug_assert!(z > 2.0);
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = f;
    let mut d = 0.0;
    for m in 1..400u32 {
        let a = f64::from(m) / 2.0;
        d = z + a * d;
        if d == 0.0 {
            d = TINY;
        }
        d = 1.0 / d;
        c = z + a / c;
        if c == 0.0 {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (PI.sqrt() * f)
}

/// The error function.
pub fn erf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let a = z.abs();
    let magnitude = if a <= 2.0 { erf_series(a) } else { 1.0 - erfc_cf(a) };
    if z < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

/// The complementary error function, accurate in the far tail where
/// 1 - erf(z) would lose everything to cancellation.
pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        2.0 - erfc(-z)
    } else if z <= 2.0 {
        1.0 - erf_series(z)
    } else {
        erfc_cf(z)
    }
}

/// Standard normal CDF Φ(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal survival function 1 - Φ(x), computed without the
/// subtraction. In the far tail this matters: near x = 8 the spacing of
/// representable values around 1.0 (about 1.1e-16) is wider than the tail
/// mass itself, so the literal difference 1.0 - std_normal_cdf(x) is
/// quantized to garbage while erfc keeps full relative accuracy.
pub fn std_normal_upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal quantile Φ⁻¹(p) for 0 < p < 1.
///
/// A rational approximation supplies roughly nine digits; Halley iteration on
/// the survival function then converges to the accuracy of erfc itself.
/// Panics outside (0,1).
pub fn std_normal_quantile(p: f64) -> f64 {
    assert!(
        p.is_finite() && 0.0 < p && p < 1.0,
        "quantile needs 0 < p < 1, got {p}"
    );
    if p == 0.5 {
        return 0.0;
    }
    // Reduce to the lower tail. For p >= 0.5 both operands of 1 - p share a
    // binade, so the complement is exact and no tail mass is lost.
    let (q, sign) = if p < 0.5 { (p, -1.0) } else { (1.0 - p, 1.0) };
    let mut x = -rational_quantile_guess(q);
    for _ in 0..3 {
        let pdf = std_normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        // Halley step for g(x) = upper_tail(x) - q, where g' = -pdf and
        // g'' = x pdf; fall back to plain Newton if the correction factor
        // leaves the safe range.
        let u = (std_normal_upper_tail(x) - q) / pdf;
        let denom = 1.0 - 0.5 * x * u;
        let step = if denom > 0.5 { u / denom } else { u };
        x += step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    sign * x
}

/// Rational approximation to Φ⁻¹(q) on 0 < q <= 0.5 (so the result is <= 0),
/// worst-case relative error about 1.15e-9. Two of Acklam's three regions;
/// the upper region is unreachable after tail reduction.
fn rational_quantile_guess(q: f64) -> f64 {
    debug_assert!(q > 0.0 && q <= 0.5);

    const A1: f64 = -39.6968302866538;
    const A2: f64 = 220.946098424521;
    const A3: f64 = -275.928510446969;
    const A4: f64 = 138.357751867269;
    const A5: f64 = -30.6647980661472;
    const A6: f64 = 2.50662827745924;

    const B1: f64 = -54.4760987982241;
    const B2: f64 = 161.585836858041;
    const B3: f64 = -155.698979859887;
    const B4: f64 = 66.8013118877197;
    const B5: f64 = -13.2806815528857;

    const C1: f64 = -7.78489400243029E-03;
    const C2: f64 = -0.322396458041136;
    const C3: f64 = -2.40075827716184;
    const C4: f64 = -2.54973253934373;
    const C5: f64 = 4.37466414146497;
    const C6: f64 = 2.93816398269878;

    const D1: f64 = 7.78469570904146E-03;
    const D2: f64 = 0.32246712907004;
    const D3: f64 = 2.445134137143;
    const D4: f64 = 3.75440866190742;

    if q < 0.02425 {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C1 * r + C2) * r + C3) * r + C4) * r + C5) * r + C6)
            / ((((D1 * r + D2) * r + D3) * r + D4) * r + 1.0)
    } else {
        let s = q - 0.5;
        let r = s * s;
        (((((A1 * r + A2) * r + A3) * r + A4) * r + A5) * r + A6) * s
            / (((((B1 * r + B2) * r + B3) * r + B4) * r + B5) * r + 1.0)
    }
}
