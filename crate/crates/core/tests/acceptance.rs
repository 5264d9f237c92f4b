//! The project's acceptance gate: ten numbered checks, each ending in a
//! single pass/fail line. Criteria 7, 8, and 10 read from one shared
//! 100-replication design-density simulation so the heavy run happens once.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use osde::{
    cdf, design_density, draw, integrate, ks_statistic,
    minimal_tail_constant, run_adaptive_once, run_simulation, select, std_normal_cdf,
    std_normal_quantile, std_normal_upper_tail, uniform_density, BasisId, CoefficientEstimate,
    CutoffRounding, QuadratureRule, SamplerConfig, SimulationConfig, SimulationResult,
    SparsityParams, DEFAULT_E_STAR,
};

const SHARED_SIM_SEED: u64 = 20_260_819;
const KS_SEED: u64 = 314_159;
const COVERAGE_SEED: u64 = 424_242;

fn shared_sim() -> &'static (SimulationResult, Duration) {
    static SIM: OnceLock<(SimulationResult, Duration)> = OnceLock::new();
    SIM.get_or_init(|| {
        let cfg = SimulationConfig::desk_scale(design_density(), SHARED_SIM_SEED);
        let start = Instant::now();
        let result = run_simulation(&cfg).expect("the shared simulation must run");
        (result, start.elapsed())
    })
}

fn report(number: u32, ok: bool, detail: &str) {
    println!(
        "criterion {number:02} {}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {number:02} failed: {detail}");
}

#[test]
fn criterion_01_basis_orthonormality_64() {
    let start = Instant::now();
    let rule = QuadratureRule::default();
    let basis = BasisId::Cosine;
    let mut worst = 0.0f64;
    for i in 1..=64 {
        for j in i..=64 {
            let inner = integrate(|x| basis.eval(i, x) * basis.eval(j, x), rule);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner - target).abs());
        }
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-8 && elapsed < Duration::from_secs(5);
    report(
        1,
        ok,
        &format!("max 64x64 orthonormality defect {worst:.3e} in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_normal_tail_bounds_and_quantile_round_trip() {
    let mut bounds_ok = true;
    for x in [0.1f64, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let tail = std_normal_upper_tail(x);
        let lower = pdf * x / (x * x + 1.0);
        let upper = pdf / x;
        bounds_ok &= lower < tail && tail < upper;
    }
    let mut worst = 0.0f64;
    for i in -600..=600 {
        let x = i as f64 / 100.0;
        worst = worst.max((std_normal_quantile(std_normal_cdf(x)) - x).abs());
    }
    let ok = bounds_ok && worst <= 1e-8;
    report(
        2,
        ok,
        &format!("tail bounds strict at 6 points, worst round-trip {worst:.3e} on |x| <= 6"),
    );
}

#[test]
fn criterion_03_design_density_is_valid() {
    let f = design_density();
    let expected = vec![
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
    let coeffs_ok = f.theta == expected;
    let integral = f.exact_integral();
    let grid_min = f.min_on_grid(10_000);
    let ok = coeffs_ok && integral == 1.0 && grid_min >= 0.0;
    report(
        3,
        ok,
        &format!("coefficients exact, integral = {integral}, grid min = {grid_min:.6}"),
    );
}

#[test]
fn criterion_04_sparsity_class_checks() {
    let f = design_density();

    // Magnitude-sorted coefficients hit the decay bound with equality at
    // ranks 2 through 10.
    let mut sorted: Vec<f64> = f.theta.iter().map(|t| t.abs()).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let equality_ok = (2usize..=10).all(|r| sorted[r - 1] == 2.0 / ((r * r) as f64));
    let generous = SparsityParams::new(2.0, 2.0, 30.0).unwrap();
    let ordered_ok = osde::check_membership_theta(&f.theta, generous).ordered_ok;

    // With C = 4/3 the tail condition must fail, first at J = 4.
    let tight = SparsityParams::new(2.0, 2.0, 4.0 / 3.0).unwrap();
    let tight_report = osde::check_membership_theta(&f.theta, tight);
    let tail_fails_at_4 = !tight_report.tail_ok && tight_report.first_violation == Some(4);
    let mtc = minimal_tail_constant(&f.theta, 2.0);
    let mtc_ok = (mtc - 25.72108291418991).abs() <= 1e-12;

    // Exact-decay sequences theta_j = A j^{-k} belong to the class with
    // C = A^2 / (2k - 1).
    let mut decay_ok = true;
    for (a, k) in [(1.5f64, 2.0f64), (2.0, 1.5), (1.0, 3.0), (0.7, 0.8)] {
        let theta: Vec<f64> = (1..=60).map(|j| a / (j as f64).powf(k)).collect();
        let params = SparsityParams::new(a, k, a * a / (2.0 * k - 1.0)).unwrap();
        let r = osde::check_membership_theta(&theta, params);
        decay_ok &= r.ordered_ok && r.tail_ok && r.first_violation.is_none();
    }

    let ok = equality_ok && ordered_ok && tail_fails_at_4 && mtc_ok && decay_ok;
    report(
        4,
        ok,
        &format!(
            "equality ranks 2..10, C = 4/3 violates at J = {:?}, minimal C = {mtc:.6}",
            tight_report.first_violation
        ),
    );
}

#[test]
fn criterion_05_sampler_matches_the_analytic_cdf() {
    let start = Instant::now();
    let truth = design_density();
    let n = 100_000usize;
    let sample = draw(&truth, n, &SamplerConfig::new(KS_SEED)).unwrap();
    let d = ks_statistic(&sample, &truth);
    let critical = 1.63 / (n as f64).sqrt();

    // Histogram-vs-density agreement: 20 equal bins, empirical frequency
    // within 0.005 of the exact bin mass.
    let mut counts = [0usize; 20];
    for &x in sample.values() {
        let bin = ((x * 20.0) as usize).min(19);
        counts[bin] += 1;
    }
    let mut worst_bin = 0.0f64;
    for (bin, &count) in counts.iter().enumerate() {
        let lo = bin as f64 / 20.0;
        let hi = (bin as f64 + 1.0) / 20.0;
        let mass = cdf(&truth, hi) - cdf(&truth, lo);
        worst_bin = worst_bin.max((count as f64 / n as f64 - mass).abs());
    }

    let elapsed = start.elapsed();
    let ok = d <= critical && worst_bin <= 5e-3 && elapsed < Duration::from_secs(10);
    report(
        5,
        ok,
        &format!(
            "KS = {d:.5} vs critical {critical:.5}, worst bin error {worst_bin:.2e}, {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_06_penalty_covers_the_deviation() {
    let truth = uniform_density();
    let cfg = SimulationConfig {
        sizes: vec![5000],
        replications: 200,
        ..SimulationConfig::desk_scale(truth.clone(), COVERAGE_SEED)
    };
    let mut covered = 0usize;
    let mut constant_only = 0usize;
    for rep in 0..200 {
        let r = run_adaptive_once(&truth, 5000, 200, &cfg, rep).unwrap();
        if r.max_abs_deviation.unwrap() <= r.lambda.unwrap() {
            covered += 1;
        }
        if r.selected_count == Some(1) {
            constant_only += 1;
        }
    }
    let ok = covered >= 190 && constant_only >= 190;
    report(
        6,
        ok,
        &format!("coverage {covered}/200, selected exactly {{1}} in {constant_only}/200"),
    );
}

#[test]
fn criterion_07_projection_properties_hold_every_replication() {
    let (sim, _) = shared_sim();
    let mut nonneg = true;
    let mut unit_mass = true;
    let mut contraction = true;
    for r in &sim.records {
        nonneg &= r.grid_min >= 0.0;
        unit_mass &= (r.integral - 1.0).abs() <= DEFAULT_E_STAR;
        contraction &= r.ise <= r.ise_raw + 1e-8;
    }
    let complete = sim.records.len() == 800 && sim.cells.iter().all(|c| c.failures == 0);
    let ok = nonneg && unit_mass && contraction && complete;
    report(
        7,
        ok,
        &format!(
            "over {} replications: nonneg {nonneg}, mass within e* {unit_mass}, \
             projection never worse {contraction}",
            sim.records.len()
        ),
    );
}

#[test]
fn criterion_08_adaptive_estimator_wins_at_desk_scale() {
    let (sim, elapsed) = shared_sim();
    let sizes = [5000usize, 10_000, 15_000, 20_000];
    let mise = |kind: osde::EstimatorKind, n: usize| -> f64 {
        sim.cells
            .iter()
            .find(|c| c.estimator == kind && c.n == n)
            .expect("cell present")
            .mise_hat
    };
    let star: Vec<f64> = sizes
        .iter()
        .map(|&n| mise(osde::EstimatorKind::FStar, n))
        .collect();
    let check: Vec<f64> = sizes
        .iter()
        .map(|&n| mise(osde::EstimatorKind::FCheck, n))
        .collect();
    let decreasing = star.windows(2).all(|w| w[1] < w[0]);
    let dominates = star.iter().zip(&check).all(|(s, c)| s < c);
    let ok = decreasing && dominates && *elapsed < Duration::from_secs(1200);
    report(
        8,
        ok,
        &format!(
            "adaptive MISE {star:?} (decreasing: {decreasing}), fixed-cutoff MISE {check:?} \
             (dominated: {dominates}), simulation took {elapsed:.1?}"
        ),
    );
}

#[test]
fn criterion_09_selection_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let mut mismatches = 0usize;
    for _ in 0..1000 {
        let j = rng.gen_range(1..=64usize);
        let mut theta_hat: Vec<f64> = (0..j).map(|_| rng.gen_range(-1.0..1.0)).collect();
        theta_hat[0] = 1.0;
        let lambda = rng.gen_range(0.0..0.8);
        let multiplier = match rng.gen_range(0..3) {
            0 => 1.0,
            1 => 2.0,
            _ => rng.gen_range(0.5..3.0),
        };
        if j >= 3 && rng.gen_bool(0.3) {
            // Plant an exact tie at the cut; ties are inclusions.
            theta_hat[2] = multiplier * lambda;
        }
        let est = CoefficientEstimate {
            theta_hat: theta_hat.clone(),
            second_moments: vec![0.0; j],
            n: 50,
            basis: BasisId::Cosine,
        };
        let got = select(&est, lambda, multiplier);
        let cut = multiplier * lambda;
        let want_selected: Vec<usize> = (1..=j)
            .filter(|&idx| idx == 1 || theta_hat[idx - 1].abs() >= cut)
            .collect();
        let want_theta: Vec<f64> = (1..=j)
            .map(|idx| {
                if want_selected.contains(&idx) {
                    theta_hat[idx - 1]
                } else {
                    0.0
                }
            })
            .collect();
        if got.selected != want_selected || got.theta_tilde != want_theta {
            mismatches += 1;
        }
    }
    let ok = mismatches == 0;
    report(
        9,
        ok,
        &format!("{mismatches} mismatches against per-index filtering over 1000 instances"),
    );
}

#[test]
fn criterion_10_mise_decays_at_a_sane_rate() {
    let (sim, _) = shared_sim();
    let points: Vec<(f64, f64)> = sim
        .cells
        .iter()
        .filter(|c| c.estimator == osde::EstimatorKind::FStar)
        .map(|c| ((c.n as f64).ln(), c.mise_hat.ln()))
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let slope = sxy / sxx;
    let ok = (-1.2..=-0.4).contains(&slope);
    report(
        10,
        ok,
        &format!("log-log MISE slope {slope:.3} over four sample sizes"),
    );
}

// Keep the comparison cutoff honest where the shared simulation uses it.
#[test]
fn comparison_cutoffs_match_the_protocol() {
    let (sim, _) = shared_sim();
    for cell in sim
        .cells
        .iter()
        .filter(|c| c.estimator == osde::EstimatorKind::FCheck)
    {
        assert_eq!(
            cell.cutoff,
            Some(osde::comparison_cutoff(cell.n, CutoffRounding::Floor))
        );
    }
}
