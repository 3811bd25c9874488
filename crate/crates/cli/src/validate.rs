//! The validation suite: each criterion exercises one guarantee of the
//! solver at a pinned scale and tolerance. The `validate` subcommand and the
//! acceptance test target both run these functions; criteria are pure given
//! the seed, so the emitted report is byte-identical across runs.

use crate::formats::{heatmap_pgm, histogram_to_csv, solution_to_csv, HEATMAP_SIZE};
use confine_fp::analysis::{default_hardy_family, hardy_audit, kernel_and_gap};
use confine_fp::fem::{assemble, solve_constrained, LoadSpec, Method};
use confine_fp::geometry::QuadratureRule;
use confine_fp::potential::{
    check_hypotheses, ConfinementModel, DriftKind, PotentialKind, DEFAULT_BOUNDARY_WINDOW,
    DEFAULT_HYPOTHESIS_SAMPLES,
};
use confine_fp::sde::{compare, l1_distance_to_maxwellian, simulate, SdeConfig};
use confine_fp::solver::{
    convergence_study, relative_l2m_error_to_constant, solve_fokker_planck, ManufacturedField,
    Solution,
};
use confine_fp::{build_disk_mesh, Error, Result};
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: usize, name: &str, passed: bool, detail: String) -> Self {
        CriterionResult {
            id,
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Full report of a validation run. Deliberately carries no timings so that
/// repeated runs with the same seed serialize to identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub quick: bool,
    pub all_passed: bool,
    pub criteria: Vec<CriterionResult>,
}

fn fene(ell: f64, drift: DriftKind) -> Result<ConfinementModel> {
    ConfinementModel::new(PotentialKind::Fene { ell }, drift)
}

/// Criterion 1: admissibility verdicts across the power-law and FENE
/// parameter grids.
pub fn criterion_hypothesis_thresholds() -> Result<CriterionResult> {
    let alphas = [0.25, 0.5, 1.0, 1.01, 1.5, 2.0, 4.0];
    let alpha_expected = [false, false, false, true, true, true, true];
    let ells = [1.0, 1.4, 1.5, 2.0, 5.0, 10.0];
    let ell_expected = [false, false, true, true, true, true];

    let mut verdicts_alpha = String::new();
    let mut verdicts_ell = String::new();
    let mut ok = true;
    for (&alpha, &want) in alphas.iter().zip(&alpha_expected) {
        let model = ConfinementModel::new(PotentialKind::PowerLaw { alpha }, DriftKind::None)?;
        let report = check_hypotheses(&model, DEFAULT_HYPOTHESIS_SAMPLES, DEFAULT_BOUNDARY_WINDOW)?;
        verdicts_alpha.push(if report.all_pass() { 'P' } else { 'F' });
        ok &= report.all_pass() == want;
    }
    for (&ell, &want) in ells.iter().zip(&ell_expected) {
        let model = fene(ell, DriftKind::None)?;
        let report = check_hypotheses(&model, DEFAULT_HYPOTHESIS_SAMPLES, DEFAULT_BOUNDARY_WINDOW)?;
        verdicts_ell.push(if report.all_pass() { 'P' } else { 'F' });
        ok &= report.all_pass() == want;
    }
    Ok(CriterionResult::new(
        1,
        "hypothesis thresholds",
        ok,
        format!("alpha {alphas:?} -> {verdicts_alpha} (want FFFPPPP); ell {ells:?} -> {verdicts_ell} (want FFPPPP)"),
    ))
}

/// Criterion 2: zero-drift solves reproduce the Maxwellian to rounding.
/// Returns the `ℓ = 2` solution for the heatmap artifact.
pub fn criterion_maxwellian_recovery() -> Result<(CriterionResult, Solution)> {
    let mut ok = true;
    let mut detail = String::new();
    let mut artifact: Option<Solution> = None;
    for ell in [2.0, 5.0, 10.0] {
        let model = fene(ell, DriftKind::None)?;
        let sol = solve_fokker_planck(&model, 32, 1.0, &LoadSpec::Zero, Method::Lagrange, false)?;
        let sup = sol.u.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
        let mass_err = (sol.moments.mass - 1.0).abs();
        ok &= sup <= 1e-9 && mass_err <= 1e-10;
        detail.push_str(&format!("ell={ell}: |u-1|={sup:.2e}, |mass-1|={mass_err:.2e}; "));
        if ell == 2.0 {
            artifact = Some(sol);
        }
    }
    Ok((
        CriterionResult::new(2, "Maxwellian recovery", ok, detail),
        artifact.expect("ell=2 runs first"),
    ))
}

/// Criterion 3: the co-rotational drift keeps the Maxwellian stationary up
/// to discretization error, with at least first-order decay.
pub fn criterion_corotational_exactness() -> Result<CriterionResult> {
    let model = fene(
        5.0,
        DriftKind::CoRotational {
            de: 10.0,
            gamma_dot: 1.0,
        },
    )?;
    let mut errs = Vec::new();
    for rings in [24usize, 48] {
        let sol = solve_fokker_planck(&model, rings, 1.0, &LoadSpec::Zero, Method::Lagrange, false)?;
        errs.push(relative_l2m_error_to_constant(&sol, 1.0)?);
    }
    let ok = errs[1] <= 2e-2 && errs[1] / errs[0] <= 0.5;
    Ok(CriterionResult::new(
        3,
        "co-rotational exactness",
        ok,
        format!(
            "rel L2_M error: {:.3e} (24 rings) -> {:.3e} (48 rings), ratio {:.3}",
            errs[0],
            errs[1],
            errs[1] / errs[0]
        ),
    ))
}

/// Criterion 4: manufactured-solution convergence orders on {12, 24, 48}.
pub fn criterion_manufactured_convergence() -> Result<CriterionResult> {
    let plain = fene(5.0, DriftKind::None)?;
    let linear = ManufacturedField {
        value: &|q: [f64; 2]| 1.0 + q[0],
        gradient: &|_| [1.0, 0.0],
    };
    let table_a = convergence_study(&plain, &linear, &[12, 24, 48])?;
    let order_a = table_a.final_order().unwrap_or(0.0);

    let sheared = fene(
        5.0,
        DriftKind::Shear {
            de: 1.0,
            gamma_dot: 0.1,
        },
    )?;
    let bilinear = ManufacturedField {
        value: &|q: [f64; 2]| 1.0 + q[0] * q[1],
        gradient: &|q: [f64; 2]| [q[1], q[0]],
    };
    let table_b = convergence_study(&sheared, &bilinear, &[12, 24, 48])?;
    let order_b = table_b.final_order().unwrap_or(0.0);

    let ok = order_a >= 1.8 && order_b >= 1.5;
    Ok(CriterionResult::new(
        4,
        "manufactured convergence",
        ok,
        format!(
            "u*=1+Q1 (no drift): L2_M order {order_a:.2} (need >= 1.8); u*=1+Q1Q2 (shear): order {order_b:.2} (need >= 1.5)"
        ),
    ))
}

/// Criterion 5: operator kernel is the Maxwellian line and the spectral gap
/// clears the curvature constant.
pub fn criterion_kernel_and_gap() -> Result<CriterionResult> {
    let rule = QuadratureRule::default();
    let mut ok = true;
    let mut detail = String::new();
    let cases: [(ConfinementModel, f64, &str); 2] = [
        {
            let model = fene(5.0, DriftKind::None)?;
            let gamma = check_hypotheses(&model, DEFAULT_HYPOTHESIS_SAMPLES, DEFAULT_BOUNDARY_WINDOW)?
                .h3
                .gamma;
            (model, gamma, "FENE ell=5")
        },
        (
            ConfinementModel::new(PotentialKind::Quadratic { gamma0: 1.0 }, DriftKind::None)?,
            1.0,
            "quadratic gamma0=1",
        ),
    ];
    for (model, gamma, label) in cases {
        let mut model = model;
        let mesh = build_disk_mesh(model.radius(), 16)?;
        model.normalize(&mesh, &rule)?;
        let sys = assemble(&mesh, &model, &rule, &LoadSpec::Zero)?;
        let report = kernel_and_gap(&sys, gamma)?;
        ok &= report.kernel_ok && report.gap_ok;
        detail.push_str(&format!(
            "{label}: lambda1={:.2e}, spread={:.2e}, lambda2={:.4} vs 0.95*gamma={:.4}; ",
            report.lambda1,
            report.v1_spread,
            report.lambda2,
            0.95 * gamma
        ));
    }
    Ok(CriterionResult::new(5, "kernel and Poincare gap", ok, detail))
}

/// Criterion 6: the Hardy-functional audit is finite and refinement-stable.
pub fn criterion_hardy_stability(seed: u64) -> Result<CriterionResult> {
    let rule = QuadratureRule::default();
    let mut ratios = Vec::new();
    for rings in [24usize, 48] {
        let mut model = fene(5.0, DriftKind::None)?;
        let mesh = build_disk_mesh(model.radius(), rings)?;
        model.normalize(&mesh, &rule)?;
        let family = default_hardy_family(&mesh, seed);
        let audit = hardy_audit(&mesh, &model, &family)?;
        ratios.push(audit.worst_ratio);
    }
    let drift = (ratios[1] - ratios[0]).abs() / ratios[0];
    let ok = ratios.iter().all(|r| r.is_finite()) && drift <= 0.2;
    Ok(CriterionResult::new(
        6,
        "Hardy audit stability",
        ok,
        format!(
            "worst ratio {:.4} (24 rings) vs {:.4} (48 rings), relative drift {:.3}",
            ratios[0], ratios[1], drift
        ),
    ))
}

/// Criterion 7: the Lagrange solve meets the constraint exactly and
/// penalization converges to it monotonically as the penalty tightens.
pub fn criterion_mean_constraint_penalization() -> Result<CriterionResult> {
    let rule = QuadratureRule::default();
    let mut model = fene(5.0, DriftKind::None)?;
    let mesh = build_disk_mesh(model.radius(), 16)?;
    model.normalize(&mesh, &rule)?;
    let load = LoadSpec::Density(Box::new(|q: [f64; 2]| 1.0 + q[0] + 0.5 * q[1] * q[1]));
    let sys = assemble(&mesh, &model, &rule, &load)?;
    let exact = solve_constrained(&sys, 1.0, Method::Lagrange)?;
    let mut errs = Vec::new();
    for epsilon in [1e-4, 1e-6, 1e-8] {
        let sol = solve_constrained(&sys, 1.0, Method::Penalization { epsilon })?;
        let sup = sol
            .u
            .iter()
            .zip(&exact.u)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        errs.push(sup);
    }
    let ok = exact.constraint_defect <= 1e-10 && errs[0] > errs[1] && errs[1] > errs[2];
    Ok(CriterionResult::new(
        7,
        "mean constraint and penalization",
        ok,
        format!(
            "Lagrange defect {:.2e}; penalized sup errors {:.3e} > {:.3e} > {:.3e}",
            exact.constraint_defect, errs[0], errs[1], errs[2]
        ),
    ))
}

/// Criterion 8: the alignment moment vanishes without shear and grows
/// strictly with it.
pub fn criterion_shear_trend() -> Result<CriterionResult> {
    let gammas = [0.0, 0.1, 0.2, 0.5, 1.0];
    let mut q12 = Vec::new();
    let mut peclets = Vec::new();
    for &gamma_dot in &gammas {
        let model = fene(
            5.0,
            DriftKind::Shear {
                de: 10.0,
                gamma_dot,
            },
        )?;
        let sol = solve_fokker_planck(&model, 48, 1.0, &LoadSpec::Zero, Method::Lagrange, false)?;
        q12.push(sol.moments.q12);
        peclets.push(sol.peclet_max);
    }
    let ok = q12[0].abs() <= 1e-8 && q12.windows(2).all(|w| w[1] > w[0]);
    Ok(CriterionResult::new(
        8,
        "shear trend",
        ok,
        format!("q12 over gammas {gammas:?}: {q12:?}; Peclet guard values {peclets:?}"),
    ))
}

/// Artifacts of the Monte Carlo criterion, exported by `run_validation`.
pub struct SdeArtifacts {
    pub histogram: confine_fp::Histogram2D,
    pub comparison: confine_fp::sde::CompareReport,
}

/// Criterion 9: the Monte Carlo oracle agrees with the analytic Maxwellian
/// (no shear) and with the finite-element solution (under shear).
pub fn criterion_sde_cross_oracle(seed: u64) -> Result<(CriterionResult, SdeArtifacts)> {
    // zero shear against the analytic Maxwellian
    let mut config_a = SdeConfig::new(1.0, 0.0, 5.0);
    config_a.n_paths = 200_000;
    config_a.burn_in_steps = 4000;
    config_a.sample_steps = 1500;
    config_a.thinning = 15;
    config_a.seed = seed;
    let hist_a = simulate(&config_a)?;
    let model_a = fene(5.0, DriftKind::None)?;
    let l1_a = l1_distance_to_maxwellian(&hist_a, &model_a)?;

    // shear against the PDE solution
    let mut config_b = SdeConfig::new(10.0, 0.2, 5.0);
    config_b.n_paths = 1_000_000;
    config_b.burn_in_steps = 3500;
    config_b.sample_steps = 1050;
    config_b.thinning = 15;
    config_b.seed = seed;
    let hist_b = simulate(&config_b)?;
    let model_b = fene(
        5.0,
        DriftKind::Shear {
            de: 10.0,
            gamma_dot: 0.2,
        },
    )?;
    let sol_b = solve_fokker_planck(&model_b, 48, 1.0, &LoadSpec::Zero, Method::Lagrange, false)?;
    let report = compare(&hist_b, &sol_b)?;

    let ok = l1_a <= 0.05 && report.l1_distance <= 0.05 && report.moment_gaps.q12 <= 0.10;
    Ok((
        CriterionResult::new(
            9,
            "SDE cross-oracle",
            ok,
            format!(
                "no shear: L1 to Maxwellian {:.4} (2e5 paths); shear De=10, gd=0.2: L1 {:.4}, q12 gap {:.4} (1e6 paths)",
                l1_a, report.l1_distance, report.moment_gaps.q12
            ),
        ),
        SdeArtifacts {
            histogram: hist_b,
            comparison: report,
        },
    ))
}

/// Runs the suite (criterion 9 is skipped in quick mode), writing
/// `report.json`, `solution.csv` and `heatmap.pgm` into `out_dir` when
/// given. `progress` receives each result with its wall-clock seconds.
pub fn run_validation(
    quick: bool,
    seed: u64,
    out_dir: Option<&Path>,
    mut progress: impl FnMut(&CriterionResult, f64),
) -> Result<ValidationReport> {
    let mut criteria: Vec<CriterionResult> = Vec::new();

    // a criterion that errors out is recorded as failed with the error text,
    // so a run always yields a complete report
    macro_rules! run {
        ($id:expr, $name:expr, $expr:expr) => {{
            let t0 = std::time::Instant::now();
            let result = match $expr {
                Ok(result) => result,
                Err(e) => CriterionResult::new($id, $name, false, format!("error: {e}")),
            };
            progress(&result, t0.elapsed().as_secs_f64());
            criteria.push(result);
        }};
    }

    run!(1, "hypothesis thresholds", criterion_hypothesis_thresholds());
    let artifact: Option<Solution> = {
        let t0 = std::time::Instant::now();
        let (result, sol) = match criterion_maxwellian_recovery() {
            Ok((result, sol)) => (result, Some(sol)),
            Err(e) => (
                CriterionResult::new(2, "Maxwellian recovery", false, format!("error: {e}")),
                None,
            ),
        };
        progress(&result, t0.elapsed().as_secs_f64());
        criteria.push(result);
        sol
    };
    run!(3, "co-rotational exactness", criterion_corotational_exactness());
    run!(4, "manufactured convergence", criterion_manufactured_convergence());
    run!(5, "kernel and Poincare gap", criterion_kernel_and_gap());
    run!(6, "Hardy audit stability", criterion_hardy_stability(seed));
    run!(
        7,
        "mean constraint and penalization",
        criterion_mean_constraint_penalization()
    );
    run!(8, "shear trend", criterion_shear_trend());
    let sde_artifacts: Option<SdeArtifacts> = if quick {
        let skipped = CriterionResult::new(
            9,
            "SDE cross-oracle",
            true,
            "skipped (--quick)".to_string(),
        );
        progress(&skipped, 0.0);
        criteria.push(skipped);
        None
    } else {
        let t0 = std::time::Instant::now();
        let (result, artifacts) = match criterion_sde_cross_oracle(seed) {
            Ok((result, artifacts)) => (result, Some(artifacts)),
            Err(e) => (
                CriterionResult::new(9, "SDE cross-oracle", false, format!("error: {e}")),
                None,
            ),
        };
        progress(&result, t0.elapsed().as_secs_f64());
        criteria.push(result);
        artifacts
    };

    let all_passed = criteria.iter().all(|c| c.passed);
    let report = ValidationReport {
        seed,
        quick,
        all_passed,
        criteria,
    };

    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", dir.display())))?;
        std::fs::write(
            dir.join("report.json"),
            serde_json::to_string_pretty(&report).expect("report serializes"),
        )
        .map_err(|e| Error::InvalidArgument(format!("cannot write report.json: {e}")))?;
        if let Some(sol) = &artifact {
            std::fs::write(dir.join("heatmap.pgm"), heatmap_pgm(sol, HEATMAP_SIZE))
                .map_err(|e| Error::InvalidArgument(format!("cannot write heatmap.pgm: {e}")))?;
            std::fs::write(dir.join("solution.csv"), solution_to_csv(sol))
                .map_err(|e| Error::InvalidArgument(format!("cannot write solution.csv: {e}")))?;
        }
        if let Some(sde) = &sde_artifacts {
            std::fs::write(dir.join("histogram.csv"), histogram_to_csv(&sde.histogram))
                .map_err(|e| Error::InvalidArgument(format!("cannot write histogram.csv: {e}")))?;
            std::fs::write(
                dir.join("compare.json"),
                serde_json::to_string_pretty(&sde.comparison).expect("report serializes"),
            )
            .map_err(|e| Error::InvalidArgument(format!("cannot write compare.json: {e}")))?;
        }
    }
    Ok(report)
}
