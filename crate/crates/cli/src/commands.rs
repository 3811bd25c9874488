//! Shared command plumbing: model construction from flag values, solve and
//! sweep drivers, and the flat `key=value` configuration file.

use crate::formats::{
    heatmap_pgm, matrix_to_matrix_market, mesh_to_csv, solution_to_csv, trend_to_csv,
    vector_to_csv, SolveSummary, TrendRow, HEATMAP_SIZE,
};
use confine_fp::fem::{assemble, LoadSpec, Method};
use confine_fp::geometry::QuadratureRule;
use confine_fp::potential::{ConfinementModel, DriftKind, PotentialKind};
use confine_fp::solver::{solve_fokker_planck, Solution};
use confine_fp::{build_disk_mesh, Error};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

/// Flat `key=value` configuration file; flags override file entries.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("config key {key}: cannot parse {raw:?}")),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, String> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}

/// Raw model-selection values as they arrive from flags or config.
#[derive(Debug, Clone, Copy, Default)]
pub struct ModelSelection {
    pub fene: bool,
    pub power_law: bool,
    pub quadratic: bool,
    pub l: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma0: Option<f64>,
    pub shear: bool,
    pub corotational: bool,
    pub de: Option<f64>,
    pub gamma: Option<f64>,
}

pub const DEFAULT_ELL: f64 = 5.0;
pub const DEFAULT_DE: f64 = 10.0;

impl ModelSelection {
    /// Validates the selection and builds the model. Exactly one potential
    /// kind and at most one drift kind must be selected.
    pub fn build(&self) -> Result<ConfinementModel, String> {
        let kinds = [self.fene, self.power_law, self.quadratic]
            .iter()
            .filter(|&&b| b)
            .count();
        if kinds != 1 {
            return Err("select exactly one of --fene, --power-law, --quadratic".to_string());
        }
        let kind = if self.fene {
            PotentialKind::Fene {
                ell: self.l.unwrap_or(DEFAULT_ELL),
            }
        } else if self.power_law {
            PotentialKind::PowerLaw {
                alpha: self
                    .alpha
                    .ok_or_else(|| "--power-law requires --alpha".to_string())?,
            }
        } else {
            PotentialKind::Quadratic {
                gamma0: self
                    .gamma0
                    .ok_or_else(|| "--quadratic requires --gamma0".to_string())?,
            }
        };
        if self.shear && self.corotational {
            return Err("--shear and --corotational are mutually exclusive".to_string());
        }
        let drift = if self.shear {
            DriftKind::Shear {
                de: self.de.unwrap_or(DEFAULT_DE),
                gamma_dot: self.gamma.unwrap_or(0.0),
            }
        } else if self.corotational {
            DriftKind::CoRotational {
                de: self.de.unwrap_or(DEFAULT_DE),
                gamma_dot: self.gamma.unwrap_or(0.0),
            }
        } else {
            DriftKind::None
        };
        ConfinementModel::new(kind, drift).map_err(|e| e.to_string())
    }
}

/// Resolved solve parameters.
#[derive(Debug, Clone)]
pub struct SolveParams {
    pub rings: usize,
    pub rho: f64,
    pub method: Method,
    pub force: bool,
    pub dump_mesh: bool,
    pub dump_system: bool,
}

/// Runs a solve and writes `solution.csv`, `summary.json` and `heatmap.pgm`
/// (plus optional mesh/system dumps) into `out_dir`.
pub fn run_solve(
    model: &ConfinementModel,
    params: &SolveParams,
    out_dir: &Path,
) -> Result<(Solution, SolveSummary), Error> {
    let sol = solve_fokker_planck(
        model,
        params.rings,
        params.rho,
        &LoadSpec::Zero,
        params.method,
        params.force,
    )?;
    let summary = SolveSummary::from_solution(&sol);
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", out_dir.display())))?;
    let write = |name: &str, bytes: &[u8]| -> Result<(), Error> {
        std::fs::write(out_dir.join(name), bytes)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {name}: {e}")))
    };
    write("solution.csv", solution_to_csv(&sol).as_bytes())?;
    write(
        "summary.json",
        serde_json::to_string_pretty(&summary)
            .expect("summary serializes")
            .as_bytes(),
    )?;
    write("heatmap.pgm", &heatmap_pgm(&sol, HEATMAP_SIZE))?;
    if params.dump_mesh {
        write("mesh.csv", mesh_to_csv(&sol.mesh).as_bytes())?;
    }
    if params.dump_system {
        let rule = QuadratureRule::default();
        let mesh = build_disk_mesh(model.radius(), params.rings)?;
        let mut normalized = model.clone();
        normalized.normalize(&mesh, &rule)?;
        let sys = assemble(&mesh, &normalized, &rule, &LoadSpec::Zero)?;
        write(
            "stiffness.mtx",
            matrix_to_matrix_market(&sys.stiffness, "weighted stiffness K").as_bytes(),
        )?;
        write(
            "drift.mtx",
            matrix_to_matrix_market(&sys.drift, "drift matrix D").as_bytes(),
        )?;
        write(
            "mass.mtx",
            matrix_to_matrix_market(&sys.mass, "weighted mass B").as_bytes(),
        )?;
        write("mean.csv", vector_to_csv(&sys.mean).as_bytes())?;
        write("load.csv", vector_to_csv(&sys.load).as_bytes())?;
    }
    Ok((sol, summary))
}

/// Resolved sweep parameters.
#[derive(Debug, Clone)]
pub struct SweepParams {
    pub gammas: Vec<f64>,
    pub de: f64,
    pub ell: f64,
    pub rings: usize,
    pub jobs: Option<usize>,
}

/// Runs one solve per shear rate (optionally in a worker pool), writes the
/// per-rate solution files and `trend.csv`, and returns the trend rows in
/// input order along with any Péclet-guard warnings.
pub fn run_fene_sweep(
    params: &SweepParams,
    out_dir: &Path,
) -> Result<(Vec<TrendRow>, Vec<String>), Error> {
    if params.gammas.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one shear rate".into()));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", out_dir.display())))?;

    let solve_one = |&gamma_dot: &f64| -> Result<(f64, Solution), Error> {
        let model = ConfinementModel::new(
            PotentialKind::Fene { ell: params.ell },
            DriftKind::Shear {
                de: params.de,
                gamma_dot,
            },
        )?;
        let sol = solve_fokker_planck(
            &model,
            params.rings,
            1.0,
            &LoadSpec::Zero,
            Method::Lagrange,
            false,
        )?;
        Ok((gamma_dot, sol))
    };

    let solutions: Vec<(f64, Solution)> = match params.jobs {
        Some(jobs) if jobs > 1 => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
            pool.install(|| -> Result<Vec<(f64, Solution)>, Error> {
                params.gammas.par_iter().map(solve_one).collect()
            })
        }
        _ => params.gammas.iter().map(solve_one).collect(),
    }?;

    let mut rows = Vec::with_capacity(solutions.len());
    let mut warnings = Vec::new();
    for (gamma_dot, sol) in &solutions {
        let m = &sol.moments;
        rows.push(TrendRow {
            gamma_dot: *gamma_dot,
            q11_minus_q22: m.q11 - m.q22,
            q1q2: m.q12,
            peclet_max: sol.peclet_max,
        });
        if sol.peclet_max > 2.0 {
            warnings.push(format!(
                "gamma_dot = {gamma_dot}: element Peclet {:.2} exceeds 2; result is qualitative",
                sol.peclet_max
            ));
        }
        let tag = format!("{gamma_dot}").replace('.', "p");
        let summary = SolveSummary::from_solution(sol);
        std::fs::write(
            out_dir.join(format!("solution_gamma_{tag}.csv")),
            solution_to_csv(sol),
        )
        .and_then(|_| {
            std::fs::write(
                out_dir.join(format!("summary_gamma_{tag}.json")),
                serde_json::to_string_pretty(&summary).expect("summary serializes"),
            )
        })
        .map_err(|e| Error::InvalidArgument(format!("cannot write sweep outputs: {e}")))?;
    }
    std::fs::write(out_dir.join("trend.csv"), trend_to_csv(&rows))
        .map_err(|e| Error::InvalidArgument(format!("cannot write trend.csv: {e}")))?;
    Ok((rows, warnings))
}

/// Compact human-readable rendering of a hypothesis report.
pub fn hypothesis_report_text(report: &confine_fp::HypothesisReport) -> String {
    let mut out = String::new();
    let verdict = |p: bool| if p { "pass" } else { "FAIL" };
    let _ = writeln!(
        out,
        "H1 {}  a = {:.6}  b = {:.6}  deriv_limit = {:.3e}",
        verdict(report.h1.pass),
        report.h1.a,
        report.h1.b,
        report.h1.deriv_limit
    );
    let _ = writeln!(out, "H2 {}  c = {:.6}", verdict(report.h2.pass), report.h2.c);
    let _ = writeln!(
        out,
        "H3 {}  gamma = {:.6}",
        verdict(report.h3.pass),
        report.h3.gamma
    );
    let _ = writeln!(out, "p_bound = {:.6}", report.p_bound);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parses_and_reports_errors() {
        let cfg = ConfigFile::parse("# comment\nl = 5\nrings=24\nshear=true\n").unwrap();
        assert_eq!(cfg.get::<f64>("l").unwrap(), Some(5.0));
        assert_eq!(cfg.get::<usize>("rings").unwrap(), Some(24));
        assert!(cfg.flag("shear").unwrap());
        assert!(!cfg.flag("corotational").unwrap());
        assert!(ConfigFile::parse("oops").is_err());
        assert!(cfg.get::<f64>("rings").is_ok());
        assert!(ConfigFile::parse("l=abc").unwrap().get::<f64>("l").is_err());
    }

    #[test]
    fn model_selection_is_validated() {
        let sel = ModelSelection {
            fene: true,
            l: Some(5.0),
            ..Default::default()
        };
        assert!(sel.build().is_ok());

        let none = ModelSelection::default();
        assert!(none.build().is_err());

        let both = ModelSelection {
            fene: true,
            quadratic: true,
            ..Default::default()
        };
        assert!(both.build().is_err());

        let conflicting_drift = ModelSelection {
            fene: true,
            shear: true,
            corotational: true,
            ..Default::default()
        };
        assert!(conflicting_drift.build().is_err());

        let missing_alpha = ModelSelection {
            power_law: true,
            ..Default::default()
        };
        assert!(missing_alpha.build().is_err());
    }
}
