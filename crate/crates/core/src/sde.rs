//! Independent Monte Carlo oracle for the FENE application: Euler-Maruyama
//! simulation of the dumbbell configuration to stationarity, histogram
//! accumulation, and comparison against the finite-element solution.
//!
//! The simulated Itô equation for the configuration `Q` under planar shear
//! `u = (γ̇ x₂, 0)` is
//!
//! ```text
//! dQ = (γ̇·(Q₂, 0) - E(Q)/(2De)) dt + √(1/De) dW,
//! E(Q) = Q / (1 - |Q|²/ℓ²),
//! ```
//!
//! whose stationary density at `γ̇ = 0` is exactly the FENE Maxwellian
//! (the noise amplitude is fixed by matching the associated Fokker-Planck
//! diffusion coefficient `1/(2De)`).
//!
//! Every path owns a counter-based RNG stream derived from the seed and the
//! path index, so results are bit-identical no matter how paths are split
//! across workers; worker histograms merge by exact integer addition.

use crate::error::{Error, Result};
use crate::geometry::TriLocator;
use crate::solver::Solution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// Parameters of a Monte Carlo run.
#[derive(Debug, Clone, Copy)]
pub struct SdeConfig {
    pub de: f64,
    pub gamma_dot: f64,
    pub ell: f64,
    /// Time step; must satisfy `dt ≤ 1e-3·(2De)` (spring relaxation guard).
    pub dt: f64,
    pub n_paths: usize,
    pub burn_in_steps: usize,
    pub sample_steps: usize,
    /// A sample is recorded every `thinning` steps of the sampling phase.
    pub thinning: usize,
    pub seed: u64,
    /// Histogram resolution (cells per axis).
    pub grid: usize,
}

impl SdeConfig {
    /// A reasonable configuration for the given physics: the step sits at
    /// the stability guard and the burn-in covers six relaxation times.
    pub fn new(de: f64, gamma_dot: f64, ell: f64) -> Self {
        let dt = 1e-3 * 2.0 * de;
        let relax_steps = (2.0 * de / dt).ceil() as usize; // = 1000
        SdeConfig {
            de,
            gamma_dot,
            ell,
            dt,
            n_paths: 10_000,
            burn_in_steps: 6 * relax_steps,
            sample_steps: relax_steps + relax_steps / 2,
            thinning: 15,
            seed: 42,
            grid: 64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.de > 0.0) || !(self.ell > 0.0) || !self.gamma_dot.is_finite() {
            return Err(Error::invalid(format!(
                "need De > 0, ell > 0 and finite shear, got De={}, ell={}, gamma_dot={}",
                self.de, self.ell, self.gamma_dot
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.dt > 1e-3 * 2.0 * self.de {
            return Err(Error::invalid(format!(
                "dt = {} exceeds the stability guard 1e-3·2De = {}",
                self.dt,
                1e-3 * 2.0 * self.de
            )));
        }
        if self.n_paths == 0 || self.sample_steps == 0 || self.thinning == 0 {
            return Err(Error::invalid(
                "n_paths, sample_steps and thinning must be positive".to_string(),
            ));
        }
        if self.grid < 8 {
            return Err(Error::invalid("histogram grid must be at least 8".to_string()));
        }
        Ok(())
    }
}

/// Uniform square histogram over `[-ℓ, ℓ]²` with disk masking.
#[derive(Debug, Clone)]
pub struct Histogram2D {
    grid: usize,
    ell: f64,
    counts: Vec<u64>,
    density: Vec<f64>,
    total_kept: u64,
}

impl Histogram2D {
    /// Normalizes raw counts: cells whose center lies outside the disk are
    /// zeroed and the remaining mass is scaled so `Σ density·cell_area = 1`.
    pub fn from_counts(grid: usize, ell: f64, mut counts: Vec<u64>) -> Result<Self> {
        if counts.len() != grid * grid {
            return Err(Error::DimensionMismatch(format!(
                "histogram expects {} cells, got {}",
                grid * grid,
                counts.len()
            )));
        }
        let cell = 2.0 * ell / grid as f64;
        for iy in 0..grid {
            for ix in 0..grid {
                let c = cell_center(grid, ell, ix, iy);
                if c[0].hypot(c[1]) >= ell {
                    counts[iy * grid + ix] = 0;
                }
            }
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::invalid("histogram has no samples inside the disk"));
        }
        let area = cell * cell;
        let density = counts
            .iter()
            .map(|&c| c as f64 / (total as f64 * area))
            .collect();
        Ok(Histogram2D {
            grid,
            ell,
            counts,
            density,
            total_kept: total,
        })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Normalized density per cell (zero outside the disk).
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn total_samples(&self) -> u64 {
        self.total_kept
    }

    pub fn cell_area(&self) -> f64 {
        let cell = 2.0 * self.ell / self.grid as f64;
        cell * cell
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> [f64; 2] {
        cell_center(self.grid, self.ell, ix, iy)
    }

    /// Empirical second moments `(⟨Q₁²⟩, ⟨Q₂²⟩, ⟨Q₁Q₂⟩)` of the density.
    pub fn second_moments(&self) -> (f64, f64, f64) {
        let area = self.cell_area();
        let mut q11 = 0.0;
        let mut q22 = 0.0;
        let mut q12 = 0.0;
        for iy in 0..self.grid {
            for ix in 0..self.grid {
                let d = self.density[iy * self.grid + ix];
                if d == 0.0 {
                    continue;
                }
                let c = self.cell_center(ix, iy);
                q11 += d * c[0] * c[0] * area;
                q22 += d * c[1] * c[1] * area;
                q12 += d * c[0] * c[1] * area;
            }
        }
        (q11, q22, q12)
    }

    /// Empirical mean `(⟨Q₁⟩, ⟨Q₂⟩)`.
    pub fn mean(&self) -> [f64; 2] {
        let area = self.cell_area();
        let mut m = [0.0, 0.0];
        for iy in 0..self.grid {
            for ix in 0..self.grid {
                let d = self.density[iy * self.grid + ix];
                let c = self.cell_center(ix, iy);
                m[0] += d * c[0] * area;
                m[1] += d * c[1] * area;
            }
        }
        m
    }
}

fn cell_center(grid: usize, ell: f64, ix: usize, iy: usize) -> [f64; 2] {
    let cell = 2.0 * ell / grid as f64;
    [
        -ell + (ix as f64 + 0.5) * cell,
        -ell + (iy as f64 + 0.5) * cell,
    ]
}

/// Counters accumulated during a run.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct SdeStats {
    /// Proposed steps rejected for leaving the disk.
    pub rejections: u64,
    /// Times a step had to be retried at half the step size.
    pub dt_subdivisions: u64,
    pub total_samples: u64,
    /// Largest sampled radius (must stay below `ℓ`).
    pub max_radius: f64,
}

/// Simulates the dumbbell SDE and returns the stationary histogram.
pub fn simulate(config: &SdeConfig) -> Result<Histogram2D> {
    simulate_with_stats(config).map(|(h, _)| h)
}

/// Like [`simulate`], also returning run counters.
pub fn simulate_with_stats(config: &SdeConfig) -> Result<(Histogram2D, SdeStats)> {
    config.validate()?;
    let g = config.grid;

    let (counts, stats) = (0..config.n_paths)
        .into_par_iter()
        .try_fold(
            || (vec![0u64; g * g], SdeStats::default()),
            |(mut counts, mut stats), path| -> Result<(Vec<u64>, SdeStats)> {
                run_path(config, path, &mut counts, &mut stats)?;
                Ok((counts, stats))
            },
        )
        .try_reduce(
            || (vec![0u64; g * g], SdeStats::default()),
            |(mut ca, sa), (cb, sb)| {
                for (a, b) in ca.iter_mut().zip(&cb) {
                    *a += b;
                }
                Ok((
                    ca,
                    SdeStats {
                        rejections: sa.rejections + sb.rejections,
                        dt_subdivisions: sa.dt_subdivisions + sb.dt_subdivisions,
                        total_samples: sa.total_samples + sb.total_samples,
                        max_radius: sa.max_radius.max(sb.max_radius),
                    },
                ))
            },
        )?;

    let hist = Histogram2D::from_counts(g, config.ell, counts)?;
    Ok((hist, stats))
}

fn run_path(
    config: &SdeConfig,
    path: usize,
    counts: &mut [u64],
    stats: &mut SdeStats,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(path as u64 + 1);

    // start uniformly in the half-radius disk
    let r = 0.5 * config.ell * rng.random::<f64>().sqrt();
    let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let mut q = [r * th.cos(), r * th.sin()];

    for step in 0..config.burn_in_steps {
        q = advance(config, q, config.dt, 0, path, step, &mut rng, stats)?;
    }
    let g = config.grid;
    let cell = 2.0 * config.ell / g as f64;
    for step in 1..=config.sample_steps {
        q = advance(
            config,
            q,
            config.dt,
            0,
            path,
            config.burn_in_steps + step,
            &mut rng,
            stats,
        )?;
        if step % config.thinning == 0 {
            let ix = (((q[0] + config.ell) / cell) as usize).min(g - 1);
            let iy = (((q[1] + config.ell) / cell) as usize).min(g - 1);
            counts[iy * g + ix] += 1;
            stats.total_samples += 1;
            stats.max_radius = stats.max_radius.max(q[0].hypot(q[1]));
        }
    }
    Ok(())
}

const REJECTIONS_PER_LEVEL: usize = 100;
const MAX_SUBDIVISION_DEPTH: usize = 20;

/// One Euler-Maruyama step with boundary rejection: a proposal leaving the
/// disk is redrawn with fresh noise; past the rejection cap the step is
/// retried as two half steps, a few levels deep, before giving up.
#[allow(clippy::too_many_arguments)]
fn advance(
    config: &SdeConfig,
    q: [f64; 2],
    dt: f64,
    depth: usize,
    path: usize,
    step: usize,
    rng: &mut ChaCha8Rng,
    stats: &mut SdeStats,
) -> Result<[f64; 2]> {
    let ell2 = config.ell * config.ell;
    let sigma = (dt / config.de).sqrt();
    let denom = 1.0 - (q[0] * q[0] + q[1] * q[1]) / ell2;
    let spring = 1.0 / (2.0 * config.de * denom);
    let drift = [
        config.gamma_dot * q[1] - spring * q[0],
        -spring * q[1],
    ];
    let limit = config.ell * (1.0 - 1e-9);
    for _ in 0..REJECTIONS_PER_LEVEL {
        let xi0: f64 = rng.sample(StandardNormal);
        let xi1: f64 = rng.sample(StandardNormal);
        let cand = [
            q[0] + drift[0] * dt + sigma * xi0,
            q[1] + drift[1] * dt + sigma * xi1,
        ];
        if cand[0].hypot(cand[1]) < limit {
            return Ok(cand);
        }
        stats.rejections += 1;
    }
    if depth >= MAX_SUBDIVISION_DEPTH {
        return Err(Error::PathAbort {
            path,
            step,
            reason: format!(
                "rejection cap exceeded at |Q| = {:.6} with dt = {dt:e}",
                q[0].hypot(q[1])
            ),
        });
    }
    stats.dt_subdivisions += 1;
    let half = advance(config, q, 0.5 * dt, depth + 1, path, step, rng, stats)?;
    advance(config, half, 0.5 * dt, depth + 1, path, step, rng, stats)
}

/// Relative second-moment gaps between histogram and PDE solution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentGaps {
    pub q11: f64,
    pub q22: f64,
    pub q12: f64,
}

/// Outcome of a Monte Carlo / finite-element comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompareReport {
    /// `Σ |φ_cell - hist_cell| · cell_area` over the common masked grid,
    /// both fields renormalized on that mask.
    pub l1_distance: f64,
    pub moment_gaps: MomentGaps,
    /// Cells entering the comparison.
    pub cells: usize,
}

/// Compares a normalized histogram with a unit-mass PDE solution on the
/// histogram grid. The PDE density is P1-interpolated at cell centers and
/// both fields are renormalized over the cells covered by the mesh.
pub fn compare(hist: &Histogram2D, sol: &Solution) -> Result<CompareReport> {
    if (hist.ell() - sol.mesh.radius()).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "histogram extent {} does not match the solution disk radius {}",
            hist.ell(),
            sol.mesh.radius()
        )));
    }
    if (sol.moments.mass - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "comparison requires a unit-mass solution, got mass = {}",
            sol.moments.mass
        )));
    }
    if hist.total_samples() < 10_000 {
        return Err(Error::invalid(format!(
            "comparison requires at least 1e4 samples, got {}",
            hist.total_samples()
        )));
    }
    let locator = TriLocator::new(&sol.mesh);
    let g = hist.grid();
    let area = hist.cell_area();

    let mut pde = vec![0.0f64; g * g];
    let mut mask = vec![false; g * g];
    for iy in 0..g {
        for ix in 0..g {
            let c = hist.cell_center(ix, iy);
            if c[0].hypot(c[1]) >= hist.ell() {
                continue;
            }
            if let Some(v) = locator.eval_p1(&sol.phi, c) {
                pde[iy * g + ix] = v.max(0.0);
                mask[iy * g + ix] = true;
            }
        }
    }

    let pde_mass: f64 = (0..g * g).filter(|&i| mask[i]).map(|i| pde[i] * area).sum();
    let mc_mass: f64 = (0..g * g)
        .filter(|&i| mask[i])
        .map(|i| hist.density()[i] * area)
        .sum();
    if pde_mass <= 0.0 || mc_mass <= 0.0 {
        return Err(Error::invalid("comparison mask carries no mass".to_string()));
    }

    let mut l1 = 0.0;
    let mut h = [0.0f64; 3];
    let mut p = [0.0f64; 3];
    let mut cells = 0;
    for iy in 0..g {
        for ix in 0..g {
            let i = iy * g + ix;
            if !mask[i] {
                continue;
            }
            cells += 1;
            let dp = pde[i] / pde_mass;
            let dh = hist.density()[i] / mc_mass;
            l1 += (dp - dh).abs() * area;
            let c = hist.cell_center(ix, iy);
            h[0] += dh * c[0] * c[0] * area;
            h[1] += dh * c[1] * c[1] * area;
            h[2] += dh * c[0] * c[1] * area;
            p[0] += dp * c[0] * c[0] * area;
            p[1] += dp * c[1] * c[1] * area;
            p[2] += dp * c[0] * c[1] * area;
        }
    }
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    Ok(CompareReport {
        l1_distance: l1,
        moment_gaps: MomentGaps {
            q11: rel(h[0], p[0]),
            q22: rel(h[1], p[1]),
            q12: rel(h[2], p[2]),
        },
        cells,
    })
}

/// `L¹` distance between the histogram and the analytic Maxwellian of the
/// zero-shear model, both renormalized over the kept cells.
pub fn l1_distance_to_maxwellian(
    hist: &Histogram2D,
    model: &crate::potential::ConfinementModel,
) -> Result<f64> {
    if (hist.ell() - model.radius()).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "histogram extent {} does not match the model radius {}",
            hist.ell(),
            model.radius()
        )));
    }
    let g = hist.grid();
    let area = hist.cell_area();
    let mut m = vec![0.0f64; g * g];
    for iy in 0..g {
        for ix in 0..g {
            let c = hist.cell_center(ix, iy);
            if c[0].hypot(c[1]) < hist.ell() {
                m[iy * g + ix] = model.maxwellian(c)?;
            }
        }
    }
    let m_mass: f64 = m.iter().map(|v| v * area).sum();
    let mut l1 = 0.0;
    for i in 0..g * g {
        l1 += (m[i] / m_mass - hist.density()[i]).abs() * area;
    }
    Ok(l1)
}
