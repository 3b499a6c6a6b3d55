//! Executes a scenario: particle replicates or a deterministic solver, plus
//! the designated reference and the error report.

use std::time::Instant;

use apmc_core::ensemble::{sample_from_density, sample_with_particle_mass};
use apmc_core::goldstein_taylor::{GtApmc, GtStandard, HeatWalk};
use apmc_core::radiative_transport::{diffusion_coefficient, NoiseSpeed, RtApmc, RtHeatWalk, RtMicroMacro, RtStandard};
use apmc_core::reference::{
    heat_fd_solve, kinetic_upwind_solve, steady_slab_solve, GridFunction, HeatMode, HeatParams, KineticModel,
    KineticParams, ReferenceBoundary, SteadyParams,
};
use apmc_core::simulation::step_schedule;
use apmc_core::stochastics::replicate_seed;
use apmc_core::{CellStats, CoefficientField, Geometry, Scheme, Simulation, SpatialGrid, TimeAverage};

use crate::error::{Result, SimError};
use crate::metrics::{field_error, Norm};
use crate::parallel::Parallel;
use crate::report::{ComparisonReport, FieldErrors, ReplicateStats, SnapshotReport};
use crate::scenario::{BoundarySpec, Model, NoiseSpeedName, ReferenceSpec, Scenario, SchemeName};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub stats: CellStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRun {
    pub replicate: u32,
    pub seed: u64,
    pub snapshots: Vec<Snapshot>,
    pub steps: u64,
    pub average_samples: u64,
    pub live_particles: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scenario: Scenario,
    pub grid: SpatialGrid,
    pub replicates: Vec<ReplicateRun>,
    /// Replicate mean, or the deterministic solution.
    pub result: Vec<Snapshot>,
    /// Per-cell standard error of the replicate mean (two or more replicates).
    pub stderr: Option<Vec<Snapshot>>,
    pub reference: Option<Vec<Snapshot>>,
    pub report: ComparisonReport,
}

/// Runs `scenario` on a pool of `options.workers` threads.
pub fn run_scenario(scenario: &Scenario, options: &RunOptions) -> Result<RunOutput> {
    scenario.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = options.workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| SimError::field("workers", e))?;
    pool.install(|| run_in_pool(scenario))
}

fn run_in_pool(scenario: &Scenario) -> Result<RunOutput> {
    let start = Instant::now();
    let grid = scenario.grid()?;
    let dt = scenario.dt()?;
    let times = scenario.snapshot_times();

    let (replicates, result, stderr, particle_mass) = if scenario.scheme.is_deterministic() {
        let spec = ReferenceSpec { scheme: scenario.scheme, ..scenario.reference.unwrap_or(ReferenceSpec::new(scenario.scheme, 1)) };
        (Vec::new(), deterministic(scenario, &grid, &spec)?, None, None)
    } else {
        let m_p = particle_mass(scenario, &grid);
        let runs = (0..scenario.replicates)
            .map(|r| run_replicate(scenario, &grid, dt, r, m_p))
            .collect::<Result<Vec<_>>>()?;
        let (mean, err) = replicate_mean(&runs, &times);
        (runs, mean, err, Some(m_p))
    };
    let reference = match &scenario.reference {
        Some(spec) if !scenario.scheme.is_deterministic() => Some(deterministic(scenario, &grid, spec)?),
        _ => None,
    };

    let snapshots = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let reference = reference.as_ref().map(|r| &r[k].stats);
            SnapshotReport {
                time: t,
                csv: snapshot_name("snapshot", t),
                reference_csv: reference.map(|_| snapshot_name("reference", t)),
                stderr_csv: stderr.as_ref().map(|_| snapshot_name("stderr", t)),
                replicate_csv: if replicates.len() > 1 {
                    (0..replicates.len()).map(|r| format!("replicate_{r}/{}", snapshot_name("snapshot", t))).collect()
                } else {
                    Vec::new()
                },
                rho: reference.map(|rs| errors(&grid, &result[k].stats, &replicates, k, rs, |s| s.rho.clone())),
                j: reference.and_then(|rs| {
                    let jx = |s: &CellStats| s.flux.iter().map(|f| f[0]).collect::<Vec<_>>();
                    let jy = |s: &CellStats| s.flux.iter().map(|f| f[1]).collect::<Vec<_>>();
                    let e = errors(&grid, &result[k].stats, &replicates, k, rs, jx);
                    if !e.l1.is_finite() {
                        return None;
                    }
                    if grid.dim() == 2 {
                        let ey = errors(&grid, &result[k].stats, &replicates, k, rs, jy);
                        return Some(FieldErrors::combine(e, ey));
                    }
                    Some(e)
                }),
            }
        })
        .collect();

    let report = ComparisonReport {
        scenario: scenario.name.clone(),
        model: scenario.model,
        scheme: scenario.scheme,
        reference: scenario.reference.map(|r| r.scheme).filter(|_| !scenario.scheme.is_deterministic()),
        particles: scenario.particles,
        particle_mass,
        replicates: scenario.replicates,
        seed: scenario.seed,
        dt,
        steps: replicates.first().map_or(0, |r| r.steps),
        time_averaged: scenario.time_average.is_some(),
        average_samples: replicates.first().map_or(0, |r| r.average_samples),
        live_particles: replicates.iter().map(|r| r.live_particles as u64).collect(),
        runtime_seconds: start.elapsed().as_secs_f64(),
        snapshots,
    };
    Ok(RunOutput { scenario: scenario.clone(), grid, replicates, result, stderr, reference, report })
}

pub fn snapshot_name(prefix: &str, time: f64) -> String {
    format!("{prefix}_t{time:.6}.csv")
}

fn errors(
    grid: &SpatialGrid,
    mean: &CellStats,
    replicates: &[ReplicateRun],
    k: usize,
    reference: &CellStats,
    field: impl Fn(&CellStats) -> Vec<f64>,
) -> FieldErrors {
    let r = field(reference);
    let e = |s: &CellStats, norm| field_error(grid, &field(s), &r, norm).unwrap_or(f64::NAN);
    FieldErrors {
        l1: e(mean, Norm::L1),
        linf: e(mean, Norm::Linf),
        replicate_l1: ReplicateStats::from_values(replicates.iter().map(|run| e(&run.snapshots[k].stats, Norm::L1)).collect()),
        replicate_linf: ReplicateStats::from_values(
            replicates.iter().map(|run| e(&run.snapshots[k].stats, Norm::Linf)).collect(),
        ),
    }
}

/// `m_p`: explicit value, else initial mass over `N`, else largest inflow
/// density times the domain size over `N`.
pub fn particle_mass(scenario: &Scenario, grid: &SpatialGrid) -> f64 {
    if let Some(m) = scenario.particle_mass {
        return m;
    }
    let mass: f64 = scenario.initial.on_grid(grid).iter().sum::<f64>() * grid.cell_volume();
    let n = scenario.particles as f64;
    if mass > 0.0 {
        mass / n
    } else {
        scenario.boundaries.max_density() * grid.domain_volume() / n
    }
}

fn geometry(model: Model) -> Geometry {
    match model {
        Model::Rt2d => Geometry::Circle2d,
        _ => Geometry::Slab1d,
    }
}

fn run_replicate(scenario: &Scenario, grid: &SpatialGrid, dt: f64, replicate: u32, m_p: f64) -> Result<ReplicateRun> {
    let field = scenario.coefficients.build()?.clamped_to(grid);
    let eps = scenario.coefficients.background.eps;
    let g = geometry(scenario.model);
    let seed = replicate_seed(scenario.seed, replicate as u64);
    let ctx = Ctx { scenario, grid, dt, seed, replicate, m_p, field: &field };
    match (scenario.model, scenario.scheme) {
        (Model::Gt, SchemeName::StandardMc) => ctx.run(GtStandard::new(eps)?, true),
        (Model::Gt, SchemeName::Apmc) => ctx.run(GtApmc::new(eps)?, true),
        (Model::Gt, SchemeName::HeatWalk) => ctx.run(HeatWalk::new(1.0)?, false),
        (_, SchemeName::StandardMc) => ctx.run(RtStandard::new(field.clone(), g)?, true),
        (_, SchemeName::Apmc) => {
            let noise = match scenario.noise_speed {
                NoiseSpeedName::Unscaled => NoiseSpeed::Unscaled,
                NoiseSpeedName::Scaled => NoiseSpeed::Scaled,
            };
            ctx.run(RtApmc::new(field.clone(), g, noise)?, true)
        }
        (_, SchemeName::ApmcMicromacro) => ctx.run(RtMicroMacro::new(field.clone(), g)?, true),
        (_, SchemeName::HeatWalk) => ctx.run(RtHeatWalk::new(field.clone(), g)?, false),
        (_, s) => Err(SimError::field("scheme", format!("{} is not a particle scheme", s.as_str()))),
    }
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    grid: &'a SpatialGrid,
    dt: f64,
    seed: u64,
    replicate: u32,
    m_p: f64,
    field: &'a CoefficientField,
}

impl Ctx<'_> {
    fn run<S: Scheme>(&self, scheme: S, with_flux: bool) -> Result<ReplicateRun> {
        let s = self.scenario;
        let grid = *self.grid;
        let density = s.initial.on_grid(&grid);
        let space = scheme.velocity_space();
        let mass: f64 = density.iter().sum::<f64>() * grid.cell_volume();
        let ensemble = if s.particle_mass.is_none() && mass > 0.0 {
            sample_from_density(&grid, &density, s.particles as usize, space, self.seed)?
        } else {
            sample_with_particle_mass(&grid, &density, self.m_p, space, self.seed)?
        };
        let bcs = s.boundaries.build(grid.dim())?;
        let mut sim = Simulation::new(grid, bcs, scheme, ensemble, self.seed, self.dt)?;
        let eps: Vec<f64> = self.field.on_grid(&grid).iter().map(|c| c.eps).collect();
        let eps = with_flux.then_some(eps.as_slice());

        let exec = Parallel;
        let average_from = s.time_average.map(|a| a.start);
        let mut average = TimeAverage::new(grid.num_cells());
        let mut snapshots = Vec::new();
        let mut now = 0.0;
        for t in s.snapshot_times() {
            for step in step_schedule(t - now, self.dt)? {
                sim.step(step, &exec)?;
                if average_from.is_some_and(|a| sim.time() >= a - 1e-12 * self.dt) {
                    average.accumulate(&sim.stats(eps)?)?;
                }
            }
            now = t;
            let last = (t - s.final_time).abs() <= 1e-12 * s.final_time;
            let stats = match average.mean() {
                Some(mean) if last => mean,
                _ => sim.stats(eps)?,
            };
            snapshots.push(Snapshot { time: t, stats });
        }
        Ok(ReplicateRun {
            replicate: self.replicate,
            seed: self.seed,
            snapshots,
            steps: sim.steps_taken(),
            average_samples: average.samples(),
            live_particles: sim.ensemble().live_count(),
        })
    }
}

/// Cellwise replicate mean and, for two or more replicates, standard error.
fn replicate_mean(runs: &[ReplicateRun], times: &[f64]) -> (Vec<Snapshot>, Option<Vec<Snapshot>>) {
    let r = runs.len() as f64;
    let mut means = Vec::new();
    let mut errs = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let cells = runs[0].snapshots[k].stats.rho.len();
        let mut mean = CellStats { rho: vec![0.0; cells], flux: vec![[0.0; 2]; cells], samples: runs[0].snapshots[k].stats.samples };
        for run in runs {
            let s = &run.snapshots[k].stats;
            for c in 0..cells {
                mean.rho[c] += s.rho[c] / r;
                mean.flux[c][0] += s.flux[c][0] / r;
                mean.flux[c][1] += s.flux[c][1] / r;
            }
        }
        if runs.len() > 1 {
            let mut var = CellStats { rho: vec![0.0; cells], flux: vec![[0.0; 2]; cells], samples: runs.len() as u64 };
            for run in runs {
                let s = &run.snapshots[k].stats;
                for c in 0..cells {
                    var.rho[c] += (s.rho[c] - mean.rho[c]).powi(2) / (r - 1.0);
                    for a in 0..2 {
                        var.flux[c][a] += (s.flux[c][a] - mean.flux[c][a]).powi(2) / (r - 1.0);
                    }
                }
            }
            var.rho.iter_mut().for_each(|v| *v = (*v / r).sqrt());
            var.flux.iter_mut().for_each(|f| f.iter_mut().for_each(|v| *v = (*v / r).sqrt()));
            errs.push(Snapshot { time: t, stats: var });
        }
        means.push(Snapshot { time: t, stats: mean });
    }
    (means, (runs.len() > 1).then_some(errs))
}

fn diffusivity(model: Model) -> f64 {
    match model {
        Model::Gt => 1.0,
        Model::Rt1d => diffusion_coefficient(Geometry::Slab1d),
        Model::Rt2d => diffusion_coefficient(Geometry::Circle2d),
    }
}

fn reference_boundary(b: Option<BoundarySpec>) -> ReferenceBoundary {
    match b {
        Some(BoundarySpec::Dirichlet(v)) => ReferenceBoundary::Dirichlet(v),
        _ => ReferenceBoundary::Periodic,
    }
}

/// Deterministic solution at every snapshot time, computed on the refined
/// grid and cell-averaged onto `grid`.
pub fn deterministic(scenario: &Scenario, grid: &SpatialGrid, spec: &ReferenceSpec) -> Result<Vec<Snapshot>> {
    let fine = grid.refine(spec.refine)?;
    let field = scenario.coefficients.build()?.clamped_to(&fine);
    let coeffs = field.on_grid(&fine);
    let h = (0..fine.dim()).map(|a| fine.spacing(a)).fold(f64::INFINITY, f64::min);
    let b = &scenario.boundaries;
    let bcs = [
        reference_boundary(Some(b.left)),
        reference_boundary(Some(b.right)),
        reference_boundary(b.bottom),
        reference_boundary(b.top),
    ];
    let rho0 = GridFunction::new(fine, scenario.initial.on_grid(&fine))?;
    let times = scenario.snapshot_times();
    let mut out = Vec::with_capacity(times.len());
    match spec.scheme {
        SchemeName::DiffusionRef => {
            let d = diffusivity(scenario.model);
            let a_max = coeffs.iter().map(|c| d / c.sigma_s).fold(0.0, f64::max);
            let dt = match spec.dt {
                Some(rule) => rule.resolve(&fine),
                None => 0.4 * h * h / (fine.dim() as f64 * a_max),
            };
            let params = HeatParams { diffusivity: d, field, boundaries: bcs, dt, mode: HeatMode::Explicit };
            let mut rho = rho0;
            let mut now = 0.0;
            for t in times {
                let m = heat_fd_solve(&rho, &params, t - now)?;
                now = t;
                rho = m.rho.clone();
                out.push(Snapshot { time: t, stats: m.restrict(grid)?.into_stats() });
            }
        }
        SchemeName::KineticRef => {
            let model = match scenario.model {
                Model::Gt => KineticModel::GoldsteinTaylor,
                _ => KineticModel::Slab { nodes: spec.velocity_nodes },
            };
            let vmax = match model {
                KineticModel::GoldsteinTaylor => 1.0,
                KineticModel::Slab { nodes } => {
                    apmc_core::reference::quadrature::gauss_legendre(nodes).0.iter().fold(0.0f64, |m, v| m.max(v.abs()))
                }
            };
            let dt = match spec.dt {
                Some(rule) => rule.resolve(&fine),
                None => coeffs
                    .iter()
                    .map(|c| {
                        let relax = if c.sigma_s > 0.0 { c.eps * c.eps / c.sigma_s } else { f64::INFINITY };
                        (c.eps * h / vmax).min(relax)
                    })
                    .fold(f64::INFINITY, f64::min),
            };
            let params = KineticParams { model, field, left: bcs[0], right: bcs[1], dt };
            for t in times {
                let m = kinetic_upwind_solve(&rho0, &params, t)?;
                out.push(Snapshot { time: t, stats: m.restrict(grid)?.into_stats() });
            }
        }
        SchemeName::SteadyRef => {
            let inflow = |b: ReferenceBoundary| match b {
                ReferenceBoundary::Dirichlet(v) => v,
                _ => 0.0,
            };
            let params = SteadyParams {
                field,
                inflow_left: inflow(bcs[0]),
                inflow_right: inflow(bcs[1]),
                nodes: spec.velocity_nodes,
            };
            let stats = steady_slab_solve(&fine, &params)?.restrict(grid)?.into_stats();
            for t in times {
                out.push(Snapshot { time: t, stats: stats.clone() });
            }
        }
        s => return Err(SimError::field("reference.scheme", format!("{} is not a deterministic solver", s.as_str()))),
    }
    Ok(out)
}
