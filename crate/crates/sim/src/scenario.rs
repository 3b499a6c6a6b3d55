//! Scenario documents: JSON descriptions of a run.
//!
//! Unknown keys are rejected. Optional fields are omitted when serializing,
//! so parse → serialize → parse is the identity.

use std::path::Path;

use apmc_core::{BoundaryCondition, Boundaries, CoefficientField, Coefficients, Region, SpatialGrid};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Goldstein–Taylor two-speed model.
    Gt,
    /// Radiative transport, slab geometry.
    Rt1d,
    /// Radiative transport, planar domain with directions on the unit circle.
    Rt2d,
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Gt | Model::Rt1d => 1,
            Model::Rt2d => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    StandardMc,
    Apmc,
    ApmcMicromacro,
    HeatWalk,
    KineticRef,
    DiffusionRef,
    SteadyRef,
}

impl SchemeName {
    pub const ALL: [SchemeName; 7] = [
        SchemeName::StandardMc,
        SchemeName::Apmc,
        SchemeName::ApmcMicromacro,
        SchemeName::HeatWalk,
        SchemeName::KineticRef,
        SchemeName::DiffusionRef,
        SchemeName::SteadyRef,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeName::StandardMc => "standard_mc",
            SchemeName::Apmc => "apmc",
            SchemeName::ApmcMicromacro => "apmc_micromacro",
            SchemeName::HeatWalk => "heat_walk",
            SchemeName::KineticRef => "kinetic_ref",
            SchemeName::DiffusionRef => "diffusion_ref",
            SchemeName::SteadyRef => "steady_ref",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|n| n.as_str() == s)
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, SchemeName::KineticRef | SchemeName::DiffusionRef | SchemeName::SteadyRef)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSpeedName {
    #[default]
    Unscaled,
    Scaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cells: Vec<usize>,
}

impl GridSpec {
    pub fn build(&self) -> Result<SpatialGrid> {
        let grid = match (self.lower.as_slice(), self.upper.as_slice(), self.cells.as_slice()) {
            ([lo], [hi], [n]) => SpatialGrid::new_1d(*lo, *hi, *n),
            ([lx, ly], [hx, hy], [nx, ny]) => SpatialGrid::new_2d([*lx, *ly], [*hx, *hy], [*nx, *ny]),
            _ => return Err(SimError::field("grid", "lower, upper and cells must all have length 1 or 2")),
        };
        grid.map_err(|e| SimError::field("grid", e))
    }
}

/// Time step as an absolute value or a multiple of `dx` or `dx^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum DtRule {
    Absolute { value: f64 },
    Dx { factor: f64 },
    Dx2 { factor: f64 },
}

impl DtRule {
    /// Uses the smallest spacing of the grid.
    pub fn resolve(&self, grid: &SpatialGrid) -> f64 {
        let h = (0..grid.dim()).map(|a| grid.spacing(a)).fold(f64::INFINITY, f64::min);
        match *self {
            DtRule::Absolute { value } => value,
            DtRule::Dx { factor } => factor * h,
            DtRule::Dx2 { factor } => factor * h * h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Interval { lo: f64, hi: f64 },
    Rect { x: [f64; 2], y: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
}

impl RegionSpec {
    pub fn to_region(self) -> Region {
        match self {
            RegionSpec::Interval { lo, hi } => Region::Interval { lo, hi },
            RegionSpec::Rect { x, y } => Region::Rect { x, y },
            RegionSpec::Disk { center, radius } => Region::Disk { center, radius },
        }
    }

    fn check(&self, grid: &SpatialGrid, field: &str) -> Result<()> {
        let lo = grid.lower();
        let hi = grid.upper();
        let ok = match *self {
            RegionSpec::Interval { lo: a, hi: b } => grid.dim() == 1 && a < b && a < hi[0] && b > lo[0],
            RegionSpec::Rect { x, y } => {
                grid.dim() == 2 && x[0] < x[1] && y[0] < y[1] && x[0] < hi[0] && x[1] > lo[0] && y[0] < hi[1] && y[1] > lo[1]
            }
            RegionSpec::Disk { center, radius } => grid.dim() == 2 && radius > 0.0 && center.iter().all(|c| c.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(SimError::field(field, "region is malformed, has the wrong dimension, or misses the domain"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientValues {
    pub eps: f64,
    pub sigma_s: f64,
    pub sigma_a: f64,
}

impl From<CoefficientValues> for Coefficients {
    fn from(v: CoefficientValues) -> Self {
        Coefficients::new(v.eps, v.sigma_s, v.sigma_a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientRegion {
    pub region: RegionSpec,
    pub eps: f64,
    pub sigma_s: f64,
    pub sigma_a: f64,
}

/// Piecewise-constant coefficients: a background value and regions painted
/// over it in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub background: CoefficientValues,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<CoefficientRegion>,
}

impl CoefficientSpec {
    pub fn uniform(eps: f64, sigma_s: f64, sigma_a: f64) -> Self {
        Self { background: CoefficientValues { eps, sigma_s, sigma_a }, regions: Vec::new() }
    }

    pub fn build(&self) -> Result<CoefficientField> {
        let mut field = CoefficientField::uniform(self.background.into())
            .map_err(|e| SimError::field("coefficients.background", e))?;
        for (k, r) in self.regions.iter().enumerate() {
            field = field
                .with_region(r.region.to_region(), Coefficients::new(r.eps, r.sigma_s, r.sigma_a))
                .map_err(|e| SimError::field(format!("coefficients.regions[{k}]"), e))?;
        }
        Ok(field)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityRegion {
    pub region: RegionSpec,
    pub density: f64,
}

/// Initial density, painted like the coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub background: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<DensityRegion>,
}

impl DensitySpec {
    pub fn at(&self, pos: [f64; 2]) -> f64 {
        let mut v = self.background;
        for r in &self.regions {
            if r.region.to_region().contains(pos) {
                v = r.density;
            }
        }
        v
    }

    /// Values at the cell centres of `grid`.
    pub fn on_grid(&self, grid: &SpatialGrid) -> Vec<f64> {
        (0..grid.num_cells()).map(|c| self.at(grid.center(c))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    Periodic,
    /// Isotropic equilibrium inflow at this density.
    Dirichlet(f64),
}

impl From<BoundarySpec> for BoundaryCondition {
    fn from(b: BoundarySpec) -> Self {
        match b {
            BoundarySpec::Periodic => BoundaryCondition::Periodic,
            BoundarySpec::Dirichlet(density) => BoundaryCondition::Dirichlet { density },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundariesSpec {
    pub left: BoundarySpec,
    pub right: BoundarySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bottom: Option<BoundarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<BoundarySpec>,
}

impl BoundariesSpec {
    pub fn build(&self, dim: usize) -> Result<Boundaries> {
        let (bottom, top) = match (dim, self.bottom, self.top) {
            (1, None, None) => (BoundarySpec::Periodic, BoundarySpec::Periodic),
            (1, _, _) => return Err(SimError::field("boundaries", "bottom/top are only allowed in two dimensions")),
            (_, Some(b), Some(t)) => (b, t),
            _ => return Err(SimError::field("boundaries", "two-dimensional runs need bottom and top")),
        };
        Ok(Boundaries { left: self.left.into(), right: self.right.into(), bottom: bottom.into(), top: top.into() })
    }

    pub fn sides(&self) -> impl Iterator<Item = BoundarySpec> {
        [Some(self.left), Some(self.right), self.bottom, self.top].into_iter().flatten()
    }

    /// Largest prescribed boundary density.
    pub fn max_density(&self) -> f64 {
        self.sides()
            .map(|b| match b {
                BoundarySpec::Dirichlet(d) => d,
                BoundarySpec::Periodic => 0.0,
            })
            .fold(0.0, f64::max)
    }
}

/// Snapshots from `start` on are averaged into the final output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeAverageSpec {
    pub start: f64,
}

/// Deterministic solver that the particle run is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    pub scheme: SchemeName,
    /// The reference runs on the scenario grid refined this many times per
    /// axis and is cell-averaged back.
    #[serde(default = "one_usize", skip_serializing_if = "is_one_usize")]
    pub refine: usize,
    /// Time step on the refined grid; chosen from the stability limit if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<DtRule>,
    /// Gauss–Legendre directions for the slab solvers.
    #[serde(default = "default_nodes", skip_serializing_if = "is_default_nodes")]
    pub velocity_nodes: usize,
}

impl ReferenceSpec {
    pub fn new(scheme: SchemeName, refine: usize) -> Self {
        Self { scheme, refine, dt: None, velocity_nodes: default_nodes() }
    }
}

fn one_usize() -> usize {
    1
}

fn is_one_usize(v: &usize) -> bool {
    *v == 1
}

fn default_nodes() -> usize {
    16
}

fn is_default_nodes(v: &usize) -> bool {
    *v == 16
}

fn one_u32() -> u32 {
    1
}

fn is_one_u32(v: &u32) -> bool {
    *v == 1
}

fn is_default_noise(v: &NoiseSpeedName) -> bool {
    *v == NoiseSpeedName::Unscaled
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub model: Model,
    pub scheme: SchemeName,
    pub grid: GridSpec,
    pub dt: DtRule,
    pub final_time: f64,
    /// Snapshot times; defaults to the final time alone.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub output_times: Vec<f64>,
    /// Particle count. The particle mass is the initial mass over this count,
    /// or the largest boundary density times the domain size over this count
    /// when the domain starts empty.
    pub particles: u64,
    /// Overrides the particle mass derived from `particles`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle_mass: Option<f64>,
    pub seed: u64,
    pub coefficients: CoefficientSpec,
    pub initial: DensitySpec,
    pub boundaries: BoundariesSpec,
    #[serde(default = "one_u32", skip_serializing_if = "is_one_u32")]
    pub replicates: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_average: Option<TimeAverageSpec>,
    #[serde(default, skip_serializing_if = "is_default_noise")]
    pub noise_speed: NoiseSpeedName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSpec>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Io { path: path.to_path_buf(), source: e })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn grid(&self) -> Result<SpatialGrid> {
        self.grid.build()
    }

    pub fn dt(&self) -> Result<f64> {
        Ok(self.dt.resolve(&self.grid()?))
    }

    /// Snapshot times, ascending, ending at the final time.
    pub fn snapshot_times(&self) -> Vec<f64> {
        if self.output_times.is_empty() {
            vec![self.final_time]
        } else {
            self.output_times.clone()
        }
    }

    /// Checks every field; the error names the offending one.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(SimError::field("name", "must not be empty"));
        }
        let grid = self.grid()?;
        if grid.dim() != self.model.dim() {
            return Err(SimError::field("grid", format!("model needs a {}-dimensional grid", self.model.dim())));
        }
        let dt = self.dt.resolve(&grid);
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::field("dt", "must resolve to a positive time step"));
        }
        if !(self.final_time.is_finite() && self.final_time > 0.0) {
            return Err(SimError::field("final_time", "must be positive"));
        }
        let times = self.snapshot_times();
        if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !(*t > 0.0)) {
            return Err(SimError::field("output_times", "must be positive and strictly increasing"));
        }
        if (times[times.len() - 1] - self.final_time).abs() > 1e-12 * self.final_time {
            return Err(SimError::field("output_times", "the last output time must equal final_time"));
        }
        if self.particles == 0 {
            return Err(SimError::field("particles", "must be positive"));
        }
        if let Some(m) = self.particle_mass {
            if !(m.is_finite() && m > 0.0) {
                return Err(SimError::field("particle_mass", "must be positive"));
            }
        }
        if self.replicates == 0 {
            return Err(SimError::field("replicates", "must be at least 1"));
        }

        self.coefficients.build()?;
        for (k, r) in self.coefficients.regions.iter().enumerate() {
            r.region.check(&grid, &format!("coefficients.regions[{k}].region"))?;
        }
        if self.model == Model::Gt {
            let b = self.coefficients.background;
            if !self.coefficients.regions.is_empty() || b.sigma_s != 1.0 || b.sigma_a != 0.0 {
                return Err(SimError::field(
                    "coefficients",
                    "the Goldstein–Taylor model takes a uniform eps with sigma_s = 1 and sigma_a = 0",
                ));
            }
        }

        let d = &self.initial;
        if !(d.background.is_finite() && d.background >= 0.0) {
            return Err(SimError::field("initial.background", "must be finite and nonnegative"));
        }
        for (k, r) in d.regions.iter().enumerate() {
            r.region.check(&grid, &format!("initial.regions[{k}].region"))?;
            if !(r.density.is_finite() && r.density >= 0.0) {
                return Err(SimError::field(format!("initial.regions[{k}].density"), "must be finite and nonnegative"));
            }
        }

        let bcs = self.boundaries.build(grid.dim())?;
        bcs.validate(&grid).map_err(|e| SimError::field("boundaries", e))?;
        for b in self.boundaries.sides() {
            if let BoundarySpec::Dirichlet(v) = b {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(SimError::field("boundaries", "Dirichlet densities must be finite and nonnegative"));
                }
            }
        }
        let initial_mass: f64 = d.on_grid(&grid).iter().sum::<f64>() * grid.cell_volume();
        if initial_mass == 0.0 && self.boundaries.max_density() == 0.0 && self.particle_mass.is_none() {
            return Err(SimError::field("initial", "the run carries no mass: set an initial density or inflow"));
        }

        if let Some(ta) = self.time_average {
            if !(ta.start >= 0.0 && ta.start < self.final_time) {
                return Err(SimError::field("time_average.start", "must lie in [0, final_time)"));
            }
        }
        if self.noise_speed == NoiseSpeedName::Scaled && !(self.scheme == SchemeName::Apmc && self.model != Model::Gt) {
            return Err(SimError::field("noise_speed", "the scaled reading only applies to the radiative transport AP scheme"));
        }
        self.check_scheme(self.scheme, "scheme")?;
        if let Some(r) = &self.reference {
            if !r.scheme.is_deterministic() {
                return Err(SimError::field("reference.scheme", "must be kinetic_ref, diffusion_ref or steady_ref"));
            }
            if r.refine == 0 {
                return Err(SimError::field("reference.refine", "must be at least 1"));
            }
            self.check_scheme(r.scheme, "reference.scheme")?;
        }
        Ok(())
    }

    fn check_scheme(&self, scheme: SchemeName, field: &'static str) -> Result<()> {
        let coeffs = std::iter::once(self.coefficients.background)
            .chain(self.coefficients.regions.iter().map(|r| CoefficientValues { eps: r.eps, sigma_s: r.sigma_s, sigma_a: r.sigma_a }));
        match scheme {
            SchemeName::StandardMc | SchemeName::KineticRef => {
                if coeffs.clone().any(|c| !(c.eps > 0.0)) {
                    return Err(SimError::field(field, "needs eps > 0 everywhere"));
                }
            }
            SchemeName::Apmc | SchemeName::ApmcMicromacro => {
                if self.model != Model::Gt && coeffs.clone().any(|c| c.eps == 0.0 && c.sigma_s == 0.0) {
                    return Err(SimError::field(field, "eps and sigma_s cannot both vanish"));
                }
                if scheme == SchemeName::ApmcMicromacro && self.model == Model::Gt {
                    return Err(SimError::field(field, "the micro-macro variant is defined for radiative transport"));
                }
            }
            SchemeName::HeatWalk | SchemeName::DiffusionRef => {
                if coeffs.clone().any(|c| !(c.sigma_s > 0.0)) {
                    return Err(SimError::field(field, "the diffusion limit needs sigma_s > 0 everywhere"));
                }
            }
            SchemeName::SteadyRef => {}
        }
        match scheme {
            SchemeName::KineticRef if self.model == Model::Rt2d => {
                Err(SimError::field(field, "the kinetic reference is one-dimensional"))
            }
            SchemeName::SteadyRef if self.model != Model::Rt1d => {
                Err(SimError::field(field, "the steady reference needs the slab model"))
            }
            SchemeName::SteadyRef
                if self.boundaries.sides().any(|b| b == BoundarySpec::Periodic) =>
            {
                Err(SimError::field(field, "the steady reference needs inflow boundaries"))
            }
            _ => Ok(()),
        }
    }
}
