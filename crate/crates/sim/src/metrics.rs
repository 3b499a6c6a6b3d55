//! Discrete error norms between a run and a reference profile.

use std::path::Path;

use apmc_core::SpatialGrid;

use crate::error::{Result, SimError};
use crate::output::{read_csv, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    /// Sum of |a - b| times the cell volume.
    L1,
    Linf,
}

impl Norm {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Some(Norm::L1),
            "linf" => Some(Norm::Linf),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Rho,
    /// Flux; in two dimensions the norm of both components as in `FieldErrors::combine`.
    J,
}

impl Field {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rho" => Some(Field::Rho),
            "j" => Some(Field::J),
            _ => None,
        }
    }
}

/// Error between two cell profiles on `grid`. NaN entries propagate.
pub fn field_error(grid: &SpatialGrid, a: &[f64], b: &[f64], norm: Norm) -> Result<f64> {
    if a.len() != b.len() || a.len() != grid.num_cells() {
        return Err(SimError::field("profile", format!("lengths {} and {} on {} cells", a.len(), b.len(), grid.num_cells())));
    }
    let diff = a.iter().zip(b).map(|(p, q)| (p - q).abs());
    Ok(match norm {
        Norm::L1 => diff.sum::<f64>() * grid.cell_volume(),
        Norm::Linf => diff.fold(0.0, |m, d| if d.is_nan() || m.is_nan() { f64::NAN } else { m.max(d) }),
    })
}

/// Error between two in-memory profiles; the cell centres must agree.
pub fn profile_error(run: &Profile, reference: &Profile, norm: Norm, field: Field) -> Result<f64> {
    if run.centers.len() != reference.centers.len()
        || run.centers.iter().zip(&reference.centers).any(|(p, q)| (p[0] - q[0]).abs() > 1e-9 || (p[1] - q[1]).abs() > 1e-9)
    {
        return Err(SimError::field("reference", "the two profiles are on different grids"));
    }
    let grid = run.grid()?;
    match field {
        Field::Rho => field_error(&grid, &run.rho, &reference.rho, norm),
        Field::J => {
            let comp = |p: &Profile, a: usize| p.flux.iter().map(|f| f[a]).collect::<Vec<_>>();
            let ex = field_error(&grid, &comp(run, 0), &comp(reference, 0), norm)?;
            if grid.dim() == 1 {
                return Ok(ex);
            }
            let ey = field_error(&grid, &comp(run, 1), &comp(reference, 1), norm)?;
            Ok(match norm {
                Norm::L1 => ex + ey,
                Norm::Linf => ex.max(ey),
            })
        }
    }
}

/// `profile_error` on two CSV files.
pub fn compute_error(run_csv: &Path, ref_csv: &Path, norm: Norm, field: Field) -> Result<f64> {
    profile_error(&read_csv(run_csv)?, &read_csv(ref_csv)?, norm, field)
}
