use alloc::vec;
use alloc::vec::Vec;

use super::{ParticleEnsemble, SpatialGrid};
use crate::error::{Error, Result};

/// Per-cell moments of the empirical measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    /// Density per unit length (1D) or area (2D).
    pub rho: Vec<f64>,
    /// Flux `j`; the second component is zero in 1D. NaN when undefined.
    pub flux: Vec<[f64; 2]>,
    /// Number of snapshots folded into these values.
    pub samples: u64,
}

/// Live particles per cell. Fails if a live particle is outside the domain.
pub fn cell_counts(ensemble: &ParticleEnsemble, grid: &SpatialGrid) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; grid.num_cells()];
    for p in ensemble.particles().iter().filter(|p| p.alive) {
        let cell = grid
            .locate(p.position)
            .ok_or(Error::ParticleOutsideDomain { id: p.id, position: p.position })?;
        counts[cell] += 1;
    }
    Ok(counts)
}

/// Histogram estimate `rho_j = m_p * count_j / |cell|`.
pub fn histogram_density(ensemble: &ParticleEnsemble, grid: &SpatialGrid) -> Result<Vec<f64>> {
    let scale = ensemble.particle_mass() / grid.cell_volume();
    Ok(cell_counts(ensemble, grid)?.into_iter().map(|c| c as f64 * scale).collect())
}

/// Odd-moment estimate `j_j = m_p * sum_k V_k / (|cell| * eps_j)`.
///
/// With two-speed labels `V_k = +-1` this is the signed count difference.
pub fn flux_estimate(ensemble: &ParticleEnsemble, grid: &SpatialGrid, eps: &[f64]) -> Result<Vec<[f64; 2]>> {
    if eps.len() != grid.num_cells() {
        return Err(Error::GridMismatch);
    }
    if let Some(cell) = eps.iter().position(|&e| !(e > 0.0)) {
        return Err(Error::ZeroScaling { cell });
    }
    let mut sums = vec![[0.0f64; 2]; grid.num_cells()];
    for p in ensemble.particles().iter().filter(|p| p.alive) {
        let cell = grid
            .locate(p.position)
            .ok_or(Error::ParticleOutsideDomain { id: p.id, position: p.position })?;
        sums[cell][0] += p.velocity[0];
        sums[cell][1] += p.velocity[1];
    }
    let m = ensemble.particle_mass() / grid.cell_volume();
    Ok(sums
        .into_iter()
        .zip(eps)
        .map(|(s, &e)| [m * s[0] / e, m * s[1] / e])
        .collect())
}

/// Density and flux together. The flux is NaN where `eps` is missing or zero.
pub fn cell_stats(ensemble: &ParticleEnsemble, grid: &SpatialGrid, eps: Option<&[f64]>) -> Result<CellStats> {
    let rho = histogram_density(ensemble, grid)?;
    let flux = match eps {
        Some(e) => match flux_estimate(ensemble, grid, e) {
            Ok(f) => f,
            Err(Error::ZeroScaling { .. }) => vec![[f64::NAN; 2]; grid.num_cells()],
            Err(other) => return Err(other),
        },
        None => vec![[f64::NAN; 2]; grid.num_cells()],
    };
    Ok(CellStats { rho, flux, samples: 1 })
}

/// Running arithmetic mean of snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeAverage {
    sum_rho: Vec<f64>,
    sum_flux: Vec<[f64; 2]>,
    samples: u64,
}

impl TimeAverage {
    pub fn new(cells: usize) -> Self {
        Self { sum_rho: vec![0.0; cells], sum_flux: vec![[0.0; 2]; cells], samples: 0 }
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn accumulate(&mut self, current: &CellStats) -> Result<()> {
        if current.rho.len() != self.sum_rho.len() || current.flux.len() != self.sum_flux.len() {
            return Err(Error::GridMismatch);
        }
        for (s, r) in self.sum_rho.iter_mut().zip(&current.rho) {
            *s += r;
        }
        for (s, f) in self.sum_flux.iter_mut().zip(&current.flux) {
            s[0] += f[0];
            s[1] += f[1];
        }
        self.samples += 1;
        Ok(())
    }

    /// Mean of the accumulated snapshots; `None` before the first one.
    pub fn mean(&self) -> Option<CellStats> {
        if self.samples == 0 {
            return None;
        }
        let k = self.samples as f64;
        Some(CellStats {
            rho: self.sum_rho.iter().map(|s| s / k).collect(),
            flux: self.sum_flux.iter().map(|s| [s[0] / k, s[1] / k]).collect(),
            samples: self.samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::VelocitySpace;
    use crate::stochastics::RngStream;

    fn grid() -> SpatialGrid {
        SpatialGrid::new_1d(0.0, 1.0, 10).unwrap()
    }

    #[test]
    fn counts_with_normalization() {
        let g = grid();
        let e = ParticleEnsemble::from_particles(
            0.5,
            VelocitySpace::TwoSpeed,
            [([0.31, 0.0], [1.0, 0.0]), ([0.35, 0.0], [1.0, 0.0]), ([0.39, 0.0], [-1.0, 0.0])],
        )
        .unwrap();
        let rho = histogram_density(&e, &g).unwrap();
        assert!((rho[3] - 15.0).abs() < 1e-12);
        assert_eq!(rho[0], 0.0);
        let total: f64 = rho.iter().map(|r| r * g.dx()).sum();
        assert!((total - e.total_mass()).abs() < 1e-12 * e.total_mass());
    }

    #[test]
    fn dead_particles_excluded() {
        let g = grid();
        let mut e = ParticleEnsemble::from_particles(1.0, VelocitySpace::TwoSpeed, [([0.05, 0.0], [1.0, 0.0])]).unwrap();
        e.particles_mut()[0].alive = false;
        assert!(histogram_density(&e, &g).unwrap().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn outside_is_an_error() {
        let g = grid();
        let e = ParticleEnsemble::from_particles(1.0, VelocitySpace::TwoSpeed, [([1.0, 0.0], [1.0, 0.0])]).unwrap();
        assert!(matches!(histogram_density(&e, &g), Err(Error::ParticleOutsideDomain { .. })));
    }

    #[test]
    fn all_positive_flux_equals_density() {
        let g = grid();
        let e = ParticleEnsemble::from_particles(
            0.1,
            VelocitySpace::TwoSpeed,
            (0..20).map(|k| ([0.025 + 0.05 * k as f64, 0.0], [1.0, 0.0])),
        )
        .unwrap();
        let rho = histogram_density(&e, &g).unwrap();
        let j = flux_estimate(&e, &g, &[1.0; 10]).unwrap();
        for (r, f) in rho.iter().zip(&j) {
            assert!((r - f[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_labels_give_zero_flux() {
        let g = grid();
        let e = ParticleEnsemble::from_particles(
            0.1,
            VelocitySpace::TwoSpeed,
            (0..20).map(|k| ([0.025 + 0.05 * (k / 2) as f64, 0.0], [if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0])),
        )
        .unwrap();
        let j = flux_estimate(&e, &g, &[0.3; 10]).unwrap();
        assert!(j.iter().all(|f| f[0] == 0.0));
    }

    #[test]
    fn zero_eps_rejected() {
        let g = grid();
        let e = ParticleEnsemble::new(1.0, VelocitySpace::TwoSpeed).unwrap();
        let mut eps = [1.0; 10];
        eps[4] = 0.0;
        assert_eq!(flux_estimate(&e, &g, &eps), Err(Error::ZeroScaling { cell: 4 }));
    }

    #[test]
    fn equilibrium_flux_within_binomial_bound() {
        // labels iid +-1: |sum| has standard deviation sqrt(count)
        let g = grid();
        let mut s = RngStream::new(9, 0, 0);
        let m_p = 1e-4;
        let eps = 0.5;
        let e = ParticleEnsemble::from_particles(
            m_p,
            VelocitySpace::TwoSpeed,
            (0..10_000).map(|_| {
                let x = s.uniform_unit();
                let v = VelocitySpace::TwoSpeed.sample(&mut s);
                ([x, 0.0], v)
            }),
        )
        .unwrap();
        let counts = cell_counts(&e, &g).unwrap();
        let j = flux_estimate(&e, &g, &[eps; 10]).unwrap();
        for (c, f) in counts.iter().zip(&j) {
            let bound = 3.0 * m_p * (*c as f64).sqrt() / (g.dx() * eps);
            assert!(f[0].abs() <= bound, "{} > {}", f[0], bound);
        }
    }

    #[test]
    fn time_average_basics() {
        let snap = |v: f64| CellStats { rho: vec![v; 3], flux: vec![[v, 0.0]; 3], samples: 1 };
        let mut avg = TimeAverage::new(3);
        assert!(avg.mean().is_none());
        for k in 0..10 {
            avg.accumulate(&snap(if k % 2 == 0 { 0.0 } else { 2.0 })).unwrap();
        }
        let m = avg.mean().unwrap();
        assert_eq!(m.rho, vec![1.0; 3]);
        assert_eq!(m.samples, 10);

        let mut same = TimeAverage::new(3);
        for _ in 0..7 {
            same.accumulate(&snap(0.3)).unwrap();
        }
        assert!(same.mean().unwrap().rho.iter().all(|&r| (r - 0.3).abs() < 1e-15));
        assert!(same.accumulate(&CellStats { rho: vec![0.0; 2], flux: vec![[0.0; 2]; 2], samples: 1 }).is_err());
    }

    #[test]
    fn averaged_variance_decays_like_inverse_k() {
        // average k iid U(0,1) snapshots, 2000 replicate averages per k
        let reps = 2000;
        let mut s = RngStream::new(4, 0, 0);
        let mut variance_at = |k: u64| {
            let means: Vec<f64> = (0..reps)
                .map(|_| {
                    let mut avg = TimeAverage::new(1);
                    for _ in 0..k {
                        let v = s.uniform_unit();
                        avg.accumulate(&CellStats { rho: vec![v], flux: vec![[0.0; 2]], samples: 1 }).unwrap();
                    }
                    avg.mean().unwrap().rho[0]
                })
                .collect();
            let mu = means.iter().sum::<f64>() / reps as f64;
            means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / (reps - 1) as f64
        };
        for k in [1u64, 4, 16] {
            let v = variance_at(k);
            let expected = 1.0 / 12.0 / k as f64;
            // sample variance of 2000 draws: relative sd about sqrt(2/2000)
            assert!((v / expected - 1.0).abs() < 4.0 * (2.0f64 / reps as f64).sqrt(), "k={k} v={v}");
        }
    }
}
