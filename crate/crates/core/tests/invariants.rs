use apmc_core::ensemble::{cell_counts, histogram_density, sample_from_density, sample_with_particle_mass};
use apmc_core::goldstein_taylor::{GtApmc, HeatWalk};
use apmc_core::radiative_transport::{NoiseSpeed, RtApmc};
use apmc_core::{
    Boundaries, CoefficientField, Coefficients, Geometry, Scheme, Sequential, Simulation, SpatialGrid, StepKey,
    VelocitySpace,
};
use proptest::prelude::*;

fn uniform_line(n: usize, cells: usize, seed: u64) -> (SpatialGrid, apmc_core::ParticleEnsemble) {
    let grid = SpatialGrid::new_1d(0.0, 1.0, cells).unwrap();
    let e = sample_from_density(&grid, &vec![1.0; cells], n, VelocitySpace::TwoSpeed, seed).unwrap();
    (grid, e)
}

#[test]
fn periodic_mass_is_exact_over_many_steps() {
    let (grid, e) = uniform_line(500, 20, 3);
    let n = e.live_count();
    let mass = e.total_mass();
    let dt = 0.5 * grid.dx() * grid.dx();
    let mut sim = Simulation::new(grid, Boundaries::periodic(), GtApmc::new(1e-3).unwrap(), e, 3, dt).unwrap();
    for _ in 0..10_000 {
        sim.step(dt, &Sequential).unwrap();
    }
    assert_eq!(sim.ensemble().live_count(), n);
    assert_eq!(sim.ensemble().total_mass(), mass);
    assert_eq!(cell_counts(sim.ensemble(), &grid).unwrap().iter().sum::<u64>(), n as u64);
}

#[test]
fn histogram_is_unbiased_over_replicates() {
    // density 1 + x on [0, 1], cell averages 1 + x_c
    let grid = SpatialGrid::new_1d(0.0, 1.0, 10).unwrap();
    let rho: Vec<f64> = (0..10).map(|c| 1.0 + grid.center(c)[0]).collect();
    let n = 2_000;
    let reps = 200;
    let mut sum = [0.0; 10];
    let mut sq = [0.0; 10];
    for r in 0..reps {
        let e = sample_from_density(&grid, &rho, n, VelocitySpace::TwoSpeed, 1000 + r).unwrap();
        for (c, h) in histogram_density(&e, &grid).unwrap().into_iter().enumerate() {
            sum[c] += h;
            sq[c] += h * h;
        }
    }
    for c in 0..10 {
        let mean = sum[c] / reps as f64;
        let var = (sq[c] / reps as f64 - mean * mean) * reps as f64 / (reps as f64 - 1.0);
        let se = (var / reps as f64).sqrt();
        assert!((mean - rho[c]).abs() <= 3.5 * se, "cell {c}: {mean} vs {} (se {se})", rho[c]);
    }
}

#[test]
fn apmc_degenerates_to_heat_walk() {
    let (_, e) = uniform_line(2_000, 10, 8);
    let dt = 1e-3;
    let key = StepKey::new(11, 4);
    let walk = HeatWalk::default();
    let mut last = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let apmc = GtApmc::new(eps).unwrap();
        let mut worst: f64 = 0.0;
        for p in e.particles() {
            let (mut a, mut b) = (*p, *p);
            apmc.advance(&mut a, dt, &key);
            walk.advance(&mut b, dt, &key);
            worst = worst.max((a.position[0] - b.position[0]).abs());
        }
        // drift plus the change in noise amplitude, with |xi| <= 6
        let drift = eps * dt / (eps * eps + dt);
        let noise = 6.0 * (2.0 * dt).sqrt() * (1.0 - (dt / (eps * eps + dt)).sqrt());
        assert!(worst <= drift + noise + 1e-15, "eps {eps}: {worst}");
        assert!(worst < last);
        last = worst;
    }
}

#[test]
fn rt_apmc_is_exact_heat_walk_at_zero_eps() {
    let field = CoefficientField::uniform(Coefficients::new(0.0, 1.0, 0.0)).unwrap();
    let scheme = RtApmc::new(field, Geometry::Slab1d, NoiseSpeed::Unscaled).unwrap();
    let grid = SpatialGrid::new_1d(0.0, 1.0, 10).unwrap();
    let e = sample_from_density(&grid, &[1.0; 10], 5_000, VelocitySpace::Directions(Geometry::Slab1d), 2).unwrap();
    let key = StepKey::new(2, 0);
    let dt = 1e-3;
    let mut sq = 0.0;
    for p in e.particles() {
        let mut q = *p;
        scheme.advance(&mut q, dt, &key);
        let d = q.position[0] - p.position[0];
        sq += d * d;
    }
    // E[(v xi)^2] * 2 dt with E[v^2] = 1/3
    let var = sq / e.live_count() as f64;
    let expect = 2.0 * dt / 3.0;
    assert!((var - expect).abs() < 0.1 * expect, "{var} vs {expect}");
}

#[test]
fn dirichlet_boundary_cells_hold_their_density() {
    let grid = SpatialGrid::new_1d(0.0, 2.0, 20).unwrap();
    let m_p = 1e-4;
    let e = sample_with_particle_mass(&grid, &[1.0; 20], m_p, VelocitySpace::TwoSpeed, 5).unwrap();
    let dt = 0.4 * grid.dx() * grid.dx();
    let mut sim = Simulation::new(grid, Boundaries::dirichlet(1.0, 1.0), GtApmc::new(1e-5).unwrap(), e, 5, dt).unwrap();
    for _ in 0..200 {
        sim.step(dt, &Sequential).unwrap();
    }
    let rho = histogram_density(sim.ensemble(), &grid).unwrap();
    let per_cell = grid.dx() / m_p;
    let sigma = 1.0 / per_cell.sqrt();
    for c in [0, 1, 18, 19] {
        assert!((rho[c] - 1.0).abs() <= 3.0 * sigma, "cell {c}: {}", rho[c]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn particle_path_ignores_its_neighbours(seed in any::<u64>(), keep in 1usize..50, steps in 1u64..20) {
        let (_, e) = uniform_line(50, 5, seed);
        let scheme = GtApmc::new(0.1).unwrap();
        let dt = 1e-3;
        let mut all: Vec<_> = e.particles().to_vec();
        let mut alone: Vec<_> = all[..keep].iter().rev().copied().collect();
        for s in 0..steps {
            let key = StepKey::new(seed, s);
            all.iter_mut().for_each(|p| scheme.advance(p, dt, &key));
            alone.iter_mut().for_each(|p| scheme.advance(p, dt, &key));
        }
        alone.reverse();
        prop_assert_eq!(&all[..keep], &alone[..]);
    }

    #[test]
    fn streams_of_distinct_steps_and_phases_differ(seed in any::<u64>(), id in 0u64..1_000_000, step in 0u64..1_000_000) {
        use apmc_core::stochastics::Phase;
        let a = StepKey::new(seed, step).stream(id, Phase::Transport).next_block();
        let b = StepKey::new(seed, step).stream(id, Phase::Collision).next_block();
        let c = StepKey::new(seed, step + 1).stream(id, Phase::Transport).next_block();
        let d = StepKey::new(seed, step).stream(id + 1, Phase::Transport).next_block();
        prop_assert_ne!(a, b);
        prop_assert_ne!(a, c);
        prop_assert_ne!(a, d);
    }
}
