use std::path::Path;

use apmc_core::{CellStats, SpatialGrid};
use apmc_sim::{compute_error, read_csv, write_csv, Field, Norm};
use proptest::prelude::*;

fn stats(rho: Vec<f64>, j: Vec<f64>) -> CellStats {
    let flux = j.into_iter().map(|v| [v, 0.0]).collect();
    CellStats { rho, flux, samples: 1 }
}

fn write(dir: &Path, name: &str, grid: &SpatialGrid, s: &CellStats) -> std::path::PathBuf {
    let p = dir.join(name);
    write_csv(&p, grid, s).unwrap();
    p
}

#[test]
fn identical_profiles_have_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let grid = SpatialGrid::new_1d(0.0, 2.0, 50).unwrap();
    let s = stats((0..50).map(|c| (c as f64).sin()).collect(), vec![0.3; 50]);
    let a = write(dir.path(), "a.csv", &grid, &s);
    let b = write(dir.path(), "b.csv", &grid, &s);
    for norm in [Norm::L1, Norm::Linf] {
        for field in [Field::Rho, Field::J] {
            assert_eq!(compute_error(&a, &b, norm, field).unwrap(), 0.0);
        }
    }
}

#[test]
fn constant_offset() {
    let dir = tempfile::tempdir().unwrap();
    let grid = SpatialGrid::new_1d(0.0, 1.0, 40).unwrap();
    let base: Vec<f64> = (0..40).map(|c| 1.0 + 0.01 * c as f64).collect();
    let delta = 0.125;
    let a = write(dir.path(), "a.csv", &grid, &stats(base.clone(), vec![0.0; 40]));
    let b = write(dir.path(), "b.csv", &grid, &stats(base.iter().map(|v| v + delta).collect(), vec![0.0; 40]));
    assert!((compute_error(&a, &b, Norm::L1, Field::Rho).unwrap() - delta).abs() < 1e-12);
    assert!((compute_error(&a, &b, Norm::Linf, Field::Rho).unwrap() - delta).abs() < 1e-12);
}

#[test]
fn two_dimensional_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = SpatialGrid::new_2d([0.0, 0.0], [2.0, 1.0], [8, 4]).unwrap();
    let s = CellStats {
        rho: (0..32).map(|c| c as f64 * 0.5).collect(),
        flux: (0..32).map(|c| [c as f64, f64::NAN]).collect(),
        samples: 1,
    };
    let p = write(dir.path(), "a.csv", &grid, &s);
    let back = read_csv(&p).unwrap();
    assert_eq!(back.rho, s.rho);
    assert!(back.flux.iter().all(|f| f[1].is_nan()));
    assert!(back.grid().unwrap().same_mesh(&grid));
}

#[test]
fn mismatched_grids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = SpatialGrid::new_1d(0.0, 1.0, 10).unwrap();
    let g2 = SpatialGrid::new_1d(0.0, 1.0, 20).unwrap();
    let a = write(dir.path(), "a.csv", &g1, &stats(vec![1.0; 10], vec![0.0; 10]));
    let b = write(dir.path(), "b.csv", &g2, &stats(vec![1.0; 20], vec![0.0; 20]));
    assert!(compute_error(&a, &b, Norm::L1, Field::Rho).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_perturbation_matches_direct_sum(
        base in proptest::collection::vec(-5.0f64..5.0, 30),
        noise in proptest::collection::vec(-1.0f64..1.0, 30),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let grid = SpatialGrid::new_1d(-1.0, 2.0, 30).unwrap();
        let pert: Vec<f64> = base.iter().zip(&noise).map(|(b, n)| b + n).collect();
        let a = write(dir.path(), "a.csv", &grid, &stats(base.clone(), base.clone()));
        let b = write(dir.path(), "b.csv", &grid, &stats(pert.clone(), pert.clone()));
        let l1: f64 = base.iter().zip(&pert).map(|(x, y)| (x - y).abs()).sum::<f64>() * 0.1;
        let linf = base.iter().zip(&pert).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!((compute_error(&a, &b, Norm::L1, Field::Rho).unwrap() - l1).abs() <= 1e-12);
        prop_assert!((compute_error(&a, &b, Norm::Linf, Field::J).unwrap() - linf).abs() <= 1e-12);
    }
}
