use apmc_core::{Executor, Particle};
use rayon::prelude::*;

/// Maps per-particle kernels over the current rayon pool.
///
/// Kernels draw from per-particle streams, so the result does not depend on
/// the number of workers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl Executor for Parallel {
    fn for_each<F>(&self, particles: &mut [Particle], f: F)
    where
        F: Fn(&mut Particle) + Sync + Send,
    {
        particles.par_iter_mut().with_min_len(2048).for_each(f);
    }
}
