//! How per-particle kernels are mapped over the ensemble.
//!
//! Kernels only touch their own particle and draw from that particle's
//! stream, so any executor produces bit-identical results.

use crate::ensemble::Particle;

pub trait Executor {
    fn for_each<F>(&self, particles: &mut [Particle], f: F)
    where
        F: Fn(&mut Particle) + Sync + Send;
}

/// Plain in-order loop.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn for_each<F>(&self, particles: &mut [Particle], f: F)
    where
        F: Fn(&mut Particle) + Sync + Send,
    {
        particles.iter_mut().for_each(f);
    }
}
