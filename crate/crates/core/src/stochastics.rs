//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, stream_id, counter)`: the 64-bit
//! seed is the Philox key, and the stream id and counter fill the 128-bit
//! Philox counter block. Particles own the stream whose id equals their
//! particle id, and each time step reserves a fixed window of counters per
//! sub-step ([`Phase`]), so the result of a run does not depend on the order
//! in which particles are processed or on how many workers process them.

use core::f64::consts::PI;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

/// Philox4x32 with 10 rounds.
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut ctr = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let p0 = u64::from(PHILOX_M0) * u64::from(ctr[0]);
        let p1 = u64::from(PHILOX_M1) * u64::from(ctr[2]);
        let (hi0, lo0) = ((p0 >> 32) as u32, p0 as u32);
        let (hi1, lo1) = ((p1 >> 32) as u32, p1 as u32);
        ctr = [hi1 ^ ctr[1] ^ k[0], lo1, hi0 ^ ctr[3] ^ k[1], lo0];
    }
    ctr
}

/// Velocity space of the radiative transport model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// Direction cosine uniform on `[-1, 1]`.
    Slab1d,
    /// Unit vector uniform on the circle.
    Circle2d,
}

/// A position in a counter-based random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    counter: u64,
}

impl RngStream {
    pub const fn new(seed: u64, stream_id: u64, counter: u64) -> Self {
        Self { seed, stream_id, counter }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Evaluates the block at the current counter and advances by one.
    pub fn next_block(&mut self) -> [u32; 4] {
        let block = philox4x32_10(
            [
                self.counter as u32,
                (self.counter >> 32) as u32,
                self.stream_id as u32,
                (self.stream_id >> 32) as u32,
            ],
            [self.seed as u32, (self.seed >> 32) as u32],
        );
        self.counter = self.counter.wrapping_add(1);
        block
    }

    /// Uniform on `[0, 1)` with 53 random bits. Consumes one counter.
    pub fn uniform_unit(&mut self) -> f64 {
        let b = self.next_block();
        unit_closed_open(b[0], b[1])
    }

    /// Standard normal draw by Box–Muller. Consumes one counter.
    pub fn standard_normal(&mut self) -> f64 {
        let b = self.next_block();
        // (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - unit_closed_open(b[0], b[1]);
        let u2 = unit_closed_open(b[2], b[3]);
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2)
    }

    /// Direction drawn uniformly from the velocity space. Consumes one counter.
    ///
    /// The slab direction is returned in the first component; the second
    /// component is zero.
    pub fn uniform_direction(&mut self, geometry: Geometry) -> [f64; 2] {
        let u = self.uniform_unit();
        match geometry {
            Geometry::Slab1d => [2.0 * u - 1.0, 0.0],
            Geometry::Circle2d => {
                let theta = 2.0 * PI * u;
                [libm::cos(theta), libm::sin(theta)]
            }
        }
    }
}

fn unit_closed_open(hi: u32, lo: u32) -> f64 {
    let bits = ((u64::from(hi) << 32) | u64::from(lo)) >> 11;
    bits as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sub-steps of a time step, each owning a disjoint counter window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Phase {
    Transport = 0,
    Collision = 1,
    Absorption = 2,
    Boundary = 3,
    Initial = 4,
}

const PHASES_PER_STEP: u64 = 8;

/// Counters reserved for one stream in one phase of one step.
pub const DRAWS_PER_PHASE: u64 = 16;

/// First stream id reserved for non-particle streams (ghost-cell refills).
pub const AUXILIARY_STREAM_BASE: u64 = 1 << 62;

/// Seed and step index shared by all particles during one time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepKey {
    pub seed: u64,
    pub step: u64,
}

impl StepKey {
    pub const fn new(seed: u64, step: u64) -> Self {
        Self { seed, step }
    }

    /// Stream positioned at the start of `phase`'s counter window.
    pub fn stream(&self, stream_id: u64, phase: Phase) -> RngStream {
        let counter = (self.step * PHASES_PER_STEP + phase as u64) * DRAWS_PER_PHASE;
        RngStream::new(self.seed, stream_id, counter)
    }
}

/// Seed of replicate `replicate` in the family rooted at `seed`.
pub fn replicate_seed(seed: u64, replicate: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ replicate.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32_10([0; 4], [0; 2]),
            [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]
        );
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]
        );
        assert_eq!(
            philox4x32_10(
                [0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344],
                [0xa409_3822, 0x299f_31d0]
            ),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn uniform_range_and_determinism() {
        let mut s = RngStream::new(7, 3, 0);
        for _ in 0..10_000 {
            let u = s.uniform_unit();
            assert!((0.0..1.0).contains(&u));
        }
        let a = RngStream::new(11, 5, 42).uniform_unit();
        let b = RngStream::new(11, 5, 42).uniform_unit();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(s.counter(), 10_000);
    }

    #[test]
    fn uniform_mean() {
        let mut s = RngStream::new(1, 0, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| s.uniform_unit()).sum::<f64>() / n as f64;
        // 3 sigma with sigma = 1/sqrt(12 n) is 8.7e-4; the bound is looser
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn normal_moments() {
        let mut s = RngStream::new(2, 9, 0);
        let n = 1_000_000;
        let draws: alloc::vec::Vec<f64> = (0..n).map(|_| s.standard_normal()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.003, "mean {mean}");
        assert!((var - 1.0).abs() < 0.005, "var {var}");
        let again = RngStream::new(2, 9, 0).standard_normal();
        assert_eq!(again.to_bits(), draws[0].to_bits());
    }

    #[test]
    fn direction_second_moments() {
        let n = 1_000_000;
        let mut s = RngStream::new(3, 1, 0);
        let slab = (0..n).map(|_| s.uniform_direction(Geometry::Slab1d)[0].powi(2)).sum::<f64>() / n as f64;
        assert!((slab - 1.0 / 3.0).abs() < 0.001, "slab {slab}");
        let mut s = RngStream::new(3, 2, 0);
        let mut circ = 0.0;
        for _ in 0..n {
            let v = s.uniform_direction(Geometry::Circle2d);
            assert!((libm::hypot(v[0], v[1]) - 1.0).abs() < 1e-12);
            circ += v[0] * v[0];
        }
        circ /= n as f64;
        assert!((circ - 0.5).abs() < 0.002, "circle {circ}");
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        // chi-square on a 10x10 contingency table of paired draws
        let n = 100_000;
        let mut a = RngStream::new(5, 0, 0);
        let mut b = RngStream::new(5, 1, 0);
        let mut table = [[0u32; 10]; 10];
        for _ in 0..n {
            let i = (a.uniform_unit() * 10.0) as usize;
            let j = (b.uniform_unit() * 10.0) as usize;
            table[i][j] += 1;
        }
        let expected = n as f64 / 100.0;
        let chi2: f64 = table
            .iter()
            .flatten()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99 dof: the 0.999 quantile is about 148
        assert!(chi2 < 148.0, "chi2 {chi2}");
    }

    #[test]
    fn phases_do_not_overlap() {
        let key = StepKey::new(1, 5);
        let t = key.stream(3, Phase::Transport).counter();
        let c = key.stream(3, Phase::Collision).counter();
        assert_eq!(c - t, DRAWS_PER_PHASE);
        let next = StepKey::new(1, 6).stream(3, Phase::Transport).counter();
        let last = key.stream(3, Phase::Initial).counter() + DRAWS_PER_PHASE;
        assert!(next >= last);
    }

    #[test]
    fn replicate_seeds_differ() {
        let s: alloc::vec::Vec<u64> = (0..100).map(|r| replicate_seed(42, r)).collect();
        for i in 0..s.len() {
            for j in 0..i {
                assert_ne!(s[i], s[j]);
            }
        }
    }
}
