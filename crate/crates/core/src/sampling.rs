//! Seeded, partition-deterministic sampling.
//!
//! Trials are split into fixed-size chunks; chunk `k` draws from a ChaCha
//! stream selected by `k`, so results do not depend on how chunks are
//! scheduled across worker threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::group::{Iwasawa, UniMat2, C};

/// Trials per chunk. Fixed so that the stream assignment is independent of
/// the worker count.
pub const CHUNK: usize = 4096;

/// RNG for one chunk of a seeded run.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `per_chunk` over `trials` split into chunks and returns the chunk
/// results in chunk order. `per_chunk` receives the chunk RNG, the global
/// index of its first trial, and its trial count.
pub fn run_chunks<T, F>(seed: u64, trials: usize, per_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize, usize) -> T + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let start = k * CHUNK;
            let len = CHUNK.min(trials - start);
            let mut rng = chunk_rng(seed, k as u64);
            per_chunk(&mut rng, start, len)
        })
        .collect()
}

/// Runs `f` on a dedicated pool with `workers` threads (0 = rayon default).
pub fn with_workers<T: Send, F: FnOnce() -> T + Send>(workers: usize, f: F) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Ranges for Iwasawa sampling of PSL(2,R): `theta ~ U[0, pi)`,
/// `s ~ U[-t, t]`, `u ~ U[-n, n]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IwasawaRange {
    pub t: f64,
    pub n: f64,
}

impl Default for IwasawaRange {
    fn default() -> Self {
        IwasawaRange { t: 5.0, n: 5.0 }
    }
}

impl IwasawaRange {
    pub fn new(t: f64, n: f64) -> Self {
        IwasawaRange { t, n }
    }

    pub fn sample_coords<R: Rng + ?Sized>(&self, rng: &mut R) -> Iwasawa {
        let theta = rng.random_range(0.0..PI);
        let s = if self.t > 0.0 { rng.random_range(-self.t..=self.t) } else { 0.0 };
        let u = if self.n > 0.0 { rng.random_range(-self.n..=self.n) } else { 0.0 };
        Iwasawa::new(theta, s, u)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> UniMat2 {
        self.sample_coords(rng).matrix()
    }
}

/// Uniform point on the unit sphere of C^n viewed as R^(2n).
pub fn unit_complex_vector<R: Rng + ?Sized, const N: usize>(rng: &mut R) -> [C; N] {
    loop {
        let mut v = [C::new(0.0, 0.0); N];
        let mut norm = 0.0;
        for z in v.iter_mut() {
            *z = C::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            norm += z.norm_sqr();
        }
        if norm > 1e-20 {
            let s = norm.sqrt().recip();
            for z in v.iter_mut() {
                *z *= s;
            }
            return v;
        }
    }
}

/// Draws `h` in SL(2,C) with `|h - I| < delta` (Euclidean matrix norm):
/// `h = I + r U`, `U` a random unit matrix and `r ~ U[0, delta)`, then
/// rescaled to unit determinant and re-checked.
pub fn near_identity<R: Rng + ?Sized>(rng: &mut R, delta: f64) -> UniMat2 {
    loop {
        let u: [C; 4] = unit_complex_vector(rng);
        let r = rng.random_range(0.0..delta);
        let one = C::new(1.0, 0.0);
        let Ok(h) = UniMat2::normalized(one + r * u[0], r * u[1], r * u[2], one + r * u[3]) else {
            continue;
        };
        if h.dist(&UniMat2::IDENTITY) < delta {
            return h;
        }
    }
}

/// Uniform point in the open disc of radius `r` about 0.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R, r: f64) -> C {
    let rho = r * rng.random::<f64>().sqrt();
    let t = rng.random_range(-PI..PI);
    C::from_polar(rho, t)
}
