//! Deterministic random streams and samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

/// Default seed for every randomized routine.
pub const DEFAULT_SEED: u64 = 42;

/// An independent stream for work item `index` under `seed`, so results do not
/// depend on how items are scheduled across threads.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniform point on the standard simplex `{s ≥ 0, Σ s = 1}` of the given
/// dimension (normalized exponential spacings).
pub fn uniform_simplex<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let e: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = e.iter().sum();
        if total > 0.0 {
            return e.into_iter().map(|v| v / total).collect();
        }
    }
}

/// A uniform point of the box `[lo, hi]^dim`.
pub fn uniform_box<R: Rng + ?Sized>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(lo..=hi)).collect()
}
