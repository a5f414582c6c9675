//! Hit-or-miss Monte Carlo volume estimation inside an ambient ball.
//!
//! Sampling is uniform in U via the Gaussian-direction × radius^(1/n) method.
//! The sample budget is split into fixed-size batches, one ChaCha stream per
//! batch, so the hit count (and therefore the estimate) is bit-identical for
//! any worker count.

use crate::exec;
use crate::geometry::BallGeometry;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples per RNG stream. Fixed: batching defines the random sequence.
const BATCH: u64 = 1 << 14;

/// Result of a hit-or-miss volume estimate.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    /// Estimated volume of {indicator} ∩ U.
    pub estimate: f64,
    /// Binomial standard error scaled by volume(U).
    pub std_err: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Estimate the volume of the predicate's set intersected with U.
///
/// Deterministic for a fixed seed regardless of thread count.
pub fn mc_volume_estimate<F>(
    indicator: F,
    geometry: &BallGeometry,
    samples: u64,
    seed: u64,
) -> McEstimate
where
    F: Fn(&[f64]) -> bool + Sync + Send,
{
    assert!(samples >= 1, "at least one sample required");
    let n_batches = samples.div_ceil(BATCH) as usize;
    let dim = geometry.dim() as usize;
    let radius = geometry.radius();

    let hits = exec::count_indexed(n_batches, |b| {
        let lo = b as u64 * BATCH;
        let count = BATCH.min(samples - lo);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let mut point = vec![0.0f64; dim];
        let mut hits = 0u64;
        for _ in 0..count {
            sample_in_ball(&mut rng, radius, &mut point);
            if indicator(&point) {
                hits += 1;
            }
        }
        hits
    });

    let vol = geometry.volume();
    let p = hits as f64 / samples as f64;
    McEstimate {
        estimate: vol * p,
        std_err: vol * (p * (1.0 - p) / samples as f64).sqrt(),
        hits,
        samples,
    }
}

/// Fill `point` with a uniform sample from the ball of the given radius.
fn sample_in_ball<R: Rng>(rng: &mut R, radius: f64, point: &mut [f64]) {
    let n = point.len();
    // Gaussian direction via Box-Muller, in pairs.
    let mut i = 0;
    while i < n {
        let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
        let u2: f64 = rng.random();
        let mag = (-2.0 * u1.ln()).sqrt();
        let ang = std::f64::consts::TAU * u2;
        point[i] = mag * ang.cos();
        if i + 1 < n {
            point[i + 1] = mag * ang.sin();
        }
        i += 2;
    }
    let norm = point.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        point.fill(0.0);
        return;
    }
    let u: f64 = rng.random();
    let scale = radius * u.powf(1.0 / n as f64) / norm;
    for x in point.iter_mut() {
        *x *= scale;
    }
}
