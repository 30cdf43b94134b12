//! Replicate execution and per-replicate random streams.
//!
//! Every bootstrap stage maps a pure function over replicate indices. The
//! stream for replicate `i` is derived only from `(seed, i)`, and results are
//! collected in index order, so the output is identical for any worker count
//! and for the sequential build (`--no-default-features`).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; decorrelates consecutive replicate seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for replicate `index` of a stage salted with `stage`.
pub fn replicate_rng(seed: u64, stage: u64, index: u64) -> ChaCha8Rng {
    let s = splitmix64(seed ^ splitmix64(stage.wrapping_mul(0x517c_c1b7_2722_0a95) ^ index));
    ChaCha8Rng::seed_from_u64(s)
}

/// Map `f` over `0..n`, in parallel when the `parallel` feature is enabled
/// and `workers != 1`. `workers == 0` uses the default thread count.
#[cfg(feature = "parallel")]
pub fn replicate_map<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let run = || (0..n).into_par_iter().map(&f).collect();
    if workers == 0 {
        run()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(run),
            Err(_) => (0..n).map(f).collect(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn replicate_map<T, F>(n: usize, _workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
