//! Deterministic random streams.
//!
//! Every sampling operation in this crate takes an explicit stream; there is
//! no hidden global RNG. Child streams are derived from a master seed and a
//! path of indices (trial index, entry index, ...) through a counter-based
//! mix, so a parallel run produces the same numbers regardless of how trials
//! are scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// The RNG handed to sampling operations. One stream must not be shared
/// across threads; derive one per unit of work instead.
pub type RandomStream = ChaCha12Rng;

/// SplitMix64 step, used as the mixing function for seed derivation.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a stream from `master` and a path of indices.
///
/// The derivation absorbs each path element into a SplitMix64 state and then
/// squeezes a full 256-bit ChaCha seed, so `derive(s, &[a])` and
/// `derive(s, &[b])` are independent for `a != b` and independent of any
/// scheduling order.
pub fn derive(master: u64, path: &[u64]) -> RandomStream {
    let mut state = master ^ 0xA076_1D64_78BD_642F;
    let _ = splitmix64(&mut state);
    for &p in path {
        state ^= splitmix64(&mut (p ^ 0xE703_7ED1_A0B4_28DB));
        let _ = splitmix64(&mut state);
    }
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    RandomStream::from_seed(seed)
}

/// Runs `trials` independent jobs in parallel, each with its own derived
/// stream, and returns the results in trial order. Reduction order is thus
/// fixed no matter how many worker threads exist.
pub fn run_trials<T, F>(master: u64, trials: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut RandomStream) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = derive(master, &[trial as u64]);
            job(trial, &mut rng)
        })
        .collect()
}
