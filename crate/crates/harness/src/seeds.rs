//! Counter-based seed derivation.
//!
//! `child(master, i) = mix(master + (i + 1) · 0x9E3779B97F4A7C15)` where `mix`
//! is the SplitMix64 finalizer. `mix` is a bijection, so distinct counters
//! give distinct children, and trial `i` can be rerun without the others.
//!
//! A trial seed `s` fans out further: the generated instance uses
//! `child(s, 0)`, the simulation `child(s, 1)` and the comparator `child(s, 2)`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child(master: u64, i: u64) -> u64 {
    mix(master.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Trial seeds `child(master, 0..n)`.
pub fn trial_seeds(master: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| child(master, i)).collect()
}

pub fn instance_seed(trial: u64) -> u64 {
    child(trial, 0)
}

pub fn run_seed(trial: u64) -> u64 {
    child(trial, 1)
}

pub fn comparator_seed(trial: u64) -> u64 {
    child(trial, 2)
}
