#![allow(dead_code)]

use alp_core::scheduler::initialize_latest;
use alp_core::{generate_random_instance, GeneratorConfig, Instance, SeparationMode};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random instance (horizon under 600) and a feasible sequence for it.
pub fn random_case(n: usize, seed: u64, mode: SeparationMode) -> (Instance, Vec<usize>) {
    let inst = generate_random_instance(&GeneratorConfig::new(n, seed)).expect("generator");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut seq: Vec<usize> = (0..n).collect();
    for _ in 0..200 {
        seq.shuffle(&mut rng);
        if initialize_latest(&inst, &seq, mode).is_ok() {
            return (inst, seq);
        }
    }
    let seq = inst.target_order();
    (inst, seq)
}
