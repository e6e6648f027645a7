//! Fixtures shared by the benchmarks.

use alp_core::runway::assign_runways;
use alp_core::{generate_random_instance, GeneratorConfig, Instance, SeparationMode};

/// Random instance with benchmark-like separations (3 to 15) whose target
/// order is feasible, so it can be scheduled directly.
pub fn fixture(n: usize) -> Instance {
    let cfg = GeneratorConfig {
        sep_range: (3, 15),
        window_span: 300,
        ..GeneratorConfig::new(n, n as u64)
    };
    generate_random_instance(&cfg).expect("fixture instance")
}

/// Like [`fixture`], but the target order must also survive runway
/// assignment for every runway count from 2 to `max_runways`. Provisional
/// times never precede targets, so dense clusters can fail there even when
/// one runway copes.
pub fn multi_runway_fixture(n: usize, max_runways: usize) -> Instance {
    (0..10_000)
        .filter_map(|seed| {
            let cfg = GeneratorConfig {
                sep_range: (3, 15),
                window_span: 300,
                ..GeneratorConfig::new(n, seed)
            };
            generate_random_instance(&cfg).ok()
        })
        .find(|inst| {
            let seq = inst.target_order();
            (2..=max_runways)
                .all(|r| assign_runways(inst, &seq, r, SeparationMode::AllPairs).is_ok())
        })
        .expect("a multi-runway fixture within 10000 seeds")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_feasible_in_target_order() {
        for n in [10, 50, 500] {
            let inst = fixture(n);
            let seq = inst.target_order();
            assert!(alp_core::optimize_sequence(&inst, &seq, SeparationMode::AllPairs).is_ok());
        }
        let inst = multi_runway_fixture(200, 4);
        assert_eq!(inst.n(), 200);
    }
}
