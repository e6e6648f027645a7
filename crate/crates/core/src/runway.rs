//! Splitting a global landing sequence over several runways.
//!
//! Aircraft on different runways need no separation. The first `R` aircraft
//! get one runway each at their targets; every later aircraft
//!
//! 1. stays on its predecessor's runway at its target if that is allowed,
//! 2. otherwise takes the lowest-index runway that allows its target,
//! 3. otherwise takes the runway with the smallest delay past its target,
//!    provided that time is within its window (ties to the lowest index).
//!
//! No aircraft is provisionally placed before the aircraft preceding it in the
//! global sequence. Each runway's sub-sequence is then optimized on its own.

use serde::{Deserialize, Serialize};

use crate::error::{AlpError, Result};
use crate::instance::{check_subset_permutation, Cost, Instance, SeparationMode, Time};
use crate::scheduler::{optimize_sequence, optimize_sequence_uncertified, Schedule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunwayPlan {
    pub runways: usize,
    /// Landing order on each runway, global order preserved.
    pub per_runway_sequence: Vec<Vec<usize>>,
    /// Tentative landing time per global-sequence position.
    pub provisional_times: Vec<Time>,
    /// Runway per global-sequence position.
    pub assigned_runway: Vec<usize>,
}

impl RunwayPlan {
    pub fn per_runway_count(&self) -> Vec<usize> {
        self.per_runway_sequence.iter().map(Vec::len).collect()
    }
}

/// Earliest time `aircraft` may land behind what is already on `runway`.
fn separation_bound(
    inst: &Instance,
    on_runway: &[(usize, Time)],
    aircraft: usize,
    mode: SeparationMode,
) -> Option<Time> {
    match mode {
        SeparationMode::AdjacentOnly => on_runway.last().map(|&(a, t)| t + inst.sep(a, aircraft)),
        SeparationMode::AllPairs => on_runway
            .iter()
            .map(|&(a, t)| t + inst.sep(a, aircraft))
            .max(),
    }
}

/// Assigns every aircraft of `sequence` to one of `runways` runways.
pub fn assign_runways(
    inst: &Instance,
    sequence: &[usize],
    runways: usize,
    mode: SeparationMode,
) -> Result<RunwayPlan> {
    check_subset_permutation(inst.n(), sequence)?;
    if runways < 2 {
        return Err(AlpError::Argument(format!(
            "runway assignment needs at least 2 runways, got {runways}"
        )));
    }
    if runways >= sequence.len() {
        return Err(AlpError::Argument(format!(
            "{} aircraft do not exceed {runways} runways",
            sequence.len()
        )));
    }
    if inst.cross_separation() != 0 {
        return Err(AlpError::Argument(
            "non-zero cross-runway separation is not supported".into(),
        ));
    }

    let mut lanes: Vec<Vec<(usize, Time)>> = vec![Vec::new(); runways];
    let mut provisional = Vec::with_capacity(sequence.len());
    let mut assigned = Vec::with_capacity(sequence.len());

    for (k, &a) in sequence.iter().enumerate() {
        let p = inst.plane(a);
        let not_before = provisional.last().copied().unwrap_or(Time::MIN);
        let (runway, time) = if k < runways {
            (k, p.target.max(not_before))
        } else {
            let lower = |r: usize| -> Time {
                let sep = separation_bound(inst, &lanes[r], a, mode).unwrap_or(Time::MIN);
                p.earliest.max(sep).max(not_before)
            };
            let prev = assigned[k - 1];
            if lower(prev) <= p.target {
                (prev, p.target)
            } else if let Some(r) = (0..runways).find(|&r| lower(r) <= p.target) {
                (r, p.target)
            } else {
                // Strict `<` keeps the lowest index on ties.
                let mut best = (0, lower(0));
                for r in 1..runways {
                    let t = lower(r);
                    if t < best.1 {
                        best = (r, t);
                    }
                }
                best
            }
        };
        if time > p.latest {
            return Err(AlpError::InfeasibleAssignment {
                aircraft: a + 1,
                latest: p.latest,
            });
        }
        lanes[runway].push((a, time));
        provisional.push(time);
        assigned.push(runway);
    }

    Ok(RunwayPlan {
        runways,
        per_runway_sequence: lanes
            .into_iter()
            .map(|lane| lane.into_iter().map(|(a, _)| a).collect())
            .collect(),
        provisional_times: provisional,
        assigned_runway: assigned,
    })
}

/// Per-runway optimized schedules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiRunwaySolution {
    /// One schedule per runway, by runway index.
    pub schedules: Vec<Schedule>,
    pub total_penalty: Cost,
    /// `None` for a single runway.
    pub plan: Option<RunwayPlan>,
}

impl MultiRunwaySolution {
    pub fn certified_optimal(&self) -> bool {
        self.schedules.iter().all(|s| s.certified_optimal)
    }
}

fn optimize_multi_with(
    inst: &Instance,
    sequence: &[usize],
    runways: usize,
    mode: SeparationMode,
    optimize: fn(&Instance, &[usize], SeparationMode) -> Result<Schedule>,
) -> Result<MultiRunwaySolution> {
    if runways == 0 {
        return Err(AlpError::Argument("at least one runway is required".into()));
    }
    if runways == 1 {
        let schedule = optimize(inst, sequence, mode)?;
        return Ok(MultiRunwaySolution {
            total_penalty: schedule.penalty,
            schedules: vec![schedule],
            plan: None,
        });
    }
    let plan = assign_runways(inst, sequence, runways, mode)?;
    let mut schedules = Vec::with_capacity(runways);
    for lane in &plan.per_runway_sequence {
        match optimize(inst, lane, mode) {
            Ok(s) => schedules.push(s),
            // The provisional times are a feasible timing of every lane.
            Err(AlpError::InfeasibleSequence { aircraft, .. }) => {
                return Err(AlpError::Internal(format!(
                    "runway lane containing aircraft {aircraft} became infeasible after assignment"
                )))
            }
            Err(e) => return Err(e),
        }
    }
    let total_penalty = schedules.iter().map(|s| s.penalty).sum();
    Ok(MultiRunwaySolution {
        schedules,
        total_penalty,
        plan: Some(plan),
    })
}

/// Assigns runways, then optimizes each runway independently.
///
/// With one runway this is exactly [`optimize_sequence`].
pub fn optimize_multi(
    inst: &Instance,
    sequence: &[usize],
    runways: usize,
    mode: SeparationMode,
) -> Result<MultiRunwaySolution> {
    optimize_multi_with(inst, sequence, runways, mode, optimize_sequence)
}

/// [`optimize_multi`] without optimality certificates.
pub fn optimize_multi_uncertified(
    inst: &Instance,
    sequence: &[usize],
    runways: usize,
    mode: SeparationMode,
) -> Result<MultiRunwaySolution> {
    optimize_multi_with(inst, sequence, runways, mode, optimize_sequence_uncertified)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheduler::evaluate_penalty;

    use SeparationMode::*;

    fn uniform(targets: &[Time], sep: Time) -> Instance {
        let n = targets.len();
        let s = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0 } else { sep }).collect())
            .collect();
        Instance::from_columns(
            &vec![0; n],
            targets,
            &vec![100; n],
            &vec![1.0; n],
            &vec![1.0; n],
            s,
        )
        .unwrap()
    }

    #[test]
    fn two_aircraft_two_runways() {
        let inst = uniform(&[5, 5, 5], 10);
        // N must exceed R, so use three aircraft on two runways for the plan
        // and check the base step only.
        let plan = assign_runways(&inst, &[0, 1, 2], 2, AdjacentOnly).unwrap();
        assert_eq!(plan.provisional_times[..2], [5, 5]);
        assert_eq!(plan.assigned_runway[..2], [0, 1]);

        let inst = uniform(&[5, 20], 10);
        let sol = optimize_multi(&inst, &[0, 1], 1, AllPairs).unwrap();
        assert_eq!(sol.total_penalty, 0.0);
    }

    #[test]
    fn rule_c_picks_least_delay() {
        let inst = uniform(&[0, 0, 4], 10);
        let plan = assign_runways(&inst, &[0, 1, 2], 2, AdjacentOnly).unwrap();
        assert_eq!(plan.provisional_times, vec![0, 0, 10]);
        assert_eq!(plan.assigned_runway, vec![0, 1, 0]);

        // Exhaustive: earliest time for aircraft 3 on each runway, not
        // before aircraft 2 and separated from the runway's occupant.
        let occupants = [(0usize, 0), (1usize, 0)];
        let best_delay = occupants
            .iter()
            .map(|&(a, t)| {
                (t + inst.sep(a, 2)).max(0).max(inst.plane(2).earliest) - inst.plane(2).target
            })
            .min()
            .unwrap();
        assert_eq!(best_delay, 6);

        let sol = optimize_multi(&inst, &[0, 1, 2], 2, AdjacentOnly).unwrap();
        let provisional = evaluate_penalty(&inst, &[0, 1, 2], &plan.provisional_times);
        assert_eq!(provisional, 6.0);
        assert!(sol.total_penalty <= provisional);
        // Runway 0 holds (1, 3): the DP optimum for T=(0, 4), S=10 is 6.
        let dp = crate::oracle::dp_optimal_times(&inst, &[0, 2])
            .unwrap()
            .penalty;
        assert_eq!(sol.total_penalty, dp);
    }

    #[test]
    fn rule_a_keeps_predecessor_runway() {
        let inst = uniform(&[0, 0, 30, 31], 10);
        let plan = assign_runways(&inst, &[0, 1, 2, 3], 2, AdjacentOnly).unwrap();
        // Aircraft 3 fits behind 2 on runway 1 (rule a); 4 then needs rule b.
        assert_eq!(plan.assigned_runway, vec![0, 1, 1, 0]);
        assert_eq!(plan.provisional_times, vec![0, 0, 30, 31]);
        assert_eq!(plan.per_runway_count(), vec![2, 2]);
    }

    #[test]
    fn argument_errors() {
        let inst = uniform(&[0, 10, 20], 5);
        assert!(matches!(
            assign_runways(&inst, &[0, 1, 2], 3, AllPairs),
            Err(AlpError::Argument(_))
        ));
        assert!(matches!(
            assign_runways(&inst, &[0, 1, 2], 1, AllPairs),
            Err(AlpError::Argument(_))
        ));
        assert!(matches!(
            optimize_multi(&inst, &[0, 1, 2], 0, AllPairs),
            Err(AlpError::Argument(_))
        ));
    }

    #[test]
    fn infeasible_assignment_names_aircraft() {
        let inst = Instance::from_columns(
            &[0, 0, 0],
            &[0, 0, 1],
            &[0, 0, 5],
            &[1.0; 3],
            &[1.0; 3],
            vec![vec![0, 10, 10], vec![10, 0, 10], vec![10, 10, 0]],
        )
        .unwrap();
        assert_eq!(
            assign_runways(&inst, &[0, 1, 2], 2, AllPairs),
            Err(AlpError::InfeasibleAssignment {
                aircraft: 3,
                latest: 5
            })
        );
    }

    #[test]
    fn pigeonhole_with_one_runway_fewer() {
        let inst = uniform(&[0, 0, 0, 0], 10);
        let plan = assign_runways(&inst, &[0, 1, 2, 3], 3, AllPairs).unwrap();
        let counts = plan.per_runway_count();
        assert_eq!(counts.iter().sum::<usize>(), 4);
        assert_eq!(counts.iter().filter(|&&c| c == 2).count(), 1);
    }

    #[test]
    fn single_runway_is_plain_optimization() {
        let inst = uniform(&[10, 12, 14], 5);
        let multi = optimize_multi(&inst, &[2, 0, 1], 1, AllPairs).unwrap();
        let single = optimize_sequence(&inst, &[2, 0, 1], AllPairs).unwrap();
        assert_eq!(multi.schedules, vec![single]);
    }
}
