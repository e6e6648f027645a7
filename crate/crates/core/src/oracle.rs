//! Exact references used to validate the optimizer.
//!
//! [`dp_optimal_times`] solves the fixed-sequence problem under adjacent-only
//! separation by dynamic programming over the integer time grid:
//!
//! ```text
//! f_1(t) = c_1(t)                                   t in [E_1, L_1]
//! f_k(t) = c_k(t) + min { f_{k-1}(u) : u <= t - S_{k-1,k} }
//! ```
//!
//! The inner minimum is a running prefix minimum, so the table costs
//! `O(N * H)` for a horizon `H`. The constraints form a difference system with
//! integer bounds and each `c_k` is piecewise linear with an integer
//! breakpoint, so an integer optimum always exists and the grid optimum equals
//! the continuous one.
//!
//! [`brute_force_global`] enumerates every sequence (and every runway split)
//! for tiny instances, scoring each with the DP.

use crate::error::{AlpError, Result};
use crate::instance::{check_subset_permutation, Cost, Instance, SeparationMode, Time};
use crate::scheduler::{evaluate_penalty, initialize_latest, Schedule};

/// Default limit on `max latest - min earliest`.
pub const DEFAULT_HORIZON_CAP: Time = 20_000;

/// Default instance-size limits for [`brute_force_global`].
pub const BRUTE_FORCE_MAX_N_SINGLE: usize = 7;
pub const BRUTE_FORCE_MAX_N_MULTI: usize = 6;

/// Cost-to-come tables of the DP, one per sequence position.
#[derive(Debug, Clone, PartialEq)]
pub struct DpTable {
    /// `windows[k] = (earliest, latest)` of the aircraft at position `k`.
    pub windows: Vec<(Time, Time)>,
    /// `cost[k][t - earliest]`; `INFINITY` marks unreachable times.
    pub cost: Vec<Vec<Cost>>,
    /// Predecessor landing time achieving `cost[k][..]` (unused for `k = 0`).
    pub argmin_prev: Vec<Vec<Time>>,
    pub horizon: Time,
}

fn sequence_horizon(inst: &Instance, sequence: &[usize]) -> Time {
    let lo = sequence
        .iter()
        .map(|&a| inst.plane(a).earliest)
        .min()
        .unwrap_or(0);
    let hi = sequence
        .iter()
        .map(|&a| inst.plane(a).latest)
        .max()
        .unwrap_or(0);
    hi - lo
}

fn check_oracle_input(inst: &Instance, sequence: &[usize], cap: Time) -> Result<Time> {
    if sequence.is_empty() {
        return Err(AlpError::Argument("empty sequence".into()));
    }
    check_subset_permutation(inst.n(), sequence)?;
    let horizon = sequence_horizon(inst, sequence);
    if horizon > cap {
        return Err(AlpError::OracleRefused(format!(
            "horizon {horizon} exceeds cap {cap}; a cap of at least {horizon} is required"
        )));
    }
    Ok(horizon)
}

/// Builds the DP table for `sequence` (adjacent-only separation).
pub fn dp_table(inst: &Instance, sequence: &[usize], horizon_cap: Time) -> Result<DpTable> {
    let horizon = check_oracle_input(inst, sequence, horizon_cap)?;
    let mut windows = Vec::with_capacity(sequence.len());
    let mut cost: Vec<Vec<Cost>> = Vec::with_capacity(sequence.len());
    let mut argmin_prev = Vec::with_capacity(sequence.len());

    for (k, &a) in sequence.iter().enumerate() {
        let p = inst.plane(a);
        let (lo, hi) = (p.earliest, p.latest);
        let width = (hi - lo + 1) as usize;
        let mut row = vec![Cost::INFINITY; width];
        let mut from = vec![0; width];

        if k == 0 {
            for (i, slot) in row.iter_mut().enumerate() {
                *slot = p.cost_at(lo + i as Time);
            }
        } else {
            let (plo, phi) = windows[k - 1];
            let prev = &cost[k - 1];
            // prefix[u] = (min cost, argmin time) of prev over [plo, plo + u]
            let mut prefix = Vec::with_capacity(prev.len());
            let mut best = (Cost::INFINITY, plo);
            for (u, &c) in prev.iter().enumerate() {
                if c < best.0 {
                    best = (c, plo + u as Time);
                }
                prefix.push(best);
            }
            let s = inst.sep(sequence[k - 1], a);
            for i in 0..width {
                let t = lo + i as Time;
                let u = (t - s).min(phi);
                if u < plo {
                    continue;
                }
                let (c, arg) = prefix[(u - plo) as usize];
                if c.is_finite() {
                    row[i] = p.cost_at(t) + c;
                    from[i] = arg;
                }
            }
        }
        windows.push((lo, hi));
        cost.push(row);
        argmin_prev.push(from);
    }
    Ok(DpTable {
        windows,
        cost,
        argmin_prev,
        horizon,
    })
}

/// Optimal landing times for `sequence` under adjacent-only separation.
pub fn dp_optimal_times(inst: &Instance, sequence: &[usize]) -> Result<Schedule> {
    dp_optimal_times_with_cap(inst, sequence, DEFAULT_HORIZON_CAP)
}

pub fn dp_optimal_times_with_cap(
    inst: &Instance,
    sequence: &[usize],
    horizon_cap: Time,
) -> Result<Schedule> {
    let table = dp_table(inst, sequence, horizon_cap)?;
    let n = sequence.len();
    let last = &table.cost[n - 1];
    let mut best: Option<(Cost, usize)> = None;
    for (i, &c) in last.iter().enumerate() {
        if c.is_finite() && best.is_none_or(|(b, _)| c < b) {
            best = Some((c, i));
        }
    }
    let Some((_, i)) = best else {
        // Same constraint system as the latest-time initialization, so it
        // must reject the sequence too and name the culprit.
        return match initialize_latest(inst, sequence, SeparationMode::AdjacentOnly) {
            Err(e) => Err(e),
            Ok(_) => Err(AlpError::Internal(
                "DP found no reachable time but the sequence initializes".into(),
            )),
        };
    };

    let mut times = vec![0; n];
    times[n - 1] = table.windows[n - 1].0 + i as Time;
    for k in (1..n).rev() {
        let idx = (times[k] - table.windows[k].0) as usize;
        times[k - 1] = table.argmin_prev[k][idx];
    }
    let penalty = evaluate_penalty(inst, sequence, &times);
    Ok(Schedule {
        sequence: sequence.to_vec(),
        times,
        penalty,
        mode: SeparationMode::AdjacentOnly,
        certified_optimal: true,
    })
}

/// The same DP with an explicit double loop over predecessor times,
/// `O(N * H^2)`. Self-check for the prefix-minimum version.
pub fn dp_optimal_cost_naive(
    inst: &Instance,
    sequence: &[usize],
    horizon_cap: Time,
) -> Result<Option<Cost>> {
    check_oracle_input(inst, sequence, horizon_cap)?;
    let first = inst.plane(sequence[0]);
    let mut prev: Vec<(Time, Cost)> = (first.earliest..=first.latest)
        .map(|t| (t, first.cost_at(t)))
        .collect();
    for k in 1..sequence.len() {
        let p = inst.plane(sequence[k]);
        let s = inst.sep(sequence[k - 1], sequence[k]);
        let cur: Vec<(Time, Cost)> = (p.earliest..=p.latest)
            .map(|t| {
                let best = prev
                    .iter()
                    .filter(|&&(u, c)| u + s <= t && c.is_finite())
                    .map(|&(_, c)| c)
                    .fold(Cost::INFINITY, Cost::min);
                (t, p.cost_at(t) + best)
            })
            .collect();
        prev = cur;
    }
    let best = prev.iter().map(|&(_, c)| c).fold(Cost::INFINITY, Cost::min);
    Ok(best.is_finite().then_some(best))
}

/// Global optimum of a tiny instance and one optimal assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub penalty: Cost,
    /// Landing order per runway (0-based aircraft). Runways may be empty.
    pub runways: Vec<Vec<usize>>,
}

/// Rearranges `v` into the next lexicographic permutation; false when `v`
/// was the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len())
        .rev()
        .find(|&j| v[j] > v[i])
        .expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Best single-runway order of `members` (sorted ascending); ties go to the
/// lexicographically smallest sequence.
fn best_order(inst: &Instance, members: &[usize]) -> Result<Option<(Cost, Vec<usize>)>> {
    if members.is_empty() {
        return Ok(Some((0.0, Vec::new())));
    }
    let mut perm = members.to_vec();
    let mut best: Option<(Cost, Vec<usize>)> = None;
    loop {
        match dp_optimal_times(inst, &perm) {
            Ok(s) => {
                if best.as_ref().is_none_or(|(b, _)| s.penalty < *b) {
                    best = Some((s.penalty, perm.clone()));
                }
            }
            Err(AlpError::InfeasibleSequence { .. }) => {}
            Err(e) => return Err(e),
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best)
}

/// Exhaustive global optimum over all sequences and, for `runways > 1`, all
/// ways of splitting the aircraft over the runways (adjacent-only separation,
/// zero cross-runway separation).
///
/// `max_n` defaults to 7 aircraft for one runway and 6 otherwise.
pub fn brute_force_global(
    inst: &Instance,
    runways: usize,
    max_n: Option<usize>,
) -> Result<BruteForceResult> {
    if runways == 0 {
        return Err(AlpError::Argument("at least one runway is required".into()));
    }
    let n = inst.n();
    let cap = max_n.unwrap_or(if runways == 1 {
        BRUTE_FORCE_MAX_N_SINGLE
    } else {
        BRUTE_FORCE_MAX_N_MULTI
    });
    if n > cap {
        return Err(AlpError::OracleRefused(format!(
            "{n} aircraft exceed the enumeration cap of {cap}"
        )));
    }

    let full = (1usize << n) - 1;
    let members = |mask: usize| -> Vec<usize> { (0..n).filter(|&i| mask >> i & 1 == 1).collect() };

    if runways == 1 {
        return match best_order(inst, &members(full))? {
            Some((penalty, seq)) => Ok(BruteForceResult {
                penalty,
                runways: vec![seq],
            }),
            None => Err(AlpError::NoFeasibleSequence(
                "no sequence is feasible".into(),
            )),
        };
    }

    let mut single: Vec<Option<(Cost, Vec<usize>)>> = Vec::with_capacity(full + 1);
    for mask in 0..=full {
        single.push(best_order(inst, &members(mask))?);
    }

    // layer[r][mask]: best cost of landing `mask` on r runways, with the
    // subset given to the first of them.
    let mut layer: Vec<Vec<Option<(Cost, usize)>>> = vec![vec![None; full + 1]];
    layer[0][0] = Some((0.0, 0));
    for r in 1..=runways {
        let prev = &layer[r - 1];
        let mut cur = vec![None; full + 1];
        for mask in 0..=full {
            // Enumerate submasks (including empty) for the current runway.
            let mut sub = mask;
            loop {
                if let (Some((c1, _)), Some((c2, _))) = (&single[sub], &prev[mask ^ sub]) {
                    let c = c1 + c2;
                    let better = match cur[mask] {
                        None => true,
                        Some((b, _)) => c < b,
                    };
                    if better {
                        cur[mask] = Some((c, sub));
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
        layer.push(cur);
    }

    let Some((penalty, _)) = layer[runways][full] else {
        return Err(AlpError::NoFeasibleSequence(
            "no runway split is feasible".into(),
        ));
    };
    let mut plan = Vec::with_capacity(runways);
    let mut mask = full;
    for r in (1..=runways).rev() {
        let (_, sub) = layer[r][mask].expect("reachable layer");
        plan.push(single[sub].as_ref().expect("feasible subset").1.clone());
        mask ^= sub;
    }
    Ok(BruteForceResult {
        penalty,
        runways: plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_planes() -> Instance {
        Instance::from_columns(
            &[0, 0],
            &[10, 20],
            &[100, 100],
            &[1.0, 1.0],
            &[1.0, 1.0],
            vec![vec![0, 15], vec![15, 0]],
        )
        .unwrap()
    }

    #[test]
    fn worked_example_cost() {
        let inst = two_planes();
        let s = dp_optimal_times(&inst, &[0, 1]).unwrap();
        assert_eq!(s.penalty, 5.0);
        assert!(
            s.times == vec![10, 25] || s.times == vec![5, 20],
            "{:?}",
            s.times
        );

        // Exhaustive double loop over the grid.
        let mut best = f64::INFINITY;
        for a in 0..=100 {
            for b in a + 15..=100 {
                best = best.min(evaluate_penalty(&inst, &[0, 1], &[a, b]));
            }
        }
        assert_eq!(best, 5.0);
    }

    #[test]
    fn single_aircraft_lands_on_target() {
        let inst = Instance::from_columns(&[0], &[5], &[9], &[1.0], &[2.0], vec![vec![0]]).unwrap();
        let s = dp_optimal_times(&inst, &[0]).unwrap();
        assert_eq!((s.times[0], s.penalty), (5, 0.0));
    }

    #[test]
    fn infeasible_verdict_matches_initialization() {
        let inst = Instance::from_columns(
            &[90, 0],
            &[95, 10],
            &[100, 50],
            &[1.0, 1.0],
            &[1.0, 1.0],
            vec![vec![0, 15], vec![15, 0]],
        )
        .unwrap();
        let dp = dp_optimal_times(&inst, &[0, 1]).unwrap_err();
        let init = initialize_latest(&inst, &[0, 1], SeparationMode::AdjacentOnly).unwrap_err();
        assert_eq!(dp, init);
        assert_eq!(dp_optimal_cost_naive(&inst, &[0, 1], 1000).unwrap(), None);
    }

    #[test]
    fn horizon_cap_refuses() {
        let inst = two_planes();
        match dp_optimal_times_with_cap(&inst, &[0, 1], 50) {
            Err(AlpError::OracleRefused(msg)) => assert!(msg.contains("at least 100"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn naive_matches_prefix_min() {
        let inst = two_planes();
        assert_eq!(
            dp_optimal_cost_naive(&inst, &[0, 1], 1000).unwrap(),
            Some(5.0)
        );
        assert_eq!(
            dp_optimal_cost_naive(&inst, &[1, 0], 1000).unwrap(),
            Some(dp_optimal_times(&inst, &[1, 0]).unwrap().penalty)
        );
    }

    #[test]
    fn permutations_are_lexicographic() {
        let mut v = vec![0, 1, 2];
        let mut all = vec![v.clone()];
        while next_permutation(&mut v) {
            all.push(v.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 2, 1]);
        assert_eq!(all[5], vec![2, 1, 0]);
    }

    #[test]
    fn brute_force_two_planes() {
        let inst = two_planes();
        let r = brute_force_global(&inst, 1, None).unwrap();
        assert_eq!(r.penalty, 5.0);
        assert_eq!(r.runways, vec![vec![0, 1]]);
        let other = dp_optimal_times(&inst, &[1, 0]).unwrap().penalty;
        assert!(other >= 5.0);
    }

    #[test]
    fn brute_force_one_plane_per_runway() {
        let inst = Instance::from_columns(
            &[0; 3],
            &[10, 10, 10],
            &[50; 3],
            &[1.0; 3],
            &[1.0; 3],
            vec![vec![0, 20, 20], vec![20, 0, 20], vec![20, 20, 0]],
        )
        .unwrap();
        let r = brute_force_global(&inst, 3, None).unwrap();
        assert_eq!(r.penalty, 0.0);
        assert_eq!(r.runways.iter().map(Vec::len).sum::<usize>(), 3);
        assert!(brute_force_global(&inst, 1, None).unwrap().penalty > 0.0);
    }

    #[test]
    fn brute_force_refuses_large() {
        let sep = vec![vec![0; 8]; 8];
        let inst =
            Instance::from_columns(&[0; 8], &[1; 8], &[2; 8], &[1.0; 8], &[1.0; 8], sep).unwrap();
        assert!(matches!(
            brute_force_global(&inst, 1, None),
            Err(AlpError::OracleRefused(_))
        ));
        assert!(matches!(
            brute_force_global(&inst, 0, None),
            Err(AlpError::Argument(_))
        ));
    }
}
