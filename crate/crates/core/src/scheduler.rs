//! Exact landing times for a fixed sequence on one runway.
//!
//! The optimizer starts from the latest feasible schedule and only ever moves
//! aircraft earlier:
//!
//! 1. [`initialize_latest`] lands the last aircraft at its latest time and
//!    every earlier one as late as its successors and window allow.
//! 2. [`improve_individual`] pulls each late aircraft towards its target by
//!    as much as its own slack permits.
//! 3. [`find_gamma_sets`] / [`apply_reduction`] repeatedly shift runs of
//!    consecutive, separation-bound aircraft earlier while their net marginal
//!    penalty is positive.
//!
//! With separation enforced only against the immediate predecessor the result
//! is optimal for the sequence. Under all-pairs separation the result is
//! feasible, and [`Schedule::certified_optimal`] records whether it matches
//! the adjacent-only relaxation (which makes it optimal as well).
//!
//! All per-aircraft vectors in this module are indexed by *position* in the
//! sequence, not by aircraft index.

use serde::{Deserialize, Serialize};

use crate::error::{AlpError, Result};
use crate::instance::{check_subset_permutation, Cost, Instance, SeparationMode, Time, COST_EPS};

/// A sequence with landing times on one runway.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// 0-based aircraft indices in landing order.
    pub sequence: Vec<usize>,
    pub times: Vec<Time>,
    pub penalty: Cost,
    pub mode: SeparationMode,
    /// True when the penalty is known to be optimal for this sequence.
    pub certified_optimal: bool,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

/// Quantities derived from a schedule, all indexed by sequence position.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedState {
    /// `times - target`.
    pub deviation: Vec<Time>,
    /// Slack above the binding lower bound (window or predecessors).
    pub extra_sep: Vec<Time>,
    /// `times - earliest`.
    pub sigma: Vec<Time>,
    /// `-early_penalty` when on time or early, `late_penalty` when late.
    pub net_penalty: Vec<Cost>,
    /// Earliest time permitted by predecessors; `None` for the first position.
    pub sp: Vec<Option<Time>>,
    /// Latest time permitted by successors; `None` for the last position.
    pub ps: Vec<Option<Time>>,
}

#[inline]
fn net_penalty(inst: &Instance, aircraft: usize, deviation: Time) -> Cost {
    let p = inst.plane(aircraft);
    if deviation <= 0 {
        -p.early_penalty
    } else {
        p.late_penalty
    }
}

/// Earliest time position `k` may use given the times of its predecessors.
fn predecessor_bound(
    inst: &Instance,
    seq: &[usize],
    times: &[Time],
    k: usize,
    mode: SeparationMode,
) -> Option<Time> {
    if k == 0 {
        return None;
    }
    Some(match mode {
        SeparationMode::AdjacentOnly => times[k - 1] + inst.sep(seq[k - 1], seq[k]),
        SeparationMode::AllPairs => (0..k)
            .map(|j| times[j] + inst.sep(seq[j], seq[k]))
            .max()
            .expect("k > 0"),
    })
}

/// Latest time position `k` may use given the times of its successors.
fn successor_bound(
    inst: &Instance,
    seq: &[usize],
    times: &[Time],
    k: usize,
    mode: SeparationMode,
) -> Option<Time> {
    if k + 1 >= seq.len() {
        return None;
    }
    Some(match mode {
        SeparationMode::AdjacentOnly => times[k + 1] - inst.sep(seq[k], seq[k + 1]),
        SeparationMode::AllPairs => (k + 1..seq.len())
            .map(|j| times[j] - inst.sep(seq[k], seq[j]))
            .min()
            .expect("k is not last"),
    })
}

#[inline]
fn extra_separation(earliest: Time, time: Time, sp: Option<Time>) -> Time {
    match sp {
        Some(sp) => time - sp.max(earliest),
        None => time - earliest,
    }
}

impl DerivedState {
    pub fn compute(inst: &Instance, seq: &[usize], times: &[Time], mode: SeparationMode) -> Self {
        let n = seq.len();
        let mut st = DerivedState {
            deviation: Vec::with_capacity(n),
            extra_sep: Vec::with_capacity(n),
            sigma: Vec::with_capacity(n),
            net_penalty: Vec::with_capacity(n),
            sp: Vec::with_capacity(n),
            ps: Vec::with_capacity(n),
        };
        for (k, (&a, &t)) in seq.iter().zip(times).enumerate() {
            let p = inst.plane(a);
            let sp = predecessor_bound(inst, seq, times, k, mode);
            let d = t - p.target;
            st.deviation.push(d);
            st.extra_sep.push(extra_separation(p.earliest, t, sp));
            st.sigma.push(t - p.earliest);
            st.net_penalty.push(net_penalty(inst, a, d));
            st.sp.push(sp);
            st.ps.push(successor_bound(inst, seq, times, k, mode));
        }
        st
    }

    pub fn len(&self) -> usize {
        self.deviation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deviation.is_empty()
    }
}

/// Earliness/tardiness penalty of `times` along `sequence`.
pub fn evaluate_penalty(inst: &Instance, sequence: &[usize], times: &[Time]) -> Cost {
    sequence
        .iter()
        .zip(times)
        .map(|(&a, &t)| inst.plane(a).cost_at(t))
        .sum()
}

/// The same penalty written as `sum(deviation * net_penalty)`.
pub fn evaluate_penalty_compact(state: &DerivedState) -> Cost {
    state
        .deviation
        .iter()
        .zip(&state.net_penalty)
        .map(|(&d, &pl)| d as Cost * pl)
        .sum()
}

/// Lands every aircraft as late as its window and successors allow.
///
/// Fails with [`AlpError::InfeasibleSequence`] naming the first aircraft (in
/// landing order) pushed before its earliest time; since any feasible
/// schedule is dominated by this one, no feasible timing exists in that case.
pub fn initialize_latest(
    inst: &Instance,
    sequence: &[usize],
    mode: SeparationMode,
) -> Result<Schedule> {
    if sequence.is_empty() {
        return Err(AlpError::Argument("empty sequence".into()));
    }
    check_subset_permutation(inst.n(), sequence)?;

    let n = sequence.len();
    let mut times = vec![0; n];
    for k in (0..n).rev() {
        let latest = inst.plane(sequence[k]).latest;
        times[k] = match successor_bound(inst, sequence, &times, k, mode) {
            Some(ps) => ps.min(latest),
            None => latest,
        };
    }
    if let Some(k) = (0..n).find(|&k| times[k] < inst.plane(sequence[k]).earliest) {
        return Err(AlpError::InfeasibleSequence {
            aircraft: sequence[k] + 1,
            position: k + 1,
            time: times[k],
            earliest: inst.plane(sequence[k]).earliest,
        });
    }
    let penalty = evaluate_penalty(inst, sequence, &times);
    Ok(Schedule {
        sequence: sequence.to_vec(),
        times,
        penalty,
        mode,
        certified_optimal: false,
    })
}

/// One left-to-right pass pulling each late aircraft earlier by
/// `min(deviation, extra_sep)`, with the slack evaluated against the already
/// updated predecessors.
pub fn improve_individual(inst: &Instance, mut schedule: Schedule) -> (Schedule, DerivedState) {
    let mode = schedule.mode;
    let seq = &schedule.sequence;
    let times = &mut schedule.times;
    for k in 0..seq.len() {
        let p = inst.plane(seq[k]);
        let d = times[k] - p.target;
        if d > 0 {
            let sp = predecessor_bound(inst, seq, times, k, mode);
            let es = extra_separation(p.earliest, times[k], sp);
            times[k] -= d.min(es);
        }
    }
    let state = DerivedState::compute(inst, &schedule.sequence, &schedule.times, mode);
    schedule.penalty = evaluate_penalty_compact(&state);
    (schedule, state)
}

/// The sign pattern of `(deviation, extra_sep)` left by [`improve_individual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndividualCase {
    /// Late and bound by a predecessor or window.
    LateBound,
    /// On target with slack.
    OnTargetFree,
    /// On target and bound.
    OnTargetBound,
    /// Early and bound.
    EarlyBound,
    /// Early with slack.
    EarlyFree,
}

/// Classifies a `(deviation, extra_sep)` pair. `None` means the pair is late
/// with slack left (or has negative slack), which no improved schedule shows.
pub fn individual_case(deviation: Time, extra_sep: Time) -> Option<IndividualCase> {
    use std::cmp::Ordering::*;
    match (deviation.cmp(&0), extra_sep.cmp(&0)) {
        (Greater, Equal) => Some(IndividualCase::LateBound),
        (Equal, Greater) => Some(IndividualCase::OnTargetFree),
        (Equal, Equal) => Some(IndividualCase::OnTargetBound),
        (Less, Equal) => Some(IndividualCase::EarlyBound),
        (Less, Greater) => Some(IndividualCase::EarlyFree),
        _ => None,
    }
}

/// Smallest non-negative value in `values[lo..=hi]`, if any.
pub fn sng(values: &[Time], lo: usize, hi: usize) -> Result<Option<Time>> {
    if lo > hi || hi >= values.len() {
        return Err(AlpError::Argument(format!(
            "range {lo}..={hi} out of bounds for length {}",
            values.len()
        )));
    }
    Ok(values[lo..=hi].iter().copied().filter(|&v| v >= 0).min())
}

/// A run of consecutively landing aircraft that can be shifted earlier as a
/// block to reduce the penalty. Positions are sequence positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSet {
    pub first: usize,
    pub last: usize,
    /// Last member that is on time or early, if any.
    pub mu: Option<usize>,
    /// Smallest distance of a member to its earliest time.
    pub gamma: Time,
    /// Amount the block is shifted.
    pub pos: Time,
}

/// Slack of `times[m]` against predecessors before `first` (all-pairs only).
fn external_slack(inst: &Instance, seq: &[usize], times: &[Time], first: usize, m: usize) -> Time {
    (0..first)
        .map(|k| times[m] - (times[k] + inst.sep(seq[k], seq[m])))
        .min()
        .unwrap_or(Time::MAX)
}

/// Collects the disjoint, ordered runs that can be shifted earlier.
///
/// A candidate starts at a position with positive slack and extends over the
/// following positions whose slack is zero. It is cut before the first member
/// that cannot move (at its earliest time, or, in all-pairs mode, bound by an
/// aircraft before the run). Among the remaining prefixes the shortest one
/// with the largest net penalty is kept, provided that penalty is positive.
/// This is the μ-shrinkage applied against every member: no suffix of a kept
/// run has a non-positive net penalty.
pub fn find_gamma_sets(
    inst: &Instance,
    schedule: &Schedule,
    state: &DerivedState,
) -> Vec<GammaSet> {
    let n = state.len();
    let seq = &schedule.sequence;
    let times = &schedule.times;
    let all_pairs = schedule.mode == SeparationMode::AllPairs;
    let mut sets = Vec::new();

    let mut head = 0;
    while head < n {
        if state.extra_sep[head] <= 0 {
            head += 1;
            continue;
        }
        let mut end = head;
        while end + 1 < n && state.extra_sep[end + 1] == 0 {
            end += 1;
        }
        let next_head = end + 1;

        let mut best: Option<(usize, Cost)> = None;
        let mut sum = 0.0;
        let mut gamma = Time::MAX;
        let mut ext = Time::MAX;
        let mut best_gamma = Time::MAX;
        let mut best_ext = Time::MAX;
        for m in head..=end {
            if state.sigma[m] <= 0 {
                break;
            }
            if all_pairs && m > head {
                let slack = external_slack(inst, seq, times, head, m);
                if slack <= 0 {
                    break;
                }
                ext = ext.min(slack);
            }
            gamma = gamma.min(state.sigma[m]);
            sum += state.net_penalty[m];
            if sum > COST_EPS && best.is_none_or(|(_, s)| sum > s + COST_EPS) {
                best = Some((m, sum));
                best_gamma = gamma;
                best_ext = ext;
            }
        }

        if let Some((last, _)) = best {
            // Positive net penalty means at least one late member, so the
            // smallest positive deviation exists.
            let min_late = state.deviation[head..=last]
                .iter()
                .copied()
                .filter(|&d| d > 0)
                .min()
                .unwrap_or(0);
            let pos = min_late
                .min(state.extra_sep[head])
                .min(best_gamma)
                .min(best_ext);
            let mu = (head..=last).rev().find(|&m| state.deviation[m] <= 0);
            sets.push(GammaSet {
                first: head,
                last,
                mu,
                gamma: best_gamma,
                pos,
            });
        }
        head = next_head;
    }
    sets
}

/// Shifts the run `g` earlier by `g.pos` and updates the derived state.
///
/// Fails with [`AlpError::Internal`] when `g` does not describe a valid
/// reduction of this exact state.
pub fn apply_reduction(
    inst: &Instance,
    mut schedule: Schedule,
    mut state: DerivedState,
    g: &GammaSet,
) -> Result<(Schedule, DerivedState)> {
    let n = state.len();
    let stale = |why: &str| Err(AlpError::Internal(format!("stale reduction {g:?}: {why}")));
    if g.first > g.last || g.last >= n {
        return stale("bounds");
    }
    if g.pos <= 0 {
        return stale("non-positive shift");
    }
    if state.extra_sep[g.first] < g.pos {
        return stale("head slack smaller than shift");
    }
    if (g.first + 1..=g.last).any(|m| state.extra_sep[m] != 0) {
        return stale("member with slack inside run");
    }
    if (g.first..=g.last).any(|m| state.sigma[m] < g.pos) {
        return stale("member would land before its earliest time");
    }
    let slope: Cost = state.net_penalty[g.first..=g.last].iter().sum();
    if slope <= COST_EPS {
        return stale("net penalty not positive");
    }
    let before = schedule.penalty;

    for p in g.first..=g.last {
        schedule.times[p] -= g.pos;
    }
    match schedule.mode {
        SeparationMode::AdjacentOnly => {
            for p in g.first..=g.last {
                state.deviation[p] -= g.pos;
                state.sigma[p] -= g.pos;
                state.net_penalty[p] = net_penalty(inst, schedule.sequence[p], state.deviation[p]);
                if p > g.first {
                    state.sp[p] = state.sp[p].map(|v| v - g.pos);
                }
                if p < g.last {
                    state.ps[p] = state.ps[p].map(|v| v - g.pos);
                }
            }
            state.extra_sep[g.first] -= g.pos;
            if g.first > 0 {
                state.ps[g.first - 1] = state.ps[g.first - 1].map(|v| v - g.pos);
            }
            if g.last + 1 < n {
                state.extra_sep[g.last + 1] += g.pos;
                state.sp[g.last + 1] = state.sp[g.last + 1].map(|v| v - g.pos);
            }
        }
        SeparationMode::AllPairs => {
            state = DerivedState::compute(inst, &schedule.sequence, &schedule.times, schedule.mode);
            if (g.first..=g.last).any(|m| state.extra_sep[m] < 0) {
                return Err(AlpError::Internal(format!(
                    "reduction {g:?} broke all-pairs separation"
                )));
            }
        }
    }

    schedule.penalty = evaluate_penalty_compact(&state);
    if schedule.penalty.partial_cmp(&before) != Some(std::cmp::Ordering::Less) {
        return Err(AlpError::Internal(format!(
            "reduction {g:?} did not decrease the penalty ({before} -> {})",
            schedule.penalty
        )));
    }
    Ok((schedule, state))
}

/// Per-run bookkeeping of [`optimize_sequence_traced`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimizationTrace {
    /// State right after [`improve_individual`].
    pub after_improvement: Option<DerivedState>,
    /// Penalty after the individual pass, then after every reduction pass.
    pub pass_penalties: Vec<Cost>,
    /// Shift of every applied reduction, in order.
    pub applied_shifts: Vec<Time>,
}

impl OptimizationTrace {
    /// Number of completed reduction passes.
    pub fn passes(&self) -> usize {
        self.pass_penalties.len().saturating_sub(1)
    }
}

/// Safety cap on reduction passes, per aircraft.
pub const PASS_CAP_PER_AIRCRAFT: usize = 10;

fn run_reduction_loop(
    inst: &Instance,
    sequence: &[usize],
    mode: SeparationMode,
    mut trace: Option<&mut OptimizationTrace>,
) -> Result<Schedule> {
    let init = initialize_latest(inst, sequence, mode)?;
    let (mut schedule, mut state) = improve_individual(inst, init);
    if let Some(t) = trace.as_deref_mut() {
        t.after_improvement = Some(state.clone());
        t.pass_penalties.push(schedule.penalty);
    }
    if schedule.len() == 1 {
        return Ok(schedule);
    }

    let cap = PASS_CAP_PER_AIRCRAFT * schedule.len();
    let mut passes = 0;
    loop {
        let sets = find_gamma_sets(inst, &schedule, &state);
        if sets.is_empty() {
            break;
        }
        if passes == cap {
            return Err(AlpError::Internal(format!(
                "reduction loop exceeded {cap} passes"
            )));
        }
        let before = schedule.penalty;
        for g in &sets {
            if g.pos <= 0 {
                return Err(AlpError::Internal(format!(
                    "reduction {g:?} has no positive shift"
                )));
            }
            (schedule, state) = apply_reduction(inst, schedule, state, g)?;
            if let Some(t) = trace.as_deref_mut() {
                t.applied_shifts.push(g.pos);
            }
        }
        if schedule.penalty.partial_cmp(&before) != Some(std::cmp::Ordering::Less) {
            return Err(AlpError::Internal("reduction pass made no progress".into()));
        }
        passes += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.pass_penalties.push(schedule.penalty);
        }
    }
    Ok(schedule)
}

/// Optimal landing times for `sequence` on one runway.
///
/// In adjacent-only mode the result is optimal. In all-pairs mode it is
/// feasible and `certified_optimal` is set when its penalty equals the
/// adjacent-only relaxation's optimum.
pub fn optimize_sequence(
    inst: &Instance,
    sequence: &[usize],
    mode: SeparationMode,
) -> Result<Schedule> {
    let mut schedule = run_reduction_loop(inst, sequence, mode, None)?;
    schedule.certified_optimal = match mode {
        SeparationMode::AdjacentOnly => true,
        SeparationMode::AllPairs => {
            let relaxed = run_reduction_loop(inst, sequence, SeparationMode::AdjacentOnly, None)?;
            schedule.penalty <= relaxed.penalty + COST_EPS * relaxed.penalty.abs().max(1.0)
        }
    };
    Ok(schedule)
}

/// [`optimize_sequence`] without the optimality certificate; cheaper inside
/// search loops.
pub fn optimize_sequence_uncertified(
    inst: &Instance,
    sequence: &[usize],
    mode: SeparationMode,
) -> Result<Schedule> {
    run_reduction_loop(inst, sequence, mode, None)
}

/// [`optimize_sequence`] that also records the per-pass penalties and the
/// applied shifts. The certificate is not computed.
pub fn optimize_sequence_traced(
    inst: &Instance,
    sequence: &[usize],
    mode: SeparationMode,
) -> Result<(Schedule, OptimizationTrace)> {
    let mut trace = OptimizationTrace::default();
    let mut schedule = run_reduction_loop(inst, sequence, mode, Some(&mut trace))?;
    schedule.certified_optimal = mode == SeparationMode::AdjacentOnly;
    Ok((schedule, trace))
}
