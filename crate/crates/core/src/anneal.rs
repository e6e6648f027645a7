//! Ensemble simulated annealing over landing sequences.
//!
//! Every member of the ensemble starts from the target-ordered sequence (or,
//! when the runway rule rejects it, the best random feasible sequence) and
//! runs its own Markov chain with its own random stream; all members share one
//! temperature schedule and one elite archive. A proposal permutes a few
//! randomly chosen positions and is scored exactly by the fixed-sequence
//! optimizer (or by runway allocation plus per-runway optimization).
//!
//! A worse proposal is accepted with the Metropolis probability
//! `min(1, exp(-dE / T))` and, failing that, with a small constant
//! probability. Infeasible proposals score `+inf` and are never accepted.
//! Every `elitism_interval` iterations the worst member is replaced by the
//! elite.
//!
//! Results depend only on the instance, the configuration and the seed:
//! member streams are split from the seed up front and the iteration barrier
//! (temperature, elite merge, reinjection) is sequential.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AlpError, Result};
use crate::instance::{Cost, Instance, SeparationMode, COST_EPS};
use crate::runway::{optimize_multi, optimize_multi_uncertified, MultiRunwaySolution};
use crate::scheduler::optimize_sequence;

/// `3 + floor(sqrt(n / 50))`.
pub fn default_perturbation_size(n: usize) -> usize {
    3 + ((n as f64) / 50.0).sqrt().floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SAConfig {
    pub ensemble_size: usize,
    /// Temperature multiplier per iteration.
    pub cooling_rate: f64,
    /// Acceptance probability for moves the Metropolis test rejected.
    pub constant_accept: f64,
    /// Positions permuted per move; `None` uses [`default_perturbation_size`]
    /// (capped at the number of aircraft).
    pub perturbation_size: Option<usize>,
    /// Random sequences used to estimate the initial temperature.
    pub temperature_samples: usize,
    pub max_iterations: usize,
    pub max_seconds: Option<f64>,
    pub seed: u64,
    pub elitism_interval: usize,
    pub mode: SeparationMode,
    /// Stop as soon as the elite reaches this penalty.
    pub target_penalty: Option<Cost>,
    /// Evaluate members on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for SAConfig {
    fn default() -> Self {
        SAConfig {
            ensemble_size: 20,
            cooling_rate: 0.999,
            constant_accept: 0.07,
            perturbation_size: None,
            temperature_samples: 100,
            max_iterations: 20_000,
            max_seconds: None,
            seed: 0,
            elitism_interval: 50,
            mode: SeparationMode::AllPairs,
            target_penalty: None,
            parallel: true,
        }
    }
}

impl SAConfig {
    pub fn with_seed(seed: u64) -> Self {
        SAConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(AlpError::Argument(msg));
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return bad(format!("cooling rate {} outside (0, 1)", self.cooling_rate));
        }
        if !(0.0..1.0).contains(&self.constant_accept) {
            return bad(format!(
                "constant acceptance {} outside [0, 1)",
                self.constant_accept
            ));
        }
        if self.ensemble_size == 0 {
            return bad("ensemble size must be at least 1".into());
        }
        if matches!(self.perturbation_size, Some(k) if k < 2) {
            return bad("perturbation size must be at least 2".into());
        }
        if self.temperature_samples < 2 {
            return bad("at least 2 temperature samples are required".into());
        }
        if self.elitism_interval == 0 {
            return bad("elitism interval must be positive".into());
        }
        if matches!(self.max_seconds, Some(s) if s.is_nan() || s <= 0.0) {
            return bad("time budget must be positive".into());
        }
        Ok(())
    }

    fn perturbation_size_for(&self, n: usize) -> Result<usize> {
        match self.perturbation_size {
            Some(k) if k > n => Err(AlpError::Argument(format!(
                "perturbation size {k} exceeds {n} aircraft"
            ))),
            Some(k) => Ok(k),
            None => Ok(default_perturbation_size(n).min(n)),
        }
    }
}

/// Penalty of `sequence` over `runways` runways; `+inf` when infeasible.
pub fn score_sequence(
    inst: &Instance,
    sequence: &[usize],
    runways: usize,
    mode: SeparationMode,
) -> Result<Cost> {
    if runways > 1 && runways >= sequence.len() {
        // One aircraft per runway, all on target.
        return Ok(0.0);
    }
    match optimize_multi_uncertified(inst, sequence, runways, mode) {
        Ok(sol) => Ok(sol.total_penalty),
        Err(AlpError::InfeasibleSequence { .. } | AlpError::InfeasibleAssignment { .. }) => {
            Ok(Cost::INFINITY)
        }
        Err(e) => Err(e),
    }
}

/// Full solution for `sequence`, with certificates.
pub fn solve_sequence(
    inst: &Instance,
    sequence: &[usize],
    runways: usize,
    mode: SeparationMode,
) -> Result<MultiRunwaySolution> {
    if runways >= sequence.len() && runways > 1 {
        let mut schedules = Vec::with_capacity(runways);
        for &a in sequence {
            schedules.push(optimize_sequence(inst, &[a], mode)?);
        }
        let total_penalty = schedules.iter().map(|s| s.penalty).sum();
        return Ok(MultiRunwaySolution {
            schedules,
            total_penalty,
            plan: None,
        });
    }
    optimize_multi(inst, sequence, runways, mode)
}

/// Below this many aircraft, evaluation on the thread pool costs more than it saves.
pub const PARALLEL_MIN_AIRCRAFT: usize = 40;

fn member_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random feasible sequences with their penalties.
///
/// Uniform permutations are drawn first. When the windows make those mostly
/// infeasible, the remaining samples come from random walks of [`perturb`]
/// moves starting at the target order. Each phase stops after `50 * samples`
/// attempts, so fewer than `samples` (possibly none) may come back.
fn sample_feasible(
    inst: &Instance,
    runways: usize,
    mode: SeparationMode,
    samples: usize,
    seed: u64,
) -> Result<Vec<Member>> {
    let n = inst.n();
    let mut rng = member_rng(seed, 0);
    let attempt_cap = samples * 50;
    let mut found = Vec::with_capacity(samples);

    let mut seq: Vec<usize> = (0..n).collect();
    for _ in 0..attempt_cap {
        if found.len() == samples {
            break;
        }
        seq.shuffle(&mut rng);
        let penalty = score_sequence(inst, &seq, runways, mode)?;
        if penalty.is_finite() {
            found.push(Member {
                sequence: seq.clone(),
                penalty,
            });
        }
    }

    if found.len() < samples && n >= 2 {
        let start = inst.target_order();
        let k = default_perturbation_size(n).min(n);
        for _ in 0..attempt_cap {
            if found.len() == samples {
                break;
            }
            let mut walk = start.clone();
            for _ in 0..rng.gen_range(1..=n) {
                walk = perturb(&walk, k, &mut rng)?;
            }
            let penalty = score_sequence(inst, &walk, runways, mode)?;
            if penalty.is_finite() {
                found.push(Member {
                    sequence: walk,
                    penalty,
                });
            }
        }
    }
    Ok(found)
}

fn twice_std(members: &[Member]) -> f64 {
    let m = members.len() as f64;
    let mean = members.iter().map(|x| x.penalty).sum::<f64>() / m;
    let var = members
        .iter()
        .map(|x| (x.penalty - mean).powi(2))
        .sum::<f64>()
        / m;
    2.0 * var.max(0.0).sqrt()
}

/// Initial temperature: twice the standard deviation of the penalty over
/// random feasible sequences: uniform permutations first, then random walks
/// of [`perturb`] moves from the target order if too few of those are feasible.
pub fn estimate_initial_temperature(
    inst: &Instance,
    runways: usize,
    mode: SeparationMode,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples < 2 {
        return Err(AlpError::Argument("at least 2 samples are required".into()));
    }
    let found = sample_feasible(inst, runways, mode, samples, seed)?;
    if found.is_empty() {
        return Err(AlpError::NoFeasibleSequence(format!(
            "no feasible sequence among {} random draws",
            100 * samples
        )));
    }
    Ok(twice_std(&found))
}

/// Picks `k` distinct positions and applies a random non-identity
/// permutation to the aircraft there.
pub fn perturb<R: Rng + ?Sized>(sequence: &[usize], k: usize, rng: &mut R) -> Result<Vec<usize>> {
    let n = sequence.len();
    if k < 2 || k > n {
        return Err(AlpError::Argument(format!(
            "cannot permute {k} of {n} positions"
        )));
    }
    let mut positions = sample(rng, n, k).into_vec();
    positions.sort_unstable();
    let original: Vec<usize> = positions.iter().map(|&p| sequence[p]).collect();
    let mut shuffled = original.clone();
    while shuffled == original {
        shuffled.shuffle(rng);
    }
    let mut out = sequence.to_vec();
    for (&p, &a) in positions.iter().zip(&shuffled) {
        out[p] = a;
    }
    Ok(out)
}

/// Metropolis test followed, on rejection, by a constant-probability retry.
///
/// At zero temperature the Metropolis term is 1 for `delta <= 0` and 0
/// otherwise. Non-finite `delta` (an infeasible proposal) is always rejected.
pub fn accept<R: Rng + ?Sized>(delta: f64, temperature: f64, constant: f64, rng: &mut R) -> bool {
    if delta <= 0.0 {
        return true;
    }
    if !delta.is_finite() {
        return false;
    }
    let metropolis = if temperature > 0.0 {
        (-delta / temperature).exp()
    } else {
        0.0
    };
    rng.gen::<f64>() < metropolis || rng.gen::<f64>() < constant
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub sequence: Vec<usize>,
    pub penalty: Cost,
}

/// Ensemble state between iterations.
#[derive(Debug, Clone)]
pub struct AnnealState {
    pub population: Vec<Member>,
    pub temperature: f64,
    pub elite: Member,
    pub iteration: usize,
    pub rng_streams: Vec<ChaCha8Rng>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// After this iteration's cooling step; row 0 holds the initial value.
    pub temperature: f64,
    pub best_penalty: Cost,
    /// Member holding the lowest current penalty (lowest index on ties).
    pub current_best_member: usize,
}

#[derive(Debug, Clone)]
pub struct AnnealOutcome {
    pub solution: MultiRunwaySolution,
    pub sequence: Vec<usize>,
    pub penalty: Cost,
    pub initial_temperature: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub elapsed: Duration,
    pub trace: Vec<TraceRow>,
}

fn current_best(population: &[Member]) -> usize {
    let mut best = 0;
    for (m, member) in population.iter().enumerate().skip(1) {
        if member.penalty < population[best].penalty {
            best = m;
        }
    }
    best
}

fn reached(target: Option<Cost>, penalty: Cost) -> bool {
    target.is_some_and(|t| penalty <= t + COST_EPS * t.abs().max(1.0))
}

/// Read-only context of one iteration, shared by all members.
struct Step<'a> {
    inst: &'a Instance,
    runways: usize,
    cfg: &'a SAConfig,
    k: usize,
    temperature: f64,
    elite_penalty: Cost,
}

impl Step<'_> {
    /// One proposal for `member`; returns the candidate when it beats the
    /// elite as of the start of the iteration.
    fn run(&self, member: &mut Member, rng: &mut ChaCha8Rng) -> Result<Option<Member>> {
        let candidate = perturb(&member.sequence, self.k, rng)?;
        let penalty = score_sequence(self.inst, &candidate, self.runways, self.cfg.mode)?;
        let proposal = (penalty < self.elite_penalty).then(|| Member {
            sequence: candidate.clone(),
            penalty,
        });
        if accept(
            penalty - member.penalty,
            self.temperature,
            self.cfg.constant_accept,
            rng,
        ) {
            member.sequence = candidate;
            member.penalty = penalty;
        }
        Ok(proposal)
    }
}

/// Searches landing sequences for `runways` runways.
pub fn anneal(inst: &Instance, runways: usize, cfg: &SAConfig) -> Result<AnnealOutcome> {
    cfg.validate()?;
    if runways == 0 {
        return Err(AlpError::Argument("at least one runway is required".into()));
    }
    let started = Instant::now();
    let n = inst.n();
    let deadline = cfg.max_seconds.map(Duration::from_secs_f64);

    let start = inst.target_order();
    let start_penalty = score_sequence(inst, &start, runways, cfg.mode)?;
    let mut presampled = None;
    let seed_member = if start_penalty.is_finite() {
        Member {
            sequence: start,
            penalty: start_penalty,
        }
    } else {
        // The runway rule can reject the target order even when other
        // orders work; start from the best random feasible sequence instead.
        let found = sample_feasible(inst, runways, cfg.mode, cfg.temperature_samples, cfg.seed)?;
        let Some(best) = found
            .iter()
            .min_by(|a, b| a.penalty.total_cmp(&b.penalty))
            .cloned()
        else {
            return Err(AlpError::NoFeasibleSequence(format!(
                "the target order and {} random draws are all infeasible",
                100 * cfg.temperature_samples
            )));
        };
        presampled = Some(found);
        best
    };
    let mut state = AnnealState {
        population: vec![seed_member.clone(); cfg.ensemble_size],
        temperature: 0.0,
        elite: seed_member,
        iteration: 0,
        rng_streams: (0..cfg.ensemble_size)
            .map(|m| member_rng(cfg.seed, m as u64 + 1))
            .collect(),
    };
    let mut evaluations = 1;
    let mut trace = Vec::new();

    let searchable = n >= 2
        && runways < n
        && !reached(cfg.target_penalty, state.elite.penalty)
        && state.elite.penalty > 0.0;
    let k = if n >= 2 {
        cfg.perturbation_size_for(n)?
    } else {
        0
    };
    let initial_temperature = if searchable {
        match &presampled {
            Some(found) => twice_std(found),
            None => estimate_initial_temperature(
                inst,
                runways,
                cfg.mode,
                cfg.temperature_samples,
                cfg.seed,
            )?,
        }
    } else {
        0.0
    };
    state.temperature = initial_temperature;
    trace.push(TraceRow {
        iteration: 0,
        temperature: state.temperature,
        best_penalty: state.elite.penalty,
        current_best_member: 0,
    });

    if searchable {
        while state.iteration < cfg.max_iterations {
            if deadline.is_some_and(|d| started.elapsed() >= d) {
                break;
            }
            state.iteration += 1;
            let step = Step {
                inst,
                runways,
                cfg,
                k,
                temperature: state.temperature,
                elite_penalty: state.elite.penalty,
            };

            let proposals: Vec<Option<Member>> = if cfg.parallel && n >= PARALLEL_MIN_AIRCRAFT {
                state
                    .population
                    .par_iter_mut()
                    .zip(state.rng_streams.par_iter_mut())
                    .map(|(m, rng)| step.run(m, rng))
                    .collect::<Result<_>>()?
            } else {
                state
                    .population
                    .iter_mut()
                    .zip(state.rng_streams.iter_mut())
                    .map(|(m, rng)| step.run(m, rng))
                    .collect::<Result<_>>()?
            };
            evaluations += proposals.len();

            // Lowest penalty wins; the first (lowest-index) member keeps ties.
            for p in proposals.into_iter().flatten() {
                if p.penalty < state.elite.penalty {
                    state.elite = p;
                }
            }

            state.temperature *= cfg.cooling_rate;
            if state.iteration.is_multiple_of(cfg.elitism_interval) {
                let mut worst = 0;
                for (m, member) in state.population.iter().enumerate() {
                    if member.penalty > state.population[worst].penalty {
                        worst = m;
                    }
                }
                state.population[worst] = state.elite.clone();
            }

            trace.push(TraceRow {
                iteration: state.iteration,
                temperature: state.temperature,
                best_penalty: state.elite.penalty,
                current_best_member: current_best(&state.population),
            });
            if reached(cfg.target_penalty, state.elite.penalty) || state.elite.penalty <= 0.0 {
                break;
            }
        }
    }

    let solution = solve_sequence(inst, &state.elite.sequence, runways, cfg.mode)?;
    if (solution.total_penalty - state.elite.penalty).abs()
        > COST_EPS * state.elite.penalty.abs().max(1.0)
    {
        return Err(AlpError::Internal(format!(
            "elite penalty {} does not reproduce ({})",
            state.elite.penalty, solution.total_penalty
        )));
    }
    Ok(AnnealOutcome {
        penalty: solution.total_penalty,
        solution,
        sequence: state.elite.sequence,
        initial_temperature,
        iterations: state.iteration,
        evaluations,
        elapsed: started.elapsed(),
        trace,
    })
}

/// Writes `iteration,temperature,best_penalty,current_best_member` rows.
pub fn write_trace_csv<W: Write>(trace: &[TraceRow], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "iteration,temperature,best_penalty,current_best_member"
    )?;
    for row in trace {
        writeln!(
            out,
            "{},{},{},{}",
            row.iteration, row.temperature, row.best_penalty, row.current_best_member
        )?;
    }
    Ok(())
}
