//! Problem data: aircraft windows, penalties and the separation matrix.
//!
//! Aircraft are addressed by 0-based `usize` indices inside the library. The
//! `index` field of [`Aircraft`] and every user-facing message use the 1-based
//! ordinal of the OR-Library files.
//!
//! The `airland` text format is a whitespace-separated token stream:
//!
//! ```text
//! N freeze_time
//! appearance E T L g h   S[i][0] .. S[i][N-1]     (repeated N times)
//! ```
//!
//! Tokens may wrap lines arbitrarily. Appearance and freeze times are kept as
//! opaque metadata and play no part in the static model; the diagonal of the
//! separation matrix is read and ignored.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AlpError, Result};

pub type Time = i64;
pub type Cost = f64;

/// Comparison tolerance for penalty values.
pub const COST_EPS: f64 = 1e-9;

/// Value written on the separation diagonal when serializing.
const SELF_SEPARATION_PLACEHOLDER: Time = 99999;

/// Which separation constraints bind a runway.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum SeparationMode {
    /// Each aircraft is separated only from its immediate predecessor.
    #[serde(rename = "adjacent")]
    AdjacentOnly,
    /// Each aircraft is separated from every aircraft landing before it.
    #[default]
    #[serde(rename = "all-pairs")]
    AllPairs,
}

impl SeparationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SeparationMode::AdjacentOnly => "adjacent",
            SeparationMode::AllPairs => "all-pairs",
        }
    }
}

impl fmt::Display for SeparationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeparationMode {
    type Err = AlpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacent" | "adjacent-only" => Ok(SeparationMode::AdjacentOnly),
            "all-pairs" | "all" => Ok(SeparationMode::AllPairs),
            other => Err(AlpError::Argument(format!(
                "unknown separation mode `{other}` (expected `adjacent` or `all-pairs`)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aircraft {
    /// 1-based ordinal.
    pub index: usize,
    pub earliest: Time,
    pub target: Time,
    pub latest: Time,
    pub early_penalty: Cost,
    pub late_penalty: Cost,
}

impl Aircraft {
    /// Earliness/tardiness cost of landing at `time`.
    #[inline]
    pub fn cost_at(&self, time: Time) -> Cost {
        let deviation = time - self.target;
        if deviation < 0 {
            (-deviation) as Cost * self.early_penalty
        } else {
            deviation as Cost * self.late_penalty
        }
    }
}

/// Metadata carried through from the `airland` format. Not used by the model.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub freeze_time: Time,
    pub appearance_times: Vec<Time>,
}

/// An immutable problem statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    aircraft: Vec<Aircraft>,
    separation: Vec<Vec<Time>>,
    cross_separation: Time,
    metadata: InstanceMetadata,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    n: usize,
    aircraft: Vec<Aircraft>,
    separation: Vec<Vec<Time>>,
    #[serde(default)]
    cross_separation: Time,
    #[serde(default)]
    metadata: InstanceMetadata,
}

impl TryFrom<RawInstance> for Instance {
    type Error = AlpError;

    fn try_from(raw: RawInstance) -> Result<Self> {
        if raw.n != raw.aircraft.len() {
            return Err(AlpError::Validation(format!(
                "n = {} but {} aircraft listed",
                raw.n,
                raw.aircraft.len()
            )));
        }
        let mut inst = Instance::new(raw.aircraft, raw.separation)?;
        inst.cross_separation = raw.cross_separation;
        inst.metadata = raw.metadata;
        Ok(inst)
    }
}

impl From<Instance> for RawInstance {
    fn from(inst: Instance) -> Self {
        RawInstance {
            n: inst.aircraft.len(),
            aircraft: inst.aircraft,
            separation: inst.separation,
            cross_separation: inst.cross_separation,
            metadata: inst.metadata,
        }
    }
}

impl Instance {
    /// Builds an instance after checking only its shape (non-empty, square
    /// separation matrix, consecutive 1-based indices). Use
    /// [`validate_instance`] for the value invariants.
    pub fn new(aircraft: Vec<Aircraft>, separation: Vec<Vec<Time>>) -> Result<Self> {
        let n = aircraft.len();
        if n == 0 {
            return Err(AlpError::Validation("instance has no aircraft".into()));
        }
        if separation.len() != n || separation.iter().any(|row| row.len() != n) {
            return Err(AlpError::Validation(format!(
                "separation matrix must be {n}x{n}"
            )));
        }
        for (i, a) in aircraft.iter().enumerate() {
            if a.index != i + 1 {
                return Err(AlpError::Validation(format!(
                    "aircraft at position {} has index {} (expected {})",
                    i + 1,
                    a.index,
                    i + 1
                )));
            }
        }
        Ok(Instance {
            aircraft,
            separation,
            cross_separation: 0,
            metadata: InstanceMetadata {
                freeze_time: 0,
                appearance_times: vec![0; n],
            },
        })
    }

    /// Convenience constructor from parallel vectors; assigns indices 1..=n.
    pub fn from_columns(
        earliest: &[Time],
        target: &[Time],
        latest: &[Time],
        early_penalty: &[Cost],
        late_penalty: &[Cost],
        separation: Vec<Vec<Time>>,
    ) -> Result<Self> {
        let n = earliest.len();
        if [
            target.len(),
            latest.len(),
            early_penalty.len(),
            late_penalty.len(),
        ]
        .iter()
        .any(|&len| len != n)
        {
            return Err(AlpError::Argument("column lengths differ".into()));
        }
        let aircraft = (0..n)
            .map(|i| Aircraft {
                index: i + 1,
                earliest: earliest[i],
                target: target[i],
                latest: latest[i],
                early_penalty: early_penalty[i],
                late_penalty: late_penalty[i],
            })
            .collect();
        Instance::new(aircraft, separation)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.aircraft.len()
    }

    #[inline]
    pub fn aircraft(&self) -> &[Aircraft] {
        &self.aircraft
    }

    #[inline]
    pub fn plane(&self, i: usize) -> &Aircraft {
        &self.aircraft[i]
    }

    /// Same-runway separation when `i` lands before `j`.
    #[inline]
    pub fn sep(&self, i: usize, j: usize) -> Time {
        self.separation[i][j]
    }

    pub fn separation(&self) -> &[Vec<Time>] {
        &self.separation
    }

    /// Separation between aircraft on different runways. Always 0 in the
    /// shipped configurations; the allocator assumes it.
    pub fn cross_separation(&self) -> Time {
        self.cross_separation
    }

    pub fn metadata(&self) -> &InstanceMetadata {
        &self.metadata
    }

    pub fn with_metadata(mut self, metadata: InstanceMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    /// Width of the integer time grid spanned by all windows.
    pub fn horizon(&self) -> Time {
        let lo = self.aircraft.iter().map(|a| a.earliest).min().unwrap_or(0);
        let hi = self.aircraft.iter().map(|a| a.latest).max().unwrap_or(0);
        hi - lo
    }

    /// All aircraft ordered by target time, ties by index.
    pub fn target_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by_key(|&i| (self.aircraft[i].target, i));
        order
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| AlpError::Validation(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceViolation {
    /// `earliest <= target <= latest` does not hold.
    WindowOrder {
        aircraft: usize,
    },
    NegativePenalty {
        aircraft: usize,
    },
    NegativeSeparation {
        first: usize,
        second: usize,
    },
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InstanceViolation::WindowOrder { aircraft } => write!(
                f,
                "window-order violation at aircraft {}: need earliest <= target <= latest",
                aircraft + 1
            ),
            InstanceViolation::NegativePenalty { aircraft } => {
                write!(f, "negative penalty at aircraft {}", aircraft + 1)
            }
            InstanceViolation::NegativeSeparation { first, second } => write!(
                f,
                "negative-separation violation at ({}, {})",
                first + 1,
                second + 1
            ),
        }
    }
}

/// Lists every violated value invariant; empty iff the instance is valid.
pub fn validate_instance(inst: &Instance) -> Vec<InstanceViolation> {
    let mut out = Vec::new();
    for (i, a) in inst.aircraft.iter().enumerate() {
        if !(a.earliest <= a.target && a.target <= a.latest) {
            out.push(InstanceViolation::WindowOrder { aircraft: i });
        }
        if !(a.early_penalty >= 0.0 && a.late_penalty >= 0.0) {
            out.push(InstanceViolation::NegativePenalty { aircraft: i });
        }
    }
    for i in 0..inst.n() {
        for j in 0..inst.n() {
            if i != j && inst.separation[i][j] < 0 {
                out.push(InstanceViolation::NegativeSeparation {
                    first: i,
                    second: j,
                });
            }
        }
    }
    out
}

struct TokenStream<'a> {
    tokens: Vec<(&'a str, usize)>,
    pos: usize,
}

impl<'a> TokenStream<'a> {
    fn new(text: &'a str) -> Self {
        let tokens = text
            .lines()
            .enumerate()
            .flat_map(|(ln, line)| line.split_whitespace().map(move |t| (t, ln + 1)))
            .collect();
        TokenStream { tokens, pos: 0 }
    }

    fn err(&self, message: String) -> AlpError {
        let line = self
            .tokens
            .get(self.pos)
            .or(self.tokens.last())
            .map_or(1, |t| t.1);
        AlpError::Format {
            token: self.pos + 1,
            line,
            message,
        }
    }

    fn next_raw(&mut self, what: &str) -> Result<&'a str> {
        match self.tokens.get(self.pos) {
            Some(&(tok, _)) => Ok(tok),
            None => Err(self.err(format!("unexpected end of input, expected {what}"))),
        }
    }

    fn float(&mut self, what: &str) -> Result<f64> {
        let tok = self.next_raw(what)?;
        let v: f64 = tok
            .parse()
            .map_err(|_| self.err(format!("expected {what}, found `{tok}`")))?;
        if !v.is_finite() {
            return Err(self.err(format!("expected finite {what}, found `{tok}`")));
        }
        self.pos += 1;
        Ok(v)
    }

    fn int(&mut self, what: &str) -> Result<Time> {
        let tok = self.next_raw(what)?;
        if let Ok(v) = tok.parse::<Time>() {
            self.pos += 1;
            return Ok(v);
        }
        // Some files write integral times with a decimal point.
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 => {
                self.pos += 1;
                Ok(v as Time)
            }
            _ => Err(self.err(format!("expected integer {what}, found `{tok}`"))),
        }
    }
}

/// Parses an OR-Library `airland` token stream.
pub fn parse_airland(text: &str) -> Result<Instance> {
    let mut ts = TokenStream::new(text);
    let n = ts.int("aircraft count")?;
    if n < 1 {
        return Err(AlpError::Format {
            token: 1,
            line: 1,
            message: format!("aircraft count must be at least 1, found {n}"),
        });
    }
    let n = n as usize;
    let freeze_time = ts.int("freeze time")?;

    let mut aircraft = Vec::with_capacity(n);
    let mut appearance_times = Vec::with_capacity(n);
    let mut separation = Vec::with_capacity(n);
    for i in 0..n {
        let label = |field: &str| format!("{field} of aircraft {}", i + 1);
        appearance_times.push(ts.int(&label("appearance time"))?);
        let earliest = ts.int(&label("earliest time"))?;
        let target = ts.int(&label("target time"))?;
        let latest = ts.int(&label("latest time"))?;
        let early_penalty = ts.float(&label("early penalty"))?;
        let late_penalty = ts.float(&label("late penalty"))?;
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let s = ts.int(&format!("separation ({}, {})", i + 1, j + 1))?;
            row.push(if i == j { 0 } else { s });
        }
        separation.push(row);
        aircraft.push(Aircraft {
            index: i + 1,
            earliest,
            target,
            latest,
            early_penalty,
            late_penalty,
        });
    }
    if ts.pos < ts.tokens.len() {
        return Err(ts.err(format!(
            "{} trailing token(s) after {n} aircraft",
            ts.tokens.len() - ts.pos
        )));
    }

    let inst = Instance::new(aircraft, separation)?.with_metadata(InstanceMetadata {
        freeze_time,
        appearance_times,
    });
    let violations = validate_instance(&inst);
    if let Some(v) = violations.first() {
        return Err(AlpError::Validation(v.to_string()));
    }
    Ok(inst)
}

/// Writes an instance in the `airland` format. [`parse_airland`] reads it back
/// to an identical [`Instance`].
pub fn write_airland(inst: &Instance) -> String {
    let mut out = String::new();
    let meta = inst.metadata();
    writeln!(out, " {} {}", inst.n(), meta.freeze_time).unwrap();
    for (i, a) in inst.aircraft().iter().enumerate() {
        let appearance = meta.appearance_times.get(i).copied().unwrap_or(0);
        writeln!(
            out,
            " {} {} {} {} {:?} {:?}",
            appearance, a.earliest, a.target, a.latest, a.early_penalty, a.late_penalty
        )
        .unwrap();
        let row: Vec<String> = (0..inst.n())
            .map(|j| {
                if i == j {
                    SELF_SEPARATION_PLACEHOLDER.to_string()
                } else {
                    inst.sep(i, j).to_string()
                }
            })
            .collect();
        writeln!(out, " {}", row.join(" ")).unwrap();
    }
    out
}

/// Parameters for [`generate_random_instance`]. All sampled values are integers.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub seed: u64,
    /// Maximum distance from the target to either window edge.
    pub window_span: Time,
    /// Inclusive range of off-diagonal separations.
    pub sep_range: (Time, Time),
    /// Inclusive range of integer per-unit penalties.
    pub penalty_range: (i64, i64),
    /// Attempts before giving up.
    pub retry_cap: usize,
}

impl GeneratorConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        GeneratorConfig {
            n,
            seed,
            window_span: 150,
            sep_range: (3, 30),
            penalty_range: (1, 30),
            retry_cap: 1000,
        }
    }
}

/// Draws a random valid instance whose target-ordered sequence is feasible
/// under all-pairs separation. Deterministic in `cfg.seed`.
pub fn generate_random_instance(cfg: &GeneratorConfig) -> Result<Instance> {
    if cfg.n == 0 {
        return Err(AlpError::Argument("n must be at least 1".into()));
    }
    let (sep_lo, sep_hi) = cfg.sep_range;
    let (pen_lo, pen_hi) = cfg.penalty_range;
    if cfg.window_span < 0 || sep_lo < 0 || sep_lo > sep_hi || pen_lo < 0 || pen_lo > pen_hi {
        return Err(AlpError::Argument(format!(
            "degenerate generator ranges: {cfg:?}"
        )));
    }
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let target_spread = (n as Time) * sep_hi.max(1);

    for _ in 0..cfg.retry_cap.max(1) {
        let mut earliest = Vec::with_capacity(n);
        let mut target = Vec::with_capacity(n);
        let mut latest = Vec::with_capacity(n);
        let mut early = Vec::with_capacity(n);
        let mut late = Vec::with_capacity(n);
        for _ in 0..n {
            let t = cfg.window_span + rng.gen_range(0..=target_spread);
            earliest.push(t - rng.gen_range(0..=cfg.window_span));
            target.push(t);
            latest.push(t + rng.gen_range(0..=cfg.window_span));
            early.push(rng.gen_range(pen_lo..=pen_hi) as Cost);
            late.push(rng.gen_range(pen_lo..=pen_hi) as Cost);
        }
        let separation = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0
                        } else {
                            rng.gen_range(sep_lo..=sep_hi)
                        }
                    })
                    .collect()
            })
            .collect();
        let inst = Instance::from_columns(&earliest, &target, &latest, &early, &late, separation)?;
        let order = inst.target_order();
        if crate::scheduler::initialize_latest(&inst, &order, SeparationMode::AllPairs).is_ok() {
            return Ok(inst);
        }
    }
    Err(AlpError::Generation {
        attempts: cfg.retry_cap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// Landing outside `[earliest, latest]`; magnitude is the distance to the window.
    Window { aircraft: usize, magnitude: Time },
    /// `second` lands less than the required separation after `first`.
    Separation {
        first: usize,
        second: usize,
        magnitude: Time,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible_windows: bool,
    pub feasible_adjacent: bool,
    pub feasible_all_pairs: bool,
    /// Aircraft are 0-based here, like everywhere in the library.
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self, mode: SeparationMode) -> bool {
        self.feasible_windows
            && match mode {
                SeparationMode::AdjacentOnly => self.feasible_adjacent,
                SeparationMode::AllPairs => self.feasible_all_pairs,
            }
    }
}

/// Checks windows and same-runway separations of `times` along `sequence`.
///
/// The boolean verdicts are computed for both regimes; `violations` lists the
/// window breaches plus the separation breaches relevant to `mode`.
pub fn feasibility_check(
    inst: &Instance,
    sequence: &[usize],
    times: &[Time],
    mode: SeparationMode,
) -> Result<FeasibilityReport> {
    if sequence.len() != times.len() {
        return Err(AlpError::Argument(format!(
            "sequence has {} aircraft but {} times were given",
            sequence.len(),
            times.len()
        )));
    }
    check_subset_permutation(inst.n(), sequence)?;

    let mut violations = Vec::new();
    let mut feasible_windows = true;
    for (&a, &t) in sequence.iter().zip(times) {
        let p = inst.plane(a);
        let magnitude = if t < p.earliest {
            p.earliest - t
        } else if t > p.latest {
            t - p.latest
        } else {
            0
        };
        if magnitude > 0 {
            feasible_windows = false;
            violations.push(Violation::Window {
                aircraft: a,
                magnitude,
            });
        }
    }

    let mut feasible_adjacent = true;
    let mut feasible_all_pairs = true;
    for j in 1..sequence.len() {
        for i in 0..j {
            let required = times[i] + inst.sep(sequence[i], sequence[j]);
            if times[j] >= required {
                continue;
            }
            let adjacent = i + 1 == j;
            feasible_all_pairs = false;
            if adjacent {
                feasible_adjacent = false;
            }
            if adjacent || mode == SeparationMode::AllPairs {
                violations.push(Violation::Separation {
                    first: sequence[i],
                    second: sequence[j],
                    magnitude: required - times[j],
                });
            }
        }
    }
    Ok(FeasibilityReport {
        feasible_windows,
        feasible_adjacent,
        feasible_all_pairs,
        violations,
    })
}

/// Rejects out-of-range or repeated aircraft.
pub(crate) fn check_subset_permutation(n: usize, sequence: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &a in sequence {
        if a >= n {
            return Err(AlpError::Argument(format!(
                "aircraft {} does not exist (instance has {n})",
                a + 1
            )));
        }
        if std::mem::replace(&mut seen[a], true) {
            return Err(AlpError::Argument(format!(
                "aircraft {} appears more than once",
                a + 1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_planes(latest2: Time) -> Instance {
        Instance::from_columns(
            &[0, 0],
            &[10, 20],
            &[100, latest2],
            &[1.0, 1.0],
            &[1.0, 1.0],
            vec![vec![0, 15], vec![15, 0]],
        )
        .unwrap()
    }

    #[test]
    fn parses_minimal_stream() {
        let inst = parse_airland("1 10  0 0 5 9 1.0 2.0  99999").unwrap();
        assert_eq!(inst.n(), 1);
        let a = inst.plane(0);
        assert_eq!((a.earliest, a.target, a.latest), (0, 5, 9));
        assert_eq!((a.early_penalty, a.late_penalty), (1.0, 2.0));
        assert_eq!(inst.metadata().freeze_time, 10);
        assert_eq!(inst.sep(0, 0), 0);
    }

    #[test]
    fn tokens_may_wrap_lines() {
        let text = "2\n10\n0 0 5\n9 1 2 99999\n15\n0 10 20 30\n1.5 2.5\n15 99999\n";
        let inst = parse_airland(text).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.sep(0, 1), 15);
        assert_eq!(inst.sep(1, 0), 15);
        assert_eq!(inst.plane(1).early_penalty, 1.5);
    }

    #[test]
    fn truncated_separation_rows_report_missing_token() {
        let text = "3 0\n0 0 5 9 1 1 99999 5 5\n0 0 5 9 1 1 5 99999 5\n0 0 5 9 1 1 5 5\n";
        match parse_airland(text) {
            Err(AlpError::Format {
                token,
                line,
                message,
            }) => {
                assert_eq!(token, 2 + 3 * 9);
                assert_eq!(line, 4);
                assert!(message.contains("separation (3, 3)"), "{message}");
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_numeric_and_trailing_tokens() {
        assert!(matches!(
            parse_airland("1 10 0 0 five 9 1 2 99999"),
            Err(AlpError::Format { token: 5, .. })
        ));
        assert!(matches!(
            parse_airland("1 10 0 0 5 9 1 2 99999 7"),
            Err(AlpError::Format { token: 10, .. })
        ));
        assert!(matches!(parse_airland(""), Err(AlpError::Format { .. })));
    }

    #[test]
    fn rejects_window_order_naming_the_aircraft() {
        let err = parse_airland("2 0 0 0 5 9 1 1 99999 1  0 6 5 9 1 1 1 99999").unwrap_err();
        match err {
            AlpError::Validation(msg) => assert!(msg.contains("aircraft 2"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_reports_each_violation() {
        let ok = Instance::from_columns(&[0], &[5], &[9], &[1.0], &[1.0], vec![vec![0]]).unwrap();
        assert!(validate_instance(&ok).is_empty());

        let bad_window = Instance::from_columns(
            &[0, 5],
            &[5, 4],
            &[9, 9],
            &[1.0, 1.0],
            &[1.0, 1.0],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        assert_eq!(
            validate_instance(&bad_window),
            vec![InstanceViolation::WindowOrder { aircraft: 1 }]
        );

        let bad_sep = Instance::from_columns(
            &[0, 0],
            &[5, 5],
            &[9, 9],
            &[1.0, 1.0],
            &[1.0, 1.0],
            vec![vec![0, -3], vec![1, 0]],
        )
        .unwrap();
        let v = validate_instance(&bad_sep);
        assert_eq!(
            v,
            vec![InstanceViolation::NegativeSeparation {
                first: 0,
                second: 1
            }]
        );
        assert_eq!(v[0].to_string(), "negative-separation violation at (1, 2)");
    }

    #[test]
    fn shape_errors() {
        assert!(Instance::new(vec![], vec![]).is_err());
        assert!(
            Instance::from_columns(&[0], &[1], &[2], &[1.0], &[1.0], vec![vec![0, 1]]).is_err()
        );
    }

    #[test]
    fn json_round_trip_and_n_check() {
        let inst = two_planes(100);
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        let tampered = inst.to_json().replacen("\"n\": 2", "\"n\": 3", 1);
        assert!(Instance::from_json(&tampered).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let inst = two_planes(100);
        let r = feasibility_check(&inst, &[0, 1], &[10, 25], SeparationMode::AllPairs).unwrap();
        assert!(r.feasible_windows && r.feasible_adjacent && r.feasible_all_pairs);
        assert!(r.violations.is_empty());

        let r = feasibility_check(&inst, &[0, 1], &[10, 24], SeparationMode::AdjacentOnly).unwrap();
        assert!(!r.feasible_adjacent && !r.feasible_all_pairs);
        assert_eq!(
            r.violations,
            vec![Violation::Separation {
                first: 0,
                second: 1,
                magnitude: 1
            }]
        );

        let inst = two_planes(20);
        let r = feasibility_check(&inst, &[0, 1], &[10, 25], SeparationMode::AllPairs).unwrap();
        assert!(!r.feasible_windows && r.feasible_adjacent);
        assert_eq!(
            r.violations,
            vec![Violation::Window {
                aircraft: 1,
                magnitude: 5
            }]
        );
    }

    #[test]
    fn feasibility_argument_errors() {
        let inst = two_planes(100);
        assert!(feasibility_check(&inst, &[0, 1], &[10], SeparationMode::AllPairs).is_err());
        assert!(feasibility_check(&inst, &[0, 0], &[10, 30], SeparationMode::AllPairs).is_err());
        assert!(feasibility_check(&inst, &[2], &[10], SeparationMode::AllPairs).is_err());
    }

    #[test]
    fn non_adjacent_breach_only_listed_in_all_pairs_mode() {
        // 1 -> 2 needs 1, 2 -> 3 needs 1, but 1 -> 3 needs 10.
        let inst = Instance::from_columns(
            &[0, 0, 0],
            &[0, 1, 2],
            &[50, 50, 50],
            &[1.0; 3],
            &[1.0; 3],
            vec![vec![0, 1, 10], vec![1, 0, 1], vec![10, 1, 0]],
        )
        .unwrap();
        let adj =
            feasibility_check(&inst, &[0, 1, 2], &[0, 1, 2], SeparationMode::AdjacentOnly).unwrap();
        assert!(adj.feasible_adjacent && !adj.feasible_all_pairs);
        assert!(adj.violations.is_empty());
        let all =
            feasibility_check(&inst, &[0, 1, 2], &[0, 1, 2], SeparationMode::AllPairs).unwrap();
        assert_eq!(
            all.violations,
            vec![Violation::Separation {
                first: 0,
                second: 2,
                magnitude: 8
            }]
        );
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        let a = generate_random_instance(&GeneratorConfig::new(5, 42)).unwrap();
        let b = generate_random_instance(&GeneratorConfig::new(5, 42)).unwrap();
        assert_eq!(a, b);
        assert!(validate_instance(&a).is_empty());

        let one = generate_random_instance(&GeneratorConfig::new(1, 7)).unwrap();
        assert_eq!(one.n(), 1);
        assert!(validate_instance(&one).is_empty());
    }

    #[test]
    fn generator_reports_retry_cap() {
        let cfg = GeneratorConfig {
            window_span: 0,
            sep_range: (1000, 1000),
            retry_cap: 5,
            ..GeneratorConfig::new(4, 3)
        };
        assert_eq!(
            generate_random_instance(&cfg),
            Err(AlpError::Generation { attempts: 5 })
        );
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(
            "adjacent".parse::<SeparationMode>().unwrap(),
            SeparationMode::AdjacentOnly
        );
        assert_eq!(
            "all-pairs".parse::<SeparationMode>().unwrap(),
            SeparationMode::AllPairs
        );
        assert!("nope".parse::<SeparationMode>().is_err());
    }
}
