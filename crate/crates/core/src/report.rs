//! Benchmark reference values, percentage gaps and CSV rows.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AlpError, Result};
use crate::instance::Cost;

/// Reference values shipped with the crate.
pub const BUNDLED_REFERENCE: &str = include_str!("../../../data/reference.csv");

pub const BENCH_HEADER: [&str; 8] = [
    "instance",
    "N",
    "R",
    "best",
    "reference",
    "gap_percent",
    "avg_seconds",
    "replications",
];

/// Percentage gap of a best penalty against a reference value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gap {
    Percent(f64),
    /// Reference is 0 and the best penalty is positive.
    Undefined,
    /// No reference available.
    Missing,
}

impl Gap {
    pub fn compute(best: Cost, reference: Option<Cost>) -> Gap {
        match reference {
            None => Gap::Missing,
            Some(r) if r > 0.0 => Gap::Percent(100.0 * (best - r) / r),
            Some(_) if best <= 0.0 => Gap::Percent(0.0),
            Some(_) => Gap::Undefined,
        }
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Percent(p) => write!(f, "{p:.2}"),
            Gap::Undefined => f.write_str("n/d"),
            Gap::Missing => Ok(()),
        }
    }
}

impl FromStr for Gap {
    type Err = AlpError;

    fn from_str(s: &str) -> Result<Gap> {
        match s.trim() {
            "" => Ok(Gap::Missing),
            "n/d" => Ok(Gap::Undefined),
            t => t
                .parse()
                .map(Gap::Percent)
                .map_err(|_| AlpError::Argument(format!("bad gap value `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    /// Proven optimum.
    Opt,
    /// Best known value.
    Best,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub instance: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "R")]
    pub runways: usize,
    pub reference: Cost,
    pub kind: ReferenceKind,
    /// Best penalty previously reported for the annealing approach.
    pub published: Option<Cost>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReferenceTable {
    pub entries: Vec<ReferenceEntry>,
}

fn csv_err(e: csv::Error) -> AlpError {
    AlpError::Argument(format!("reference table: {e}"))
}

impl ReferenceTable {
    /// Reads a CSV table; lines starting with `#` are skipped.
    pub fn parse<R: Read>(reader: R) -> Result<ReferenceTable> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let entries = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<ReferenceEntry>, _>>()
            .map_err(csv_err)?;
        Ok(ReferenceTable { entries })
    }

    pub fn load(path: &Path) -> Result<ReferenceTable> {
        let file = std::fs::File::open(path)
            .map_err(|e| AlpError::Argument(format!("{}: {e}", path.display())))?;
        Self::parse(file)
    }

    pub fn bundled() -> ReferenceTable {
        Self::parse(BUNDLED_REFERENCE.as_bytes()).expect("bundled reference table parses")
    }

    pub fn lookup(&self, instance: &str, runways: usize) -> Option<&ReferenceEntry> {
        self.entries
            .iter()
            .find(|e| e.instance == instance && e.runways == runways)
    }

    /// Runway counts listed for `instance`, ascending.
    pub fn runway_counts(&self, instance: &str) -> Vec<usize> {
        let mut rs: Vec<usize> = self
            .entries
            .iter()
            .filter(|e| e.instance == instance)
            .map(|e| e.runways)
            .collect();
        rs.sort_unstable();
        rs.dedup();
        rs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    Small,
    Large,
    All,
}

impl Suite {
    pub fn instances(self) -> Vec<String> {
        let range = match self {
            Suite::Small => 1..=8,
            Suite::Large => 9..=13,
            Suite::All => 1..=13,
        };
        range.map(|i| format!("airland{i}")).collect()
    }
}

impl FromStr for Suite {
    type Err = AlpError;

    fn from_str(s: &str) -> Result<Suite> {
        match s {
            "small" => Ok(Suite::Small),
            "large" => Ok(Suite::Large),
            "all" => Ok(Suite::All),
            other => Err(AlpError::Argument(format!("unknown suite `{other}`"))),
        }
    }
}

/// One seeded replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub penalty: Cost,
    /// Excludes parsing.
    pub seconds: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub runways: usize,
    pub best: Cost,
    pub reference: Option<Cost>,
    pub gap: Gap,
    pub avg_seconds: f64,
    pub replications: usize,
    pub runs: Vec<RunRecord>,
}

impl BenchRow {
    pub fn aggregate(
        instance: &str,
        n: usize,
        runways: usize,
        runs: Vec<RunRecord>,
        reference: Option<Cost>,
    ) -> Result<BenchRow> {
        if runs.is_empty() {
            return Err(AlpError::Argument(
                "a bench row needs at least one run".into(),
            ));
        }
        let best = runs
            .iter()
            .map(|r| r.penalty)
            .fold(Cost::INFINITY, Cost::min);
        let avg_seconds = runs.iter().map(|r| r.seconds).sum::<f64>() / runs.len() as f64;
        Ok(BenchRow {
            instance: instance.to_string(),
            n,
            runways,
            best,
            reference,
            gap: Gap::compute(best, reference),
            avg_seconds,
            replications: runs.len(),
            runs,
        })
    }

    fn record(&self) -> [String; 8] {
        [
            self.instance.clone(),
            self.n.to_string(),
            self.runways.to_string(),
            self.best.to_string(),
            self.reference.map(|r| r.to_string()).unwrap_or_default(),
            self.gap.to_string(),
            format!("{:.6}", self.avg_seconds),
            self.replications.to_string(),
        ]
    }
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.record()).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| AlpError::Argument(format!("writing bench CSV: {e}")))
}

/// Parsed CSV line: the per-run records are not part of the CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchCsvRow {
    pub instance: String,
    pub n: usize,
    pub runways: usize,
    pub best: Cost,
    pub reference: Option<Cost>,
    pub gap: Gap,
    pub avg_seconds: f64,
    pub replications: usize,
}

pub fn read_bench_csv<R: Read>(reader: R) -> Result<Vec<BenchCsvRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(BENCH_HEADER) {
        return Err(AlpError::Argument(format!(
            "unexpected bench header {header:?}"
        )));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| AlpError::Argument(format!("bad number `{s}` in bench CSV")))
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push(BenchCsvRow {
            instance: rec[0].to_string(),
            n: num(&rec[1])? as usize,
            runways: num(&rec[2])? as usize,
            best: num(&rec[3])?,
            reference: if rec[4].is_empty() {
                None
            } else {
                Some(num(&rec[4])?)
            },
            gap: rec[5].parse()?,
            avg_seconds: num(&rec[6])?,
            replications: num(&rec[7])? as usize,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_rules() {
        assert_eq!(Gap::compute(1995.0, Some(1950.0)).to_string(), "2.31");
        assert_eq!(Gap::compute(700.0, Some(700.0)), Gap::Percent(0.0));
        assert_eq!(Gap::compute(0.0, Some(0.0)), Gap::Percent(0.0));
        assert_eq!(Gap::compute(3.0, Some(0.0)), Gap::Undefined);
        assert_eq!(Gap::compute(3.0, None), Gap::Missing);
        assert_eq!(Gap::Undefined.to_string(), "n/d");
        assert_eq!(Gap::Missing.to_string(), "");
        assert!(matches!(Gap::compute(444.1, Some(452.92)), Gap::Percent(p) if p < 0.0));
    }

    #[test]
    fn bundled_table_lookups() {
        let t = ReferenceTable::bundled();
        assert_eq!(t.entries.len(), 49);
        let a1 = t.lookup("airland1", 2).unwrap();
        assert_eq!(
            (a1.n, a1.reference, a1.kind),
            (10, 90.0, ReferenceKind::Opt)
        );
        let a8 = t.lookup("airland8", 1).unwrap();
        assert_eq!((a8.reference, a8.published), (1950.0, Some(1995.0)));
        assert_eq!(t.lookup("airland13", 5).unwrap().kind, ReferenceKind::Best);
        assert_eq!(t.runway_counts("airland4"), vec![1, 2, 3, 4]);
        assert!(t.lookup("airland1", 4).is_none());
    }

    #[test]
    fn bench_csv_round_trip() {
        let runs = vec![
            RunRecord {
                seed: 1,
                penalty: 3.0,
                seconds: 0.5,
                iterations: 10,
            },
            RunRecord {
                seed: 2,
                penalty: 5.0,
                seconds: 1.5,
                iterations: 10,
            },
        ];
        let rows = vec![
            BenchRow::aggregate("x", 4, 2, runs.clone(), Some(0.0)).unwrap(),
            BenchRow::aggregate("y", 4, 1, runs, None).unwrap(),
        ];
        assert_eq!(rows[0].best, 3.0);
        assert_eq!(rows[0].avg_seconds, 1.0);
        let mut buf = Vec::new();
        write_bench_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(
            text.starts_with("instance,N,R,best,reference,gap_percent,avg_seconds,replications\n")
        );
        assert!(text.contains("x,4,2,3,0,n/d,1.000000,2"));
        assert!(text.contains("y,4,1,3,,,1.000000,2"));
        let back = read_bench_csv(&buf[..]).unwrap();
        assert_eq!(back[0].gap, Gap::Undefined);
        assert_eq!(back[1].reference, None);
        assert_eq!(back[1].gap, Gap::Missing);
    }

    #[test]
    fn suites() {
        assert_eq!(Suite::Small.instances().len(), 8);
        assert_eq!(Suite::Large.instances()[0], "airland9");
        assert_eq!("all".parse::<Suite>().unwrap().instances().len(), 13);
        assert!("tiny".parse::<Suite>().is_err());
    }
}
