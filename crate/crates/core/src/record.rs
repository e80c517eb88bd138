//! Per-run histories and their CSV forms.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::format;

/// Evaluation count needed to reach an accuracy level, or "not reached".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvalCount {
    Reached(u64),
    NotReached,
}

impl EvalCount {
    pub fn finite(self) -> Option<u64> {
        match self {
            EvalCount::Reached(n) => Some(n),
            EvalCount::NotReached => None,
        }
    }

    pub fn is_reached(self) -> bool {
        matches!(self, EvalCount::Reached(_))
    }
}

impl fmt::Display for EvalCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalCount::Reached(n) => write!(f, "{n}"),
            EvalCount::NotReached => f.write_str("inf"),
        }
    }
}

impl FromStr for EvalCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" => Ok(EvalCount::NotReached),
            t => t
                .parse()
                .map(EvalCount::Reached)
                .map_err(|_| Error::Parse(format!("bad evaluation count `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    StepSizeFloor,
    Budget,
    MaxIterations,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::StepSizeFloor => "step-size-floor",
            Termination::Budget => "budget",
            Termination::MaxIterations => "max-iterations",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Termination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step-size-floor" => Ok(Termination::StepSizeFloor),
            "budget" => Ok(Termination::Budget),
            "max-iterations" => Ok(Termination::MaxIterations),
            _ => Err(Error::Parse(format!("bad termination reason `{s}`"))),
        }
    }
}

/// State at the start of iteration `k`, before polling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub k: u64,
    pub alpha: f64,
    pub f: f64,
    pub evals: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub history: Vec<HistoryRow>,
    pub final_x: DVector<f64>,
    pub final_f: f64,
    pub termination: Termination,
    /// Filled in by the benchmark layer once `f*` is known.
    pub evals_to_accuracy: Vec<(f64, EvalCount)>,
}

impl RunRecord {
    pub fn total_evals(&self) -> u64 {
        self.history.last().map_or(0, |r| r.evals)
    }

    pub fn f0(&self) -> f64 {
        self.history.first().map_or(self.final_f, |r| r.f)
    }

    pub fn iterations(&self) -> u64 {
        self.history.last().map_or(0, |r| r.k)
    }

    pub fn write_history_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,alpha,f,evals")?;
        for row in &self.history {
            writeln!(
                out,
                "{},{},{},{}",
                row.k,
                format::float(row.alpha),
                format::float(row.f),
                row.evals
            )?;
        }
        Ok(())
    }

    pub fn history_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_history_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

pub fn read_history_csv<R: Read>(input: R) -> Result<Vec<HistoryRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse("short history row".into()));
        let bad = |what: &str| Error::Parse(format!("bad {what} in history row"));
        rows.push(HistoryRow {
            k: field(0)?.parse().map_err(|_| bad("k"))?,
            alpha: format::parse_float(field(1)?).ok_or_else(|| bad("alpha"))?,
            f: format::parse_float(field(2)?).ok_or_else(|| bad("f"))?,
            evals: field(3)?.parse().map_err(|_| bad("evals"))?,
        });
    }
    Ok(rows)
}

/// One line of a campaign (or single-run) summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub solver: String,
    pub seed: u64,
    pub final_f: f64,
    pub evals: u64,
    pub termination: Termination,
    pub evals_to_accuracy: Vec<(f64, EvalCount)>,
}

impl SummaryRow {
    pub fn from_record(problem: &str, solver: &str, seed: u64, record: &RunRecord) -> Self {
        Self {
            problem: problem.to_owned(),
            solver: solver.to_owned(),
            seed,
            final_f: record.final_f,
            evals: record.total_evals(),
            termination: record.termination,
            evals_to_accuracy: record.evals_to_accuracy.clone(),
        }
    }
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], taus: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["problem", "solver", "seed", "final_f", "evals", "termination"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(taus.iter().map(|t| format!("evals_tau_{}", format::tau_label(*t))));
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let mut fields = vec![
            row.problem.clone(),
            row.solver.clone(),
            row.seed.to_string(),
            format::float(row.final_f),
            row.evals.to_string(),
            row.termination.to_string(),
        ];
        for tau in taus {
            let count = row
                .evals_to_accuracy
                .iter()
                .find(|(t, _)| t == tau)
                .map_or(EvalCount::NotReached, |(_, c)| *c);
            fields.push(count.to_string());
        }
        w.write_record(&fields).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a summary CSV; returns the accuracy levels named in the header and
/// the rows.
pub fn read_summary_csv<R: Read>(input: R) -> Result<(Vec<f64>, Vec<SummaryRow>)> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.len() < 6 || &header[0] != "problem" || &header[5] != "termination" {
        return Err(Error::Parse("not a summary CSV".into()));
    }
    let taus = header
        .iter()
        .skip(6)
        .map(|h| {
            h.strip_prefix("evals_tau_")
                .and_then(|t| t.parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("bad accuracy column `{h}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let bad = |what: &str| Error::Parse(format!("bad {what} in summary row"));
        let mut counts = Vec::with_capacity(taus.len());
        for (i, tau) in taus.iter().enumerate() {
            counts.push((*tau, rec[6 + i].parse::<EvalCount>()?));
        }
        rows.push(SummaryRow {
            problem: rec[0].to_owned(),
            solver: rec[1].to_owned(),
            seed: rec[2].parse().map_err(|_| bad("seed"))?,
            final_f: format::parse_float(&rec[3]).ok_or_else(|| bad("final_f"))?,
            evals: rec[4].parse().map_err(|_| bad("evals"))?,
            termination: rec[5].parse()?,
            evals_to_accuracy: counts,
        });
    }
    Ok((taus, rows))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}
