//! Per-step trace records and their CSV form.

use std::fmt::Write as _;
use std::io::{self, Write};

/// Everything logged about one closed-loop step `k`.
///
/// `theta` is the estimate after the update (`θ̂_{k+1}`); `regret` uses the
/// estimate before it (`θ̂_k`). `n = k + 1` steps have been folded into the
/// running quantities (`cum_regret`, `J_n`, `L_n`, `G_n`, the eigenvalues).
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub k: u64,
    pub phi: Vec<f64>,
    pub c: f64,
    pub y: f64,
    pub s: bool,
    pub theta: Vec<f64>,
    pub e: f64,
    pub a: f64,
    pub beta: f64,
    pub omega: f64,
    pub regret: f64,
    pub cum_regret: f64,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lai_wei: Option<f64>,
    pub g_n: Option<f64>,
    pub j_n: Option<f64>,
    pub l_n: Option<f64>,
    pub clamped: bool,
    /// Noise realisation `v_{k+1}`; kept in memory, recoverable from the CSV as `y − φᵀθ`.
    pub v: f64,
    /// Reference (closed loop) or adaptive prediction (open loop) that `y` is scored against.
    pub reference: f64,
}

pub fn csv_header(p: usize) -> String {
    let mut h = String::from("k");
    for i in 0..p {
        let _ = write!(h, ",phi_{i}");
    }
    h.push_str(",c,y,s");
    for i in 0..p {
        let _ = write!(h, ",theta_{i}");
    }
    h.push_str(",e,a,beta,omega,regret,cum_regret,lambda_min,lambda_max,lai_wei,G_n,J_n,L_n,clamped");
    h
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_opt(line: &mut String, x: Option<f64>) {
    line.push(',');
    if let Some(v) = x.filter(|v| v.is_finite()) {
        line.push_str(&fmt_f64(v));
    }
}

impl StepRecord {
    pub fn csv_row(&self) -> String {
        let mut line = self.k.to_string();
        for &v in &self.phi {
            line.push(',');
            line.push_str(&fmt_f64(v));
        }
        for v in [self.c, self.y] {
            line.push(',');
            line.push_str(&fmt_f64(v));
        }
        line.push_str(if self.s { ",1" } else { ",0" });
        for &v in &self.theta {
            line.push(',');
            line.push_str(&fmt_f64(v));
        }
        for v in [self.e, self.a, self.beta, self.omega, self.regret, self.cum_regret] {
            line.push(',');
            line.push_str(&fmt_f64(v));
        }
        for v in [self.lambda_min, self.lambda_max, self.lai_wei, self.g_n, self.j_n, self.l_n] {
            push_opt(&mut line, v);
        }
        line.push_str(if self.clamped { ",1" } else { ",0" });
        line
    }
}

/// Receives every step of a replication.
pub trait RecordSink {
    fn record(&mut self, rec: &StepRecord, checkpoint: bool) -> io::Result<()>;

    fn finish(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Discards records.
pub struct NullSink;

impl RecordSink for NullSink {
    fn record(&mut self, _rec: &StepRecord, _checkpoint: bool) -> io::Result<()> {
        Ok(())
    }
}

/// Keeps every record in memory.
#[derive(Default)]
pub struct MemorySink {
    pub records: Vec<StepRecord>,
}

impl RecordSink for MemorySink {
    fn record(&mut self, rec: &StepRecord, _checkpoint: bool) -> io::Result<()> {
        self.records.push(rec.clone());
        Ok(())
    }
}

/// Writes CSV rows: every step while `n <= full_until`, then every `stride`-th
/// step plus the checkpoints.
pub struct CsvTraceWriter<W: Write> {
    out: W,
    p: usize,
    stride: u64,
    full_until: u64,
    header_written: bool,
}

impl<W: Write> CsvTraceWriter<W> {
    pub fn new(out: W, p: usize, stride: u64, full_until: u64) -> Self {
        Self {
            out,
            p,
            stride: stride.max(1),
            full_until,
            header_written: false,
        }
    }

    pub fn keeps(&self, k: u64, checkpoint: bool) -> bool {
        let n = k + 1;
        checkpoint || n <= self.full_until || n.is_multiple_of(self.stride)
    }

    fn ensure_header(&mut self) -> io::Result<()> {
        if !self.header_written {
            writeln!(self.out, "{}", csv_header(self.p))?;
            self.header_written = true;
        }
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> RecordSink for CsvTraceWriter<W> {
    fn record(&mut self, rec: &StepRecord, checkpoint: bool) -> io::Result<()> {
        self.ensure_header()?;
        if self.keeps(rec.k, checkpoint) {
            writeln!(self.out, "{}", rec.csv_row())?;
        }
        Ok(())
    }

    fn finish(&mut self) -> io::Result<()> {
        self.ensure_header()?;
        self.out.flush()
    }
}
