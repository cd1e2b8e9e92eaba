// SPDX-License-Identifier: Apache-2.0

//! Benchmark grid: synthetic clouds, timed runs of every layout x strategy x
//! precision combination, speedups against a baseline and CSV / markdown
//! reports.
//!
//! Data and query counts are always equal. Only the time columns of a
//! report (`median_s`, `min_s`, `speedup`) change between runs with the same
//! seed.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{IdwError, Result};
use crate::io::write_file;
use crate::layout::{LayoutKind, LayoutStore};
use crate::model::{idw_predict_seq, Params, PointRecord, QueryPoint};
use crate::real::Precision;
use crate::strategies::{self, ExecConfig, Strategy};

/// Size multiplier of the `k` suffix.
pub const K: usize = 1024;

/// Parses `10k`, `10K` (x1024) or a plain count.
pub fn parse_size(s: &str) -> Result<usize> {
    let t = s.trim();
    let (digits, mult) = match t.strip_suffix(['k', 'K']) {
        Some(d) => (d, K),
        None => (t, 1),
    };
    digits
        .parse::<usize>()
        .ok()
        .and_then(|v| v.checked_mul(mult))
        .ok_or_else(|| IdwError::InvalidConfig(format!("bad size `{s}`")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for Rect {
    fn default() -> Self {
        Rect {
            x_min: 0.0,
            x_max: 1.0,
            y_min: 0.0,
            y_max: 1.0,
        }
    }
}

pub const DEFAULT_VALUE_RANGE: (f64, f64) = (0.0, 100.0);

/// Uniform `[0, 1)` from the top 53 bits of a draw.
fn unit(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `n` samples with coordinates uniform in `bounds` and values uniform in
/// `values`. The generator is SplitMix64 seeded with `seed`; each record
/// consumes three draws, in x, y, z order, so a given seed yields identical
/// bits on every platform.
pub fn generate_cloud(n: usize, seed: u64, bounds: &Rect, values: (f64, f64)) -> Result<Vec<PointRecord>> {
    if n == 0 {
        return Err(IdwError::NoData);
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let lerp = |lo: f64, hi: f64, u: f64| lo + (hi - lo) * u;
    Ok((0..n)
        .map(|_| {
            let x = lerp(bounds.x_min, bounds.x_max, unit(&mut rng));
            let y = lerp(bounds.y_min, bounds.y_max, unit(&mut rng));
            let z = lerp(values.0, values.1, unit(&mut rng));
            PointRecord::new(x, y, z)
        })
        .collect())
}

/// Query seed derived from a data seed so one number fixes a whole instance.
pub fn query_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

pub fn generate_queries(m: usize, seed: u64, bounds: &Rect) -> Result<Vec<QueryPoint>> {
    Ok(generate_cloud(m, query_seed(seed), bounds, DEFAULT_VALUE_RANGE)?
        .into_iter()
        .map(QueryPoint::from)
        .collect())
}

/// What produces the predictions of a timed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Single-threaded reference over plain records; has no layout.
    Seq,
    Strategy(Strategy),
}

impl Method {
    pub fn uses_layout(self) -> bool {
        matches!(self, Method::Strategy(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Seq => f.write_str("seq"),
            Method::Strategy(s) => s.fmt(f),
        }
    }
}

impl FromStr for Method {
    type Err = IdwError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("seq") {
            Ok(Method::Seq)
        } else {
            s.parse().map(Method::Strategy)
        }
    }
}

fn layout_label(layout: Option<LayoutKind>) -> &'static str {
    layout.map_or("-", LayoutKind::name)
}

fn parse_layout_label(s: &str) -> Result<Option<LayoutKind>> {
    if s == "-" {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

/// The run used as speedup denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Baseline {
    pub method: Method,
    pub layout: Option<LayoutKind>,
    pub precision: Precision,
}

impl Default for Baseline {
    fn default() -> Self {
        Baseline {
            method: Method::Seq,
            layout: None,
            precision: Precision::Double,
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.layout {
            Some(l) => write!(f, "{}:{}:{}", self.method, l, self.precision),
            None => write!(f, "{}:{}", self.method, self.precision),
        }
    }
}

/// `method[:layout]:precision`, e.g. `seq:double` or `tiled:aoas:single`.
impl FromStr for Baseline {
    type Err = IdwError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let (method, layout, precision) = match parts.as_slice() {
            [m, p] => (m.parse()?, None, p.parse()?),
            [m, l, p] => (m.parse()?, Some(l.parse()?), p.parse()?),
            _ => return Err(IdwError::InvalidConfig(format!("bad baseline `{s}`"))),
        };
        let baseline = Baseline {
            method,
            layout,
            precision,
        };
        if baseline.method.uses_layout() != baseline.layout.is_some() {
            return Err(IdwError::InvalidConfig(format!(
                "baseline `{s}`: a layout is required for strategies and not allowed for seq"
            )));
        }
        Ok(baseline)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub sizes: Vec<usize>,
    pub layouts: Vec<LayoutKind>,
    pub methods: Vec<Method>,
    pub precisions: Vec<Precision>,
    pub p: f64,
    pub repeats: usize,
    pub warmup: usize,
    pub seed: u64,
    pub baseline: Baseline,
    pub exec: ExecConfig,
}

impl Default for BenchSpec {
    /// 10K, 50K and 100K points, every layout, strategy and precision.
    fn default() -> Self {
        BenchSpec {
            sizes: vec![10 * K, 50 * K, 100 * K],
            layouts: LayoutKind::ALL.to_vec(),
            methods: Strategy::ALL.into_iter().map(Method::Strategy).collect(),
            precisions: Precision::ALL.to_vec(),
            p: 2.0,
            repeats: 5,
            warmup: 1,
            seed: 1,
            baseline: Baseline::default(),
            exec: ExecConfig::default(),
        }
    }
}

/// One cell of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchEntry {
    pub method: Method,
    pub layout: Option<LayoutKind>,
    pub precision: Precision,
    pub n: usize,
}

impl BenchEntry {
    pub fn is_legal(&self) -> bool {
        self.layout.is_none_or(|l| l.supports(self.precision))
    }

    fn matches(&self, b: &Baseline) -> bool {
        self.method == b.method && self.layout == b.layout && self.precision == b.precision
    }
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(IdwError::InvalidConfig("repeats must be at least 1".into()));
        }
        if self.sizes.contains(&0) {
            return Err(IdwError::NoData);
        }
        if self.baseline.method.uses_layout() != self.baseline.layout.is_some() {
            return Err(IdwError::InvalidConfig("baseline layout mismatch".into()));
        }
        if let Some(l) = self.baseline.layout {
            l.check(self.baseline.precision)?;
        }
        Params::with_power(self.p).validate()?;
        self.exec.validate()
    }

    /// Every cell in report order. Illegal layout/precision pairs are
    /// included (they become `n/a` rows); the baseline is appended for each
    /// size when the selection does not already contain it.
    pub fn entries(&self) -> Vec<BenchEntry> {
        let mut out = Vec::new();
        for &n in &self.sizes {
            let start = out.len();
            for &precision in &self.precisions {
                for &method in &self.methods {
                    if method.uses_layout() {
                        for &layout in &self.layouts {
                            out.push(BenchEntry {
                                method,
                                layout: Some(layout),
                                precision,
                                n,
                            });
                        }
                    } else {
                        out.push(BenchEntry {
                            method,
                            layout: None,
                            precision,
                            n,
                        });
                    }
                }
            }
            if !out[start..].iter().any(|e| e.matches(&self.baseline)) {
                out.push(BenchEntry {
                    method: self.baseline.method,
                    layout: self.baseline.layout,
                    precision: self.baseline.precision,
                    n,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub method: Method,
    pub layout: Option<LayoutKind>,
    pub precision: Precision,
    pub n: usize,
    pub p: f64,
    /// Wall-clock seconds of each timed repetition; empty for `n/a` rows.
    pub times: Vec<f64>,
    pub median: Option<f64>,
    pub min: Option<f64>,
    pub speedup: Option<f64>,
    /// Sum of the last run's predictions, accumulated in `f64`.
    pub checksum: Option<f64>,
}

impl BenchRecord {
    fn not_applicable(entry: &BenchEntry, p: f64) -> Self {
        BenchRecord {
            method: entry.method,
            layout: entry.layout,
            precision: entry.precision,
            n: entry.n,
            p,
            times: Vec::new(),
            median: None,
            min: None,
            speedup: None,
            checksum: None,
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.median.is_some()
    }

    fn entry(&self) -> BenchEntry {
        BenchEntry {
            method: self.method,
            layout: self.layout,
            precision: self.precision,
            n: self.n,
        }
    }
}

fn median(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    if s.len() % 2 == 1 {
        s[mid]
    } else {
        0.5 * (s[mid - 1] + s[mid])
    }
}

/// Inputs shared by every cell of one size.
pub struct Instance {
    pub data: Vec<PointRecord>,
    pub queries: Vec<QueryPoint>,
}

impl Instance {
    pub fn generate(n: usize, seed: u64) -> Result<Instance> {
        let bounds = Rect::default();
        Ok(Instance {
            data: generate_cloud(n, seed, &bounds, DEFAULT_VALUE_RANGE)?,
            queries: generate_queries(n, seed, &bounds)?,
        })
    }
}

/// Warmup runs followed by `repeats` timed runs of one cell. Illegal cells
/// yield an `n/a` record instead of an error.
pub fn time_run(
    entry: &BenchEntry,
    instance: &Instance,
    params: &Params,
    exec: &ExecConfig,
    repeats: usize,
    warmup: usize,
) -> Result<BenchRecord> {
    if repeats == 0 {
        return Err(IdwError::InvalidConfig("repeats must be at least 1".into()));
    }
    if !entry.is_legal() {
        return Ok(BenchRecord::not_applicable(entry, params.p));
    }
    let store = match entry.layout {
        Some(layout) => Some(LayoutStore::build(&instance.data, layout, entry.precision)?),
        None => None,
    };
    let once = || -> Result<Vec<f64>> {
        match (entry.method, &store) {
            (Method::Seq, _) => idw_predict_seq(&instance.data, &instance.queries, params, entry.precision),
            (Method::Strategy(s), Some(store)) => {
                Ok(strategies::run(s, store, &instance.queries, params, exec)?.values)
            }
            (Method::Strategy(_), None) => Err(IdwError::InvalidConfig("strategy without a layout".into())),
        }
    };
    for _ in 0..warmup {
        once()?;
    }
    let mut times = Vec::with_capacity(repeats);
    let mut last = Vec::new();
    for _ in 0..repeats {
        let t0 = Instant::now();
        last = once()?;
        times.push(t0.elapsed().as_secs_f64());
    }
    let min = times.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(BenchRecord {
        method: entry.method,
        layout: entry.layout,
        precision: entry.precision,
        n: entry.n,
        p: params.p,
        median: Some(median(&times)),
        min: Some(min),
        times,
        speedup: None,
        checksum: Some(last.iter().sum()),
    })
}

/// Fills in `speedup = baseline median / median` for every timed record,
/// matching the baseline of the same size. The baseline row gets exactly 1.
pub fn speedup_table(records: &[BenchRecord], baseline: &Baseline) -> Result<Vec<BenchRecord>> {
    let mut base: BTreeMap<usize, f64> = BTreeMap::new();
    for r in records {
        if r.entry().matches(baseline) {
            if let Some(m) = r.median {
                base.insert(r.n, m);
            }
        }
    }
    records
        .iter()
        .map(|r| {
            let mut out = r.clone();
            if let Some(m) = r.median {
                let b = base.get(&r.n).ok_or(IdwError::BaselineNotFound)?;
                out.speedup = Some(b / m);
            }
            Ok(out)
        })
        .collect()
}

/// Runs the whole grid, calling `progress` after every cell.
pub fn run_bench_with(spec: &BenchSpec, mut progress: impl FnMut(&BenchRecord)) -> Result<Vec<BenchRecord>> {
    spec.validate()?;
    let params = Params::with_power(spec.p);
    let mut records = Vec::new();
    let entries = spec.entries();
    for &n in &spec.sizes {
        let instance = Instance::generate(n, spec.seed)?;
        for entry in entries.iter().filter(|e| e.n == n) {
            let rec = time_run(entry, &instance, &params, &spec.exec, spec.repeats, spec.warmup)?;
            progress(&rec);
            records.push(rec);
        }
    }
    speedup_table(&records, &spec.baseline)
}

pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRecord>> {
    run_bench_with(spec, |_| {})
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

pub const REPORT_HEADER: &str = "layout,strategy,precision,n,p,median_s,min_s,speedup,checksum";

/// One parsed line of a CSV report. `None` stands for `n/a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub layout: Option<LayoutKind>,
    pub method: Method,
    pub precision: Precision,
    pub n: usize,
    pub p: f64,
    pub median_s: Option<f64>,
    pub min_s: Option<f64>,
    pub speedup: Option<f64>,
    pub checksum: Option<f64>,
}

impl From<&BenchRecord> for ReportRow {
    fn from(r: &BenchRecord) -> Self {
        ReportRow {
            layout: r.layout,
            method: r.method,
            precision: r.precision,
            n: r.n,
            p: r.p,
            median_s: r.median,
            min_s: r.min,
            speedup: r.speedup,
            checksum: r.checksum,
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

pub fn write_csv<W: Write>(records: &[BenchRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            layout_label(r.layout),
            r.method,
            r.precision,
            r.n,
            r.p,
            opt(r.median),
            opt(r.min),
            opt(r.speedup),
            opt(r.checksum)
        )?;
    }
    w.flush()
}

pub fn parse_csv<R: Read>(reader: R) -> Result<Vec<ReportRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| IdwError::Format(e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != REPORT_HEADER {
        return Err(IdwError::Format(format!("unexpected report header `{header}`")));
    }
    let num = |s: &str| -> Result<Option<f64>> {
        if s == "n/a" {
            Ok(None)
        } else {
            s.parse()
                .map(Some)
                .map_err(|_| IdwError::Format(format!("bad number `{s}`")))
        }
    };
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(|e| IdwError::Format(e.to_string()))?;
            let f = |i: usize| rec.get(i).unwrap_or("");
            Ok(ReportRow {
                layout: parse_layout_label(f(0))?,
                method: f(1).parse()?,
                precision: f(2).parse()?,
                n: f(3)
                    .parse()
                    .map_err(|_| IdwError::Format(format!("bad n `{}`", f(3))))?,
                p: num(f(4))?.ok_or_else(|| IdwError::Format("p is n/a".into()))?,
                median_s: num(f(5))?,
                min_s: num(f(6))?,
                speedup: num(f(7))?,
                checksum: num(f(8))?,
            })
        })
        .collect()
}

pub fn write_markdown<W: Write>(records: &[BenchRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "# IDW benchmark report")?;
    writeln!(w)?;
    writeln!(
        w,
        "| layout | strategy | precision | n | p | median (s) | min (s) | speedup | checksum |"
    )?;
    writeln!(w, "|---|---|---|---:|---:|---:|---:|---:|---:|")?;
    let fmt = |v: Option<f64>, prec: usize| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.prec$}"));
    for r in records {
        writeln!(
            w,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            layout_label(r.layout),
            r.method,
            r.precision,
            r.n,
            r.p,
            fmt(r.median, 6),
            fmt(r.min, 6),
            fmt(r.speedup, 2),
            fmt(r.checksum, 6)
        )?;
    }
    writeln!(w)?;
    writeln!(w, "## Layout ordering (hardware-dependent observation)")?;
    writeln!(w)?;
    writeln!(
        w,
        "Layouts ordered by median time, fastest first. These orderings depend on the host \
         machine and are reported, not checked."
    )?;
    writeln!(w)?;
    let mut groups: BTreeMap<(Method, Precision, usize), Vec<(f64, LayoutKind)>> = BTreeMap::new();
    for r in records {
        if let (Some(l), Some(m)) = (r.layout, r.median) {
            groups.entry((r.method, r.precision, r.n)).or_default().push((m, l));
        }
    }
    for ((method, precision, n), mut timed) in groups {
        timed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let order: Vec<&str> = timed.iter().map(|(_, l)| l.name()).collect();
        writeln!(
            w,
            "- {method} / {precision} / n={n}: {} (fastest: {})",
            order.join(" < "),
            order[0]
        )?;
    }
    w.flush()
}

pub fn emit_report(records: &[BenchRecord], format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    write_file(path, |w| match format {
        ReportFormat::Csv => write_csv(records, w),
        ReportFormat::Markdown => write_markdown(records, w),
    })
}
