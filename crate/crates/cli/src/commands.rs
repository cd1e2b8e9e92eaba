// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use idw_core::bench::{self, Baseline, BenchSpec, Method, Rect, ReportFormat};
use idw_core::layout::{read_dump_file, write_dump_file, DUMP_MAGIC};
use idw_core::txn::{scorecard_row, write_scorecard_csv};
use idw_core::{
    idw_predict_seq, io as idw_io, strategies, AccessPattern, ComponentSet, ExecConfig, IdwError, LayoutKind,
    LayoutStore, Params, Precision, Strategy,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileFormat {
    Csv,
    Bin,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GenArgs {
    /// Number of points.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` (default) or a binary layout dump.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    /// Layout of a binary dump [default: soa].
    #[arg(long)]
    layout: Option<String>,
    /// Precision of a binary dump [default: double].
    #[arg(long)]
    precision: Option<String>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunArgs {
    /// Samples as CSV (`x,y,z`) or a layout dump.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Query locations as CSV (`x,y`).
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long)]
    layout: Option<String>,
    /// naive, tiled, nested-original, nested-improved or seq.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    precision: Option<String>,
    /// Power parameter.
    #[arg(long)]
    p: Option<f64>,
    /// Squared distance at or below which a sample counts as coincident.
    #[arg(long)]
    zero_eps: Option<f64>,
    #[arg(long)]
    group_size: Option<usize>,
    #[arg(long)]
    tile_size: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BenchArgs {
    /// Comma-separated sizes; `k` means 1024.
    #[arg(long)]
    sizes: Option<String>,
    /// Comma-separated layouts or `all`.
    #[arg(long)]
    layouts: Option<String>,
    /// Comma-separated strategies (may include `seq`) or `all`.
    #[arg(long)]
    strategies: Option<String>,
    /// Comma-separated precisions or `all`.
    #[arg(long)]
    precisions: Option<String>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    p: Option<f64>,
    /// `method[:layout]:precision` used as speedup denominator.
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long)]
    group_size: Option<usize>,
    #[arg(long)]
    tile_size: Option<usize>,
    /// CSV report; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Markdown summary.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AnalyzeArgs {
    /// Comma-separated layouts or `all`.
    #[arg(long)]
    layout: Option<String>,
    /// Comma-separated precisions or `all`.
    #[arg(long)]
    precision: Option<String>,
    /// Components read by each worker, e.g. `x`, `xy` or `x,y,z`.
    #[arg(long)]
    components: Option<String>,
    #[arg(long)]
    warp: Option<usize>,
    #[arg(long)]
    segment: Option<usize>,
    #[arg(long)]
    base_offset: Option<usize>,
    /// Scorecard CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConvertArgs {
    /// CSV or layout dump.
    #[arg(long = "in")]
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    /// Expected source layout; for CSV input, the layout it is first built in.
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    /// Target precision [default: that of the input].
    #[arg(long)]
    precision: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding [default: csv for a `.csv` path, bin otherwise].
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required")))
}

fn parse<T: FromStr<Err = IdwError>>(s: &str) -> Result<T> {
    Ok(s.trim().parse()?)
}

/// Comma-separated list, with `all` expanding to `every`.
fn parse_list<T: FromStr<Err = IdwError> + Copy>(s: &str, every: &[T]) -> Result<Vec<T>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(every.to_vec());
    }
    let items = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse)
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(usage(format!("empty list `{s}`")));
    }
    Ok(items)
}

/// Worker thread count: `IDW_THREADS` when set, otherwise the machine width.
fn parallel_width() -> Result<usize> {
    match std::env::var("IDW_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(usage(format!("IDW_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(idw_core::available_width()),
    }
}

fn show_config(command: &str, resolved: serde_json::Value) {
    eprintln!("{}", json!({ "command": command, "config": resolved }));
}

fn is_dump(path: &Path) -> Result<bool> {
    let mut head = [0u8; 4];
    let mut f = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut got = 0;
    while got < head.len() {
        match f.read(&mut head[got..]) {
            Ok(0) => break,
            Ok(k) => got += k,
            Err(e) => return Err(CliError::Io(format!("{}: {e}", path.display()))),
        }
    }
    Ok(got == head.len() && head == DUMP_MAGIC)
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => Ok(idw_io::write_file(p, |w| f(w))?),
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)
                .and_then(|()| w.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

pub fn gen(a: GenArgs) -> Result<()> {
    let n = required(a.n, "n")?;
    let seed = a.seed.unwrap_or(1);
    let out = required(a.out, "out")?;
    let format = a.format.unwrap_or(FileFormat::Csv);
    let layout: LayoutKind = parse(a.layout.as_deref().unwrap_or("soa"))?;
    let precision: Precision = parse(a.precision.as_deref().unwrap_or("double"))?;
    show_config(
        "gen",
        json!({ "n": n, "seed": seed, "out": out, "format": format, "layout": layout.name(), "precision": precision.name() }),
    );
    let records = bench::generate_cloud(n, seed, &Rect::default(), bench::DEFAULT_VALUE_RANGE)?;
    match format {
        FileFormat::Csv => idw_io::write_file(&out, |w| idw_io::write_points_csv(&records, w))?,
        FileFormat::Bin => write_dump_file(&LayoutStore::build(&records, layout, precision)?, &out)?,
    }
    Ok(())
}

pub fn run(a: RunArgs) -> Result<()> {
    let data = required(a.data, "data")?;
    let queries_path = required(a.queries, "queries")?;
    let out = required(a.out, "out")?;
    let method: Method = parse(a.strategy.as_deref().unwrap_or("tiled"))?;
    let layout: LayoutKind = parse(a.layout.as_deref().unwrap_or("soa"))?;
    let precision: Precision = parse(a.precision.as_deref().unwrap_or("double"))?;
    let params = Params {
        p: a.p.unwrap_or(2.0),
        zero_eps: a.zero_eps.unwrap_or(0.0),
    };
    params.validate()?;
    let exec = ExecConfig {
        group_size: a.group_size.unwrap_or(1024),
        tile_size: a.tile_size.unwrap_or(1024),
        parallel_width: parallel_width()?,
        ..ExecConfig::default()
    };
    exec.validate()?;
    if method.uses_layout() {
        layout.check(precision)?;
    }
    show_config(
        "run",
        json!({
            "data": data, "queries": queries_path, "out": out,
            "strategy": method.to_string(), "layout": layout.name(), "precision": precision.name(),
            "p": params.p, "zero-eps": params.zero_eps, "exec": exec,
        }),
    );
    let records = idw_io::read_points(&data)?;
    let queries = idw_io::read_queries(&queries_path)?;
    let values = match method {
        Method::Seq => idw_predict_seq(&records, &queries, &params, precision)?,
        Method::Strategy(s) => {
            let store = LayoutStore::build(&records, layout, precision)?;
            strategies::run(s, &store, &queries, &params, &exec)?.values
        }
    };
    idw_io::write_file(&out, |w| idw_io::write_predictions_csv(&queries, &values, w))?;
    Ok(())
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let defaults = BenchSpec::default();
    let sizes = match a.sizes.as_deref() {
        Some(s) => s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| Ok(bench::parse_size(t.trim())?))
            .collect::<Result<Vec<_>>>()?,
        None => defaults.sizes.clone(),
    };
    let all_methods: Vec<Method> = Strategy::ALL.into_iter().map(Method::Strategy).collect();
    let spec = BenchSpec {
        sizes,
        layouts: parse_list(a.layouts.as_deref().unwrap_or("all"), &LayoutKind::ALL)?,
        methods: parse_list(a.strategies.as_deref().unwrap_or("all"), &all_methods)?,
        precisions: parse_list(a.precisions.as_deref().unwrap_or("all"), &Precision::ALL)?,
        p: a.p.unwrap_or(defaults.p),
        repeats: a.repeats.unwrap_or(defaults.repeats),
        warmup: a.warmup.unwrap_or(defaults.warmup),
        seed: a.seed.unwrap_or(defaults.seed),
        baseline: match a.baseline.as_deref() {
            Some(b) => parse::<Baseline>(b)?,
            None => defaults.baseline,
        },
        exec: ExecConfig {
            group_size: a.group_size.unwrap_or(defaults.exec.group_size),
            tile_size: a.tile_size.unwrap_or(defaults.exec.tile_size),
            parallel_width: parallel_width()?,
            ..defaults.exec
        },
    };
    spec.validate()?;
    show_config(
        "bench",
        json!({
            "sizes": spec.sizes,
            "layouts": spec.layouts.iter().map(|l| l.name()).collect::<Vec<_>>(),
            "strategies": spec.methods.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "precisions": spec.precisions.iter().map(|p| p.name()).collect::<Vec<_>>(),
            "p": spec.p, "repeats": spec.repeats, "warmup": spec.warmup, "seed": spec.seed,
            "baseline": spec.baseline.to_string(), "exec": spec.exec,
            "out": a.out, "report": a.report,
        }),
    );
    let records = bench::run_bench_with(&spec, |r| {
        let layout = r.layout.map_or("-", LayoutKind::name);
        match r.median {
            Some(m) => eprintln!("{} {} {} n={} median={m:.6}s", r.method, layout, r.precision, r.n),
            None => eprintln!("{} {} {} n={} n/a", r.method, layout, r.precision, r.n),
        }
    })?;
    match &a.out {
        Some(path) => bench::emit_report(&records, ReportFormat::Csv, path)?,
        None => emit(None, |w| bench::write_csv(&records, w))?,
    }
    if let Some(path) = &a.report {
        bench::emit_report(&records, ReportFormat::Markdown, path)?;
    }
    Ok(())
}

pub fn analyze(a: AnalyzeArgs) -> Result<()> {
    let layouts = parse_list(a.layout.as_deref().unwrap_or("all"), &LayoutKind::ALL)?;
    let precisions = parse_list(a.precision.as_deref().unwrap_or("all"), &Precision::ALL)?;
    let components: ComponentSet = a.components.as_deref().unwrap_or("xyz").parse()?;
    let mut rows = Vec::new();
    for &precision in &precisions {
        for &layout in &layouts {
            let mut pattern = AccessPattern::new(layout, precision, components);
            if let Some(w) = a.warp {
                pattern.warp_size = w;
            }
            if let Some(s) = a.segment {
                pattern.segment_bytes = s;
            }
            if let Some(b) = a.base_offset {
                pattern.base_offset = b;
            }
            match pattern.validate() {
                Ok(()) | Err(IdwError::RequiresDouble) => {}
                Err(e) => return Err(e.into()),
            }
            rows.push(scorecard_row(&pattern)?);
        }
    }
    if rows.iter().all(|r| r.report.is_none()) {
        return Err(IdwError::RequiresDouble.into());
    }
    show_config(
        "analyze",
        json!({
            "layouts": layouts.iter().map(|l| l.name()).collect::<Vec<_>>(),
            "precisions": precisions.iter().map(|p| p.name()).collect::<Vec<_>>(),
            "components": components.to_string(),
            "warp": rows[0].warp_size, "segment": rows[0].segment_bytes,
            "base-offset": a.base_offset.unwrap_or(0), "out": a.out,
        }),
    );
    emit(a.out.as_deref(), |w| write_scorecard_csv(&rows, w))
}

pub fn convert(a: ConvertArgs) -> Result<()> {
    let input = required(a.input, "in")?;
    let to: LayoutKind = parse(&required(a.to, "to")?)?;
    let out = required(a.out, "out")?;
    let from = a.from.as_deref().map(parse::<LayoutKind>).transpose()?;
    let precision = a.precision.as_deref().map(parse::<Precision>).transpose()?;
    let format = a.format.unwrap_or_else(|| {
        if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            FileFormat::Csv
        } else {
            FileFormat::Bin
        }
    });

    let source = if is_dump(&input)? {
        let store = read_dump_file(&input)?;
        if let Some(f) = from {
            if f != store.kind() {
                return Err(usage(format!(
                    "--from {f} but {} holds {}",
                    input.display(),
                    store.kind()
                )));
            }
        }
        store
    } else {
        let records = idw_io::read_points(&input)?;
        let kind = from.unwrap_or(LayoutKind::Soa);
        LayoutStore::build(&records, kind, precision.unwrap_or(Precision::Double))?
    };
    let precision = precision.unwrap_or(source.precision());
    to.check(precision)?;
    show_config(
        "convert",
        json!({
            "in": input, "from": source.kind().name(), "to": to.name(),
            "precision": precision.name(), "out": out, "format": format,
        }),
    );
    let target = if precision == source.precision() {
        source.convert(to)?
    } else {
        LayoutStore::build(&source.to_records(), to, precision)?
    };
    match format {
        FileFormat::Csv => idw_io::write_file(&out, |w| idw_io::write_points_csv(&target.to_records(), w))?,
        FileFormat::Bin => write_dump_file(&target, &out)?,
    }
    Ok(())
}
