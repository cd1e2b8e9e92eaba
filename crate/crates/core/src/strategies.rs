// SPDX-License-Identifier: Apache-2.0

//! Parallel execution strategies over a [`LayoutStore`].
//!
//! All four compute the same predictions as
//! [`idw_predict_seq`](crate::model::idw_predict_seq); they differ in how
//! queries and samples are distributed over workers and in how partial sums
//! are combined:
//!
//! * `Naive`: one task per query, each scanning every sample.
//! * `Tiled`: queries in groups of `group_size`; samples staged tile by tile
//!   into a group-local scratch buffer that the whole group reads from.
//! * `NestedOriginal`: per query, samples split into inner groups of
//!   `group_size`, each tree-reduced and then merged into one shared,
//!   mutex-guarded accumulator.
//! * `NestedImproved`: per query, a single group of `group_size` workers,
//!   worker `t` handling samples `t, t + G, t + 2G, ...`, followed by one
//!   tree reduction. No shared accumulator exists.

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{IdwError, Result};
use crate::exec;
use crate::layout::{AccessStats, LayoutStore, PointSource, SourceVisitor};
use crate::model::{squared_distance, validate_queries, Accumulator, Kernel, Params, QueryPoint};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    Naive,
    Tiled,
    NestedOriginal,
    NestedImproved,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Naive,
        Strategy::Tiled,
        Strategy::NestedOriginal,
        Strategy::NestedImproved,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::Tiled => "tiled",
            Strategy::NestedOriginal => "nested-original",
            Strategy::NestedImproved => "nested-improved",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = IdwError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "naive" => Ok(Strategy::Naive),
            "tiled" => Ok(Strategy::Tiled),
            "nested-original" | "original" | "cdp-original" => Ok(Strategy::NestedOriginal),
            "nested-improved" | "improved" | "cdp-improved" => Ok(Strategy::NestedImproved),
            other => Err(IdwError::InvalidConfig(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecConfig {
    /// Workers per group (the thread-block size).
    pub group_size: usize,
    /// Samples per tile for [`Strategy::Tiled`].
    pub tile_size: usize,
    /// OS threads used for a run.
    pub parallel_width: usize,
    /// Fix every reduction and merge order so results are bit-reproducible
    /// across runs and widths.
    pub deterministic_reduction: bool,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            group_size: 1024,
            tile_size: 1024,
            parallel_width: exec::available_width(),
            deterministic_reduction: true,
        }
    }
}

impl ExecConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("group_size", self.group_size),
            ("tile_size", self.tile_size),
            ("parallel_width", self.parallel_width),
        ] {
            if v == 0 {
                return Err(IdwError::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Instrumentation gathered during one strategy run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunStats {
    /// Element reads issued against the store by this run.
    pub reads: AccessStats,
    /// Tile loads into group-local scratch.
    pub tiles_loaded: u64,
    /// Inner worker groups launched by the nested strategies.
    pub inner_groups: u64,
    /// Merges into a shared per-query accumulator.
    pub shared_merges: u64,
    /// Smallest and largest per-worker loop trip count of
    /// [`Strategy::NestedImproved`].
    pub worker_trips: Option<(u64, u64)>,
    /// Weight evaluations plus coincidence checks, one per (query, sample).
    pub points_processed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyRun {
    pub values: Vec<f64>,
    pub stats: RunStats,
}

/// Per-block tallies, summed after the run.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    point_reads: u64,
    tiles: u64,
    groups: u64,
    merges: u64,
    points: u64,
    trips: Option<(u64, u64)>,
}

impl Tally {
    fn add(mut self, o: Tally) -> Tally {
        self.point_reads += o.point_reads;
        self.tiles += o.tiles;
        self.groups += o.groups;
        self.merges += o.merges;
        self.points += o.points;
        self.trips = match (self.trips, o.trips) {
            (Some(a), Some(b)) => Some((a.0.min(b.0), a.1.max(b.1))),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Fixed-shape pairwise reduction: adjacent pairs are merged level by
/// level, an odd trailing element is carried up unchanged. The shape
/// depends only on the number of partials.
pub fn reduce_tree<T: Real>(partials: &[Accumulator<T>]) -> Result<Accumulator<T>> {
    if partials.is_empty() {
        return Err(IdwError::EmptyReduction);
    }
    let mut work = partials.to_vec();
    Ok(reduce_tree_in_place(&mut work))
}

fn reduce_tree_in_place<T: Real>(work: &mut [Accumulator<T>]) -> Accumulator<T> {
    let mut len = work.len();
    debug_assert!(len > 0);
    while len > 1 {
        let half = len / 2;
        for k in 0..half {
            work[k] = work[2 * k].merge(work[2 * k + 1]);
        }
        if len % 2 == 1 {
            work[half] = work[len - 1];
        }
        len = len.div_ceil(2);
    }
    work[0]
}

fn reduce_unordered<T: Real>(work: &mut [Accumulator<T>], parallel: bool) -> Accumulator<T> {
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return work
            .par_iter()
            .copied()
            .reduce(|| Accumulator::EMPTY, Accumulator::merge);
    }
    let _ = parallel;
    reduce_tree_in_place(work)
}

pub fn run_naive(
    store: &LayoutStore,
    queries: &[QueryPoint],
    params: &Params,
    cfg: &ExecConfig,
) -> Result<StrategyRun> {
    run(Strategy::Naive, store, queries, params, cfg)
}

pub fn run_tiled(
    store: &LayoutStore,
    queries: &[QueryPoint],
    params: &Params,
    cfg: &ExecConfig,
) -> Result<StrategyRun> {
    run(Strategy::Tiled, store, queries, params, cfg)
}

pub fn run_nested_original(
    store: &LayoutStore,
    queries: &[QueryPoint],
    params: &Params,
    cfg: &ExecConfig,
) -> Result<StrategyRun> {
    run(Strategy::NestedOriginal, store, queries, params, cfg)
}

pub fn run_nested_improved(
    store: &LayoutStore,
    queries: &[QueryPoint],
    params: &Params,
    cfg: &ExecConfig,
) -> Result<StrategyRun> {
    run(Strategy::NestedImproved, store, queries, params, cfg)
}

/// Runs `strategy` and returns predictions in query order, widened to `f64`.
pub fn run(
    strategy: Strategy,
    store: &LayoutStore,
    queries: &[QueryPoint],
    params: &Params,
    cfg: &ExecConfig,
) -> Result<StrategyRun> {
    params.validate()?;
    cfg.validate()?;
    validate_queries(queries)?;
    if store.is_empty() {
        return Err(IdwError::NoData);
    }
    let (values, tally) = store.visit(Runner {
        strategy,
        queries,
        params,
        cfg,
    });
    let r = tally.point_reads;
    store.record_reads(r, r, r);
    let stats = RunStats {
        reads: AccessStats {
            reads_x: r,
            reads_y: r,
            reads_z: r,
            bytes_touched: 3 * r * store.precision().element_bytes() as u64,
        },
        tiles_loaded: tally.tiles,
        inner_groups: tally.groups,
        shared_merges: tally.merges,
        worker_trips: tally.trips,
        points_processed: tally.points,
    };
    Ok(StrategyRun { values, stats })
}

struct Runner<'a> {
    strategy: Strategy,
    queries: &'a [QueryPoint],
    params: &'a Params,
    cfg: &'a ExecConfig,
}

impl SourceVisitor for Runner<'_> {
    type Output = (Vec<f64>, Tally);

    fn visit<T: Real, S: PointSource<T>>(self, src: &S) -> Self::Output {
        let kernel = self.params.kernel::<T>();
        let queries: Vec<[T; 2]> = self
            .queries
            .iter()
            .map(|q| [T::from_f64(q.x), T::from_f64(q.y)])
            .collect();
        let mut out = vec![0.0; queries.len()];
        if queries.is_empty() {
            return (out, Tally::default());
        }
        let cfg = self.cfg;
        let width = cfg.parallel_width;
        let m = queries.len();
        let tallies = match self.strategy {
            Strategy::Naive => exec::map_blocks(&mut out, m.div_ceil(width), width, |first, block| {
                naive_block(src, &queries[first..first + block.len()], &kernel, block)
            }),
            Strategy::Tiled => {
                let g = cfg.group_size;
                let block = m.div_ceil(g).div_ceil(width) * g;
                exec::map_blocks(&mut out, block, width, |first, block| {
                    let qs = &queries[first..first + block.len()];
                    qs.chunks(g)
                        .zip(block.chunks_mut(g))
                        .map(|(gq, go)| tiled_group(src, gq, &kernel, cfg.tile_size, go))
                        .fold(Tally::default(), Tally::add)
                })
            }
            Strategy::NestedOriginal => exec::map_blocks(&mut out, m.div_ceil(width), width, |first, block| {
                let qs = &queries[first..first + block.len()];
                qs.iter()
                    .zip(block.iter_mut())
                    .map(|(q, o)| nested_original(src, *q, &kernel, cfg, o))
                    .fold(Tally::default(), Tally::add)
            }),
            Strategy::NestedImproved => exec::map_blocks(&mut out, m.div_ceil(width), width, |first, block| {
                let qs = &queries[first..first + block.len()];
                let mut workers = vec![Accumulator::EMPTY; cfg.group_size];
                let mut trips = vec![0u64; cfg.group_size];
                qs.iter()
                    .zip(block.iter_mut())
                    .map(|(q, o)| nested_improved(src, *q, &kernel, cfg, &mut workers, &mut trips, o))
                    .fold(Tally::default(), Tally::add)
            }),
        };
        let tally = tallies.into_iter().fold(Tally::default(), Tally::add);
        (out, tally)
    }
}

fn naive_block<T: Real, S: PointSource<T>>(src: &S, queries: &[[T; 2]], kernel: &Kernel<T>, out: &mut [f64]) -> Tally {
    let n = src.len();
    for (q, o) in queries.iter().zip(out.iter_mut()) {
        let mut acc = Accumulator::EMPTY;
        for i in 0..n {
            let [x, y, z] = src.point(i);
            acc.push(i, squared_distance(q[0], q[1], x, y), z, kernel);
        }
        *o = acc.finish().to_f64();
    }
    let work = (queries.len() * n) as u64;
    Tally {
        point_reads: work,
        points: work,
        ..Tally::default()
    }
}

/// One group of queries sharing tile loads.
fn tiled_group<T: Real, S: PointSource<T>>(
    src: &S,
    queries: &[[T; 2]],
    kernel: &Kernel<T>,
    tile_size: usize,
    out: &mut [f64],
) -> Tally {
    let n = src.len();
    let mut accs = vec![Accumulator::EMPTY; queries.len()];
    let mut scratch: Vec<S::Record> = Vec::with_capacity(tile_size.min(n));
    let mut tally = Tally::default();
    let mut start = 0;
    while start < n {
        let end = (start + tile_size).min(n);
        scratch.clear();
        scratch.extend((start..end).map(|i| src.record(i)));
        tally.tiles += 1;
        tally.point_reads += (end - start) as u64;
        for (q, acc) in queries.iter().zip(accs.iter_mut()) {
            for (k, rec) in scratch.iter().enumerate() {
                let [x, y, z] = S::unpack(rec);
                acc.push(start + k, squared_distance(q[0], q[1], x, y), z, kernel);
            }
        }
        start = end;
    }
    for (acc, o) in accs.iter().zip(out.iter_mut()) {
        *o = acc.finish().to_f64();
    }
    tally.points = (queries.len() * n) as u64;
    tally
}

fn nested_original<T: Real, S: PointSource<T>>(
    src: &S,
    q: [T; 2],
    kernel: &Kernel<T>,
    cfg: &ExecConfig,
    out: &mut f64,
) -> Tally {
    let n = src.len();
    let g = cfg.group_size;
    let groups = n.div_ceil(g);
    let parallel = exec::is_parallel(cfg.parallel_width);

    // One inner group: each worker evaluates one sample, then the group
    // tree-reduces its partials.
    let group_partial = |grp: usize| {
        let start = grp * g;
        let end = (start + g).min(n);
        let mut partials: Vec<Accumulator<T>> = (start..end)
            .map(|i| {
                let [x, y, z] = src.point(i);
                let mut a = Accumulator::EMPTY;
                a.push(i, squared_distance(q[0], q[1], x, y), z, kernel);
                a
            })
            .collect();
        reduce_tree_in_place(&mut partials)
    };

    let shared = Mutex::new(Accumulator::EMPTY);
    let merge = |partial: Accumulator<T>| {
        let mut acc = shared.lock().unwrap_or_else(|e| e.into_inner());
        *acc = acc.merge(partial);
    };
    if cfg.deterministic_reduction {
        // Partials may be computed concurrently, but they reach the shared
        // accumulator in group order.
        for partial in exec::map_indices(groups, parallel, group_partial) {
            merge(partial);
        }
    } else {
        exec::for_each_index(groups, parallel, |grp| merge(group_partial(grp)));
    }
    *out = shared.into_inner().unwrap_or_else(|e| e.into_inner()).finish().to_f64();
    Tally {
        point_reads: n as u64,
        groups: groups as u64,
        merges: groups as u64,
        points: n as u64,
        ..Tally::default()
    }
}

/// Lockstep emulation of one group of `G` workers: on trip `k` worker `t`
/// handles sample `k * G + t` when it exists. Worker `t` therefore sees
/// samples `t, t + G, t + 2G, ...` in increasing order.
fn nested_improved<T: Real, S: PointSource<T>>(
    src: &S,
    q: [T; 2],
    kernel: &Kernel<T>,
    cfg: &ExecConfig,
    workers: &mut [Accumulator<T>],
    trips: &mut [u64],
    out: &mut f64,
) -> Tally {
    let n = src.len();
    let g = workers.len();
    workers.fill(Accumulator::EMPTY);
    trips.fill(0);
    let rounds = n.div_ceil(g);
    for k in 0..rounds {
        let base = k * g;
        for (t, (acc, trip)) in workers.iter_mut().zip(trips.iter_mut()).enumerate() {
            *trip += 1;
            let i = base + t;
            if i < n {
                let [x, y, z] = src.point(i);
                acc.push(i, squared_distance(q[0], q[1], x, y), z, kernel);
            }
        }
    }
    let total = if cfg.deterministic_reduction {
        reduce_tree_in_place(workers)
    } else {
        reduce_unordered(workers, exec::is_parallel(cfg.parallel_width))
    };
    *out = total.finish().to_f64();
    let lo = trips.iter().copied().min().unwrap_or(0);
    let hi = trips.iter().copied().max().unwrap_or(0);
    Tally {
        point_reads: n as u64,
        groups: 1,
        points: n as u64,
        trips: Some((lo, hi)),
        ..Tally::default()
    }
}
