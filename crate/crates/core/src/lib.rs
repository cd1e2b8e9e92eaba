// SPDX-License-Identifier: Apache-2.0

//! Inverse distance weighting over point clouds stored in five memory
//! layouts (SoA, AoS, AoaS, SoAoS, Hybrid), evaluated by four parallel
//! strategies, plus an analytic model of coalesced memory transactions and a
//! benchmark harness that compares them.

pub mod bench;
pub mod error;
mod exec;
pub mod io;
pub mod layout;
pub mod model;
pub mod real;
pub mod strategies;
pub mod tolerance;
pub mod txn;

pub use error::{IdwError, Result};
pub use exec::available_width;
pub use layout::{AccessStats, Component, ComponentSet, LayoutKind, LayoutStore, Shape};
pub use model::{idw_predict_seq, squared_distance, weight, Accumulator, Params, PointRecord, Power, QueryPoint};
pub use real::{Precision, Real};
pub use strategies::{
    reduce_tree, run, run_naive, run_nested_improved, run_nested_original, run_tiled, ExecConfig, RunStats, Strategy,
    StrategyRun,
};
pub use txn::{count_transactions, layout_scorecard, AccessPattern, ScorecardRow, TransactionReport};
