//! Criterion benchmarks for `svhe-core`; see `benches/analysis.rs`.
//!
//! Run with `cargo bench -p svhe-bench`.
