//! Benchmark-only crate; the targets live in `benches/benchmarks.rs`.
//!
//! Run with `cargo bench -p pingpong-qkd-bench`.
