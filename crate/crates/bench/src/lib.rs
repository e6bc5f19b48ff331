//! Benchmark harness crate; see `benches/extensions.rs`.
