//! Criterion benchmarks for the verifiers; see `benches/verifiers.rs`.
