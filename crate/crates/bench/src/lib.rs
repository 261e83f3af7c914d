//! Criterion benchmarks for the tuner live in `benches/`.
