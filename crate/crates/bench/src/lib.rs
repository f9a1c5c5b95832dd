//! Criterion benchmarks for extremal-core; see `benches/`.
