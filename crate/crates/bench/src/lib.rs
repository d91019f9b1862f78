//! Criterion benchmarks for `ternrec-core`; see `benches/`.
