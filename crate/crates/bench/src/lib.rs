//! Criterion benchmarks for `qdecide-core`; see `benches/`.
