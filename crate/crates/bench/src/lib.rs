//! Criterion benchmarks for `mlradon-core`; see `benches/`.
