//! Criterion benchmarks for the dressed-core kernels; see `benches/`.
