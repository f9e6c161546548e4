//! Criterion benchmarks for the polymeasure workbench; see `benches/`.
