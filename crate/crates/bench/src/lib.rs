//! Benchmarks for the `qdalg` engine live in `benches/`.
