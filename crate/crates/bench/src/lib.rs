//! Criterion benchmarks for `maltsev-core`; see `benches/`.
