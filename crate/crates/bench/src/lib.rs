//! Criterion benchmarks for uaa-core live under `benches/`; this library target is empty.
