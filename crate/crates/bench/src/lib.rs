//! Criterion benchmarks for the solver live in `benches/`; this library
//! target is intentionally empty.
