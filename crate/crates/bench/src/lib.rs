//! Benchmarks for `hilmod-core`; run with `cargo bench -p hilmod-bench`.
