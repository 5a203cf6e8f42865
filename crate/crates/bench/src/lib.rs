//! Benchmark-only crate; the targets live in `benches/`. Run them with
//! `cargo bench -p spinlab-bench`.
