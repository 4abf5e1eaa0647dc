//! Criterion benches for the numeric kernels; see `benches/`.
