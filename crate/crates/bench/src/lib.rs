//! Shared parameter sets for the benchmarks.

/// (q, n, z) triples of increasing size.
pub const ALGEBRAS: [(u64, u64, u64); 4] = [(3, 12, 70), (9, 15, 5551), (2, 12, 4095), (5, 10, 295_928)];
