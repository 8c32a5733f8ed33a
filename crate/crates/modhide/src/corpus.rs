//! Demo programs bundled into the binary for benchmarks and quick trials.

/// Leap-year lister with deliberately packed statements.
pub const LEAPYEARS: &str = include_str!("../corpus/leapyears.java");

/// Benchmark workload: seeded random array reads and writes over 100000
/// elements, printing a checksum so differential runs can compare bytes.
pub const SEARCH_RANDOM: &str = include_str!("../corpus/search_random.java");
