//! Library half of the `qsigma` command line tool: the canonical experiment
//! suites behind `qsigma reproduce`, and thread-pool plumbing shared with the
//! binary. Kept as a library so integration tests can drive the suites
//! directly and assert on their checks.

pub mod pool;
pub mod reproduce;
