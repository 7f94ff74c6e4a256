//! Acceptance criteria for the iddmp toolkit, run by `tests/acceptance.rs`.
//!
//! `cargo test -p iddmp-validation` prints one `PASS` or `FAIL` line per
//! criterion and exits non-zero when any criterion fails.
