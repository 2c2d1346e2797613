//! End-to-end acceptance checks for `fbdiff`; see `tests/acceptance.rs`.
//!
//! Run with `cargo test -p fbdiff-validation -- --nocapture` to see the
//! per-criterion report (it is written to stderr either way).
