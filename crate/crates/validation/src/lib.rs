//! Acceptance suite for `greatroot`; see `tests/acceptance.rs`.
//!
//! It lives in its own package so it runs after the unit and integration
//! tests of the other crates.
