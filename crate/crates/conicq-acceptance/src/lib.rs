//! Acceptance checks for `conicq` live in `tests/acceptance.rs`.
