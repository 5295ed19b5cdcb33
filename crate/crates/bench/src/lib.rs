//! Shared inputs for the kernel benchmarks.

use std::path::PathBuf;

use serre_ah::fixture::{fixture_dir, Fixture};

/// Repository fixtures, or `$SERRE_AH_FIXTURES` when set.
pub fn fixtures() -> PathBuf {
    fixture_dir(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"))
}

pub fn load(name: &str) -> Fixture {
    Fixture::load(&fixtures().join(format!("{name}.json"))).expect("fixture")
}
