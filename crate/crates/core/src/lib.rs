//! Exact arithmetic for the Artin-Hasse description of Serre weights.

pub mod cohomology;
pub mod error;
pub mod finite_field;
pub mod fixture;
pub mod hecke_match;
pub mod linalg;
pub mod local_field;
pub mod norm_group;
pub mod padic;
pub mod serre_combinatorics;

pub use cohomology::{basis_data, class_from_norm_subgroup, BasisData, ClassVector};
pub use error::{Error, Result};
pub use finite_field::{field_create, Embedding, Fq, FqConfig, FqElem};
pub use fixture::{run_fixture, Fixture, FixtureReport};
pub use hecke_match::{check_table, classify, ClassLabel, EigenRecord};
pub use local_field::{tower_create, tower_over, GaloisElem, LocalElem, TameTower, UnitDigits, UnitSpec};
pub use norm_group::{norm_subgroup, NormSubgroup, WildExtension};
pub use padic::{artin_hasse, teichmuller, witt_ring, TruncSeries, Witt, WittElem};
