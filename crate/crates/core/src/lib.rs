//! Open subgroups of GL(2, Z-hat) at finite level, their modular curves, and the
//! elliptic-curve arithmetic used to decide which product groups are curious.

pub mod arith;
pub mod classify;
pub mod covers;
pub mod curve;
pub mod invariants;
pub mod mat2;
pub mod registry;
pub mod subgroup;

pub use classify::{Candidate, ClassifyError, ClassifyReport, CuriosityVerdict, Status};
pub use curve::{EllipticCurve, Point};
pub use invariants::{CurveInvariants, Label, LabelReport};
pub use mat2::{Gl2Error, Mat2};
pub use registry::{load_registries, Registries, RegistryError};
pub use subgroup::{GroupError, Subgroup, DEFAULT_CAP};
