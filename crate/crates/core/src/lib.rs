//! Product-set growth in solvable subgroups of `GL_r(F_q)`.
//!
//! The crate works at desk scale: every group is enumerated explicitly and
//! every claim it returns is backed by a certificate that can be rechecked
//! by brute force.

pub mod descent;
pub mod dichotomy;
pub mod error;
pub mod families;
pub mod field;
pub mod group;
pub mod io;
pub mod matrix;
pub mod pivoting;
pub mod rng;
pub mod set;
pub mod setcalc;
pub mod torus_roots;
pub mod unipotent;

pub use descent::{capture_ur, Capture, CaptureReport, DescentConfig, DescentError, DescentInstance};
pub use dichotomy::{
    abelian_trichotomy, run_dichotomy, schur_zassenhaus_split, structure_certificate, upgrade_normal_ur,
    verify_certificate, Certificate, CertificateKind, DichotomyConfig, DichotomyError, Verdict,
};
pub use error::AlgebraError;
pub use field::{FieldCtx, FieldElement, FieldSpec};
pub use group::{
    centralizer, commutator_subgroup, derived_series, group_closure, is_nilpotent, is_solvable,
    lower_central_series, normal_closure, quotient_group, Group, QuotientGroup,
};
pub use matrix::{GroupElement, Matrix};
pub use pivoting::{run_pivot, ActionCtx, Automorphism, Branch, PivotCase, PivotError, PivotOutcome};
pub use rng::SplitMix64;
pub use set::{ElementSet, DEFAULT_CAP};
pub use setcalc::{product_set, Ratio, SetCalcError, WordLengths};
pub use torus_roots::{standard_form, weight_decompose, RootDatum, RootError, WeightSubgroup};
pub use unipotent::{algebra_from_group, exp, log, LieError, NilpotentAlgebra, NilpotentElement};
