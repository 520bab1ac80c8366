//! Conjugacy-invariant word norms on finite and free groups.
//!
//! The crate builds norms on finite permutation groups (word norms over
//! conjugacy classes, quotient, restricted, rounded, weighted and chain
//! norms), bounds the bi-invariant word norm of free-group elements, checks
//! witnesses for metric approximation properties (metric weak soficity,
//! metric LEF, metric residual finiteness, LEF stability) and probes
//! profinite separation conditions in finite quotients.
//!
//! Norm values are generic over [`NormValue`]; everything constructed here
//! uses exact [`Rational`] or integer values.

pub mod error;
pub mod free_bounds;
pub mod group;
pub mod norms;
pub mod perm;
pub mod presentation;
pub mod probe;
pub mod quotient;
pub mod report;
pub mod scalar;
pub mod witness;
pub mod words;

pub use error::{Error, Result};
pub use free_bounds::{estimate_norm, lower_bound, upper_bound, Factorization, NormBound, SearchBudget};
pub use group::{CosetGroup, ElementId, ElementSet, FiniteGroup, DEFAULT_ORDER_CAP};
pub use norms::{validate_norm, NormKind, NormTable, ValueDomain};
pub use perm::Perm;
pub use presentation::{Presentation, RelatorFactor};
pub use probe::{
    ball_image, closure_product_check, lef_separation_check, quotient_search, separation_check_rf, ProbeProblem,
    SearchGoal, SearchOutcome, SeparationCertificate, SeparationVerdict,
};
pub use quotient::{kernel_contained, QuotientSpec};
pub use report::{Verdict, Violation, WitnessReport};
pub use scalar::{NormValue, Rational};
pub use witness::{
    build_lef_witness, check_almost_hom, check_lef_witness, check_metric_hom, check_mws_witness, stability_extend,
    FreeSource, LefOptions, MwsMode, PartialMap, ThresholdSet,
};
pub use words::{AbelianVector, ReducedWord, SymmetricWordSet};

/// Norm table with exact rational values.
pub type RationalNormTable = NormTable<Rational>;
/// Integer-valued norm table (word norms, rounded norms).
pub type IntNormTable = NormTable<i64>;
/// Floating-point norm table for externally supplied data; comparisons are inexact.
pub type FloatNormTable = NormTable<f64>;
