//! Verification engines for the identities, inequalities and sweeps.

pub mod cartesian;
pub mod ckn;
pub mod cp;
pub mod exponents;
pub mod gradient;
pub mod identity;
pub mod inequality;
pub mod record;
pub mod sweep;

pub use cartesian::{heisenberg_collapse_residual, heisenberg_spot_check, homogeneous_cartesian_check, SpotCheck};
pub use ckn::{verify_ckn, verify_higher_ckn, verify_uncertainty, UncertaintyKind};
pub use cp::{cp_functional, cp_sample, CpArguments, CpSampleReport};
pub use exponents::ExponentTuple;
pub use gradient::{gradient_integral, GradientKind};
pub use identity::{
    consistency_triangle, higher_order_terms, identity_terms, verify_higher_order_identity, verify_identity,
    HigherOrderTerms, IdentityTerms,
};
pub use inequality::{verify_inequality, InequalityKind};
pub use record::{QuadDiagnostics, RecordKind, Verdict, VerificationRecord};
pub use sweep::{log_power_quotient, sharpness_sweep, SweepReport, SweepRow, SweepStatement};
