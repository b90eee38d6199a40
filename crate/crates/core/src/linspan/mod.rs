//! Linear algebra over infinite spanning sets given by generator schemas.

pub mod cert;
pub mod check;
pub mod echelon;
pub mod functional;
pub mod membership;
pub mod oracle;
pub mod schema;

pub use cert::CertificateJson;
pub use check::{check_verdict, SpaceView};
pub use echelon::{EchelonBasis, Insertion, RowRef};
pub use functional::{solve_periodic_functional, PeriodicFunctional};
pub use membership::{
    decide_membership, CertStep, MemberCert, MembershipVerdict, NonMemberWitness, Source, DEFAULT_CUTOFF,
};
pub use oracle::{schema_span_truncated, truncated_closure, truncated_closure_with, TruncatedClosure};
pub use schema::{ExpForm, GeneratorSchema, SchemaTerm};
