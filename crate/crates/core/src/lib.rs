//! Steering criteria for continuous-variable and two-qubit states.
//!
//! Quadratures are dimensionless with vacuum variance `1/2`. Bob is the
//! steered party; Alice's outcomes are used to infer his.

pub mod criteria;
pub mod discrete;
pub mod entropy;
pub mod error;
pub mod lhs_oracle;
pub mod moments;
pub mod phase_space;
pub mod quadrature;
pub mod special_fn;

pub use criteria::{
    evaluate, ratio_table, sweep, Criterion, CvConfig, CvEvaluator, Family, StateDescriptor, SteeringVerdict,
    SumBound, SweepRow, TableKind, TableRow, VerdictSource,
};
pub use discrete::{SpinObservable, TwoQubitState};
pub use entropy::{ConditionalPair, EntropyReport};
pub use error::{Error, Result};
pub use lhs_oracle::{certify_no_violation, CertificationReport, LhsDomain, LhsModel};
pub use moments::{Evaluation, MomentCache, MomentTable, QuadratureSetting};
pub use phase_space::{Axis, CvState, PhaseSpacePoint};
pub use quadrature::{DensityGrid, GridSpec, IntegrationBox};
pub use special_fn::PolyDegree;
