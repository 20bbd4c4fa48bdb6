//! Qualitative analysis of planar linear first-order ODE systems through the
//! associated Riccati equation.
//!
//! The library classifies two-dimensional time-varying linear systems by
//! oscillation type, locates regular/normal/extremal Riccati solutions and
//! the boundary of the regular set, runs Leighton-type oscillation tests and
//! Lyapunov-stability criteria, checks non-conjugation through the polar
//! substitution, and verifies pointwise solution envelopes — all numerically,
//! with every theorem application gated by recorded sign certificates and
//! integral verdicts.

pub mod acceptance;
pub mod batch;
pub mod bounds;
pub mod corpus;
pub mod expr;
pub mod nonconj;
pub mod ode;
pub mod oscillation;
pub mod quad;
pub mod riccati;
pub mod systemreg;
pub(crate) mod util;

pub use expr::{CoeffExpr, SignCertificate, SignVerdict};
pub use ode::{
    solve_riccati, solve_riccati_complex, solve_system, BlowUpDirection, BlowUpReport, RiccatiSpec,
    SolveOptions, SystemSpec, Trajectory, ZeroItem,
};
pub use quad::{HorizonPolicy, IntegralVerdict, QuadOptions, Signal, VerdictKind};
