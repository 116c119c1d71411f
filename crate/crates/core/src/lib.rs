//! Exact eta-invariant and Cheeger-deformation toolkit for Brieskorn-sphere
//! quotients.
//!
//! The crate has four pillars:
//!
//! * [`brieskorn`] — the Brieskorn polynomial, its links and bounding
//!   varieties, the group actions and their fixed-point/isotropy data;
//! * [`eta`] — local fixed-point contributions in exact cyclotomic
//!   arithmetic and the assembly of equivariant, covering and relative
//!   eta-invariants;
//! * [`cheeger`] — pointwise numerical evaluation of Cheeger deformations:
//!   orbit splittings, the operators `P` and `C_t`, curvature lower bounds
//!   and the `t0` search over sampled compacta;
//! * [`classify`] — diffeomorphism-classification arithmetic, plumbing
//!   combinatorics and moduli-space path-component lower bounds.
//!
//! All invariant values are exact rationals; numerical geometry takes
//! explicit tolerances.

pub mod brieskorn;
pub mod cheeger;
pub mod classify;
pub mod cyclotomic;
pub mod error;
pub mod eta;
pub mod gaussian;
pub mod rational;

pub use brieskorn::{BrieskornData, GroupElementAction, IsotropyClass, Point, TauFixedPoint};
pub use cheeger::{ActionChart, DeformedMetric, LieAlgebraData, OrbitSplitting, T0Config};
pub use classify::{ClassReport, DiffeoVerdict, KervaireType, PlumbingGraph};
pub use cyclotomic::Cyclotomic;
pub use error::{Error, Result};
pub use eta::{CharacterTable, EtaDerivation, EtaValue, FixedPointSet, RotationData};
pub use gaussian::GaussianRational;
