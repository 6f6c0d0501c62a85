//! Rank-two cluster algebras `A(b, c)`, computed two ways.
//!
//! [`rank2`] iterates the exchange recurrence on exact Laurent polynomials.
//! [`ccmap`] rebuilds the same cluster variables from representations of the
//! generalized Kronecker quiver `K_{b,c}` through the Caldero-Chapoton map and
//! the folding `u_{v_i} ↦ x1`, `u_{w_j} ↦ x2`. Each route checks the other.

pub mod ccmap;
pub mod cli;
pub mod error;
pub mod laurent;
pub mod quiver;

pub use error::{Error, Result};
pub use laurent::{ExponentVector, LaurentPolynomial, MonomialMap, Permutation, VariableContext};
pub mod rank2;
pub mod report;

pub use quiver::{kronecker_quiver, DimensionVector, Direction, ModuleSpec, Quiver};
pub use rank2::{ClusterAlgebra, ExchangeType, SweepChecks};
pub use report::{CheckReport, Status};
