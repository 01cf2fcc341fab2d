//! Multi-attributed community (MAC) search over road-social networks.
//!
//! Given a social graph whose users sit on a weighted road network and carry
//! `d` numeric attributes, a query `(Q, k, t, R)` asks for the connected
//! `k`-cores around the query users `Q` (within road distance `t`) that rank
//! best under every weight vector in the convex preference region `R`.
//! The answer is a partition of `R` into cells, each labelled with the
//! non-contained MAC or the top-`j` MACs valid anywhere inside the cell.
//!
//! Two engines are provided: [`global::gs_search`], which refines an
//! arrangement of score hyperplanes while peeling the maximal `(k,t)`-core,
//! and [`local::ls_search`], which expands candidates around `Q` and verifies
//! them against the r-dominance graph. [`oracle`] holds brute-force
//! references used by the test suites.

pub mod cli;
pub mod dominance;
pub mod error;
pub mod geometry;
pub mod global;
pub mod ktcore;
pub mod local;
pub mod network;
pub mod oracle;
pub mod query;
pub mod result;

pub use error::{Error, Result};
