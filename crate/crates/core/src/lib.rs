//! Finite metric spaces as continuous-logic structures.
//!
//! The crate evaluates continuous-logic sentences exactly on finite metric
//! spaces of diameter at most 1, samples the metric polytope `M_n` and its
//! concentrated part `D_n`, decides ε-Ehrenfeucht–Fraïssé games between finite
//! spaces, builds finite spaces that satisfy families of extension axioms, and
//! runs seeded Monte Carlo experiments that compare empirical frequencies of
//! those axioms against explicit probability bounds.
//!
//! ```
//! use metric_zero_one::logic::{build_phi_geq_half, eval};
//! use metric_zero_one::metric_core::FiniteMetricSpace;
//!
//! let space = FiniteMetricSpace::from_matrix(&[vec![0.0, 0.3], vec![0.3, 0.0]]).unwrap();
//! let value = eval(&build_phi_geq_half(), &space, &[]).unwrap();
//! assert_eq!(value, 0.2);
//! ```

pub mod analysis;
pub mod cli;
pub mod efgame;
pub mod error;
pub mod logic;
pub mod metric_core;
pub mod model_builder;
pub mod sampling;
pub mod space_io;

pub use error::{Error, Result};
