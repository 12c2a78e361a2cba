//! Numerics for the tangent family `T_t(z) = i t tan z`, `0 < t <= pi`.
//!
//! The crate follows the real trace of the second iterate
//! `f_t(x) = -t tanh(t tan x)` through its cycle-doubling and cycle-merging
//! cascade: locating the bifurcation parameters, certifying transversality
//! of the merging condition, building the renormalization tower, and
//! constructing the binary interval systems that converge to the Cantor
//! attractor at the end of the cascade.
//!
//! Start with [`tanmap::MapParams`] for pointwise evaluation, then
//! [`cascade::cascade_table`] for the bifurcation parameters.
//!
//! ```
//! use tanfam::cascade::cascade_table;
//!
//! let table = cascade_table(3).unwrap();
//! // the first merging parameter sits near 2.94
//! assert!((table.betas[0].t - 2.9418).abs() < 1e-3);
//! // doubling and merging parameters strictly interleave
//! assert!(table.alphas[0].t < table.betas[0].t);
//! assert!(table.betas[0].t < table.alphas[1].t);
//! ```

pub mod attractor;
pub mod cascade;
pub mod cli;
pub mod error;
pub mod render;
pub mod renorm;
pub mod sided;
pub mod cycles;
pub mod tanmap;
pub mod transversal;

pub use error::{Result, TanError};
