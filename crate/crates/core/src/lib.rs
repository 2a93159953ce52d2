//! Interactive observables for process tomography of unitary and
//! low-Kraus-rank quantum channels.
//!
//! ```
//! use unitom::channel::KrausChannel;
//! use unitom::linalg::haar_unitary;
//! use unitom::observables::{build_observable_set, Question};
//! use unitom::subspaces::BuildOptions;
//! use unitom::tomography::{measure_exact, reconstruct_unitary, unitary_fidelity, ReconstructOptions};
//!
//! # fn main() -> unitom::Result<()> {
//! let set = build_observable_set(3, 1, Question::AmongRankQ, 7, BuildOptions::default())?;
//! assert_eq!(set.len(), 26);
//! let u = haar_unitary(3, 42);
//! let target = measure_exact(&set, &KrausChannel::unitary(u.clone())?)?;
//! let opts = ReconstructOptions { restarts: 40, ..Default::default() };
//! let fit = reconstruct_unitary(&set, &target, opts, 1)?;
//! assert!(unitary_fidelity(&u, &fit.unitary)? > 1.0 - 1e-6);
//! # Ok(())
//! # }
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod subspaces;
pub mod tns;
pub mod tomography;

pub use error::{Error, Result};
