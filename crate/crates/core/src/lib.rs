//! Numerical toolkit for exchangeable lifetime models.
//!
//! The crate covers one-dimensional survival functions and their ageing
//! classes (IFR/DFR, IFRA/DFRA, NBU/NWU), semi-copulas and Archimedean
//! families, the bivariate ageing function `B` of an exchangeable survival
//! model, generalized Kendall distributions of semi-copulas, and a harness
//! that checks the implications linking dependence, univariate ageing and
//! bivariate ageing on a registry of parametric models.
//!
//! Every inequality is certified on a finite grid and reported as a
//! three-valued [`Verdict`].

pub mod bivmodel;
pub mod error;
pub mod harness;
pub mod kendall;
pub mod numkit;
pub mod registry;
pub mod semicopula;
pub mod univariate;

pub use error::{Error, Result};
pub use numkit::{Tolerance, Verdict, VerdictStatus};
