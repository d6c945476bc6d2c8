//! Spectral stability of discontinuous roll waves of the inviscid
//! Saint-Venant equations.

// Guards are written `!(x > a)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evans;
pub mod highfreq;
pub mod lowfreq;
pub mod modulation;
pub mod profile;
pub mod quadrature;
pub mod rk;
pub mod scaled;
pub mod series;
pub mod singular_ode;
pub mod spectrum;

pub use error::{Error, Rejection, Result};
pub use profile::{Wave, WaveParameters, WaveQuantities};
