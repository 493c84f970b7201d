//! Pseudo-spectral Euler–Yang-Mills equations of a charged ideal fluid on
//! flat tori, with the supporting Lie-algebra, gauge and Hodge machinery and
//! a numerical check of the bundle integration formula on the Hopf fibration.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod fft;
pub mod geometry;
pub mod hodge;
pub mod hopf;
pub mod lie_algebra;
pub mod run;
pub mod snapshot;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
