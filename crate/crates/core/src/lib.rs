//! Hilbert transforms on the real line by multi-domain Chebyshev spectral
//! methods, with a global rational (Weideman) method, reference solutions,
//! contour-deformation checks and a Benjamin–Ono soliton solver.

mod error;

pub mod bench;
pub mod contour;
pub mod domain;
pub mod global;
pub mod hilbert;
pub mod reference;
pub mod soliton;
pub mod spectral;

pub use error::{Error, Result};
