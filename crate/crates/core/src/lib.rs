#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod abelian;
pub mod cohomology;
pub mod error;
pub mod goldman;
pub mod lie;
pub mod linalg;
pub mod rep;
pub mod simplicial;
pub mod surface_group;
pub mod tol;

pub use error::{Error, Result};
