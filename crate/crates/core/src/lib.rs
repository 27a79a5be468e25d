#![no_std]
extern crate alloc;

mod error;
pub mod field;
pub mod alcove;
pub mod cofiltered;
pub mod endo;
pub mod fixtures;
pub mod graded;
pub mod graph;
pub mod kl;
pub mod linalg;
pub mod order;
pub mod sheaf;
pub mod verify;

pub use error::Error;
pub use field::{Field, FieldSpec, PrimeField, Rationals};
