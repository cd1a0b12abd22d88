pub mod amalgam;
pub mod carrier;
pub mod catalog;
pub mod error;
pub mod finperm;
pub mod json;
pub mod nearaction;
pub mod nearmap;
pub mod qcyclic;
pub mod z2class;

pub use error::{Error, ErrorKind, Result};
