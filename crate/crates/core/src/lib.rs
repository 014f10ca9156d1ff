//! Exact finite models of partial dynamical systems and the groupoids they
//! generate.
//!
//! Everything here works on finite data: finite discrete spaces acted on by
//! finite groups, free groups and the integers, finite groupoids given by
//! composition tables, and boundary path spaces of finite graphs represented
//! through their eventually periodic points.

pub mod booldyn;
pub mod category;
pub mod error;
pub mod format;
pub mod groupoid;
pub mod groups;
pub mod model;
pub mod pds;
pub mod recognition;
pub mod shift;

pub use error::{Error, Result};
