//! Exact computer algebra for dialgebras and associative triple trisystems.

pub mod catalog;
pub mod dialg;
pub mod embed;
pub mod exactlin;
pub mod eval;
pub mod identity_dsl;
pub mod kp;
pub mod trisys;
