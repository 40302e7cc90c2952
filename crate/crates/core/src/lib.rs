//! Static reconstruction of xUnit test suites: where the tests live, what
//! they cover and how they are designed.

pub mod bundle;
pub mod config;
pub mod extract;
pub mod facts;
pub mod indicators;
pub mod layout;
pub mod model;
pub mod testmodel;
pub mod views;
