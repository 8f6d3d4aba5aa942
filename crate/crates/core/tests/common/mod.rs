//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod fixtures;
pub mod gradcheck;
pub mod oracles;
pub mod suites;
