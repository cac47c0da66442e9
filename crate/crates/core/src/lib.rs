pub mod cli;
pub mod error;
pub mod exterior;
pub mod g2;
pub mod identities;
pub mod liegeom;
pub mod linalg;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod suites;
pub mod variations;
