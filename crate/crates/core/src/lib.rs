pub mod error;
pub mod geometry;
pub mod haar;
pub mod kernel;
pub mod spectral;
pub mod io;
pub mod clt;
pub mod cli;
