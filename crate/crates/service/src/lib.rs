//! HTTP API and command line for the number field tables.

pub mod api;
pub mod cli;
pub mod error;
pub mod http;
pub mod params;

pub use error::ServiceError;
