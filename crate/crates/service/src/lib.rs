//! HTTP API and command line for floodscout missions.

pub mod api;
pub mod cli;
pub mod error;
pub mod ops;
pub mod schema;
pub mod types;

pub use api::{router, AppState};
pub use error::ApiError;
