pub mod error;
pub mod families;
pub mod localization;
pub mod matrix;
pub mod reports;
pub mod sampling;
pub mod search;
pub mod spectrum;
pub mod werner;
