//! Command-line front end for the quaternion convex-analysis toolkit.

pub mod commands;
pub mod demo;
pub mod error;
pub mod verify;
