//! File formats, the parallel sweep and the acceptance suite behind the
//! `ghcert` command.

pub mod acceptance;
pub mod io;
pub mod sweep;
