//! Front end for rendering images of `Upsilon_s^phi`, certified embedding
//! masks, dimension paths and quadrature tables.

pub mod cert;
pub mod commands;
pub mod config;
pub mod output;
pub mod raster;

pub use config::RunConfig;
pub use output::Report;

use padic_fractal::Error;

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::OutOfDomain(_) => 3,
        Error::NotCertified(_) => 4,
        Error::Io(_) | Error::Overflow(_) | Error::Window(_) | Error::WindowOverflow { .. } => 1,
        _ => 2,
    }
}
