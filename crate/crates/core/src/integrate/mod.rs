//! Haar-measure quadrature of `f(Upsilon_s(x))`, its `s`-derivatives, and the
//! dimension path `s(d)`.

mod integrand;
mod path;
mod quadrature;

pub use integrand::{parse_complex, Integrand};
pub use path::{s_of_d, straight_path, PathPoint};
pub use quadrature::{
    haar_integral, holomorphy_residual, integral_s_derivative, path_sweep, write_sweep_csv, Domain,
    HolomorphyCheck, QuadratureResult, SweepRow,
};
