//! Python bindings for the core maps, quadrature and box counting.

use num_complex::Complex64;
use padic_fractal::integrate::{self, Domain, Integrand};
use padic_fractal::maps::{self, DistortionOptions, MapParams};
use padic_fractal::measures::{self, PointCloud};
use padic_fractal::padic::{Ball, DigitWord, Region};
use padic_fractal::profiles::Profile;
use padic_fractal::Error;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(msg) => PyOSError::new_err(msg),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn profile(p: u32, name: &str) -> PyResult<Profile> {
    let profile = match name {
        "digit" => Profile::digit(p),
        "digit-normalized" => Profile::digit_normalized(p),
        "exponential" => Profile::exponential(p),
        other => match other.strip_prefix("csv:") {
            Some(path) => Profile::from_csv(p, path),
            None => return Err(PyValueError::new_err(format!("unknown profile {other:?}"))),
        },
    };
    profile.map_err(py_err)
}

fn params(p: u32, name: &str, s: Complex64) -> PyResult<MapParams> {
    MapParams::upsilon(profile(p, name)?, s).map_err(py_err)
}

/// `(nu, uncertainty, sigma)` of a profile; `nu` is enumerated on
/// denominators up to `p^depth` when the profile has infinite depth.
#[pyfunction]
#[pyo3(signature = (p=2, profile="digit", depth=8))]
fn profile_constants(p: u32, profile: &str, depth: u32) -> PyResult<(f64, f64, f64)> {
    let phi = self::profile(p, profile)?;
    let nu = phi.nu_default(depth).map_err(py_err)?;
    Ok((nu.value, nu.uncertainty, nu.value / (1.0 + nu.value)))
}

/// `(s, dimension)` on the path `s = exp(-(ln p + i theta) / d)`.
#[pyfunction]
#[pyo3(signature = (d, theta=std::f64::consts::PI, p=2))]
fn s_of_d(d: Complex64, theta: f64, p: u32) -> PyResult<(Complex64, f64)> {
    let pt = integrate::s_of_d(d, theta, p).map_err(py_err)?;
    Ok((pt.s, pt.dimension))
}

/// `(value, error_bound)` of `Upsilon_s(x)` for `x = sum digits[k] p^(v0 + k)`.
#[pyfunction]
#[pyo3(signature = (digits, s, p=2, profile="digit", v0=0, depth=None))]
fn upsilon(
    digits: Vec<u32>,
    s: Complex64,
    p: u32,
    profile: &str,
    v0: i64,
    depth: Option<i64>,
) -> PyResult<(Complex64, f64)> {
    let params = params(p, profile, s)?;
    let depth = depth.unwrap_or(v0 + digits.len() as i64);
    let x = DigitWord::new(p, v0, digits).map_err(py_err)?;
    let r = maps::upsilon(&params, &x, depth).map_err(py_err)?;
    Ok((r.value, r.error_bound))
}

/// Images of the `p^depth` cells of `Z_p`.
#[pyfunction]
#[pyo3(signature = (s, p=2, profile="digit", depth=12))]
fn image_points(s: Complex64, p: u32, profile: &str, depth: u32) -> PyResult<Vec<Complex64>> {
    let params = params(p, profile, s)?;
    let region = Region::single(Ball::unit(p).map_err(py_err)?);
    maps::image_points(&params, &region, depth).map_err(py_err)
}

/// `(value, error_bound)` of the Haar integral of `f(Upsilon_s(x))` over
/// `p^-lambda Z_p`.
#[pyfunction]
#[pyo3(signature = (f, s, p=2, profile="digit", depth=12, lambda_=0))]
fn haar_integral(
    f: &str,
    s: Complex64,
    p: u32,
    profile: &str,
    depth: u32,
    lambda_: i64,
) -> PyResult<(Complex64, f64)> {
    let params = params(p, profile, s)?;
    let f = Integrand::parse(f).map_err(py_err)?;
    let ball = Ball::lambda(p, lambda_).map_err(py_err)?;
    let domain = Domain::Bounded(Region::single(ball));
    let r = integrate::haar_integral(&params, &domain, &f, depth).map_err(py_err)?;
    Ok((r.value, r.error_bound))
}

/// Certified `[lower, upper]` for `Delta+`.
#[pyfunction]
#[pyo3(signature = (s, p=2, profile="digit", max_depth=24))]
fn delta_plus(s: Complex64, p: u32, profile: &str, max_depth: u32) -> PyResult<(f64, f64)> {
    let params = params(p, profile, s)?;
    let opts = DistortionOptions {
        max_depth,
        ..DistortionOptions::default()
    };
    let r = maps::delta_plus(&params, &opts).map_err(py_err)?;
    Ok((r.lower, r.upper))
}

/// Box-counting fit of planar points over the given scales.
#[pyfunction]
fn box_dimension<'py>(
    py: Python<'py>,
    points: Vec<Complex64>,
    scales: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cloud = PointCloud::from_complex(&points, serde_json::Value::Null);
    let fit = measures::box_dimension(&cloud, &scales).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("estimate", fit.estimate)?;
    out.set_item("residual", fit.residual)?;
    out.set_item("counts", fit.counts)?;
    Ok(out)
}

#[pymodule]
fn padic_fractal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(profile_constants, m)?)?;
    m.add_function(wrap_pyfunction!(s_of_d, m)?)?;
    m.add_function(wrap_pyfunction!(upsilon, m)?)?;
    m.add_function(wrap_pyfunction!(image_points, m)?)?;
    m.add_function(wrap_pyfunction!(haar_integral, m)?)?;
    m.add_function(wrap_pyfunction!(delta_plus, m)?)?;
    m.add_function(wrap_pyfunction!(box_dimension, m)?)?;
    Ok(())
}
