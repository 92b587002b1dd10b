//! Second-order finite differences on uniform grids: central stencils in the
//! interior, one-sided three-point stencils at the ends.

use crate::error::{Error, Result};
use crate::qstate::CMat;

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::Parameter(
            "derivative needs at least 3 grid points".into(),
        ));
    }
    let dt = times[1] - times[0];
    if dt <= 0.0 {
        return Err(Error::Parameter("grid must be increasing".into()));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(Error::GridMismatch(
                "derivative requires a uniform grid".into(),
            ));
        }
    }
    Ok(dt)
}

/// d/dt of a scalar series.
pub fn derivative_uniform(times: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    if times.len() != values.len() {
        return Err(Error::GridMismatch(format!(
            "{} times vs {} values",
            times.len(),
            values.len()
        )));
    }
    let dt = uniform_step(times)?;
    let n = values.len();
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt);
    for k in 1..n - 1 {
        out[k] = (values[k + 1] - values[k - 1]) / (2.0 * dt);
    }
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt);
    Ok(out)
}

/// Entrywise d/dt of a matrix series.
pub fn matrix_derivative_uniform(times: &[f64], mats: &[CMat]) -> Result<Vec<CMat>> {
    if times.len() != mats.len() {
        return Err(Error::GridMismatch(format!(
            "{} times vs {} matrices",
            times.len(),
            mats.len()
        )));
    }
    let dt = uniform_step(times)?;
    let n = mats.len();
    let mut out = Vec::with_capacity(n);
    out.push((mats[0].scale(-3.0) + mats[1].scale(4.0) - &mats[2]).scale(1.0 / (2.0 * dt)));
    for k in 1..n - 1 {
        out.push((&mats[k + 1] - &mats[k - 1]).scale(1.0 / (2.0 * dt)));
    }
    out.push(
        (mats[n - 1].scale(3.0) - mats[n - 2].scale(4.0) + &mats[n - 3]).scale(1.0 / (2.0 * dt)),
    );
    Ok(out)
}
