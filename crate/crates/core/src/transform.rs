//! Initial data and the logarithmic-gradient change of variables.
//!
//! The model's `v` is the spatial log-derivative of a strictly positive
//! signal concentration `c`: v = (ln c)_x. [`c_from_v`] and [`v_from_c`] move
//! between the two representations so runs can be inspected in either one.

use crate::error::Error;
use crate::grid::{d1, trapezoid, Field, Grid1D};

/// Initial state of the pair (u, v).
#[derive(Debug, Clone)]
pub enum InitialCondition {
    /// Square-wave cell density plus a centered Gaussian of v; the stress
    /// test with jumps and an initially empty region.
    SquareWave,
    /// 1 + a_u cos(pi x) and a_v sin(pi x); strictly positive and smooth,
    /// compatible with the boundary conditions for any 0 <= a_u < 1.
    SmoothCosine { a_u: f64, a_v: f64 },
    /// Caller-supplied fields (ghosts included).
    Custom { u0: Field, v0: Field },
}

impl InitialCondition {
    pub fn build(&self, g: &Grid1D) -> Result<(Field, Field), Error> {
        match self {
            InitialCondition::SquareWave => Ok((ic_square_wave(g), ic_gaussian(g))),
            InitialCondition::SmoothCosine { a_u, a_v } => ic_smooth(g, *a_u, *a_v),
            InitialCondition::Custom { u0, v0 } => {
                for f in [u0, v0] {
                    if f.n() != g.n() {
                        return Err(Error::SizeMismatch {
                            got: f.n(),
                            expected: g.n(),
                        });
                    }
                }
                Ok((u0.clone(), v0.clone()))
            }
        }
    }
}

fn step_at(x: f64, edge: f64) -> f64 {
    // Heaviside with H(0) = 1 so on-grid edges land on the high side.
    if x - edge >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Square wave: 1 on [1/4, 1/2) and [3/4, 1], 0 elsewhere. Ghosts by even
/// reflection, matching the no-flux condition on u.
pub fn ic_square_wave(g: &Grid1D) -> Field {
    let mut u = Field::from_fn(g, |x| step_at(x, 0.25) - step_at(x, 0.5) + step_at(x, 0.75));
    let n = g.n() as isize;
    u[-1] = u[1];
    u[n + 1] = u[n - 1];
    u
}

/// Centered Gaussian bump (5/3) exp(-18 (x - 1/2)^2) with the endpoint values
/// forced to exactly zero and odd-reflected ghosts, matching the pinned
/// boundary condition on v.
pub fn ic_gaussian(g: &Grid1D) -> Field {
    let mut v = Field::from_fn(g, |x| {
        let y = x - 0.5;
        5.0 / 3.0 * (-18.0 * y * y).exp()
    });
    let n = g.n() as isize;
    v[0] = 0.0;
    v[n] = 0.0;
    v[-1] = -v[1];
    v[n + 1] = -v[n - 1];
    v
}

/// Smooth pair u = 1 + a_u cos(pi x), v = a_v sin(pi x). Requires
/// 0 <= a_u < 1 so u stays strictly positive.
pub fn ic_smooth(g: &Grid1D, a_u: f64, a_v: f64) -> Result<(Field, Field), Error> {
    if !(0.0..1.0).contains(&a_u) {
        return Err(Error::ParamOutOfRange {
            name: "a_u",
            value: a_u,
            requirement: "0 <= a_u < 1",
        });
    }
    if !a_v.is_finite() {
        return Err(Error::ParamOutOfRange {
            name: "a_v",
            value: a_v,
            requirement: "finite",
        });
    }
    let n = g.n() as isize;
    let mut u = Field::from_fn(g, |x| 1.0 + a_u * (std::f64::consts::PI * x).cos());
    u[-1] = u[1];
    u[n + 1] = u[n - 1];

    let mut v = Field::from_fn(g, |x| a_v * (std::f64::consts::PI * x).sin());
    // sin(pi * 1.0) is only zero up to rounding; the pin must be exact.
    v[0] = 0.0;
    v[n] = 0.0;
    v[-1] = -v[1];
    v[n + 1] = -v[n - 1];
    Ok((u, v))
}

/// Spatial average of the initial density by the trapezoid rule; the baseline
/// the leave-time diagnostic measures drift against.
pub fn initial_average(u0: &Field, g: &Grid1D) -> f64 {
    trapezoid(u0, g)
}

/// Reconstruct the concentration from v: c_i = c_left exp(integral of v from
/// 0 to x_i), cumulative trapezoid. Output is strictly positive; its ghosts
/// extrapolate ln c quadratically so one-sided derivatives stay second order.
pub fn c_from_v(v: &Field, g: &Grid1D, c_left: f64) -> Result<Field, Error> {
    if !(c_left.is_finite() && c_left > 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "c_left",
            value: c_left,
            requirement: "finite and > 0",
        });
    }
    let n = g.n();
    let dx = g.dx();
    let mut w = vec![0.0; n + 1]; // ln c at interior nodes
    let log_left = c_left.ln();
    w[0] = log_left;
    for i in 1..=n {
        let vi = v[i as isize];
        let vim = v[i as isize - 1];
        w[i] = w[i - 1] + 0.5 * dx * (vim + vi);
    }
    let mut c = Field::zeros(g);
    for i in 0..=n {
        c[i as isize] = w[i].exp();
    }
    let ni = n as isize;
    c[-1] = (3.0 * w[0] - 3.0 * w[1] + w[2]).exp();
    c[ni + 1] = (3.0 * w[n] - 3.0 * w[n - 1] + w[n - 2]).exp();
    Ok(c)
}

/// Recover v = (ln c)_x by the central difference of ln c. Every slot of `c`,
/// ghosts included, must be strictly positive.
pub fn v_from_c(c: &Field, g: &Grid1D) -> Result<Field, Error> {
    let min = c.slots().iter().copied().fold(f64::INFINITY, f64::min);
    if min.is_nan() || min <= 0.0 {
        return Err(Error::NonpositiveField { min });
    }
    let mut w = Field::zeros(g);
    for (dst, &src) in w.slots_mut().iter_mut().zip(c.slots()) {
        *dst = src.ln();
    }
    Ok(d1(&w, g))
}
