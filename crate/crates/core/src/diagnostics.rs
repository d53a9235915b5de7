//! Norm tracks, entropy functionals, time-scale detection, decay fitting.
//!
//! A run is summarized by a time series of [`DiagnosticsSample`]s. From that
//! series [`detect_time_scales`] extracts the three characteristic times of
//! the relaxation to carrying capacity:
//!
//! * `t_flatten`: gradient energy ||u_x||^2 first drops below the threshold
//!   (diffusion has leveled the initial data onto its average),
//! * `t_leave`: ||u - avg(u_0)||^2 first exceeds the threshold after that
//!   (logistic growth has pulled the plateau away from the average),
//! * `t_arrive`: ||u - 1||^2 first drops below the threshold after that
//!   (the state has reached carrying capacity).
//!
//! [`fit_decay`] estimates the exponential rate of the final approach by
//! ordinary least squares on the log of ||u - 1||^2 + ||v||^2.

use crate::dynamics::State;
use crate::error::Error;
use crate::grid::{d1, l2_sq, trapezoid_map, Field, Grid1D};

/// Shared default for all threshold crossings.
pub const DEFAULT_THRESHOLD: f64 = 0.01;

/// Densities below this count as vanishing; the logarithmic entropy is then
/// undefined (its integrand diverges).
pub const SUPPORT_FLOOR: f64 = 1e-12;

/// More negative than this is a real scheme failure, not rounding noise.
pub const NEGATIVE_TOL: f64 = 1e-6;

/// Minimum number of points for a meaningful decay fit.
pub const MIN_FIT_SAMPLES: usize = 10;

/// One observer record: the scalar functionals of a state at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsSample {
    pub t: f64,
    pub l2_ux_sq: f64,
    pub l2_u_minus_avg_sq: f64,
    pub l2_u_minus_1_sq: f64,
    pub l2_v_sq: f64,
    pub l2_vx_sq: f64,
    /// Entropy functional: integral of u ln u - u plus half the v-energy.
    pub e1: f64,
    /// Integral of u - ln u; `None` when u touches zero somewhere.
    pub f_integral: Option<f64>,
    pub min_u: f64,
}

/// Integral of eta(u) = u ln u - u, with eta(0) = 0 by continuity. Rounding
///-level negative values are clamped to zero; materially negative input
/// (below -[`NEGATIVE_TOL`]) is an error.
pub fn eta_integral(u: &Field, g: &Grid1D) -> Result<f64, Error> {
    let min = u.min_interior();
    if min < -NEGATIVE_TOL {
        return Err(Error::NegativeDensity { min });
    }
    Ok(trapezoid_map(u, g, |z| {
        let z = z.max(0.0);
        if z == 0.0 {
            0.0
        } else {
            z * z.ln() - z
        }
    }))
}

/// Integral of f(u) = u - ln u; `Ok(None)` when min(u) <= [`SUPPORT_FLOOR`]
/// (the integrand diverges on vanishing density, e.g. for the square wave).
pub fn f_integral(u: &Field, g: &Grid1D) -> Result<Option<f64>, Error> {
    let min = u.min_interior();
    if min < -NEGATIVE_TOL {
        return Err(Error::NegativeDensity { min });
    }
    if min <= SUPPORT_FLOOR {
        return Ok(None);
    }
    Ok(Some(trapezoid_map(u, g, |z| z - z.ln())))
}

/// The dissipated functional: integral of eta(u) plus half the v-energy.
/// Nonincreasing along trajectories of the scheme (up to Euler truncation).
pub fn lyapunov_e1(u: &Field, v: &Field, g: &Grid1D) -> Result<f64, Error> {
    Ok(eta_integral(u, g)? + 0.5 * l2_sq(v, g))
}

/// Evaluate every tracked functional of `s`. `u_avg0` is the initial spatial
/// average the drift norm is measured against.
pub fn sample(s: &State, g: &Grid1D, u_avg0: f64) -> Result<DiagnosticsSample, Error> {
    let ux = d1(&s.u, g);
    let vx = d1(&s.v, g);
    Ok(DiagnosticsSample {
        t: s.t,
        l2_ux_sq: l2_sq(&ux, g),
        l2_u_minus_avg_sq: trapezoid_map(&s.u, g, |z| (z - u_avg0) * (z - u_avg0)),
        l2_u_minus_1_sq: trapezoid_map(&s.u, g, |z| (z - 1.0) * (z - 1.0)),
        l2_v_sq: l2_sq(&s.v, g),
        l2_vx_sq: l2_sq(&vx, g),
        e1: lyapunov_e1(&s.u, &s.v, g)?,
        f_integral: f_integral(&s.u, g)?,
        min_u: s.u.min_interior(),
    })
}

/// How a trajectory moved through (or skipped) the three phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Flatten, leave, arrive, in that order.
    Normal,
    /// Arrived at carrying capacity without a resolved flattening phase.
    Bypassed,
    /// Started already flat and at capacity.
    Degenerate,
    /// Ran out of samples before the sequence completed.
    Incomplete,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Normal => "normal",
            Regime::Bypassed => "bypassed",
            Regime::Degenerate => "degenerate",
            Regime::Incomplete => "incomplete",
        };
        f.write_str(s)
    }
}

/// The detected characteristic times. Crossings are reported at the first
/// satisfying sample; no interpolation between samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeScaleReport {
    pub t_flatten: Option<f64>,
    pub t_leave: Option<f64>,
    pub t_arrive: Option<f64>,
    pub regime: Regime,
    /// (t_arrive - t_leave) / t_arrive, the tail fraction of the trip;
    /// defined only in the normal regime.
    pub relative_transition: Option<f64>,
}

/// Scan a sorted sample series for the three threshold crossings.
pub fn detect_time_scales(
    samples: &[DiagnosticsSample],
    threshold: f64,
) -> Result<TimeScaleReport, Error> {
    if samples.is_empty() {
        return Err(Error::TooFewSamples { got: 0, need: 1 });
    }
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "threshold",
            value: threshold,
            requirement: "threshold > 0",
        });
    }
    if samples.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(Error::UnsortedSamples);
    }

    let t_flatten = samples.iter().find(|s| s.l2_ux_sq < threshold).map(|s| s.t);
    let t_leave = t_flatten.and_then(|td| {
        samples
            .iter()
            .find(|s| s.t > td && s.l2_u_minus_avg_sq >= threshold)
            .map(|s| s.t)
    });
    // Without a leave time the search starts from the beginning: a run can
    // reach capacity without ever resolving the flatten/leave handoff.
    let arrive_from = t_leave.unwrap_or(f64::NEG_INFINITY);
    let t_arrive = samples
        .iter()
        .find(|s| s.t > arrive_from && s.l2_u_minus_1_sq < threshold)
        .map(|s| s.t);

    let first_t = samples[0].t;
    let regime = if t_flatten == Some(first_t) && t_arrive == Some(first_t) {
        Regime::Degenerate
    } else if let (Some(td), Some(tl), Some(ta)) = (t_flatten, t_leave, t_arrive) {
        if td <= tl && tl <= ta {
            Regime::Normal
        } else {
            Regime::Incomplete
        }
    } else if t_arrive.is_some() && (t_leave.is_none() || t_arrive < t_flatten) {
        Regime::Bypassed
    } else {
        Regime::Incomplete
    };

    let relative_transition = match (regime, t_leave, t_arrive) {
        (Regime::Normal, Some(tl), Some(ta)) if ta > 0.0 => Some((ta - tl) / ta),
        _ => None,
    };

    Ok(TimeScaleReport {
        t_flatten,
        t_leave,
        t_arrive,
        regime,
        relative_transition,
    })
}

/// Exponential fit of the late-time approach to equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Decay rate of ||u - 1||^2 + ||v||^2 (positive means decaying).
    pub rate: f64,
    /// ln of the fitted amplitude at t = 0.
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
}

/// Least-squares line through (t, ln(||u - 1||^2 + ||v||^2)) over samples
/// strictly inside (t_start, t_end). Rejects windows with fewer than
/// [`MIN_FIT_SAMPLES`] points or where the quantity has underflowed to zero.
pub fn fit_decay(
    samples: &[DiagnosticsSample],
    t_start: f64,
    t_end: f64,
) -> Result<DecayFit, Error> {
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for s in samples {
        if s.t > t_start && s.t < t_end {
            let val = s.l2_u_minus_1_sq + s.l2_v_sq;
            if val <= 0.0 {
                return Err(Error::BelowFloor);
            }
            ts.push(s.t);
            ys.push(val.ln());
        }
    }
    if ts.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            got: ts.len(),
            need: MIN_FIT_SAMPLES,
        });
    }

    // A constant series has no variance to explain; report the flat line as
    // a perfect fit. (The general formula would divide rounding noise by
    // rounding noise: the computed mean of identical values sits an ulp off
    // the common value, so syy lands at 1e-30 instead of 0.)
    if ys.windows(2).all(|w| w[0] == w[1]) {
        return Ok(DecayFit {
            rate: 0.0,
            intercept: ys[0],
            r_squared: 1.0,
            window: (t_start, t_end),
        });
    }

    let m = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&t, &y) in ts.iter().zip(&ys) {
        sxx += (t - tm) * (t - tm);
        sxy += (t - tm) * (y - ym);
        syy += (y - ym) * (y - ym);
    }
    if sxx <= 0.0 {
        return Err(Error::InvalidArgument {
            name: "fit window",
            msg: "sample times inside the window have zero variance".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * tm;
    let ss_res = syy - slope * sxy;
    let r_squared = (1.0 - ss_res / syy).clamp(0.0, 1.0);
    Ok(DecayFit {
        rate: -slope,
        intercept,
        r_squared,
        window: (t_start, t_end),
    })
}
