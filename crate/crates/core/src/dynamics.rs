//! The coupled density/log-gradient system and its explicit time stepper.
//!
//! After nondimensionalization the model is
//!
//! ```text
//! u_t + (u v)_x = u_xx + r u (1 - u)        no-flux:  u_x = 0 at x = 0, 1
//! v_t + (u - eps v^2)_x = eps v_xx          pinned:   v = 0  at x = 0, 1
//! ```
//!
//! on [0, 1], with eps in [0, 1) and r >= 0. Space is discretized with the
//! central stencils from [`crate::grid`]; time with plain forward Euler at
//! dt <= dx^2 / 2. Ghost slots realize the boundary conditions: u reflects
//! evenly (u_{-1} = u_1), v reflects oddly around its pinned zeros
//! (v_{-1} = -v_1), which also makes the discrete v_xx vanish at the ends,
//! the compatibility condition the continuous problem imposes there.

use crate::diagnostics::DiagnosticsSample;
use crate::error::Error;
use crate::grid::{Field, Grid1D};
use crate::transform::InitialCondition;

/// The two surviving dimensionless numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub eps: f64,
    pub r: f64,
}

impl ModelParams {
    pub fn new(eps: f64, r: f64) -> Result<Self, Error> {
        if !(eps.is_finite() && (0.0..1.0).contains(&eps)) {
            return Err(Error::ParamOutOfRange {
                name: "eps",
                value: eps,
                requirement: "0 <= eps < 1",
            });
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "r",
                value: r,
                requirement: "r >= 0",
            });
        }
        Ok(ModelParams { eps, r })
    }
}

/// Solution pair and current time.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: Field,
    pub v: Field,
    pub t: f64,
}

impl State {
    pub fn new(u: Field, v: Field, t: f64) -> Result<Self, Error> {
        if u.n() != v.n() {
            return Err(Error::SizeMismatch {
                got: v.n(),
                expected: u.n(),
            });
        }
        if !t.is_finite() {
            return Err(Error::ParamOutOfRange {
                name: "t",
                value: t,
                requirement: "finite",
            });
        }
        Ok(State { u, v, t })
    }

    /// The carrying-capacity rest state u = 1, v = 0 at t = 0.
    pub fn steady(g: &Grid1D) -> Self {
        State {
            u: Field::from_fn(g, |_| 1.0),
            v: Field::zeros(g),
            t: 0.0,
        }
    }

    pub fn from_ic(ic: &InitialCondition, g: &Grid1D) -> Result<Self, Error> {
        let (u, v) = ic.build(g)?;
        State::new(u, v, 0.0)
    }
}

/// Largest forward-Euler step the diffusion stencil tolerates, dx^2 / 2.
#[inline]
pub fn stable_dt(dx: f64) -> f64 {
    0.5 * dx * dx
}

/// Magnitude below which the v update snaps to exact zero (see [`Stepper::step`]).
const V_FLUSH: f64 = 1e-150;

/// Smallest n with 1/n < sqrt(eps / 10), floored at `n_floor`. The v-equation
/// develops interior layers of width ~sqrt(eps); this rule keeps a few nodes
/// inside them. eps = 0 has no layer, so the floor alone decides.
pub fn default_mesh(eps: f64, n_floor: usize) -> usize {
    let floor = n_floor.max(Grid1D::MIN_INTERVALS);
    if eps.is_nan() || eps <= 0.0 {
        return floor;
    }
    let q = (10.0 / eps).sqrt();
    let n_rule = q.floor() as usize + 1; // smallest integer strictly above q
    n_rule.max(floor)
}

/// Reimpose both boundary conditions on the ghost slots (and the v pins).
pub fn apply_bc(s: &mut State) {
    let n = s.u.n() as isize;
    s.u[-1] = s.u[1];
    s.u[n + 1] = s.u[n - 1];
    s.v[0] = 0.0;
    s.v[n] = 0.0;
    s.v[-1] = -s.v[1];
    s.v[n + 1] = -s.v[n - 1];
}

/// Time-stepping plan: mesh size, step, horizon and sampling cadence.
///
/// Construction does not reject dt above the stability bound; diverging runs
/// are themselves an object of study and are reported through
/// [`Error::Instability`] when they blow up. Use [`StepControl::violates_stability`]
/// to warn the user up front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Observers fire every this many steps (plus first and last step).
    pub observer_stride: usize,
    /// Opt-in: reset negative u values to zero after each step. Off by
    /// default; the untouched scheme is what the diagnostics describe.
    pub clamp_u: bool,
}

impl StepControl {
    pub fn new(n: usize, dt: f64, t_end: f64, observer_stride: usize) -> Result<Self, Error> {
        Grid1D::new(n)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "dt",
                value: dt,
                requirement: "dt > 0",
            });
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "t_end",
                value: t_end,
                requirement: "0 <= t_end < inf",
            });
        }
        if observer_stride == 0 {
            return Err(Error::ParamOutOfRange {
                name: "observer_stride",
                value: 0.0,
                requirement: "stride >= 1",
            });
        }
        Ok(StepControl {
            n,
            dt,
            t_end,
            observer_stride,
            clamp_u: false,
        })
    }

    /// Stability-bounded dt and a sampling interval of ~0.01 time units.
    pub fn standard(n: usize, t_end: f64) -> Result<Self, Error> {
        let dt = stable_dt(1.0 / n as f64);
        StepControl::new(n, dt, t_end, stride_for(0.01, dt))
    }

    pub fn with_observer_dt(mut self, interval: f64) -> Self {
        self.observer_stride = stride_for(interval, self.dt);
        self
    }

    pub fn with_clamp_u(mut self, on: bool) -> Self {
        self.clamp_u = on;
        self
    }

    pub fn violates_stability(&self) -> bool {
        self.dt > stable_dt(1.0 / self.n as f64) * (1.0 + 1e-12)
    }
}

/// Steps per observer sample for a requested sampling interval.
pub fn stride_for(interval: f64, dt: f64) -> usize {
    if interval.is_nan() || interval <= 0.0 {
        return 1;
    }
    ((interval / dt).ceil() as usize).max(1)
}

/// Forward-Euler engine with preallocated scratch, the hot path of every
/// experiment. The product fields u*v and v^2 are formed pointwise on all
/// slots (ghosts included) before differencing.
pub struct Stepper {
    grid: Grid1D,
    params: ModelParams,
    uv: Vec<f64>,
    v2: Vec<f64>,
    du: Vec<f64>,
    dv: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: Grid1D, params: ModelParams) -> Self {
        let len = grid.n() + 3;
        Stepper {
            grid,
            params,
            uv: vec![0.0; len],
            v2: vec![0.0; len],
            du: vec![0.0; len],
            dv: vec![0.0; len],
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Evaluate the semi-discrete right-hand side into the internal du/dv
    /// buffers (ghost slots of the output are zero).
    fn rhs_into(&mut self, s: &State) {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let c2 = 1.0 / (dx * dx);
        let c1 = 0.5 / dx;
        let eps = self.params.eps;
        let r = self.params.r;
        let u = s.u.slots();
        let v = s.v.slots();
        debug_assert_eq!(u.len(), n + 3);

        for p in 0..n + 3 {
            self.uv[p] = u[p] * v[p];
            self.v2[p] = v[p] * v[p];
        }
        for p in 1..=n + 1 {
            // (a + b) - 2m keeps mirror-symmetric data bitwise symmetric.
            let lap_u = (u[p + 1] + u[p - 1]) - 2.0 * u[p];
            let adv = self.uv[p + 1] - self.uv[p - 1];
            self.du[p] = c2 * lap_u - c1 * adv + r * (u[p] * (1.0 - u[p]));

            let lap_v = (v[p + 1] + v[p - 1]) - 2.0 * v[p];
            let drive = u[p + 1] - u[p - 1];
            let sq = self.v2[p + 1] - self.v2[p - 1];
            self.dv[p] = eps * (c2 * lap_v) - c1 * drive + eps * (c1 * sq);
        }
        self.du[0] = 0.0;
        self.du[n + 2] = 0.0;
        self.dv[0] = 0.0;
        self.dv[n + 2] = 0.0;
    }

    /// One forward-Euler step: update, advance t, reimpose boundary
    /// conditions, and flag non-finite values as instability at the new time.
    pub fn step(&mut self, s: &mut State, dt: f64) -> Result<(), Error> {
        self.rhs_into(s);
        let n = self.grid.n();
        for (z, dz) in s.u.interior_mut().iter_mut().zip(&self.du[1..=n + 1]) {
            *z += dt * dz;
        }
        for (z, dz) in s.v.interior_mut().iter_mut().zip(&self.dv[1..=n + 1]) {
            let w = *z + dt * dz;
            // v decays exponentially forever once u levels out; flush it
            // to zero long before it reaches the subnormal range, where
            // arithmetic costs ~20x per op and the values are dynamically
            // meaningless anyway.
            *z = if w.abs() < V_FLUSH { 0.0 } else { w };
        }
        s.t += dt;
        apply_bc(s);
        if !(s.u.all_finite() && s.v.all_finite()) {
            return Err(Error::Instability { time: s.t });
        }
        Ok(())
    }
}

/// Semi-discrete right-hand side as fresh fields. Convenience wrapper over
/// [`Stepper`]; allocates, so hot loops should hold a `Stepper` instead.
pub fn rhs(s: &State, p: &ModelParams, g: &Grid1D) -> (Field, Field) {
    let mut stepper = Stepper::new(*g, *p);
    stepper.rhs_into(s);
    let mut du = Field::zeros(g);
    let mut dv = Field::zeros(g);
    du.slots_mut().copy_from_slice(&stepper.du);
    dv.slots_mut().copy_from_slice(&stepper.dv);
    (du, dv)
}

/// One in-place Euler step (allocating convenience form).
pub fn step_euler(s: &mut State, p: &ModelParams, g: &Grid1D, dt: f64) -> Result<(), Error> {
    Stepper::new(*g, *p).step(s, dt)
}

/// A sampling hook: maps the current state to one diagnostics record.
pub type ObserverFn<'a> = &'a mut dyn FnMut(&State, &Grid1D) -> Result<DiagnosticsSample, Error>;

/// What a sampling callback tells the driver to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

/// Core stepping loop shared by [`integrate`] and the experiment drivers.
/// Samples fire on the initial state, every `observer_stride` steps, and on
/// the final step. The callback may stop the run early.
pub(crate) fn drive(
    mut s: State,
    p: &ModelParams,
    ctrl: &StepControl,
    on_sample: &mut dyn FnMut(&State, &Grid1D) -> Result<Flow, Error>,
) -> Result<State, Error> {
    let g = Grid1D::new(ctrl.n)?;
    if s.u.n() != g.n() {
        return Err(Error::SizeMismatch {
            got: s.u.n(),
            expected: g.n(),
        });
    }
    apply_bc(&mut s);
    if !(s.u.all_finite() && s.v.all_finite()) {
        return Err(Error::Instability { time: s.t });
    }

    let span = ctrl.t_end - s.t;
    let n_steps = if span <= 0.0 {
        0
    } else {
        let q = span / ctrl.dt;
        // Snap to the integer step count when t_end is an exact multiple of
        // dt up to rounding; otherwise overshoot t_end by part of one step.
        if (q - q.round()).abs() < 1e-6 {
            q.round() as u64
        } else {
            q.ceil() as u64
        }
    };

    if on_sample(&s, &g)? == Flow::Stop {
        return Ok(s);
    }
    let mut stepper = Stepper::new(g, *p);
    for k in 1..=n_steps {
        stepper.step(&mut s, ctrl.dt)?;
        if ctrl.clamp_u && s.u.min_interior() < 0.0 {
            for z in s.u.interior_mut() {
                if *z < 0.0 {
                    *z = 0.0;
                }
            }
            apply_bc(&mut s);
        }
        if (k % ctrl.observer_stride as u64 == 0 || k == n_steps)
            && on_sample(&s, &g)? == Flow::Stop
        {
            return Ok(s);
        }
    }
    Ok(s)
}

/// An integration that failed mid-run; the samples gathered up to the
/// failure are preserved.
#[derive(Debug)]
pub struct Interrupted {
    pub error: Error,
    pub partial: Vec<DiagnosticsSample>,
}

impl std::fmt::Display for Interrupted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "run interrupted after {} samples: {}",
            self.partial.len(),
            self.error
        )
    }
}

impl std::error::Error for Interrupted {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// March from `s0.t` to `ctrl.t_end`, invoking every observer at each sample
/// event and collecting their records in order. On failure the partial record
/// list comes back alongside the error.
pub fn integrate(
    s0: State,
    p: &ModelParams,
    ctrl: &StepControl,
    observers: &mut [ObserverFn<'_>],
) -> Result<(State, Vec<DiagnosticsSample>), Interrupted> {
    let mut samples = Vec::new();
    let result = drive(s0, p, ctrl, &mut |s, g| {
        for obs in observers.iter_mut() {
            samples.push(obs(s, g)?);
        }
        Ok(Flow::Continue)
    });
    match result {
        Ok(fin) => Ok((fin, samples)),
        Err(error) => Err(Interrupted {
            error,
            partial: samples,
        }),
    }
}
