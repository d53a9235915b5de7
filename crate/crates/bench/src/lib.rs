//! Shared setup for the criterion benches.

use kslab_core::dynamics::{ModelParams, State};
use kslab_core::grid::Grid1D;
use kslab_core::transform::InitialCondition;

/// Square-wave initial state on an `n`-interval grid.
pub fn square_wave_setup(n: usize, eps: f64, r: f64) -> (Grid1D, ModelParams, State) {
    let g = Grid1D::new(n).expect("bench grid");
    let p = ModelParams::new(eps, r).expect("bench params");
    let s = State::from_ic(&InitialCondition::SquareWave, &g).expect("bench state");
    (g, p, s)
}
