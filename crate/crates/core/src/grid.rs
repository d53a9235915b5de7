//! Uniform 1-d grid on [0, 1] and scalar fields with one ghost slot per side.
//!
//! Nodes sit at x_i = i/n for i = 0..=n. A [`Field`] stores n + 3 values so
//! that the logical index runs from -1 (left ghost) to n + 1 (right ghost);
//! second-order stencils can then be evaluated at every interior node,
//! boundaries included, without branching. Ghost values encode the boundary
//! conditions and are maintained by whoever owns the field.

use std::ops::{Index, IndexMut};

use crate::error::Error;

/// Uniform mesh of `n` intervals on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid1D {
    n: usize,
}

impl Grid1D {
    /// Fewer intervals than this leaves no room for a ghost stencil.
    pub const MIN_INTERVALS: usize = 4;

    pub fn new(n: usize) -> Result<Self, Error> {
        if n < Self::MIN_INTERVALS {
            return Err(Error::GridTooCoarse {
                got: n,
                min: Self::MIN_INTERVALS,
            });
        }
        Ok(Grid1D { n })
    }

    /// Number of intervals.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Mesh width 1/n.
    #[inline]
    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Coordinate of logical node `i`; ghosts live at -dx and 1 + dx.
    #[inline]
    pub fn x(&self, i: isize) -> f64 {
        i as f64 / self.n as f64
    }

    /// Interior node count, n + 1.
    #[inline]
    pub fn node_count(&self) -> usize {
        self.n + 1
    }
}

/// Nodal values of a scalar on a [`Grid1D`], ghosts included.
///
/// Logical indices -1..=n+1 map onto a flat buffer of length n + 3. Slots
/// 0..=n are interior; -1 and n+1 are ghosts.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    n: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid1D) -> Self {
        Field {
            n: grid.n(),
            values: vec![0.0; grid.n() + 3],
        }
    }

    /// Fill every slot, ghosts included, from a function of the coordinate.
    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let mut field = Field::zeros(grid);
        for i in -1..=(grid.n() as isize + 1) {
            field[i] = f(grid.x(i));
        }
        field
    }

    /// Number of intervals of the grid this field lives on.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: isize) -> usize {
        debug_assert!(
            i >= -1 && i <= self.n as isize + 1,
            "index {i} out of range"
        );
        (i + 1) as usize
    }

    /// Interior slots 0..=n.
    #[inline]
    pub fn interior(&self) -> &[f64] {
        &self.values[1..=self.n + 1]
    }

    #[inline]
    pub fn interior_mut(&mut self) -> &mut [f64] {
        let n = self.n;
        &mut self.values[1..=n + 1]
    }

    /// All n + 3 slots; physical slot p holds logical node p - 1.
    #[inline]
    pub fn slots(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn slots_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Minimum over interior slots.
    pub fn min_interior(&self) -> f64 {
        self.interior()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every interior slot is finite (ghosts are derived data).
    pub fn all_finite(&self) -> bool {
        self.interior().iter().all(|z| z.is_finite())
    }
}

impl Index<isize> for Field {
    type Output = f64;

    #[inline]
    fn index(&self, i: isize) -> &f64 {
        &self.values[self.slot(i)]
    }
}

impl IndexMut<isize> for Field {
    #[inline]
    fn index_mut(&mut self, i: isize) -> &mut f64 {
        let s = self.slot(i);
        &mut self.values[s]
    }
}

fn check_size(f: &Field, g: &Grid1D) {
    assert_eq!(
        f.n(),
        g.n(),
        "field on {} intervals used with a grid of {}",
        f.n(),
        g.n()
    );
}

/// Central first difference (f_{i+1} - f_{i-1}) / 2dx on interior nodes.
/// Output ghosts are zero; the caller decides what boundary data they want.
pub fn d1(f: &Field, g: &Grid1D) -> Field {
    check_size(f, g);
    let mut out = Field::zeros(g);
    let c = 0.5 / g.dx();
    let src = f.slots();
    let dst = out.slots_mut();
    for p in 1..=g.n() + 1 {
        dst[p] = c * (src[p + 1] - src[p - 1]);
    }
    out
}

/// Central second difference (f_{i+1} - 2 f_i + f_{i-1}) / dx^2 on interior
/// nodes, zero on output ghosts.
pub fn d2(f: &Field, g: &Grid1D) -> Field {
    check_size(f, g);
    let mut out = Field::zeros(g);
    let c = 1.0 / (g.dx() * g.dx());
    let src = f.slots();
    let dst = out.slots_mut();
    for p in 1..=g.n() + 1 {
        // Written as (a + b) - 2m so mirror-symmetric data stays bitwise
        // symmetric under x -> 1 - x.
        dst[p] = c * ((src[p + 1] + src[p - 1]) - 2.0 * src[p]);
    }
    out
}

/// Composite trapezoid rule of `map(f)` over the interior nodes.
pub fn trapezoid_map(f: &Field, g: &Grid1D, map: impl Fn(f64) -> f64) -> f64 {
    check_size(f, g);
    let vals = f.interior();
    let n = g.n();
    let mut sum = 0.5 * (map(vals[0]) + map(vals[n]));
    for &z in &vals[1..n] {
        sum += map(z);
    }
    sum * g.dx()
}

/// Trapezoid integral of `f` itself over [0, 1].
pub fn trapezoid(f: &Field, g: &Grid1D) -> f64 {
    trapezoid_map(f, g, |z| z)
}

/// Squared L2 norm by the trapezoid rule.
pub fn l2_sq(f: &Field, g: &Grid1D) -> f64 {
    trapezoid_map(f, g, |z| z * z)
}

/// Max-norm over interior nodes.
pub fn linf(f: &Field, g: &Grid1D) -> f64 {
    check_size(f, g);
    f.interior().iter().fold(0.0, |m, z| f64::max(m, z.abs()))
}

/// Squared H1 norm: ||f||^2 + ||d1 f||^2.
pub fn h1_sq(f: &Field, g: &Grid1D) -> f64 {
    l2_sq(f, g) + l2_sq(&d1(f, g), g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_too_coarse_grid() {
        assert!(matches!(
            Grid1D::new(3),
            Err(Error::GridTooCoarse { got: 3, min: 4 })
        ));
        assert!(Grid1D::new(4).is_ok());
    }

    #[test]
    fn nodes_and_ghosts_have_expected_coordinates() {
        let g = Grid1D::new(8).unwrap();
        assert_eq!(g.dx(), 0.125);
        assert_eq!(g.x(0), 0.0);
        assert_eq!(g.x(8), 1.0);
        assert_eq!(g.x(-1), -0.125);
        assert_eq!(g.x(9), 1.125);
        assert_eq!(g.node_count(), 9);
    }

    #[test]
    fn derivatives_annihilate_constants_exactly() {
        let g = Grid1D::new(32).unwrap();
        let f = Field::from_fn(&g, |_| 7.25);
        for i in 0..=32isize {
            assert_eq!(d1(&f, &g)[i], 0.0);
            assert_eq!(d2(&f, &g)[i], 0.0);
        }
    }

    #[test]
    fn d1_exact_on_affine_fields() {
        let g = Grid1D::new(64).unwrap();
        let f = Field::from_fn(&g, |x| 2.0 * x + 3.0);
        let df = d1(&f, &g);
        for i in 0..=64isize {
            assert!((df[i] - 2.0).abs() < 1e-12, "node {i}: {}", df[i]);
        }
        // Output ghosts are zeroed by convention.
        assert_eq!(df[-1], 0.0);
        assert_eq!(df[65], 0.0);
    }

    #[test]
    fn d2_exact_on_quadratics() {
        let g = Grid1D::new(64).unwrap();
        let f = Field::from_fn(&g, |x| 1.5 * x * x - x + 0.25);
        let ddf = d2(&f, &g);
        for i in 0..=64isize {
            assert!((ddf[i] - 3.0).abs() < 1e-9, "node {i}: {}", ddf[i]);
        }
    }

    #[test]
    fn d1_second_order_on_sine() {
        // Max-norm error of d1 on sin(2 pi x) shrinks by ~4x per mesh halving.
        let err = |n: usize| {
            let g = Grid1D::new(n).unwrap();
            let f = Field::from_fn(&g, |x| (2.0 * PI * x).sin());
            let df = d1(&f, &g);
            (0..=n as isize)
                .map(|i| (df[i] - 2.0 * PI * (2.0 * PI * g.x(i)).cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e0, e1) = (err(64), err(128));
        let ratio = e0 / e1;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn trapezoid_of_squared_sine_is_exactly_half() {
        let g = Grid1D::new(64).unwrap();
        let f = Field::from_fn(&g, |x| (PI * x).sin());
        assert!((l2_sq(&f, &g) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn linf_picks_largest_interior_magnitude() {
        let g = Grid1D::new(8).unwrap();
        let mut f = Field::zeros(&g);
        f[3] = -2.5;
        f[-1] = 9.0; // ghosts must not count
        assert_eq!(linf(&f, &g), 2.5);
    }

    #[test]
    fn h1_adds_gradient_energy() {
        let g = Grid1D::new(128).unwrap();
        let f = Field::from_fn(&g, |x| (PI * x).sin());
        // ||f||^2 = 1/2, ||f'||^2 = pi^2/2 up to quadrature error.
        let expected = 0.5 + 0.5 * PI * PI;
        assert!((h1_sq(&f, &g) - expected).abs() < 1e-2);
    }

    proptest! {
        #[test]
        fn derivatives_of_random_constants_vanish(c in -1e6f64..1e6) {
            let g = Grid1D::new(16).unwrap();
            let f = Field::from_fn(&g, |_| c);
            for i in 0..=16isize {
                prop_assert_eq!(d1(&f, &g)[i], 0.0);
                prop_assert_eq!(d2(&f, &g)[i], 0.0);
            }
        }

        #[test]
        fn l2_sq_is_quadratic_under_scaling(a in -100.0f64..100.0) {
            let g = Grid1D::new(16).unwrap();
            let f = Field::from_fn(&g, |x| (2.0 * PI * x).cos() + 0.3);
            let scaled = Field::from_fn(&g, |x| a * ((2.0 * PI * x).cos() + 0.3));
            let lhs = l2_sq(&scaled, &g);
            let rhs = a * a * l2_sq(&f, &g);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
    }
}
