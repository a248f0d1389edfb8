//! Front-fixing geometry: the moving physical interval `[g(t), h(t)]` is
//! mapped onto the fixed reference interval `[-1, 1]`. Fields are stored on a
//! uniform reference grid; the stretch coefficients `xi` and `zeta` carry the
//! front motion into the transformed parabolic equation.

use serde::{Deserialize, Serialize};

use crate::interp::{lerp, Pchip};

/// Positions and velocities of the two free boundaries at one time level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontState {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    pub gdot: f64,
    pub hdot: f64,
}

impl FrontState {
    pub fn width(&self) -> f64 {
        self.h - self.g
    }

    /// Linear interpolation between two stored states, `s` in [0, 1].
    pub fn interp(a: &FrontState, b: &FrontState, s: f64) -> FrontState {
        FrontState {
            t: lerp(a.t, b.t, s),
            g: lerp(a.g, b.g, s),
            h: lerp(a.h, b.h, s),
            gdot: lerp(a.gdot, b.gdot, s),
            hdot: lerp(a.hdot, b.hdot, s),
        }
    }
}

/// Uniform grid on the reference interval `[-1, 1]`, endpoints included.
#[derive(Debug, Clone)]
pub struct ReferenceGrid {
    pub y: Vec<f64>,
    pub dy: f64,
}

impl ReferenceGrid {
    /// `n` total nodes (endpoints included), `n >= 3`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 3, "reference grid needs at least 3 nodes");
        let dy = 2.0 / (n - 1) as f64;
        let mut y: Vec<f64> = (0..n).map(|j| -1.0 + j as f64 * dy).collect();
        y[0] = -1.0;
        y[n - 1] = 1.0;
        Self { y, dy }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// `x = ((h - g) y + h + g) / 2`; maps -1 to `g` and 1 to `h` exactly.
pub fn map_to_physical(fs: &FrontState, y: f64) -> f64 {
    if y == -1.0 {
        return fs.g;
    }
    if y == 1.0 {
        return fs.h;
    }
    0.5 * ((fs.h - fs.g) * y + fs.h + fs.g)
}

/// Inverse of [`map_to_physical`]; `None` when `x` lies outside `[g, h]`
/// (the caller decides zero-extension).
pub fn map_to_reference(fs: &FrontState, x: f64) -> Option<f64> {
    if x < fs.g || x > fs.h {
        return None;
    }
    if x == fs.g {
        return Some(-1.0);
    }
    if x == fs.h {
        return Some(1.0);
    }
    Some((2.0 * x - fs.g - fs.h) / (fs.h - fs.g))
}

/// Stretch coefficients of the front-fixed equation:
/// `xi = 2 / (h - g)` and `zeta = (h' + g')/(h - g) + (h' - g')/(h - g) * y`.
pub fn stretch_coeffs(fs: &FrontState, y: f64) -> (f64, f64) {
    let w = fs.width();
    let xi = 2.0 / w;
    let zeta = (fs.hdot + fs.gdot) / w + (fs.hdot - fs.gdot) / w * y;
    (xi, zeta)
}

/// Samples a reference-grid field at a physical position, with zero extension
/// outside the moving domain. Monotone cubic interpolation between nodes.
pub fn sample_field(values: &[f64], grid: &ReferenceGrid, fs: &FrontState, x: f64) -> f64 {
    match map_to_reference(fs, x) {
        None => 0.0,
        Some(y) => sample_field_ref(values, grid, y),
    }
}

/// Samples a reference-grid field at a reference coordinate `y` in [-1, 1].
pub fn sample_field_ref(values: &[f64], grid: &ReferenceGrid, y: f64) -> f64 {
    debug_assert_eq!(values.len(), grid.len());
    let p = Pchip::new(grid.y.clone(), values.to_vec());
    p.eval(y)
}

/// Reusable sampler for many evaluations against one field/front pair.
pub struct FieldSampler<'a> {
    fs: &'a FrontState,
    interp: Pchip,
}

impl<'a> FieldSampler<'a> {
    pub fn new(values: &[f64], grid: &ReferenceGrid, fs: &'a FrontState) -> Self {
        Self {
            fs,
            interp: Pchip::new(grid.y.clone(), values.to_vec()),
        }
    }

    pub fn at_physical(&self, x: f64) -> f64 {
        match map_to_reference(self.fs, x) {
            None => 0.0,
            Some(y) => self.interp.eval(y),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn fs(g: f64, h: f64) -> FrontState {
        FrontState { t: 0.0, g, h, gdot: 0.0, hdot: 0.0 }
    }

    #[test]
    fn physical_map_examples() {
        let s = fs(-1.0, 1.0);
        assert_eq!(map_to_physical(&s, 0.0), 0.0);
        assert_eq!(map_to_physical(&s, 1.0), 1.0);
        let s = fs(-2.0, 4.0);
        assert_abs_diff_eq!(map_to_physical(&s, 0.5), 2.5, epsilon = 1e-14);
    }

    #[test]
    fn reference_map_examples() {
        let s = fs(-1.0, 1.0);
        assert_eq!(map_to_reference(&s, 0.0), Some(0.0));
        let s = fs(-2.0, 4.0);
        assert_abs_diff_eq!(map_to_reference(&s, 2.5).unwrap(), 0.5, epsilon = 1e-14);
        let s = fs(0.0, 2.0);
        assert_eq!(map_to_reference(&s, 3.0), None);
    }

    #[test]
    fn roundtrip_random_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let g: f64 = rng.gen_range(-5.0..0.0);
            let h: f64 = g + rng.gen_range(0.1..8.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            let s = fs(g, h);
            let x = map_to_physical(&s, y);
            let back = map_to_reference(&s, x).expect("inside the domain");
            assert!((back - y).abs() <= 1e-13 * (1.0 + y.abs()), "roundtrip {y} -> {back}");
        }
    }

    #[test]
    fn stretch_coeff_examples() {
        let s = FrontState { t: 0.0, g: -1.0, h: 1.0, gdot: 0.0, hdot: 0.0 };
        let (xi, zeta) = stretch_coeffs(&s, 0.3);
        assert_eq!(xi, 1.0);
        assert_eq!(zeta, 0.0);

        let s = FrontState { t: 0.0, g: -1.0, h: 3.0, gdot: -1.0, hdot: 1.0 };
        let (xi, zeta) = stretch_coeffs(&s, 0.5);
        assert_abs_diff_eq!(xi, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(zeta, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn xi_width_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g: f64 = rng.gen_range(-3.0..0.0);
            let h: f64 = g + rng.gen_range(0.05..6.0);
            let s = fs(g, h);
            let (xi, _) = stretch_coeffs(&s, 0.0);
            assert_abs_diff_eq!(xi * s.width(), 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn sample_field_examples() {
        let grid = ReferenceGrid::new(101);
        let s = fs(-1.0, 1.0);
        let ones = vec![1.0; grid.len()];
        assert_abs_diff_eq!(sample_field(&ones, &grid, &s, 0.0), 1.0, epsilon = 1e-14);
        assert_eq!(sample_field(&ones, &grid, &s, 1.1), 0.0);

        let quad: Vec<f64> = grid.y.iter().map(|y| y * y).collect();
        assert_abs_diff_eq!(sample_field(&quad, &grid, &s, 0.3), 0.09, epsilon = 1e-6);
    }

    #[test]
    fn chain_rule_derivative_order() {
        // dv/dx via xi * dz/dy should converge at second order in dy.
        let exact = |x: f64| (1.5 * x).cos() * 1.5; // v = sin(1.5 x)
        let mut errs = Vec::new();
        for &n in &[51usize, 101, 201] {
            let grid = ReferenceGrid::new(n);
            let s = fs(-0.8, 1.2);
            let z: Vec<f64> = grid
                .y
                .iter()
                .map(|&y| (1.5 * map_to_physical(&s, y)).sin())
                .collect();
            let (xi, _) = stretch_coeffs(&s, 0.0);
            let mut worst: f64 = 0.0;
            for j in 1..n - 1 {
                let dz = (z[j + 1] - z[j - 1]) / (2.0 * grid.dy);
                let x = map_to_physical(&s, grid.y[j]);
                worst = worst.max((xi * dz - exact(x)).abs());
            }
            errs.push(worst);
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!(order1 >= 1.8 && order2 >= 1.8, "orders {order1}, {order2}");
    }
}
