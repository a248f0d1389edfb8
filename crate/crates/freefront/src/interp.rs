//! Monotone piecewise-cubic (Fritsch-Carlson) interpolation on a sorted,
//! possibly nonuniform abscissa set. Used for cross-grid sampling between the
//! reference interval and physical space, and for rebuilding `u` from
//! characteristic lines. Monotone limiting keeps interpolated fields free of
//! overshoot, so positivity of the data is preserved.

/// Node slopes for a monotone cubic interpolant through `(xs[i], ys[i])`.
///
/// `xs` must be strictly increasing with at least two points.
pub fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert!(n >= 2 && n == ys.len());
    if n == 2 {
        let d = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return vec![d, d];
    }
    let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut m = vec![0.0; n];

    // Interior: weighted harmonic mean when the secants agree in sign.
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    m[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    // Three-point estimate, limited to keep the end interval monotone.
    let mut m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        m = 0.0;
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        m = 3.0 * d0;
    }
    m
}

/// Evaluates the monotone cubic interpolant at `x`. Outside `[xs[0], xs[n-1]]`
/// the nearest endpoint value is returned.
pub fn pchip_eval(xs: &[f64], ys: &[f64], slopes: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
        Ok(i) => return ys[i],
        Err(i) => i - 1,
    };
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[i] + h10 * h * slopes[i] + h01 * ys[i + 1] + h11 * h * slopes[i + 1]
}

/// One-shot interpolant for repeated evaluation over the same data.
#[derive(Debug, Clone)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    /// The underlying abscissae and values.
    pub fn data(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }
}

impl Pchip {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let slopes = pchip_slopes(&xs, &ys);
        Self { xs, ys, slopes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        pchip_eval(&self.xs, &self.ys, &self.slopes, x)
    }
}

/// Linear interpolation between two scalars.
pub fn lerp(a: f64, b: f64, s: f64) -> f64 {
    a + (b - a) * s
}
