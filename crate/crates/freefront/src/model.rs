//! Reaction pairs, initial data validation, and numerical Lipschitz
//! estimation. Reactions map `(t, x, u, v)` to a rate; the built-in catalog
//! covers the cooperative, epidemic, and West Nile families from the free
//! boundary literature plus user polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ReactionFn = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;

/// A pair of reaction terms `(f1, f2)` with identification metadata.
/// Evaluation is pure; pairs are immutable and shareable across threads.
#[derive(Clone)]
pub struct ReactionPair {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    f1: ReactionFn,
    f2: ReactionFn,
}

impl fmt::Debug for ReactionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReactionPair")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl ReactionPair {
    pub fn new(
        name: impl Into<String>,
        params: BTreeMap<String, f64>,
        f1: ReactionFn,
        f2: ReactionFn,
    ) -> Self {
        Self { name: name.into(), params, f1, f2 }
    }

    pub fn f1(&self, t: f64, x: f64, u: f64, v: f64) -> f64 {
        (self.f1)(t, x, u, v)
    }

    pub fn f2(&self, t: f64, x: f64, u: f64, v: f64) -> f64 {
        (self.f2)(t, x, u, v)
    }

    /// Evaluates both reactions, rejecting non-finite output with a
    /// diagnostic naming the offending point.
    pub fn eval(&self, t: f64, x: f64, u: f64, v: f64) -> Result<(f64, f64)> {
        let a = self.f1(t, x, u, v);
        let b = self.f2(t, x, u, v);
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFiniteReaction { t, x, u, v });
        }
        Ok((a, b))
    }

    /// Builds a pair from polynomial coefficient tables in `(u, v)`.
    pub fn polynomial(f1_terms: Vec<PolyTerm>, f2_terms: Vec<PolyTerm>) -> Self {
        let eval = |terms: Vec<PolyTerm>| -> ReactionFn {
            Arc::new(move |_t, _x, u: f64, v: f64| {
                terms
                    .iter()
                    .map(|m| m.coeff * u.powi(m.pow_u as i32) * v.powi(m.pow_v as i32))
                    .sum()
            })
        };
        Self {
            name: "custom-polynomial".into(),
            params: BTreeMap::new(),
            f1: eval(f1_terms),
            f2: eval(f2_terms),
        }
    }

    /// The identically-zero pair.
    pub fn zero() -> Self {
        Self::polynomial(Vec::new(), Vec::new())
    }
}

/// One monomial `coeff * u^pow_u * v^pow_v` of a custom polynomial reaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyTerm {
    pub pow_u: u32,
    pub pow_v: u32,
    pub coeff: f64,
}

fn get(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn require_positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Model(format!("parameter {name} must be > 0, got {value}")))
    }
}

/// Built-in model catalog. Known names: `cooperative`, `epidemic`,
/// `west-nile`. Custom polynomial pairs go through
/// [`ReactionPair::polynomial`] instead.
///
/// The epidemic recruitment `G` comes in two families selected by the `G`
/// parameter: `0` for `G(v) = gamma v` (default) and `1` for the saturating
/// `G(v) = gamma v / (1 + v)`, which additionally requires `gamma < a c / b`.
pub fn builtin_catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<ReactionPair> {
    match name {
        "cooperative" => {
            let a1 = require_positive("a1", get(params, "a1", 1.0))?;
            let a2 = require_positive("a2", get(params, "a2", 1.0))?;
            let b1 = require_positive("b1", get(params, "b1", 1.0))?;
            let b2 = require_positive("b2", get(params, "b2", 1.0))?;
            Ok(ReactionPair::new(
                "cooperative",
                params.clone(),
                Arc::new(move |_t, _x, u, v| b1 * v - a1 * u),
                Arc::new(move |_t, _x, u, v| b2 * u - a2 * v),
            ))
        }
        "epidemic" => {
            let a = require_positive("a", get(params, "a", 1.0))?;
            let b = require_positive("b", get(params, "b", 1.0))?;
            let c = require_positive("c", get(params, "c", 1.0))?;
            let gamma = require_positive("gamma", get(params, "gamma", 1.0))?;
            let saturating = get(params, "G", 0.0) != 0.0;
            if saturating && gamma >= a * c / b {
                return Err(Error::Model(format!(
                    "saturating G requires gamma < a*c/b = {}, got {gamma}",
                    a * c / b
                )));
            }
            let g_fun = move |v: f64| if saturating { gamma * v / (1.0 + v) } else { gamma * v };
            Ok(ReactionPair::new(
                "epidemic",
                params.clone(),
                Arc::new(move |_t, _x, u, v| g_fun(v) - a * u),
                Arc::new(move |_t, _x, u, v| b * u - c * v),
            ))
        }
        "west-nile" => {
            let r1 = require_positive("r1", get(params, "r1", 1.0))?;
            let r2 = require_positive("r2", get(params, "r2", 1.0))?;
            let a1 = require_positive("a1", get(params, "a1", 1.0))?;
            let a2 = require_positive("a2", get(params, "a2", 1.0))?;
            let b1 = require_positive("b1", get(params, "b1", 1.0))?;
            let c = require_positive("c", get(params, "c", 1.0))?;
            Ok(ReactionPair::new(
                "west-nile",
                params.clone(),
                Arc::new(move |_t, _x, u, v| r1 * (a1 - u) * v - b1 * u),
                Arc::new(move |_t, _x, u, v| r2 * (a2 - v) * u - c * v),
            ))
        }
        other => Err(Error::Model(format!("unknown model '{other}'"))),
    }
}

/// Sampling box `[0, tau] x [-l, l] x [0, k1] x [0, k2]` for Lipschitz and
/// supremum estimation.
#[derive(Debug, Clone, Copy)]
pub struct SampleBox {
    pub tau: f64,
    pub l: f64,
    pub k1: f64,
    pub k2: f64,
}

fn lattice(hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
}

fn lattice_sym(l: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64).collect()
}

/// Lattice estimate of the joint `(u, v)` Lipschitz constant `L1` and the
/// spatial Lipschitz constant `L1star` over the box, via adjacent difference
/// quotients. `n_samples >= 2` points per axis.
pub fn estimate_lipschitz(rp: &ReactionPair, bx: SampleBox, n_samples: usize) -> (f64, f64) {
    let n = n_samples.max(2);
    let ts = lattice(bx.tau, n);
    let xs = lattice_sym(bx.l, n);
    let us = lattice(bx.k1, n);
    let vs = lattice(bx.k2, n);
    let mut l1: f64 = 0.0;
    let mut l1star: f64 = 0.0;
    let fns: [&dyn Fn(f64, f64, f64, f64) -> f64; 2] =
        [&|t, x, u, v| rp.f1(t, x, u, v), &|t, x, u, v| rp.f2(t, x, u, v)];
    for f in fns {
        for &t in &ts {
            for &x in &xs {
                for iu in 0..n {
                    for iv in 0..n {
                        let base = f(t, x, us[iu], vs[iv]);
                        if iu + 1 < n {
                            let du = us[iu + 1] - us[iu];
                            if du > 0.0 {
                                l1 = l1.max((f(t, x, us[iu + 1], vs[iv]) - base).abs() / du);
                            }
                        }
                        if iv + 1 < n {
                            let dv = vs[iv + 1] - vs[iv];
                            if dv > 0.0 {
                                l1 = l1.max((f(t, x, us[iu], vs[iv + 1]) - base).abs() / dv);
                            }
                        }
                    }
                }
            }
        }
        for &t in &ts {
            for &u in &us {
                for &v in &vs {
                    for ix in 0..n - 1 {
                        let dx = xs[ix + 1] - xs[ix];
                        if dx > 0.0 {
                            l1star = l1star
                                .max((f(t, xs[ix + 1], u, v) - f(t, xs[ix], u, v)).abs() / dx);
                        }
                    }
                }
            }
        }
    }
    (l1, l1star)
}

/// Supremum of `|f1|` (and `|f2|`) over the sampling box, used for the
/// ledger constant and the speed caps.
pub fn sup_abs(rp: &ReactionPair, bx: SampleBox, n_samples: usize) -> (f64, f64) {
    let n = n_samples.max(2);
    let mut s1: f64 = 0.0;
    let mut s2: f64 = 0.0;
    for &t in &lattice(bx.tau, n) {
        for &x in &lattice_sym(bx.l, n) {
            for &u in &lattice(bx.k1, n) {
                for &v in &lattice(bx.k2, n) {
                    s1 = s1.max(rp.f1(t, x, u, v).abs());
                    s2 = s2.max(rp.f2(t, x, u, v).abs());
                }
            }
        }
    }
    (s1, s2)
}

/// Sampled check of the sign hypotheses `f1(t,x,0,v) >= 0` and
/// `f2(t,x,u,0) >= 0` on a lattice over the box.
pub fn check_sign_conditions(rp: &ReactionPair, bx: SampleBox, n_samples: usize) -> bool {
    let n = n_samples.max(2);
    for &t in &lattice(bx.tau, n) {
        for &x in &lattice_sym(bx.l, n) {
            for &s in &lattice(bx.k1.max(bx.k2), n) {
                if rp.f1(t, x, 0.0, s) < -1e-12 || rp.f2(t, x, s, 0.0) < -1e-12 {
                    return false;
                }
            }
        }
    }
    true
}

/// Sampled quasimonotonicity check: off-diagonal finite-difference partials
/// `df1/dv` and `df2/du` must be `>= -1e-10` on the lattice.
pub fn check_quasimonotone(rp: &ReactionPair, bx: SampleBox, n_samples: usize) -> bool {
    let n = n_samples.max(2);
    let eps = 1e-6 * (1.0 + bx.k1.max(bx.k2));
    for &u in &lattice(bx.k1, n) {
        for &v in &lattice(bx.k2, n) {
            let d1 = (rp.f1(0.0, 0.0, u, v + eps) - rp.f1(0.0, 0.0, u, v)) / eps;
            let d2 = (rp.f2(0.0, 0.0, u + eps, v) - rp.f2(0.0, 0.0, u, v)) / eps;
            if d1 < -1e-10 || d2 < -1e-10 {
                return false;
            }
        }
    }
    true
}

/// Sampled autonomy check: the reactions may not depend on `(t, x)`.
pub fn check_autonomous(rp: &ReactionPair, bx: SampleBox, n_samples: usize) -> bool {
    let n = n_samples.max(2);
    for &u in &lattice(bx.k1, n) {
        for &v in &lattice(bx.k2, n) {
            let r1 = rp.f1(0.0, 0.0, u, v);
            let r2 = rp.f2(0.0, 0.0, u, v);
            for &t in &lattice(bx.tau, 3) {
                for &x in &lattice_sym(bx.l, 3) {
                    if (rp.f1(t, x, u, v) - r1).abs() > 1e-12 * (1.0 + r1.abs())
                        || (rp.f2(t, x, u, v) - r2).abs() > 1e-12 * (1.0 + r2.abs())
                    {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Initial data sampled uniformly on `[-h0, h0]`.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub h0: f64,
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    /// Lipschitz constant of `u0`, from adjacent difference quotients.
    pub l0: f64,
}

impl InitialData {
    /// Samples closures at `n` uniform points (endpoints included).
    pub fn from_fns(
        h0: f64,
        u0: impl Fn(f64) -> f64,
        v0: impl Fn(f64) -> f64,
        n: usize,
    ) -> Result<Self> {
        if !(h0 > 0.0 && h0.is_finite()) {
            return Err(Error::InitialData(format!("h0 must be > 0, got {h0}")));
        }
        if n < 3 {
            return Err(Error::InitialData("need at least 3 samples".into()));
        }
        let xs: Vec<f64> =
            (0..n).map(|i| -h0 + 2.0 * h0 * i as f64 / (n - 1) as f64).collect();
        let u: Vec<f64> = xs.iter().map(|&x| u0(x)).collect();
        let v: Vec<f64> = xs.iter().map(|&x| v0(x)).collect();
        Self::from_samples(h0, u, v)
    }

    /// Takes already-sampled uniform arrays (same length, endpoints included).
    pub fn from_samples(h0: f64, u0: Vec<f64>, v0: Vec<f64>) -> Result<Self> {
        if u0.len() != v0.len() || u0.len() < 3 {
            return Err(Error::InitialData("u0/v0 must have equal length >= 3".into()));
        }
        let dx = 2.0 * h0 / (u0.len() - 1) as f64;
        let l0 = u0
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / dx)
            .fold(0.0f64, f64::max);
        Ok(Self { h0, u0, v0, l0 })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.h0 / (self.u0.len() - 1) as f64
    }

    pub fn max_u0(&self) -> f64 {
        self.u0.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_v0(&self) -> f64 {
        self.v0.iter().cloned().fold(0.0, f64::max)
    }

    /// Second-order one-sided slope of `v0` at the right endpoint `h0`.
    pub fn v0_slope_right(&self) -> f64 {
        let n = self.v0.len();
        let dx = self.dx();
        (3.0 * self.v0[n - 1] - 4.0 * self.v0[n - 2] + self.v0[n - 3]) / (2.0 * dx)
    }

    /// Second-order one-sided slope of `v0` at the left endpoint `-h0`.
    pub fn v0_slope_left(&self) -> f64 {
        let dx = self.dx();
        (-3.0 * self.v0[0] + 4.0 * self.v0[1] - self.v0[2]) / (2.0 * dx)
    }

    /// Minimum of the sampled `v0'` over `[0, h0]` (right half), by adjacent
    /// difference quotients. Enters the right front-speed cap.
    pub fn min_v0_slope_right_half(&self) -> f64 {
        let n = self.v0.len();
        let dx = self.dx();
        let mid = (n - 1) / 2;
        (mid..n - 1)
            .map(|i| (self.v0[i + 1] - self.v0[i]) / dx)
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximum of the sampled `v0'` over `[-h0, 0]` (left half).
    pub fn max_v0_slope_left_half(&self) -> f64 {
        let n = self.v0.len();
        let dx = self.dx();
        let mid = (n - 1) / 2;
        (0..=mid.min(n - 2))
            .map(|i| (self.v0[i + 1] - self.v0[i]) / dx)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Outcome of one initial-data invariant check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Initial-data validation report; any failed check rejects the spec.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub l0: f64,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

const ENDPOINT_TOL: f64 = 1e-12;

pub fn validate_initial_data(init: &InitialData) -> ValidationReport {
    let n = init.u0.len();
    let mut checks = Vec::new();
    let scale = 1.0 + init.max_u0().max(init.max_v0());

    let endpoint_ok = [init.u0[0], init.u0[n - 1], init.v0[0], init.v0[n - 1]]
        .iter()
        .all(|e| e.abs() <= ENDPOINT_TOL * scale);
    checks.push(Check {
        name: "endpoint-zeros".into(),
        pass: endpoint_ok,
        detail: format!(
            "u0(+-h0)=({:.3e},{:.3e}), v0(+-h0)=({:.3e},{:.3e})",
            init.u0[0],
            init.u0[n - 1],
            init.v0[0],
            init.v0[n - 1]
        ),
    });

    let interior_ok = (1..n - 1).all(|i| init.u0[i] > 0.0 && init.v0[i] > 0.0);
    checks.push(Check {
        name: "interior-positivity".into(),
        pass: interior_ok,
        detail: "u0 > 0 and v0 > 0 at interior samples".into(),
    });

    let sr = init.v0_slope_right();
    let sl = init.v0_slope_left();
    // A vanishing true slope shows up in the stencil as O(dx^2); requiring
    // magnitude above dx keeps genuinely sloped data while rejecting
    // tangency at the boundary.
    let slope_tol = init.dx() * scale;
    checks.push(Check {
        name: "boundary-slopes".into(),
        pass: sr < -slope_tol && sl > slope_tol,
        detail: format!(
            "v0'(h0)={sr:.6e} (need < -{slope_tol:.1e}), v0'(-h0)={sl:.6e} (need > {slope_tol:.1e})"
        ),
    });

    ValidationReport { checks, l0: init.l0 }
}

/// Full problem description: reactions, diffusivity, Stefan coefficients,
/// initial data, and the time horizon.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub reactions: ReactionPair,
    pub d: f64,
    pub mu: f64,
    pub beta: f64,
    pub init: InitialData,
    pub t_final: f64,
}

impl ProblemSpec {
    /// Validates positivity constraints and the initial-data invariants.
    pub fn validate(&self) -> Result<ValidationReport> {
        for (name, v) in [("d", self.d), ("mu", self.mu), ("beta", self.beta)] {
            require_positive(name, v)?;
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Model(format!("t_final must be finite >= 0, got {}", self.t_final)));
        }
        let report = validate_initial_data(&self.init);
        if !report.ok() {
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str())
                .collect();
            return Err(Error::InitialData(format!("failed checks: {}", failed.join(", "))));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn west_nile_origin_is_equilibrium() {
        let rp = builtin_catalog("west-nile", &BTreeMap::new()).unwrap();
        let (f1, f2) = rp.eval(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!((f1, f2), (0.0, 0.0));
    }

    #[test]
    fn epidemic_equilibrium_at_one() {
        let rp = builtin_catalog("epidemic", &params(&[("a", 1.0), ("b", 1.0), ("c", 1.0)]))
            .unwrap();
        let (f1, f2) = rp.eval(0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!((f1, f2), (0.0, 0.0));
    }

    #[test]
    fn logistic_pair_direct_arithmetic() {
        let rp = ReactionPair::polynomial(
            vec![
                PolyTerm { pow_u: 1, pow_v: 0, coeff: 1.0 },
                PolyTerm { pow_u: 2, pow_v: 0, coeff: -1.0 },
            ],
            vec![
                PolyTerm { pow_u: 0, pow_v: 1, coeff: 1.0 },
                PolyTerm { pow_u: 0, pow_v: 2, coeff: -1.0 },
            ],
        );
        let (f1, f2) = rp.eval(0.0, 0.0, 0.5, 0.25).unwrap();
        assert_abs_diff_eq!(f1, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(f2, 0.1875, epsilon = 1e-15);
    }

    #[test]
    fn lipschitz_constant_map_is_zero() {
        let rp = ReactionPair::zero();
        let (l1, l1s) =
            estimate_lipschitz(&rp, SampleBox { tau: 1.0, l: 1.0, k1: 1.0, k2: 1.0 }, 8);
        assert_eq!((l1, l1s), (0.0, 0.0));
    }

    #[test]
    fn lipschitz_linear_exact() {
        let rp = ReactionPair::new(
            "linear",
            BTreeMap::new(),
            Arc::new(|_, _, u, _| -u),
            Arc::new(|_, _, _, v| -v),
        );
        let (l1, l1s) =
            estimate_lipschitz(&rp, SampleBox { tau: 1.0, l: 2.0, k1: 2.0, k2: 2.0 }, 16);
        assert_abs_diff_eq!(l1, 1.0, epsilon = 1e-12);
        assert_eq!(l1s, 0.0);
    }

    #[test]
    fn lipschitz_epidemic_matches_analytic_sup() {
        // a = b = c = 1, linear G: every partial has magnitude exactly 1
        // over the box, so the analytic joint Lipschitz constant is 1.
        let rp = builtin_catalog("epidemic", &BTreeMap::new()).unwrap();
        let (l1, _) =
            estimate_lipschitz(&rp, SampleBox { tau: 1.0, l: 2.0, k1: 2.0, k2: 2.0 }, 16);
        assert_abs_diff_eq!(l1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sign_conditions_hold_for_builtins() {
        let bx = SampleBox { tau: 1.0, l: 2.0, k1: 2.0, k2: 2.0 };
        for name in ["cooperative", "epidemic", "west-nile"] {
            let rp = builtin_catalog(name, &BTreeMap::new()).unwrap();
            assert!(check_sign_conditions(&rp, bx, 16), "{name}");
        }
    }

    #[test]
    fn cooperative_is_quasimonotone() {
        let rp = builtin_catalog("cooperative", &BTreeMap::new()).unwrap();
        assert!(check_quasimonotone(&rp, SampleBox { tau: 1.0, l: 1.0, k1: 2.0, k2: 2.0 }, 16));
    }

    #[test]
    fn west_nile_not_quasimonotone_above_a1() {
        let rp = builtin_catalog("west-nile", &BTreeMap::new()).unwrap();
        assert!(!check_quasimonotone(&rp, SampleBox { tau: 1.0, l: 1.0, k1: 3.0, k2: 3.0 }, 16));
    }

    #[test]
    fn unknown_model_rejected() {
        assert!(builtin_catalog("nope", &BTreeMap::new()).is_err());
        assert!(builtin_catalog("epidemic", &params(&[("a", -1.0)])).is_err());
    }

    #[test]
    fn cosine_initial_data_accepted() {
        for amp in [0.5, 1.0, 3.0] {
            for h0 in [0.5, 1.0, 2.0] {
                let init = InitialData::from_fns(
                    h0,
                    |x| amp * (PI * x / (2.0 * h0)).cos(),
                    |x| amp * (PI * x / (2.0 * h0)).cos(),
                    801,
                )
                .unwrap();
                let report = validate_initial_data(&init);
                assert!(report.ok(), "amp={amp} h0={h0}: {:?}", report.checks);
            }
        }
        // L0 oracle: sup |u0'| = amp * pi / (2 h0); here amp = h0 = 1.
        let init = InitialData::from_fns(
            1.0,
            |x| (PI * x / 2.0).cos(),
            |x| (PI * x / 2.0).cos(),
            1601,
        )
        .unwrap();
        assert_abs_diff_eq!(init.l0, PI / 2.0, epsilon = 1e-3);
    }

    #[test]
    fn parabola_accepted_quartic_rejected() {
        let good = InitialData::from_fns(1.0, |x| 1.0 - x * x, |x| 1.0 - x * x, 401).unwrap();
        assert!(validate_initial_data(&good).ok());
        assert_abs_diff_eq!(good.v0_slope_right(), -2.0, epsilon = 1e-4);

        let bad = InitialData::from_fns(
            1.0,
            |x| 1.0 - x * x,
            |x| (1.0 - x * x) * (1.0 - x * x),
            401,
        )
        .unwrap();
        assert!(!validate_initial_data(&bad).ok());
    }
}
