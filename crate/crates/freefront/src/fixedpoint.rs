//! The outer Picard iteration: a guess for the non-diffusing species `u` over
//! a time window is mapped to a new `u` by solving the parabolic subproblem
//! for `(v, g, h)` with the guess frozen, then integrating the characteristic
//! ODEs along the resulting fronts. Iterating this map to its fixed point and
//! chaining windows to the horizon yields the full solution; per-window
//! contraction factors and a Lipschitz ledger are recorded as diagnostics.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{map_to_physical, map_to_reference, FrontState, ReferenceGrid};
use crate::interp::Pchip;
use crate::model::{self, ProblemSpec, SampleBox};
use crate::parabolic::{solve_subproblem, FrontPath, StepParams};
use crate::transport::{collect_level_points, integrate_lines, CharLine, Entry};

/// Default lattice resolution for the ledger's Lipschitz estimates.
pub const LIPSCHITZ_SAMPLES: usize = 64;

/// A time-indexed `u` representation over a window: one physical-coordinate
/// monotone interpolant per level, built on the characteristic-line
/// abscissae themselves so persistent kinks (for example at the initial
/// front positions) are carried exactly. Reference-grid fields are kept
/// alongside for output and diagnostics. Samples with zero extension
/// outside the moving domain and linear interpolation in time.
#[derive(Debug, Clone)]
pub struct UPath {
    pub times: Vec<f64>,
    pub fronts: Vec<FrontState>,
    pub fields: Vec<Vec<f64>>,
    interps: Vec<Pchip>,
}

impl UPath {
    /// Builds from per-level sorted line data `(xs, us)`.
    pub fn from_line_levels(
        times: Vec<f64>,
        fronts: Vec<FrontState>,
        levels: Vec<(Vec<f64>, Vec<f64>)>,
        grid: &ReferenceGrid,
    ) -> Self {
        let mut interps = Vec::with_capacity(levels.len());
        let mut fields = Vec::with_capacity(levels.len());
        for (k, (xs, us)) in levels.into_iter().enumerate() {
            let p = Pchip::new(xs, us);
            let n = grid.len();
            let mut field = vec![0.0; n];
            for j in 1..n - 1 {
                field[j] = p.eval(map_to_physical(&fronts[k], grid.y[j])).max(0.0);
            }
            fields.push(field);
            interps.push(p);
        }
        Self { times, fronts, fields, interps }
    }

    /// Constant-in-time extension of one level of line data (the paper-style
    /// initial guess for a window).
    pub fn constant(
        t0: f64,
        fs: FrontState,
        xs: Vec<f64>,
        us: Vec<f64>,
        grid: &ReferenceGrid,
    ) -> Self {
        Self::from_line_levels(vec![t0], vec![fs], vec![(xs, us)], grid)
    }

    /// The line abscissae and values at the final level, for carrying into
    /// the next window.
    pub fn carry(&self) -> (Vec<f64>, Vec<f64>) {
        let (xs, us) = self.interps.last().expect("nonempty path").data();
        (xs.to_vec(), us.to_vec())
    }

    fn sample_level(&self, k: usize, x: f64) -> f64 {
        let fs = &self.fronts[k];
        if x < fs.g || x > fs.h {
            0.0
        } else {
            self.interps[k].eval(x).max(0.0)
        }
    }

    /// `u(t, x)` with clamping in time to the covered range.
    pub fn sample(&self, t: f64, x: f64) -> f64 {
        let times = &self.times;
        if times.len() == 1 || t <= times[0] {
            return self.sample_level(0, x);
        }
        let last = times.len() - 1;
        if t >= times[last] {
            return self.sample_level(last, x);
        }
        let i = times.partition_point(|&tk| tk <= t) - 1;
        let frac = (t - times[i]) / (times[i + 1] - times[i]);
        let a = self.sample_level(i, x);
        let b = self.sample_level(i + 1, x);
        a + (b - a) * frac
    }
}

/// Time-interpolating sampler over a stored `v` path.
pub struct VPathSampler {
    times: Vec<f64>,
    fronts: Vec<FrontState>,
    interps: Vec<Pchip>,
}

impl VPathSampler {
    pub fn new(
        times: &[f64],
        fronts: &FrontPath,
        fields: &[Vec<f64>],
        grid: &ReferenceGrid,
    ) -> Self {
        Self {
            times: times.to_vec(),
            fronts: fronts.states.clone(),
            interps: fields.iter().map(|f| Pchip::new(grid.y.clone(), f.clone())).collect(),
        }
    }

    fn level(&self, k: usize, x: f64) -> f64 {
        match map_to_reference(&self.fronts[k], x) {
            None => 0.0,
            Some(y) => self.interps[k].eval(y),
        }
    }

    pub fn at(&self, t: f64, x: f64) -> f64 {
        let times = &self.times;
        if t <= times[0] {
            return self.level(0, x);
        }
        let last = times.len() - 1;
        if t >= times[last] {
            return self.level(last, x);
        }
        let i = times.partition_point(|&tk| tk <= t) - 1;
        let frac = (t - times[i]) / (times[i + 1] - times[i]);
        let a = self.level(i, x);
        let b = self.level(i + 1, x);
        a + (b - a) * frac
    }
}

/// State at the start of a window: fronts, the `u` line data (physical
/// abscissae with values, carried across windows), and `v` on the grid.
#[derive(Debug, Clone)]
pub struct WindowInit {
    pub fs: FrontState,
    pub xs: Vec<f64>,
    pub us: Vec<f64>,
    pub v0: Vec<f64>,
}

/// One application of the map: new iterate plus diagnostics.
#[derive(Debug, Clone)]
pub struct GammaIterate {
    pub index: usize,
    pub times: Vec<f64>,
    pub front_path: FrontPath,
    pub u_path: UPath,
    pub v_fields: Vec<Vec<f64>>,
    pub sup_delta: f64,
    pub clip_mass_v: f64,
    pub clip_mass_u: f64,
    pub hopf_warnings: usize,
    pub sigma_obs: f64,
    pub c2_obs: f64,
}

/// Applies the map once: parabolic solve with `u_guess` frozen, then the
/// characteristic sweep, then field rebuild per time level.
pub fn gamma_map(
    u_guess: &UPath,
    spec: &ProblemSpec,
    grid: &ReferenceGrid,
    window: (f64, f64),
    sp: &StepParams,
    init: &WindowInit,
    index: usize,
) -> Result<GammaIterate> {
    let sub = solve_subproblem(
        &|t, x| u_guess.sample(t, x),
        spec,
        window,
        sp,
        grid,
        &init.v0,
        init.fs,
    )?;
    let times = sub.times.clone();
    let n_levels = times.len();

    // Characteristic lines: the carried abscissae hold the window-initial u,
    // and fresh lines seeded at each front position realize the entry-time
    // initial condition on newly covered territory.
    let mut lines: Vec<CharLine> = Vec::new();
    for (&x, &u) in init.xs.iter().zip(&init.us) {
        lines.push(CharLine::new(x, Entry::Initial, u, n_levels));
    }
    for fs in sub.fronts.states.iter().skip(1) {
        lines.push(CharLine::new(fs.g, Entry::Left(fs.t), 0.0, n_levels));
        lines.push(CharLine::new(fs.h, Entry::Right(fs.t), 0.0, n_levels));
    }

    let v_sampler = VPathSampler::new(&times, &sub.fronts, &sub.v_fields, grid);
    let clip_mass_u =
        integrate_lines(&mut lines, &times, &|t, x| v_sampler.at(t, x), &spec.reactions)?;

    // Legitimate coverage gaps are bounded by the largest one-step front
    // displacement (new territory gets one seed per step), including gaps
    // inherited from faster earlier windows via the carried abscissae.
    let carry_gap = init
        .xs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let motion_gap = sub
        .fronts
        .states
        .windows(2)
        .map(|w| (w[0].g - w[1].g).max(w[1].h - w[0].h))
        .fold(carry_gap, f64::max);
    let nominal_of = |fs: &FrontState| fs.width() / (grid.len() - 1) as f64;
    let collect = |k: usize| {
        let fs = &sub.fronts.states[k];
        collect_level_points(&lines, k, fs, nominal_of(fs), motion_gap)
    };
    #[cfg(feature = "parallel")]
    let levels: Vec<(Vec<f64>, Vec<f64>)> =
        (0..n_levels).into_par_iter().map(collect).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let levels: Vec<(Vec<f64>, Vec<f64>)> =
        (0..n_levels).map(collect).collect::<Result<_>>()?;

    let u_path =
        UPath::from_line_levels(times.clone(), sub.fronts.states.clone(), levels, grid);

    // Sup-norm distance to the previous iterate, over all levels and nodes.
    let mut sup_delta = 0.0f64;
    for (k, &t) in times.iter().enumerate() {
        for (j, &y) in grid.y.iter().enumerate() {
            let x = map_to_physical(&u_path.fronts[k], y);
            let delta = (u_path.fields[k][j] - u_guess.sample(t, x)).abs();
            sup_delta = sup_delta.max(delta);
        }
    }

    Ok(GammaIterate {
        index,
        times,
        front_path: sub.fronts,
        u_path,
        v_fields: sub.v_fields,
        sup_delta,
        clip_mass_v: sub.clip_mass,
        clip_mass_u,
        hopf_warnings: sub.hopf_warnings,
        sigma_obs: sub.sigma_obs,
        c2_obs: sub.c2_obs,
    })
}

/// Outcome of the fixed-point iteration on one window.
#[derive(Debug)]
pub struct WindowResult {
    pub converged: bool,
    pub iterations: usize,
    pub contraction_factors: Vec<f64>,
    pub final_delta: f64,
    pub iterate: GammaIterate,
}

/// Per-window convergence metadata for the run report.
#[derive(Debug, Clone, Serialize)]
pub struct WindowRecord {
    pub t0: f64,
    pub t1: f64,
    pub converged: bool,
    pub iterations: usize,
    pub contraction_factors: Vec<f64>,
    pub final_delta: f64,
}

const FACTOR_NOISE_FLOOR: f64 = 100.0 * f64::EPSILON;

/// Iterates the map from the constant-in-time extension of the window's
/// initial `u` until `sup_delta <= tol_fp` or `max_iter` applications.
pub fn iterate_to_fixed_point(
    spec: &ProblemSpec,
    grid: &ReferenceGrid,
    window: (f64, f64),
    sp: &StepParams,
    tol_fp: f64,
    max_iter: usize,
    init: &WindowInit,
) -> Result<WindowResult> {
    let mut guess =
        UPath::constant(window.0, init.fs, init.xs.clone(), init.us.clone(), grid);
    let mut factors = Vec::new();
    let mut prev_delta: Option<f64> = None;
    let mut last: Option<GammaIterate> = None;

    for k in 1..=max_iter {
        let it = gamma_map(&guess, spec, grid, window, sp, init, k)?;
        if let Some(p) = prev_delta {
            if p > FACTOR_NOISE_FLOOR {
                factors.push(it.sup_delta / p);
            }
        }
        let delta = it.sup_delta;
        prev_delta = Some(delta);
        guess = it.u_path.clone();
        last = Some(it);
        if delta <= tol_fp {
            return Ok(WindowResult {
                converged: true,
                iterations: k,
                contraction_factors: factors,
                final_delta: delta,
                iterate: last.unwrap(),
            });
        }
    }
    Ok(WindowResult {
        converged: false,
        iterations: max_iter,
        contraction_factors: factors,
        final_delta: prev_delta.unwrap_or(f64::INFINITY),
        iterate: last.unwrap(),
    })
}

/// Window-length adaptation: halve on failure, grow 1.5x after two
/// consecutive fast windows, clamp to `[1e-6, remainder]`.
#[derive(Debug, Clone)]
pub struct WindowPolicy {
    pub current: f64,
    fast_streak: usize,
}

pub const WINDOW_FLOOR: f64 = 1e-6;
const FAST_ITERATIONS: usize = 4;

impl WindowPolicy {
    pub fn new(initial: f64) -> Self {
        Self { current: initial, fast_streak: 0 }
    }

    pub fn on_failure(&mut self) {
        self.current /= 2.0;
        self.fast_streak = 0;
    }

    pub fn on_success(&mut self, iterations: usize) {
        if iterations <= FAST_ITERATIONS {
            self.fast_streak += 1;
            if self.fast_streak >= 2 {
                self.current *= 1.5;
                self.fast_streak = 0;
            }
        } else {
            self.fast_streak = 0;
        }
    }

    pub fn next_window(&self, remainder: f64) -> f64 {
        self.current.clamp(WINDOW_FLOOR, remainder.max(WINDOW_FLOOR))
    }
}

/// The Step 2 constant ledger, assembled from model estimates and observed
/// run suprema. `m` is `None` when the observed front-speed floor vanishes.
#[derive(Debug, Clone, Serialize)]
pub struct LipschitzLedger {
    pub l0: f64,
    pub l1: f64,
    pub l1star: f64,
    pub sigma_est: f64,
    pub c1_est: f64,
    pub c2_est: f64,
    pub m: Option<f64>,
}

pub fn build_ledger(
    spec: &ProblemSpec,
    sigma_est: f64,
    c2_est: f64,
    lipschitz_samples: usize,
) -> LipschitzLedger {
    let a_cap = spec.init.max_u0() + 1.0;
    let b_cap = spec.init.max_v0() + 1.0;
    let bx = SampleBox { tau: 1.0, l: 2.0 * spec.init.h0, k1: a_cap, k2: b_cap };
    let (l1, l1star) = model::estimate_lipschitz(&spec.reactions, bx, lipschitz_samples);
    let (c1_est, _) = model::sup_abs(&spec.reactions, bx, 24);
    let m = if sigma_est > 0.0 {
        Some(2.0 * (spec.init.l0 + l1star + c1_est / sigma_est + c2_est * l1))
    } else {
        None
    };
    LipschitzLedger { l0: spec.init.l0, l1, l1star, sigma_est, c1_est, c2_est, m }
}

/// Full continuation run: window-by-window fixed-point solve to the horizon.
#[derive(Debug)]
pub struct ContinuationRun {
    pub times: Vec<f64>,
    pub fronts: FrontPath,
    pub u_fields: Vec<Vec<f64>>,
    pub v_fields: Vec<Vec<f64>>,
    pub windows: Vec<WindowRecord>,
    pub ledger: LipschitzLedger,
    pub clip_mass_u: f64,
    pub clip_mass_v: f64,
    pub hopf_warnings: usize,
}

/// Samples the initial-data arrays onto the reference grid.
pub fn initial_fields(spec: &ProblemSpec, grid: &ReferenceGrid) -> (FrontState, Vec<f64>, Vec<f64>) {
    let h0 = spec.init.h0;
    let fs = FrontState { t: 0.0, g: -h0, h: h0, gdot: 0.0, hdot: 0.0 };
    let m = spec.init.u0.len();
    let xs: Vec<f64> = (0..m).map(|i| -h0 + 2.0 * h0 * i as f64 / (m - 1) as f64).collect();
    let pu = Pchip::new(xs.clone(), spec.init.u0.clone());
    let pv = Pchip::new(xs, spec.init.v0.clone());
    let n = grid.len();
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    for j in 1..n - 1 {
        let x = h0 * grid.y[j];
        u[j] = pu.eval(x).max(0.0);
        v[j] = pv.eval(x).max(0.0);
    }
    (fs, u, v)
}

/// Window-initial state at t = 0: the line abscissae start as the grid node
/// images of the initial interval.
pub fn initial_window(spec: &ProblemSpec, grid: &ReferenceGrid) -> WindowInit {
    let (fs, u0, v0) = initial_fields(spec, grid);
    let xs: Vec<f64> = grid.y.iter().map(|&y| map_to_physical(&fs, y)).collect();
    WindowInit { fs, xs, us: u0, v0 }
}

/// Chains converged windows until `t_final`, re-basing the initial data at
/// each window end.
pub fn continue_solution(
    spec: &ProblemSpec,
    grid: &ReferenceGrid,
    sp: &StepParams,
    tol_fp: f64,
    first_window: f64,
    max_iter: usize,
) -> Result<ContinuationRun> {
    let mut init = initial_window(spec, grid);
    let fs0 = init.fs;
    let mut times = vec![0.0];
    let mut fronts = FrontPath::new(fs0);
    let mut u_fields = vec![init.us.clone()];
    let mut v_fields = vec![init.v0.clone()];
    let mut windows = Vec::new();
    let mut clip_mass_u = 0.0;
    let mut clip_mass_v = 0.0;
    let mut hopf_warnings = 0;
    let mut sigma_est = f64::INFINITY;
    let mut c2_est = 0.0f64;

    let mut policy = WindowPolicy::new(first_window.max(WINDOW_FLOOR));
    let mut t = 0.0;

    while t < spec.t_final - 1e-14 * (1.0 + spec.t_final) {
        let remainder = spec.t_final - t;
        let mut w = policy.next_window(remainder).min(remainder);
        // Snap window ends onto the global dt grid so stored time levels
        // line up across schemes and refinement levels.
        if w > sp.dt {
            w = ((w / sp.dt).round().max(1.0) * sp.dt).min(remainder);
        }
        let window = (t, t + w);
        let result = iterate_to_fixed_point(spec, grid, window, sp, tol_fp, max_iter, &init)?;
        windows.push(WindowRecord {
            t0: window.0,
            t1: window.1,
            converged: result.converged,
            iterations: result.iterations,
            contraction_factors: result.contraction_factors.clone(),
            final_delta: result.final_delta,
        });
        if !result.converged {
            policy.on_failure();
            if policy.current < WINDOW_FLOOR {
                return Err(Error::WindowUnderflow {
                    t,
                    window: policy.current,
                    floor: WINDOW_FLOOR,
                });
            }
            continue;
        }
        policy.on_success(result.iterations);
        let it = result.iterate;
        clip_mass_u += it.clip_mass_u;
        clip_mass_v += it.clip_mass_v;
        hopf_warnings += it.hopf_warnings;
        sigma_est = sigma_est.min(it.sigma_obs);
        c2_est = c2_est.max(it.c2_obs);
        for k in 1..it.times.len() {
            times.push(it.times[k]);
            fronts.states.push(it.front_path.states[k]);
            u_fields.push(it.u_path.fields[k].clone());
            v_fields.push(it.v_fields[k].clone());
        }
        t = *times.last().unwrap();
        let (cx, cu) = it.u_path.carry();
        init = WindowInit {
            fs: *fronts.last(),
            xs: cx,
            us: cu,
            v0: v_fields.last().unwrap().clone(),
        };
    }

    if !sigma_est.is_finite() {
        sigma_est = 0.0;
    }
    let ledger = build_ledger(spec, sigma_est, c2_est, LIPSCHITZ_SAMPLES);
    Ok(ContinuationRun {
        times,
        fronts,
        u_fields,
        v_fields,
        windows,
        ledger,
        clip_mass_u,
        clip_mass_v,
        hopf_warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_catalog, InitialData, PolyTerm, ReactionPair};
    use std::f64::consts::PI;

    fn cos_init(h0: f64, amp: f64) -> InitialData {
        InitialData::from_fns(
            h0,
            |x| amp * (PI * x / (2.0 * h0)).cos(),
            |x| amp * (PI * x / (2.0 * h0)).cos(),
            801,
        )
        .unwrap()
    }

    fn epidemic_spec(t_final: f64) -> ProblemSpec {
        ProblemSpec {
            reactions: builtin_catalog("epidemic", &Default::default()).unwrap(),
            d: 1.0,
            mu: 1.0,
            beta: 1.0,
            init: cos_init(1.0, 0.5),
            t_final,
        }
    }

    #[test]
    fn zero_f1_fixed_in_two_iterations() {
        // With f1 = 0 the map is constant: u stays at the zero-extended u0,
        // so the second application changes nothing.
        let mut spec = epidemic_spec(0.05);
        spec.reactions = ReactionPair::polynomial(
            vec![],
            vec![PolyTerm { pow_u: 0, pow_v: 1, coeff: -1.0 }],
        );
        let grid = ReferenceGrid::new(101);
        let sp = StepParams::default();
        let init = initial_window(&spec, &grid);
        let res =
            iterate_to_fixed_point(&spec, &grid, (0.0, 0.05), &sp, 1e-10, 10, &init).unwrap();
        assert!(res.converged);
        assert!(res.iterations <= 3, "took {} iterations", res.iterations);
    }

    #[test]
    fn u_independent_v_means_fronts_fixed_across_guesses() {
        // f2 independent of u: the parabolic stage ignores the guess.
        let mut spec = epidemic_spec(0.05);
        spec.reactions = ReactionPair::polynomial(
            vec![PolyTerm { pow_u: 0, pow_v: 1, coeff: 1.0 }],
            vec![PolyTerm { pow_u: 0, pow_v: 1, coeff: -1.0 }],
        );
        let grid = ReferenceGrid::new(101);
        let sp = StepParams::default();
        let init = initial_window(&spec, &grid);
        let fs = init.fs;
        let guess_a =
            UPath::constant(0.0, fs, init.xs.clone(), init.us.clone(), &grid);
        let guess_b =
            UPath::constant(0.0, fs, init.xs.clone(), vec![0.0; init.xs.len()], &grid);
        let it_a = gamma_map(&guess_a, &spec, &grid, (0.0, 0.05), &sp, &init, 1).unwrap();
        let it_b = gamma_map(&guess_b, &spec, &grid, (0.0, 0.05), &sp, &init, 1).unwrap();
        for (a, b) in it_a.front_path.states.iter().zip(&it_b.front_path.states) {
            assert_eq!(a.h, b.h);
            assert_eq!(a.g, b.g);
        }
    }

    #[test]
    fn contraction_on_epidemic_window() {
        let spec = epidemic_spec(0.05);
        let grid = ReferenceGrid::new(101);
        let sp = StepParams::default();
        let init = initial_window(&spec, &grid);
        let res =
            iterate_to_fixed_point(&spec, &grid, (0.0, 0.05), &sp, 1e-10, 30, &init).unwrap();
        assert!(res.converged, "final delta {}", res.final_delta);
        let mut f = res.contraction_factors.clone();
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(!f.is_empty());
        let median = f[f.len() / 2];
        assert!(median < 1.0 / 3.0, "median contraction factor {median}");
    }

    #[test]
    fn fixed_point_residual_small_after_convergence() {
        let spec = epidemic_spec(0.05);
        let grid = ReferenceGrid::new(101);
        let sp = StepParams::default();
        let init = initial_window(&spec, &grid);
        let tol = 1e-10;
        let res = iterate_to_fixed_point(&spec, &grid, (0.0, 0.05), &sp, tol, 30, &init).unwrap();
        assert!(res.converged);
        let extra = gamma_map(
            &res.iterate.u_path,
            &spec,
            &grid,
            (0.0, 0.05),
            &sp,
            &init,
            res.iterations + 1,
        )
        .unwrap();
        assert!(extra.sup_delta <= 10.0 * tol, "residual {}", extra.sup_delta);
    }

    #[test]
    fn uniqueness_proxy_two_guesses_agree() {
        let spec = epidemic_spec(0.05);
        let grid = ReferenceGrid::new(101);
        let sp = StepParams::default();
        let init = initial_window(&spec, &grid);
        let fs = init.fs;
        let tol = 1e-10;
        let window = (0.0, 0.05);

        // Route A: the standard constant extension.
        let res_a = iterate_to_fixed_point(&spec, &grid, window, &sp, tol, 30, &init).unwrap();
        // Route B: start from an admissible perturbed guess and iterate by hand.
        let perturbed: Vec<f64> = init.us.iter().map(|&u| (u * 0.5).max(0.0)).collect();
        let mut guess = UPath::constant(0.0, fs, init.xs.clone(), perturbed, &grid);
        let mut last = None;
        for k in 1..=30 {
            let it = gamma_map(&guess, &spec, &grid, window, &sp, &init, k).unwrap();
            let done = it.sup_delta <= tol;
            guess = it.u_path.clone();
            last = Some(it);
            if done {
                break;
            }
        }
        let res_b = last.unwrap();
        let mut worst = 0.0f64;
        for (k, &t) in res_b.times.iter().enumerate() {
            for (j, &y) in grid.y.iter().enumerate() {
                let x = map_to_physical(&res_b.u_path.fronts[k], y);
                worst = worst
                    .max((res_b.u_path.fields[k][j] - res_a.iterate.u_path.sample(t, x)).abs());
            }
        }
        assert!(worst <= 10.0 * tol, "fixed points differ by {worst}");
    }

    #[test]
    fn window_policy_examples() {
        let mut p = WindowPolicy::new(0.1);
        p.on_failure();
        assert_eq!(p.current, 0.05);
        p.on_success(3);
        p.on_success(4);
        assert!((p.current - 0.075).abs() < 1e-15);
        assert_eq!(p.next_window(0.02), 0.02);
    }

    #[test]
    fn ledger_arithmetic() {
        // M = 2(L0 + L1* + C1/sigma + C2 L1) with hand-picked entries.
        let l = LipschitzLedger {
            l0: 1.0,
            l1: 1.0,
            l1star: 0.0,
            sigma_est: 0.5,
            c1_est: 2.0,
            c2_est: 1.0,
            m: Some(2.0 * (1.0 + 0.0 + 2.0 / 0.5 + 1.0 * 1.0)),
        };
        assert_eq!(l.m, Some(12.0));
    }

    #[test]
    fn ledger_guard_when_fronts_locked() {
        let mut spec = epidemic_spec(0.1);
        spec.reactions = ReactionPair::zero();
        let ledger = build_ledger(&spec, 0.0, 0.0, 8);
        assert!(ledger.m.is_none());
    }

    #[test]
    fn horizon_zero_yields_initial_state_only() {
        let spec = epidemic_spec(0.0);
        let grid = ReferenceGrid::new(51);
        let run = continue_solution(&spec, &grid, &StepParams::default(), 1e-10, 0.05, 30)
            .unwrap();
        assert_eq!(run.times.len(), 1);
        assert_eq!(run.fronts.states.len(), 1);
    }

    #[test]
    fn epidemic_continuation_monotone_and_capped() {
        let spec = epidemic_spec(0.2);
        let grid = ReferenceGrid::new(101);
        let run = continue_solution(&spec, &grid, &StepParams::default(), 1e-9, 0.05, 30)
            .unwrap();
        assert!(run.fronts.is_monotone());
        assert_eq!(run.hopf_warnings, 0);
        let a_cap = spec.init.max_u0() + 1.0;
        let b_cap = spec.init.max_v0() + 1.0;
        for (u, v) in run.u_fields.iter().zip(&run.v_fields) {
            assert!(u.iter().all(|&z| (0.0..=a_cap).contains(&z)));
            assert!(v.iter().all(|&z| (0.0..=b_cap).contains(&z)));
        }
        assert!(run.ledger.m.is_some());
    }
}
