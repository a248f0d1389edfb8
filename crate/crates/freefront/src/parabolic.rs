//! Front-fixed parabolic stepping: advances the diffusing species `v` and the
//! two fronts over a time window, for a frozen `u`. In reference coordinates
//! the equation reads `z_t = d xi^2 z_yy + zeta z_y + f2(t, x(t,y), u, z)`
//! with homogeneous Dirichlet rows at `y = +-1`; the fronts move with the
//! one-sided boundary fluxes through the Stefan conditions.

use crate::error::{Error, Result};
use crate::grid::{map_to_physical, stretch_coeffs, FrontState, ReferenceGrid};
use crate::model::{ProblemSpec, ReactionPair};

/// Discrete `(u, v)` samples on the reference grid at one time level.
#[derive(Debug, Clone)]
pub struct FieldPair {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Stepping knobs shared by both schemes.
#[derive(Debug, Clone, Copy)]
pub struct StepParams {
    pub dt: f64,
    /// Implicitness weight in [0.5, 1]; 1 = implicit Euler, 0.5 = Crank-Nicolson.
    pub theta: f64,
    /// One-sided boundary stencil order, 1 or 2.
    pub flux_order: usize,
    /// Freeze both fronts (diagnostic runs against fixed-domain oracles).
    pub lock_fronts: bool,
}

impl Default for StepParams {
    fn default() -> Self {
        Self { dt: 1e-3, theta: 1.0, flux_order: 2, lock_fronts: false }
    }
}

impl StepParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(0.5..=1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta must be in [0.5, 1], got {}", self.theta)));
        }
        if self.flux_order != 1 && self.flux_order != 2 {
            return Err(Error::Config(format!("flux_order must be 1 or 2, got {}", self.flux_order)));
        }
        Ok(())
    }
}

/// Time series of front states with strictly increasing times.
#[derive(Debug, Clone, Default)]
pub struct FrontPath {
    pub states: Vec<FrontState>,
}

impl FrontPath {
    pub fn new(initial: FrontState) -> Self {
        Self { states: vec![initial] }
    }

    pub fn last(&self) -> &FrontState {
        self.states.last().expect("non-empty front path")
    }

    pub fn first(&self) -> &FrontState {
        self.states.first().expect("non-empty front path")
    }

    /// Linear-in-time interpolation of the front state at `t` (clamped to the
    /// covered range).
    pub fn at(&self, t: f64) -> FrontState {
        let s = &self.states;
        if t <= s[0].t {
            return s[0];
        }
        if t >= s[s.len() - 1].t {
            return s[s.len() - 1];
        }
        let i = s.partition_point(|fs| fs.t <= t) - 1;
        let frac = (t - s[i].t) / (s[i + 1].t - s[i].t);
        FrontState::interp(&s[i], &s[i + 1], frac)
    }

    /// `h` nondecreasing and `g` nonincreasing over the stored levels.
    pub fn is_monotone(&self) -> bool {
        self.states
            .windows(2)
            .all(|w| w[1].h >= w[0].h - 1e-14 && w[1].g <= w[0].g + 1e-14)
    }
}

/// Thomas solve of a tridiagonal system; `a` sub-, `b` main, `c`
/// super-diagonal, `d` the right-hand side (overwritten with the solution).
pub fn tdma(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64]) -> Result<()> {
    let n = d.len();
    let mut cp = vec![0.0; n];
    let mut denom = b[0];
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::WindowRejected {
            t0: 0.0,
            t1: 0.0,
            reason: "singular tridiagonal system".into(),
        });
    }
    cp[0] = c[0] / denom;
    d[0] /= denom;
    for i in 1..n {
        denom = b[i] - a[i] * cp[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::WindowRejected {
                t0: 0.0,
                t1: 0.0,
                reason: "singular tridiagonal system".into(),
            });
        }
        if i < n - 1 {
            cp[i] = c[i] / denom;
        }
        d[i] = (d[i] - a[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= cp[i] * d[i + 1];
    }
    Ok(())
}

/// Physical-space one-sided boundary derivatives `v_x(t, g)` and `v_x(t, h)`
/// via `v_x = xi * z_y` with a `flux_order`-accurate stencil.
pub fn boundary_flux(
    v: &[f64],
    grid: &ReferenceGrid,
    fs: &FrontState,
    sp: &StepParams,
) -> (f64, f64) {
    let n = v.len();
    let dy = grid.dy;
    let (xi, _) = stretch_coeffs(fs, 0.0);
    let (zy_left, zy_right) = if sp.flux_order == 1 {
        ((v[1] - v[0]) / dy, (v[n - 1] - v[n - 2]) / dy)
    } else {
        (
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dy),
            (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dy),
        )
    };
    (xi * zy_left, xi * zy_right)
}

/// Stefan velocities from boundary fluxes: `g' = -mu v_x(g)`, `h' = -beta v_x(h)`.
pub fn front_velocities(flux: (f64, f64), mu: f64, beta: f64) -> (f64, f64) {
    (-mu * flux.0, -beta * flux.1)
}

/// Explicit front advance by `dt` with the given fluxes (the predictor half
/// of the two-stage update; the corrector re-advances with averaged fluxes).
pub fn advance_fronts(
    fs: &FrontState,
    flux: (f64, f64),
    spec: &ProblemSpec,
    dt: f64,
) -> FrontState {
    let (gdot, hdot) = front_velocities(flux, spec.mu, spec.beta);
    FrontState {
        t: fs.t + dt,
        g: fs.g + dt * gdot,
        h: fs.h + dt * hdot,
        gdot,
        hdot,
    }
}

/// One theta-weighted implicit step of the transformed equation. The
/// diffusion/advection part is treated with weight `theta` on the new level
/// (coefficients from `fs_new`) and `1 - theta` on the old; the reaction is
/// evaluated explicitly at the old state. Negative output values are clipped
/// at zero and the clipped physical mass is returned alongside.
#[allow(clippy::too_many_arguments)]
pub fn v_step(
    v_old: &[f64],
    grid: &ReferenceGrid,
    fs_old: &FrontState,
    fs_new: &FrontState,
    u_at: &dyn Fn(f64, f64) -> f64,
    rp: &ReactionPair,
    sp: &StepParams,
    dt: f64,
    d: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = v_old.len();
    let dy = grid.dy;
    let theta = sp.theta;
    let m = n - 2; // interior unknowns

    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut rhs = vec![0.0; m];

    let (xi_o, _) = stretch_coeffs(fs_old, 0.0);
    let (xi_n, _) = stretch_coeffs(fs_new, 0.0);
    let diff_o = d * xi_o * xi_o / (dy * dy);
    let diff_n = d * xi_n * xi_n / (dy * dy);

    for j in 1..n - 1 {
        let y = grid.y[j];
        let (_, zeta_o) = stretch_coeffs(fs_old, y);
        let (_, zeta_n) = stretch_coeffs(fs_new, y);
        let adv_o = zeta_o / (2.0 * dy);
        let adv_n = zeta_n / (2.0 * dy);

        // Explicit part at the old level.
        let lap = v_old[j + 1] - 2.0 * v_old[j] + v_old[j - 1];
        let grad = v_old[j + 1] - v_old[j - 1];
        let x_o = map_to_physical(fs_old, y);
        let u_val = u_at(fs_old.t, x_o);
        let (_, f2) = rp.eval(fs_old.t, x_o, u_val.max(0.0), v_old[j].max(0.0))?;
        rhs[j - 1] = v_old[j]
            + (1.0 - theta) * dt * (diff_o * lap + adv_o * grad)
            + dt * f2;

        // Implicit part at the new level.
        let k = j - 1;
        sub[k] = -theta * dt * (diff_n - adv_n);
        diag[k] = 1.0 + 2.0 * theta * dt * diff_n;
        sup[k] = -theta * dt * (diff_n + adv_n);
    }

    tdma(&sub, &diag, &sup, &mut rhs)?;

    let mut v_new = vec![0.0; n];
    let mut clip = 0.0;
    let dx_phys = dy * fs_new.width() / 2.0;
    for j in 1..n - 1 {
        let z = rhs[j - 1];
        if !z.is_finite() {
            return Err(Error::WindowRejected {
                t0: fs_old.t,
                t1: fs_new.t,
                reason: format!("non-finite v at node {j}"),
            });
        }
        if z < 0.0 {
            clip += -z * dx_phys;
            v_new[j] = 0.0;
        } else {
            v_new[j] = z;
        }
    }
    Ok((v_new, clip))
}

/// Full trajectory of the parabolic subproblem over one window.
#[derive(Debug, Clone)]
pub struct SubproblemResult {
    pub times: Vec<f64>,
    pub fronts: FrontPath,
    pub v_fields: Vec<Vec<f64>>,
    pub clip_mass: f64,
    /// Number of accepted steps violating the Hopf signs after the first.
    pub hopf_warnings: usize,
    /// Min over accepted steps (after the first) of min(|g'|, |h'|).
    pub sigma_obs: f64,
    /// Max observed |v_x| over all levels and nodes.
    pub c2_obs: f64,
}

/// One composite predictor-corrector step from `(fs, v)`; `dt` may be a
/// fraction of the global step during retries.
#[allow(clippy::too_many_arguments)]
fn composite_step(
    v: &[f64],
    fs: &FrontState,
    grid: &ReferenceGrid,
    u_at: &dyn Fn(f64, f64) -> f64,
    spec: &ProblemSpec,
    sp: &StepParams,
    dt: f64,
) -> Result<(FrontState, Vec<f64>, f64)> {
    let flux_old = boundary_flux(v, grid, fs, sp);
    let fs_pred = if sp.lock_fronts {
        FrontState { t: fs.t + dt, gdot: 0.0, hdot: 0.0, ..*fs }
    } else {
        advance_fronts(fs, flux_old, spec, dt)
    };
    if fs_pred.width() <= 0.0 {
        return Err(Error::WindowRejected {
            t0: fs.t,
            t1: fs.t + dt,
            reason: "front collapse in predictor".into(),
        });
    }
    let (v_new, clip) = v_step(v, grid, fs, &fs_pred, u_at, &spec.reactions, sp, dt, spec.d)?;
    let fs_new = if sp.lock_fronts {
        fs_pred
    } else {
        let flux_new = boundary_flux(&v_new, grid, &fs_pred, sp);
        let (gd_o, hd_o) = front_velocities(flux_old, spec.mu, spec.beta);
        let (gd_n, hd_n) = front_velocities(flux_new, spec.mu, spec.beta);
        FrontState {
            t: fs.t + dt,
            g: fs.g + dt * 0.5 * (gd_o + gd_n),
            h: fs.h + dt * 0.5 * (hd_o + hd_n),
            gdot: gd_n,
            hdot: hd_n,
        }
    };
    if fs_new.width() <= 0.0 {
        return Err(Error::WindowRejected {
            t0: fs.t,
            t1: fs.t + dt,
            reason: "front collapse in corrector".into(),
        });
    }
    Ok((fs_new, v_new, clip))
}

const DT_FLOOR: f64 = 1e-12;

/// Advances one global step, halving the local step on failure.
#[allow(clippy::too_many_arguments)]
pub(crate) fn robust_step(
    v: &[f64],
    fs: &FrontState,
    grid: &ReferenceGrid,
    u_at: &dyn Fn(f64, f64) -> f64,
    spec: &ProblemSpec,
    sp: &StepParams,
    dt: f64,
) -> Result<(FrontState, Vec<f64>, f64)> {
    match composite_step(v, fs, grid, u_at, spec, sp, dt) {
        Ok(out) => Ok(out),
        Err(_) if dt / 2.0 >= DT_FLOOR => {
            let (fs1, v1, c1) = robust_step(v, fs, grid, u_at, spec, sp, dt / 2.0)?;
            let (fs2, v2, c2) = robust_step(&v1, &fs1, grid, u_at, spec, sp, dt / 2.0)?;
            Ok((fs2, v2, c1 + c2))
        }
        Err(_) => Err(Error::DtUnderflow { dt: dt / 2.0, floor: DT_FLOOR, t: fs.t }),
    }
}

fn max_vx(v: &[f64], grid: &ReferenceGrid, fs: &FrontState, sp: &StepParams) -> f64 {
    let (xi, _) = stretch_coeffs(fs, 0.0);
    let mut m = 0.0f64;
    for j in 1..v.len() - 1 {
        m = m.max((xi * (v[j + 1] - v[j - 1]) / (2.0 * grid.dy)).abs());
    }
    let (l, r) = boundary_flux(v, grid, fs, sp);
    m.max(l.abs()).max(r.abs())
}

/// Time-marches the parabolic subproblem over `[t0, t1]` with frozen `u`
/// supplied as a lookup in physical coordinates.
pub fn solve_subproblem(
    u_at: &dyn Fn(f64, f64) -> f64,
    spec: &ProblemSpec,
    window: (f64, f64),
    sp: &StepParams,
    grid: &ReferenceGrid,
    init_v: &[f64],
    init_fs: FrontState,
) -> Result<SubproblemResult> {
    let (t0, t1) = window;
    if t1 < t0 {
        return Err(Error::WindowRejected { t0, t1, reason: "reversed window".into() });
    }
    let mut times = vec![t0];
    let mut fronts = FrontPath::new(init_fs);
    let mut v_fields = vec![init_v.to_vec()];
    let mut clip_mass = 0.0;
    let mut hopf_warnings = 0;
    let mut sigma_obs = f64::INFINITY;
    let mut c2_obs = max_vx(init_v, grid, &init_fs, sp);

    let mut t = t0;
    let mut step_index = 0usize;
    while t < t1 - 1e-14 * (1.0 + t1.abs()) {
        let dt = sp.dt.min(t1 - t);
        let fs = *fronts.last();
        let v = v_fields.last().unwrap().clone();
        let (fs_new, v_new, clip) = robust_step(&v, &fs, grid, u_at, spec, sp, dt)?;
        t = fs_new.t;
        step_index += 1;
        if step_index > 1 && !sp.lock_fronts {
            if fs_new.hdot <= 0.0 || fs_new.gdot >= 0.0 {
                hopf_warnings += 1;
            }
            sigma_obs = sigma_obs.min(fs_new.gdot.abs().min(fs_new.hdot.abs()));
        }
        c2_obs = c2_obs.max(max_vx(&v_new, grid, &fs_new, sp));
        clip_mass += clip;
        times.push(t);
        fronts.states.push(fs_new);
        v_fields.push(v_new);
    }
    if !sigma_obs.is_finite() {
        sigma_obs = 0.0;
    }
    Ok(SubproblemResult { times, fronts, v_fields, clip_mass, hopf_warnings, sigma_obs, c2_obs })
}
