//! Monolithic oracle scheme: operator splitting that advances `u`, `v`, and
//! the fronts together each step, with no outer iteration. The non-diffusing
//! species is tracked at fixed physical abscissae (it never advects), so no
//! remapping error accumulates; fresh abscissae are seeded at the fronts as
//! the domain grows. Used to cross-validate the fixed-point solver; neither
//! scheme is the reference for itself.

use crate::error::Result;
use crate::grid::{map_to_physical, FieldSampler, FrontState, ReferenceGrid};
use crate::interp::Pchip;
use crate::model::ProblemSpec;
use crate::parabolic::{robust_step, FrontPath, StepParams};

/// Full state of the monolithic stepper at one time level.
#[derive(Debug, Clone)]
pub struct DirectState {
    pub fs: FrontState,
    /// Fixed physical abscissae carrying `u`, sorted ascending, spanning the
    /// current domain.
    pub xs: Vec<f64>,
    /// `u` at those abscissae.
    pub us: Vec<f64>,
    /// `v` on the reference grid.
    pub v: Vec<f64>,
}

impl DirectState {
    /// `u` interpolated onto the reference-grid images of `fs`.
    pub fn u_on_grid(&self, grid: &ReferenceGrid) -> Vec<f64> {
        let p = Pchip::new(self.xs.clone(), self.us.clone());
        let n = grid.len();
        let mut u = vec![0.0; n];
        for j in 1..n - 1 {
            u[j] = p.eval(map_to_physical(&self.fs, grid.y[j])).max(0.0);
        }
        u
    }
}

/// Result of a monolithic run, schema-compatible with the continuation run.
#[derive(Debug)]
pub struct DirectRun {
    pub times: Vec<f64>,
    pub fronts: FrontPath,
    pub u_fields: Vec<Vec<f64>>,
    pub v_fields: Vec<Vec<f64>>,
    pub clip_mass_u: f64,
    pub clip_mass_v: f64,
    pub hopf_warnings: usize,
    pub sigma_obs: f64,
    pub c2_obs: f64,
}

/// RK4 half-step of the reaction ODE at every tracked abscissa, with `v`
/// frozen at the supplied sampler. Returns the clipped (negative) mass.
fn u_half_step(
    xs: &[f64],
    us: &mut [f64],
    v_at: &FieldSampler,
    spec: &ProblemSpec,
    t: f64,
    dt_half: f64,
) -> Result<f64> {
    let mut clip = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let vx = v_at.at_physical(x).max(0.0);
        let f = |tt: f64, uu: f64| spec.reactions.f1(tt, x, uu.max(0.0), vx);
        let k1 = f(t, us[i]);
        let k2 = f(t + dt_half / 2.0, us[i] + dt_half / 2.0 * k1);
        let k3 = f(t + dt_half / 2.0, us[i] + dt_half / 2.0 * k2);
        let k4 = f(t + dt_half, us[i] + dt_half * k3);
        let mut un = us[i] + dt_half / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !un.is_finite() {
            return Err(crate::error::Error::NonFiniteReaction { t, x, u: us[i], v: vx });
        }
        if un < 0.0 {
            let w = if xs.len() < 2 {
                0.0
            } else if i == 0 {
                (xs[1] - xs[0]) / 2.0
            } else if i == xs.len() - 1 {
                (xs[i] - xs[i - 1]) / 2.0
            } else {
                (xs[i + 1] - xs[i - 1]) / 2.0
            };
            clip += -un * w;
            un = 0.0;
        }
        us[i] = un;
    }
    Ok(clip)
}

/// One splitting step: half reaction ODE on `u`, full `v`/front advance with
/// `u` frozen, front-seeded abscissae appended on newly covered territory,
/// then the second reaction half against the new `v`.
pub fn direct_step(
    state: &DirectState,
    spec: &ProblemSpec,
    sp: &StepParams,
    grid: &ReferenceGrid,
    dt: f64,
) -> Result<(DirectState, f64, f64)> {
    let mut xs = state.xs.clone();
    let mut us = state.us.clone();
    let t = state.fs.t;

    let v_sampler = FieldSampler::new(&state.v, grid, &state.fs);
    let mut clip_u = u_half_step(&xs, &mut us, &v_sampler, spec, t, dt / 2.0)?;

    let u_interp = Pchip::new(xs.clone(), us.clone());
    let (fs_new, v_new, clip_v) = robust_step(
        &state.v,
        &state.fs,
        grid,
        &|_, x| {
            if x < state.fs.g || x > state.fs.h {
                0.0
            } else {
                u_interp.eval(x).max(0.0)
            }
        },
        spec,
        sp,
        dt,
    )?;

    // New territory starts from zero by the entry-time condition.
    let gap = 1e-12 * (1.0 + fs_new.width());
    if fs_new.g < xs[0] - gap {
        xs.insert(0, fs_new.g);
        us.insert(0, 0.0);
    }
    if fs_new.h > *xs.last().unwrap() + gap {
        xs.push(fs_new.h);
        us.push(0.0);
    }

    let v_sampler_new = FieldSampler::new(&v_new, grid, &fs_new);
    clip_u += u_half_step(&xs, &mut us, &v_sampler_new, spec, t + dt / 2.0, dt / 2.0)?;
    Ok((DirectState { fs: fs_new, xs, us, v: v_new }, clip_u, clip_v))
}

/// Time-marches the monolithic scheme to `t_final`.
pub fn direct_run(
    spec: &ProblemSpec,
    sp: &StepParams,
    grid: &ReferenceGrid,
) -> Result<DirectRun> {
    let (fs0, u0, v0) = crate::fixedpoint::initial_fields(spec, grid);
    let xs0: Vec<f64> = grid.y.iter().map(|&y| map_to_physical(&fs0, y)).collect();
    let mut state = DirectState { fs: fs0, xs: xs0, us: u0.clone(), v: v0 };
    let mut times = vec![0.0];
    let mut fronts = FrontPath::new(fs0);
    let mut u_fields = vec![u0];
    let mut v_fields = vec![state.v.clone()];
    let mut clip_mass_u = 0.0;
    let mut clip_mass_v = 0.0;
    let mut hopf_warnings = 0;
    let mut sigma_obs = f64::INFINITY;
    let mut c2_obs = 0.0f64;

    let t_final = spec.t_final;
    let mut step_index = 0usize;
    while state.fs.t < t_final - 1e-14 * (1.0 + t_final) {
        let dt = sp.dt.min(t_final - state.fs.t);
        let (next, cu, cv) = direct_step(&state, spec, sp, grid, dt)?;
        step_index += 1;
        if step_index > 1 && !sp.lock_fronts {
            if next.fs.hdot <= 0.0 || next.fs.gdot >= 0.0 {
                hopf_warnings += 1;
            }
            sigma_obs = sigma_obs.min(next.fs.gdot.abs().min(next.fs.hdot.abs()));
        }
        let (xi, _) = crate::grid::stretch_coeffs(&next.fs, 0.0);
        for j in 1..next.v.len() - 1 {
            c2_obs =
                c2_obs.max((xi * (next.v[j + 1] - next.v[j - 1]) / (2.0 * grid.dy)).abs());
        }
        clip_mass_u += cu;
        clip_mass_v += cv;
        times.push(next.fs.t);
        fronts.states.push(next.fs);
        u_fields.push(next.u_on_grid(grid));
        v_fields.push(next.v.clone());
        state = next;
    }
    if !sigma_obs.is_finite() {
        sigma_obs = 0.0;
    }
    Ok(DirectRun {
        times,
        fronts,
        u_fields,
        v_fields,
        clip_mass_u,
        clip_mass_v,
        hopf_warnings,
        sigma_obs,
        c2_obs,
    })
}
