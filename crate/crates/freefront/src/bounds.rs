//! A priori bound machinery: the majorant ODE system started at the initial
//! maxima bounds the PDE solution pointwise when the reactions are autonomous
//! and quasimonotone; a static sign-condition route covers non-quasimonotone
//! pairs; and a comparison-function argument caps the front speeds. All of
//! it is audited against computed trajectories with a small slack.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, ProblemSpec, ReactionPair, SampleBox};
use crate::parabolic::FrontPath;

/// Solution path of `phi' = f1(phi, psi)`, `psi' = f2(phi, psi)` started at
/// the maxima of the initial data. `m_cap`/`n_cap` are the maxima of `phi`
/// and `psi` over `[0, horizon + 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct MajorantPath {
    pub times: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub blowup: Option<f64>,
    pub m_cap: f64,
    pub n_cap: f64,
}

impl MajorantPath {
    /// `phi(t)` by linear interpolation (clamped).
    pub fn phi_at(&self, t: f64) -> f64 {
        interp_series(&self.times, &self.phi, t)
    }

    pub fn psi_at(&self, t: f64) -> f64 {
        interp_series(&self.times, &self.psi, t)
    }
}

fn interp_series(times: &[f64], vals: &[f64], t: f64) -> f64 {
    if t <= times[0] {
        return vals[0];
    }
    let last = times.len() - 1;
    if t >= times[last] {
        return vals[last];
    }
    let i = times.partition_point(|&tk| tk <= t) - 1;
    let frac = (t - times[i]) / (times[i + 1] - times[i]);
    vals[i] + (vals[i + 1] - vals[i]) * frac
}

const BLOWUP_THRESHOLD: f64 = 1e12;

/// Integrates the majorant system over `[0, horizon + 1]` with 4th-order
/// steps and step-doubling error control. The pair must be autonomous and
/// quasimonotone (checked by sampling); otherwise the path is unavailable
/// and the caller falls back to the static route.
pub fn majorant_ode(
    rp: &ReactionPair,
    init: (f64, f64),
    horizon: f64,
) -> Result<MajorantPath> {
    let bx = SampleBox { tau: 1.0, l: 1.0, k1: init.0 + 1.0, k2: init.1 + 1.0 };
    if !model::check_autonomous(rp, bx, 8) {
        return Err(Error::Model("majorant path requires autonomous reactions".into()));
    }
    if !model::check_quasimonotone(rp, bx, 16) {
        return Err(Error::Model("majorant path requires quasimonotone reactions".into()));
    }

    let t_end = horizon + 1.0;
    let rhs = |p: f64, q: f64| (rp.f1(0.0, 0.0, p, q), rp.f2(0.0, 0.0, p, q));
    let rk4 = |p: f64, q: f64, dt: f64| -> (f64, f64) {
        let (k1p, k1q) = rhs(p, q);
        let (k2p, k2q) = rhs(p + dt / 2.0 * k1p, q + dt / 2.0 * k1q);
        let (k3p, k3q) = rhs(p + dt / 2.0 * k2p, q + dt / 2.0 * k2q);
        let (k4p, k4q) = rhs(p + dt * k3p, q + dt * k3q);
        (
            p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
            q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        )
    };

    let tol = 1e-10;
    let mut times = vec![0.0];
    let mut phi = vec![init.0];
    let mut psi = vec![init.1];
    let mut blowup = None;
    // Step cap keeps the stored series dense enough that the piecewise
    // linear readout stays well below the integration tolerance budget.
    let dt_max = 1e-3;
    let mut t = 0.0;
    let mut dt = (t_end / 100.0).min(dt_max);
    let (mut p, mut q) = init;

    while t < t_end {
        let dt_eff = dt.min(t_end - t);
        let (p1, q1) = rk4(p, q, dt_eff);
        let (ph, qh) = rk4(p, q, dt_eff / 2.0);
        let (p2, q2) = rk4(ph, qh, dt_eff / 2.0);
        let err = (p1 - p2).abs().max((q1 - q2).abs());
        let scale = 1.0 + p.abs().max(q.abs());
        if err > tol * scale && dt_eff > 1e-9 {
            dt = dt_eff / 2.0;
            continue;
        }
        t += dt_eff;
        p = p2;
        q = q2;
        times.push(t);
        phi.push(p);
        psi.push(q);
        if !p.is_finite() || !q.is_finite() || p.abs() > BLOWUP_THRESHOLD || q.abs() > BLOWUP_THRESHOLD
        {
            blowup = Some(t);
            break;
        }
        if err < tol * scale / 16.0 {
            dt = (dt_eff * 2.0).min(dt_max);
        }
    }

    let m_cap = phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let n_cap = psi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(MajorantPath { times, phi, psi, blowup, m_cap, n_cap })
}

/// Static caps from the sign-condition route: `eta = max u0 + k0` and
/// `v_cap = max v0 + Theta(eta)`, with the sign hypotheses spot-checked by
/// sampling.
#[derive(Debug, Clone, Serialize)]
pub struct StaticCaps {
    pub eta: f64,
    pub v_cap: f64,
    pub verified: bool,
}

pub fn static_caps(
    rp: &ReactionPair,
    max_u0: f64,
    max_v0: f64,
    k0: f64,
    theta: impl Fn(f64) -> f64,
) -> StaticCaps {
    let eta = max_u0 + k0;
    let theta_eta = theta(eta);
    let v_cap = max_v0 + theta_eta;

    // f1(u, v) < 0 for u > k0, and f2(u, v) < 0 for 0 <= u <= eta,
    // v >= Theta(eta): sampled over a modest lattice above the thresholds.
    let n = 24;
    let mut verified = true;
    for i in 0..n {
        for j in 0..n {
            let u = k0 * (1.0 + 1e-9) + (eta + 1.0 - k0) * i as f64 / (n - 1) as f64;
            let v = (v_cap + 1.0) * j as f64 / (n - 1) as f64;
            if rp.f1(0.0, 0.0, u, v) >= 0.0 {
                verified = false;
            }
            let u2 = eta * i as f64 / (n - 1) as f64;
            let v2 = theta_eta * (1.0 + 1e-9) + (theta_eta + 1.0) * j as f64 / (n - 1) as f64;
            if rp.f2(0.0, 0.0, u2, v2) > 1e-12 {
                verified = false;
            }
        }
    }
    StaticCaps { eta, v_cap, verified }
}

/// Front-speed caps from the comparison-function argument:
/// right `= 2 beta max{2/h0, sqrt(A N / (2d)), -min v0' on [0, h0]}`,
/// left analogous with `mu` and `max v0'` on `[-h0, 0]`.
pub fn speed_caps(spec: &ProblemSpec, n_cap: f64, a_sup: f64) -> (f64, f64) {
    let h0 = spec.init.h0;
    let mid = (a_sup * n_cap / (2.0 * spec.d)).sqrt();
    let right =
        2.0 * spec.beta * (2.0 / h0).max(mid).max(-spec.init.min_v0_slope_right_half());
    let left = 2.0 * spec.mu * (2.0 / h0).max(mid).max(spec.init.max_v0_slope_left_half());
    (left, right)
}

/// Which bound route supplied the field caps.
#[derive(Debug, Clone, Serialize)]
pub enum CapSource {
    Majorant(MajorantPath),
    Static(StaticCaps),
    None,
}

/// A single audited exceedance.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub t: f64,
    pub quantity: String,
    pub observed: f64,
    pub cap: f64,
}

/// Audit output: the caps in force plus every observed exceedance.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub cap_source: CapSource,
    pub speed_cap_left: f64,
    pub speed_cap_right: f64,
    pub slack: f64,
    pub violations: Vec<Violation>,
}

impl BoundReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const DEFAULT_SLACK: f64 = 0.05;

/// Assembles the caps for a spec: the majorant route when admissible, the
/// static route for the built-in West Nile pair, otherwise no field caps.
pub fn caps_for(spec: &ProblemSpec) -> (CapSource, f64, f64) {
    let max_u0 = spec.init.max_u0();
    let max_v0 = spec.init.max_v0();
    match majorant_ode(&spec.reactions, (max_u0, max_v0), spec.t_final) {
        Ok(path) => {
            let a_sup = sup_f2_over(&spec.reactions, path.m_cap, path.n_cap);
            let (l, r) = speed_caps(spec, path.n_cap, a_sup);
            (CapSource::Majorant(path), l, r)
        }
        Err(_) if spec.reactions.name == "west-nile" => {
            // k0 = a1 and Theta(eta) = r2 a2 eta / c make both sign
            // conditions hold for this pair.
            let p = &spec.reactions.params;
            let a1 = p.get("a1").copied().unwrap_or(1.0);
            let a2 = p.get("a2").copied().unwrap_or(1.0);
            let r2 = p.get("r2").copied().unwrap_or(1.0);
            let c = p.get("c").copied().unwrap_or(1.0);
            let caps =
                static_caps(&spec.reactions, max_u0, max_v0, a1, |eta| r2 * a2 * eta / c);
            let a_sup = sup_f2_over(&spec.reactions, caps.eta, caps.v_cap);
            let (l, r) = speed_caps(spec, caps.v_cap, a_sup);
            (CapSource::Static(caps), l, r)
        }
        Err(_) => {
            // No theorem route: still cap the speeds with the observed box.
            let a_sup = sup_f2_over(&spec.reactions, max_u0 + 1.0, max_v0 + 1.0);
            let (l, r) = speed_caps(spec, max_v0 + 1.0, a_sup);
            (CapSource::None, l, r)
        }
    }
}

fn sup_f2_over(rp: &ReactionPair, u_max: f64, v_max: f64) -> f64 {
    let n = 48;
    let mut s = f64::NEG_INFINITY;
    for i in 0..n {
        for j in 0..n {
            let u = u_max * i as f64 / (n - 1) as f64;
            let v = v_max * j as f64 / (n - 1) as f64;
            s = s.max(rp.f2(0.0, 0.0, u, v));
        }
    }
    s.max(0.0)
}

/// Trajectory slice handed to the auditor.
pub struct AuditInput<'a> {
    pub times: &'a [f64],
    pub fronts: &'a FrontPath,
    pub u_fields: &'a [Vec<f64>],
    pub v_fields: &'a [Vec<f64>],
}

/// Audits a trajectory against field caps, speed caps, monotone fronts, and
/// positivity. Violations are data, not faults; strict mode is the caller's
/// decision.
pub fn check_solution(input: &AuditInput, spec: &ProblemSpec, slack: f64) -> BoundReport {
    let (cap_source, cap_left, cap_right) = caps_for(spec);
    let mut violations = Vec::new();

    for (k, &t) in input.times.iter().enumerate() {
        let (u_cap, v_cap) = match &cap_source {
            CapSource::Majorant(path) => (path.phi_at(t), path.psi_at(t)),
            CapSource::Static(caps) => (caps.eta, caps.v_cap),
            CapSource::None => (f64::INFINITY, f64::INFINITY),
        };
        let u_max = input.u_fields[k].iter().cloned().fold(0.0, f64::max);
        let v_max = input.v_fields[k].iter().cloned().fold(0.0, f64::max);
        if u_max > u_cap * (1.0 + slack) {
            violations.push(Violation { t, quantity: "u".into(), observed: u_max, cap: u_cap });
        }
        if v_max > v_cap * (1.0 + slack) {
            violations.push(Violation { t, quantity: "v".into(), observed: v_max, cap: v_cap });
        }
        let u_min = input.u_fields[k].iter().cloned().fold(f64::INFINITY, f64::min);
        let v_min = input.v_fields[k].iter().cloned().fold(f64::INFINITY, f64::min);
        if u_min < 0.0 {
            violations.push(Violation {
                t,
                quantity: "u-positivity".into(),
                observed: u_min,
                cap: 0.0,
            });
        }
        if v_min < 0.0 {
            violations.push(Violation {
                t,
                quantity: "v-positivity".into(),
                observed: v_min,
                cap: 0.0,
            });
        }
    }

    for (k, fs) in input.fronts.states.iter().enumerate() {
        if k >= 2 {
            if fs.hdot > cap_right * (1.0 + slack) {
                violations.push(Violation {
                    t: fs.t,
                    quantity: "h-speed".into(),
                    observed: fs.hdot,
                    cap: cap_right,
                });
            }
            if -fs.gdot > cap_left * (1.0 + slack) {
                violations.push(Violation {
                    t: fs.t,
                    quantity: "g-speed".into(),
                    observed: -fs.gdot,
                    cap: cap_left,
                });
            }
        }
    }
    if !input.fronts.is_monotone() {
        violations.push(Violation {
            t: f64::NAN,
            quantity: "front-monotonicity".into(),
            observed: 0.0,
            cap: 0.0,
        });
    }

    BoundReport {
        cap_source,
        speed_cap_left: cap_left,
        speed_cap_right: cap_right,
        slack,
        violations,
    }
}
