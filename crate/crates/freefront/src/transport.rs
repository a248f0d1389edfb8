//! The non-diffusing species `u`: every physical abscissa `x` carries a
//! scalar ODE `u_t = f1(t, x, u, v(t, x))` starting either from the initial
//! data (when `|x| <= h0`) or from zero at the entry time `t_x`, the first
//! time the moving domain covers `x`. Lines are mutually independent, so the
//! integration sweep is data-parallel.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{map_to_physical, FrontState, ReferenceGrid};
use crate::interp::Pchip;
use crate::model::ReactionPair;
use crate::parabolic::FrontPath;

/// How (and when) an abscissa is first covered by the moving domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entry {
    /// Inside the initial interval; the line starts at the window start.
    Initial,
    /// Uncovered by the left front `g` at the given time.
    Left(f64),
    /// Uncovered by the right front `h` at the given time.
    Right(f64),
    /// Outside the domain for the whole window.
    Never,
}

impl Entry {
    pub fn time(&self, t0: f64) -> Option<f64> {
        match *self {
            Entry::Initial => Some(t0),
            Entry::Left(t) | Entry::Right(t) => Some(t),
            Entry::Never => None,
        }
    }
}

/// Entry time of abscissa `x` for a stored front path, by monotone
/// bracketing with linear interpolation between levels.
pub fn entry_time(path: &FrontPath, x: f64) -> Result<Entry> {
    if !path.is_monotone() {
        return Err(Error::NonMonotoneFronts);
    }
    let first = path.first();
    let last = path.last();
    if x >= first.g && x <= first.h {
        return Ok(Entry::Initial);
    }
    if x > last.h || x < last.g {
        return Ok(Entry::Never);
    }
    let states = &path.states;
    if x > first.h {
        // h(t) = x for a unique t; find the bracketing pair.
        let i = states.partition_point(|fs| fs.h < x) - 1;
        let (a, b) = (&states[i], &states[i + 1]);
        let frac = if b.h > a.h { (x - a.h) / (b.h - a.h) } else { 1.0 };
        Ok(Entry::Right(a.t + frac * (b.t - a.t)))
    } else {
        let i = states.partition_point(|fs| fs.g > x) - 1;
        let (a, b) = (&states[i], &states[i + 1]);
        let frac = if b.g < a.g { (a.g - x) / (a.g - b.g) } else { 1.0 };
        Ok(Entry::Left(a.t + frac * (b.t - a.t)))
    }
}

/// One characteristic line: a fixed physical abscissa with its entry data and
/// the integrated `u` samples on the global time grid (zero before entry).
#[derive(Debug, Clone)]
pub struct CharLine {
    pub x: f64,
    pub entry: Entry,
    pub u_init: f64,
    pub samples: Vec<f64>,
}

impl CharLine {
    pub fn new(x: f64, entry: Entry, u_init: f64, n_levels: usize) -> Self {
        Self { x, entry, u_init, samples: vec![0.0; n_levels] }
    }
}

/// Classical 4th-order one-step integration of `u' = f1(t, x, u, v(t, x))`
/// from `t_x` to the end of the window, sampled at the global time grid.
/// Negative excursions are clipped at zero; the total clipped amount is
/// returned.
pub fn integrate_characteristic(
    line: &mut CharLine,
    times: &[f64],
    v_at: &(dyn Fn(f64, f64) -> f64 + Sync),
    rp: &ReactionPair,
) -> Result<f64> {
    let t0 = times[0];
    let t_entry = match line.entry.time(t0) {
        Some(t) => t,
        None => return Ok(0.0),
    };
    let x = line.x;
    let rhs = |t: f64, u: f64| -> Result<f64> {
        let v = v_at(t, x).max(0.0);
        let f = rp.f1(t, x, u.max(0.0), v);
        if !f.is_finite() {
            return Err(Error::NonFiniteReaction { t, x, u, v });
        }
        Ok(f)
    };
    let rk4 = |t: f64, u: f64, dt: f64| -> Result<f64> {
        let k1 = rhs(t, u)?;
        let k2 = rhs(t + dt / 2.0, u + dt / 2.0 * k1)?;
        let k3 = rhs(t + dt / 2.0, u + dt / 2.0 * k2)?;
        let k4 = rhs(t + dt, u + dt * k3)?;
        Ok(u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    };

    let mut clip = 0.0;
    let mut u = line.u_init;
    let mut t = t_entry;
    for (k, &tk) in times.iter().enumerate() {
        if tk < t_entry - 1e-14 {
            line.samples[k] = 0.0;
            continue;
        }
        if tk > t {
            u = rk4(t, u, tk - t)?;
            if u < 0.0 {
                clip += -u;
                u = 0.0;
            }
            t = tk;
        }
        line.samples[k] = u;
    }
    Ok(clip)
}

/// Integrates every line over the window. Data-parallel across lines when
/// the `parallel` feature is enabled.
pub fn integrate_lines(
    lines: &mut [CharLine],
    times: &[f64],
    v_at: &(dyn Fn(f64, f64) -> f64 + Sync),
    rp: &ReactionPair,
) -> Result<f64> {
    #[cfg(feature = "parallel")]
    {
        let clips: Vec<Result<f64>> = lines
            .par_iter_mut()
            .map(|line| integrate_characteristic(line, times, v_at, rp))
            .collect();
        let mut total = 0.0;
        for c in clips {
            total += c?;
        }
        Ok(total)
    }
    #[cfg(not(feature = "parallel"))]
    {
        integrate_lines_serial(lines, times, v_at, rp)
    }
}

/// Sequential fallback of [`integrate_lines`]; always available so the bench
/// suite can compare both paths.
pub fn integrate_lines_serial(
    lines: &mut [CharLine],
    times: &[f64],
    v_at: &(dyn Fn(f64, f64) -> f64 + Sync),
    rp: &ReactionPair,
) -> Result<f64> {
    let mut total = 0.0;
    for line in lines.iter_mut() {
        total += integrate_characteristic(line, times, v_at, rp)?;
    }
    Ok(total)
}

/// Collects the covering line values at one time level into sorted physical
/// point data with exact zeros at the fronts. `motion_gap` is the largest
/// front displacement over one step; freshly uncovered territory is only
/// seeded once per step, so legitimate gaps can reach that size.
pub fn collect_level_points(
    lines: &[CharLine],
    level: usize,
    fs: &FrontState,
    nominal: f64,
    motion_gap: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let t = fs.t;
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(lines.len() + 2);
    pts.push((fs.g, 0.0));
    for line in lines {
        if line.x <= fs.g || line.x >= fs.h {
            continue;
        }
        match line.entry.time(f64::NEG_INFINITY) {
            Some(te) if te <= t + 1e-14 => pts.push((line.x, line.samples[level])),
            _ => {}
        }
    }
    pts.push((fs.h, 0.0));
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 * (1.0 + fs.width()));

    // Coverage audit: gaps beyond what the line spacing and the per-step
    // front motion explain mean the line set cannot resolve the field.
    let limit = 2.0 * nominal.max(motion_gap) + 1e-12;
    for w in pts.windows(2) {
        let gap = w[1].0 - w[0].0;
        if gap > limit {
            return Err(Error::CoverageGap { x: w[0].0, gap, limit });
        }
    }

    Ok((pts.iter().map(|p| p.0).collect(), pts.iter().map(|p| p.1).collect()))
}

/// Rebuilds the `u` field on the reference grid at one time level by
/// monotone interpolation over the covering characteristic lines, with exact
/// zeros at the endpoints.
pub fn rebuild_u_field(
    lines: &[CharLine],
    level: usize,
    fs: &FrontState,
    grid: &ReferenceGrid,
    motion_gap: f64,
) -> Result<Vec<f64>> {
    let nominal = fs.width() / (grid.len() - 1) as f64;
    let (xs, us) = collect_level_points(lines, level, fs, nominal, motion_gap)?;
    let interp = Pchip::new(xs, us);
    let n = grid.len();
    let mut field = vec![0.0; n];
    for j in 1..n - 1 {
        let x = map_to_physical(fs, grid.y[j]);
        field[j] = interp.eval(x).max(0.0);
    }
    Ok(field)
}
