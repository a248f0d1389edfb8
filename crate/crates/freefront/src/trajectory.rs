//! Serializable run artifacts: the front time series, periodic field
//! snapshots, per-window convergence metadata, the constant ledger, and the
//! bound audit.

use serde::Serialize;

use crate::bounds::BoundReport;
use crate::direct::DirectRun;
use crate::fixedpoint::{ContinuationRun, LipschitzLedger, WindowRecord};
use crate::grid::{map_to_physical, FrontState, ReferenceGrid};

pub const SCHEMA_VERSION: u32 = 1;

/// One stored field snapshot (both species on the reference grid, with the
/// physical node images for convenience).
#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Full solution record of one scheme's run.
#[derive(Debug, Serialize)]
pub struct Trajectory {
    pub schema_version: u32,
    pub scheme: String,
    pub fronts: Vec<FrontState>,
    pub snapshots: Vec<Snapshot>,
    pub windows: Vec<WindowRecord>,
    pub ledger: Option<LipschitzLedger>,
    pub bound_report: Option<BoundReport>,
    pub clip_mass_u: f64,
    pub clip_mass_v: f64,
    pub hopf_warnings: usize,
}

fn make_snapshots(
    times: &[f64],
    fronts: &[FrontState],
    u_fields: &[Vec<f64>],
    v_fields: &[Vec<f64>],
    grid: &ReferenceGrid,
    stride: usize,
) -> Vec<Snapshot> {
    let stride = stride.max(1);
    let last = times.len() - 1;
    let mut out = Vec::new();
    for k in (0..times.len()).filter(|&k| k % stride == 0 || k == last) {
        let fs = &fronts[k];
        out.push(Snapshot {
            t: times[k],
            g: fs.g,
            h: fs.h,
            y: grid.y.clone(),
            x: grid.y.iter().map(|&y| map_to_physical(fs, y)).collect(),
            u: u_fields[k].clone(),
            v: v_fields[k].clone(),
        });
    }
    out
}

impl Trajectory {
    pub fn from_continuation(run: &ContinuationRun, grid: &ReferenceGrid, stride: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scheme: "fixedpoint".into(),
            fronts: run.fronts.states.clone(),
            snapshots: make_snapshots(
                &run.times,
                &run.fronts.states,
                &run.u_fields,
                &run.v_fields,
                grid,
                stride,
            ),
            windows: run.windows.clone(),
            ledger: Some(run.ledger.clone()),
            bound_report: None,
            clip_mass_u: run.clip_mass_u,
            clip_mass_v: run.clip_mass_v,
            hopf_warnings: run.hopf_warnings,
        }
    }

    pub fn from_direct(run: &DirectRun, grid: &ReferenceGrid, stride: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scheme: "direct".into(),
            fronts: run.fronts.states.clone(),
            snapshots: make_snapshots(
                &run.times,
                &run.fronts.states,
                &run.u_fields,
                &run.v_fields,
                grid,
                stride,
            ),
            windows: Vec::new(),
            ledger: None,
            bound_report: None,
            clip_mass_u: run.clip_mass_u,
            clip_mass_v: run.clip_mass_v,
            hopf_warnings: run.hopf_warnings,
        }
    }

    /// Times strictly increasing over the stored fronts.
    pub fn times_strictly_increasing(&self) -> bool {
        self.fronts.windows(2).all(|w| w[1].t > w[0].t)
    }
}
