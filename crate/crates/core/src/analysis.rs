//! Frequency-scaling sweeps, operator-norm estimation, and log-log slope
//! fits: the machinery that turns mapping-property claims into numbers.

use crate::conjugation::ConjugationOperator;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::GridSpec;
use crate::media::{plane_wave_packet, random_band_limited, LameField, PacketSpec, Polarization, ProbeMode};
use crate::multiplier::Multiplier;
use crate::operators::{apply_block, project, Mode, ModeBlock};
use crate::propagators::{reference_solve, CauchyData};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Values at or below this floor are excluded from log-log fits.
pub const VALUE_FLOOR: f64 = 1e-13;

/// Context shared by the rows of one sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepMeta {
    pub grid_points: usize,
    pub dim: usize,
    pub medium: String,
    pub m_threshold: f64,
    pub time: f64,
    pub seed: u64,
}

/// One record per carrier frequency in a scaling experiment.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub carrier: i64,
    pub values: BTreeMap<String, f64>,
    pub meta: SweepMeta,
}

impl SweepRow {
    fn insert(&mut self, key: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Numerical(format!("sweep value {key} = {value} invalid")));
        }
        self.values.insert(key.to_string(), value);
        Ok(())
    }
}

/// Least-squares fit of `log(value)` against `log(carrier)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub points_used: usize,
    pub excluded_below_floor: usize,
}

/// Deterministic log-log least squares over the rows carrying `quantity`.
/// Values at or below the floor are excluded (flagged in the fit).
pub fn fit_loglog_slope(rows: &[SweepRow], quantity: &str) -> Result<SlopeFit> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut excluded = 0usize;
    for row in rows {
        if let Some(&v) = row.values.get(quantity) {
            if v > VALUE_FLOOR {
                pts.push(((row.carrier as f64).ln(), v.ln()));
            } else {
                excluded += 1;
            }
        }
    }
    if pts.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "slope fit for {quantity} needs >= 3 points above the floor, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit { slope, intercept, max_residual, points_used: pts.len(), excluded_below_floor: excluded })
}

/// A linear operator on discrete fields, with its adjoint, as needed by
/// power iteration.
pub trait LinearOperator: Sync {
    fn grid(&self) -> GridSpec;
    fn apply(&self, w: &VectorField) -> Result<VectorField>;
    fn apply_adjoint(&self, w: &VectorField) -> Result<VectorField>;
}

/// The conjugation operator `K`; skew-adjoint by construction.
pub struct KHandle<'a>(pub &'a ConjugationOperator);

impl LinearOperator for KHandle<'_> {
    fn grid(&self) -> GridSpec {
        self.0.grid()
    }
    fn apply(&self, w: &VectorField) -> Result<VectorField> {
        self.0.apply(w)
    }
    fn apply_adjoint(&self, w: &VectorField) -> Result<VectorField> {
        let mut out = self.0.apply(w)?;
        out.scale(num_complex::Complex64::new(-1.0, 0.0));
        Ok(out)
    }
}

pub struct IdentityHandle(pub GridSpec);

impl LinearOperator for IdentityHandle {
    fn grid(&self) -> GridSpec {
        self.0
    }
    fn apply(&self, w: &VectorField) -> Result<VectorField> {
        Ok(w.clone())
    }
    fn apply_adjoint(&self, w: &VectorField) -> Result<VectorField> {
        Ok(w.clone())
    }
}

pub struct ProjectorHandle(pub GridSpec, pub Mode);

impl LinearOperator for ProjectorHandle {
    fn grid(&self) -> GridSpec {
        self.0
    }
    fn apply(&self, w: &VectorField) -> Result<VectorField> {
        Ok(project(self.1, w))
    }
    fn apply_adjoint(&self, w: &VectorField) -> Result<VectorField> {
        Ok(project(self.1, w))
    }
}

/// A mode block of the elastic operator, with `(Pi_l A Pi_r)^* =
/// Pi_r A Pi_l` (A self-adjoint).
pub struct BlockHandle<'a>(pub ModeBlock, pub &'a LameField);

impl LinearOperator for BlockHandle<'_> {
    fn grid(&self) -> GridSpec {
        self.1.grid()
    }
    fn apply(&self, w: &VectorField) -> Result<VectorField> {
        apply_block(self.0, self.1, w)
    }
    fn apply_adjoint(&self, w: &VectorField) -> Result<VectorField> {
        apply_block(ModeBlock { left: self.0.right, right: self.0.left }, self.1, w)
    }
}

/// Power-iteration estimate of the operator norm on `H^s`.
///
/// Iterates the normal operator of `W_s Op W_{-s}` from a seeded random
/// start; the Rayleigh estimates are nondecreasing, so the returned value
/// approaches the largest singular value from below.
pub fn operator_norm_estimate(
    op: &dyn LinearOperator,
    s: f64,
    seed: u64,
    iterations: usize,
) -> Result<f64> {
    let grid = op.grid();
    let weight = Multiplier::sobolev_weight(grid, s);
    let unweight = Multiplier::sobolev_weight(grid, -s);
    let tilde = |w: &VectorField| -> Result<VectorField> {
        weight.apply(&op.apply(&unweight.apply(w)?)?)
    };
    let tilde_adj = |w: &VectorField| -> Result<VectorField> {
        unweight.apply(&op.apply_adjoint(&weight.apply(w)?)?)
    };

    let mut u = random_band_limited(grid, seed, (0.0, grid.max_freq() as f64), ProbeMode::Full)?;
    let mut estimate = 0.0f64;
    for _ in 0..iterations {
        let tu = tilde(&u)?;
        let tu_norm = tu.l2_norm();
        if !tu_norm.is_finite() {
            return Err(Error::Numerical("power iteration produced non-finite values".into()));
        }
        if tu_norm == 0.0 {
            return Ok(0.0);
        }
        estimate = tu_norm / u.l2_norm();
        let mut next = tilde_adj(&tu)?;
        let nn = next.l2_norm();
        if nn == 0.0 {
            return Ok(estimate);
        }
        next.scale(num_complex::Complex64::new(1.0 / nn, 0.0));
        u = next;
    }
    Ok(estimate)
}

/// Default probe width for propagation sweeps, relative to the period.
pub const SWEEP_PACKET_WIDTH_FRACTION: f64 = 1.0 / 16.0;

fn sweep_meta(f: &LameField, c: &ConjugationOperator, time: f64, seed: u64) -> SweepMeta {
    SweepMeta {
        grid_points: f.grid().points_per_axis(),
        dim: f.grid().dim(),
        medium: f.family().to_string(),
        m_threshold: c.m_threshold(),
        time,
        seed,
    }
}

fn check_carriers(f: &LameField, c: &ConjugationOperator, carriers: &[i64]) -> Result<()> {
    if carriers.len() < 2 {
        return Err(Error::InvalidArgument("sweep needs at least 2 carriers".into()));
    }
    let grid = f.grid();
    let freq_scale = 2.0 * std::f64::consts::PI / grid.period();
    let quarter = grid.points_per_axis() as f64 / 4.0;
    for &k in carriers {
        if (k as f64) * freq_scale < 2.0 * c.m_threshold() {
            return Err(Error::InvalidArgument(format!(
                "carrier {k} below the open-cutoff threshold 2M = {}",
                2.0 * c.m_threshold()
            )));
        }
        if k as f64 > quarter {
            return Err(Error::InvalidArgument(format!(
                "carrier {k} above a quarter of the per-axis point count {quarter}"
            )));
        }
    }
    Ok(())
}

/// Time step used by propagation sweeps: safely inside the CFL bound and
/// small enough that the top carrier is phase-resolved.
pub fn sweep_dt(f: &LameField, top_carrier: i64) -> f64 {
    let c_max = f.max_speed();
    let freq_scale = 2.0 * std::f64::consts::PI / f.grid().period();
    let cfl = 0.45 * f.grid().spacing() / c_max;
    let phase = 0.35 / (c_max * top_carrier as f64 * freq_scale);
    cfl.min(phase)
}

/// Evolves pure-mode packets and records same/opposite-mode content of the
/// solution at time `t`, in L2 and H1, per carrier.
pub fn coupling_sweep(
    f: &LameField,
    c: &ConjugationOperator,
    mode: Mode,
    carriers: &[i64],
    t: f64,
) -> Result<Vec<SweepRow>> {
    check_carriers(f, c, carriers)?;
    let grid = f.grid();
    let dt = sweep_dt(f, *carriers.iter().max().unwrap());
    let width = grid.period() * SWEEP_PACKET_WIDTH_FRACTION;
    let opposite = mode.opposite();
    carriers
        .par_iter()
        .map(|&k| {
            let pol = match mode {
                Mode::P => Polarization::P,
                Mode::S => Polarization::S(0),
            };
            let packet = plane_wave_packet(grid, &PacketSpec::axis_carrier(grid, k, pol, width))?;
            let data = CauchyData::from_displacement(packet);
            let nsteps = ((t / dt - 1e-12).ceil() as usize).max(1);
            let traj = reference_solve(f, &data, t, dt, nsteps)?;
            let (w, _) = traj.final_state();
            let opp = project(opposite, w);
            let same = project(mode, w);
            let mut row = SweepRow {
                carrier: k,
                values: BTreeMap::new(),
                meta: sweep_meta(f, c, t, 0),
            };
            row.insert(&format!("L2_{}_content", opposite.label()), opp.l2_norm())?;
            row.insert(&format!("H1_{}_content", opposite.label()), opp.sobolev_norm(1.0)?)?;
            row.insert(&format!("L2_{}_content", mode.label()), same.l2_norm())?;
            row.insert(&format!("H1_{}_content", mode.label()), same.sobolev_norm(1.0)?)?;
            Ok(row)
        })
        .collect()
}

/// Static (no time evolution) sweep of the conjugation remainder and the
/// operator-order ratios, on band-limited annulus probes.
///
/// Probes are random fields supported on `|m - k| <= k/8`-style annuli
/// rather than Gaussian packets: their spectral profile is scale
/// invariant, so the fitted slopes measure operator order alone.
pub fn remainder_sweep(
    f: &LameField,
    c: &ConjugationOperator,
    carriers: &[i64],
    seed: u64,
) -> Result<Vec<SweepRow>> {
    check_carriers(f, c, carriers)?;
    let grid = f.grid();
    carriers
        .par_iter()
        .map(|&k| {
            let halfwidth = (k as f64 / 8.0).max(1.0);
            let band = (k as f64 - halfwidth, k as f64 + halfwidth);
            let ws = random_band_limited(grid, seed ^ (k as u64), band, ProbeMode::S)?;
            let wp = random_band_limited(grid, seed ^ (k as u64) ^ 0x9E37, band, ProbeMode::P)?;

            let mut row = SweepRow {
                carrier: k,
                values: BTreeMap::new(),
                meta: sweep_meta(f, c, 0.0, seed),
            };
            let rem = c.remainder(&ws)?;
            row.insert("remainder_L2_ratio", rem.l2_norm() / ws.l2_norm())?;
            let aps = apply_block(ModeBlock::PS, f, &ws)?;
            row.insert("APS_L2_ratio", aps.l2_norm() / ws.l2_norm())?;
            let app = apply_block(ModeBlock::PP, f, &wp)?;
            row.insert("APP_L2_ratio", app.l2_norm() / wp.l2_norm())?;
            let ass = apply_block(ModeBlock::SS, f, &ws)?;
            row.insert("ASS_L2_ratio", ass.l2_norm() / ws.l2_norm())?;
            let kps = c.apply_ps(&ws)?;
            row.insert("KPS_order_ratio", kps.l2_norm() * k as f64 / ws.l2_norm())?;
            let gap = c.composition_gap(&ws)?;
            row.insert("composition_gap_L2_ratio", gap.l2_norm() / ws.l2_norm())?;
            Ok(row)
        })
        .collect()
}
