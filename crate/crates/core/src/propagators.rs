//! Time evolution: the reference solver for the full elastic system, the
//! purely polarized solvers, Duhamel forcing, and the Volterra iteration
//! that reconstructs the full solution from the decoupled system.
//!
//! All steppers are classical RK4 on the first-order system
//! `(w, u)' = (u, A w + G(t))` with spectral right-hand sides. Because
//! every product inside `A` is dealiased, the discrete acceleration is
//! band-limited, which keeps the CFL rule `dt <= h / (2 c_max)` inside the
//! RK4 stability region.

use crate::conjugation::ConjugationOperator;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::media::LameField;
use crate::operators::{apply_elastic, project, Mode, ModeBlock};
use num_complex::Complex64;
use rayon::prelude::*;

/// Displacement and velocity at `t = 0`.
#[derive(Debug, Clone)]
pub struct CauchyData {
    pub displacement: VectorField,
    pub velocity: VectorField,
}

impl CauchyData {
    pub fn new(displacement: VectorField, velocity: VectorField) -> Result<Self> {
        if displacement.grid() != velocity.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { displacement, velocity })
    }

    pub fn from_displacement(displacement: VectorField) -> Self {
        let velocity = VectorField::zeros(displacement.grid());
        Self { displacement, velocity }
    }

    pub fn grid(&self) -> crate::grid::GridSpec {
        self.displacement.grid()
    }
}

/// Sampled states of one solve.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<(VectorField, VectorField)>,
    dt: f64,
    energy: Vec<f64>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `(displacement, velocity)` at sample `i`.
    pub fn state(&self, i: usize) -> (&VectorField, &VectorField) {
        (&self.states[i].0, &self.states[i].1)
    }

    pub fn final_state(&self) -> (&VectorField, &VectorField) {
        self.state(self.len() - 1)
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Sampled energies `E = |u|^2 + <-A w, w>` when the solver recorded
    /// them; empty otherwise.
    pub fn energies(&self) -> &[f64] {
        &self.energy
    }

    /// Max relative energy deviation from the initial sample.
    pub fn energy_drift(&self) -> Option<f64> {
        let e0 = *self.energy.first()?;
        if e0 == 0.0 {
            return None;
        }
        Some(
            self.energy
                .iter()
                .map(|e| ((e - e0) / e0).abs())
                .fold(0.0, f64::max),
        )
    }

    fn map_states(mut self, f: impl Fn(&VectorField) -> VectorField) -> Self {
        for (w, u) in &mut self.states {
            *w = f(w);
            *u = f(u);
        }
        self.energy.clear();
        self
    }
}

/// Time-sampled forcing on a uniform grid, interpolated with a cubic
/// Lagrange stencil when the stepper needs stage times.
#[derive(Debug, Clone)]
pub struct ForcingSamples {
    start: f64,
    dt: f64,
    fields: Vec<VectorField>,
}

impl ForcingSamples {
    pub fn new(start: f64, dt: f64, fields: Vec<VectorField>) -> Result<Self> {
        if fields.len() < 2 || !(dt > 0.0) {
            return Err(Error::InvalidArgument("forcing needs >= 2 samples and dt > 0".into()));
        }
        Ok(Self { start, dt, fields })
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    fn eval(&self, t: f64) -> VectorField {
        let pos = (t - self.start) / self.dt;
        let last = self.fields.len() - 1;
        let near = pos.round();
        if (pos - near).abs() < 1e-9 {
            let j = (near.max(0.0) as usize).min(last);
            return self.fields[j].clone();
        }
        // 4-point stencil around the interval containing pos.
        let i1 = (pos.floor() as i64).clamp(0, last as i64 - 1) as usize;
        let lo = i1.saturating_sub(1).min(last.saturating_sub(3));
        let xs: [f64; 4] = [0, 1, 2, 3].map(|o| (lo + o) as f64);
        let mut out = VectorField::zeros(self.fields[0].grid());
        for (o, &xo) in xs.iter().enumerate() {
            let mut wgt = 1.0;
            for &xj in &xs {
                if xj != xo {
                    wgt *= (pos - xj) / (xo - xj);
                }
            }
            out.axpy(Complex64::new(wgt, 0.0), &self.fields[lo + o]);
        }
        out
    }
}

enum EvolutionOperator<'a> {
    Full(&'a LameField),
    Diagonal(Mode, &'a LameField),
}

impl EvolutionOperator<'_> {
    fn apply(&self, w: &VectorField) -> Result<VectorField> {
        match self {
            EvolutionOperator::Full(f) => apply_elastic(f, w),
            EvolutionOperator::Diagonal(mode, f) => {
                let block = ModeBlock { left: *mode, right: *mode };
                crate::operators::apply_block(block, f, w)
            }
        }
    }

    fn forcing_mode(&self) -> Option<Mode> {
        match self {
            EvolutionOperator::Full(_) => None,
            EvolutionOperator::Diagonal(mode, _) => Some(*mode),
        }
    }
}

/// CFL bound `0.5 h / sqrt(max(2 mu + lambda))`.
pub fn cfl_bound(f: &LameField) -> f64 {
    0.5 * f.grid().spacing() / f.max_speed()
}

fn check_cfl(f: &LameField, dt: f64) -> Result<()> {
    let bound = cfl_bound(f);
    if dt > bound {
        return Err(Error::Cfl { dt, bound });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    Ok(())
}

fn integrate(
    op: &EvolutionOperator,
    data: &CauchyData,
    t_end: f64,
    dt_requested: f64,
    stride: usize,
    forcing: Option<&ForcingSamples>,
    with_energy: bool,
) -> Result<Trajectory> {
    let grid = data.grid();
    let span = t_end.abs();
    let nsteps = ((span / dt_requested - 1e-12).ceil() as usize).max(1);
    let dt = span / nsteps as f64;
    let h = if t_end < 0.0 { -dt } else { dt };
    let stride = stride.max(1);

    let rhs_accel = |w: &VectorField, t: f64| -> Result<VectorField> {
        let mut a = op.apply(w)?;
        if let Some(fs) = forcing {
            let g = fs.eval(t);
            let g = match op.forcing_mode() {
                Some(mode) => project(mode, &g),
                None => g,
            };
            a.axpy(Complex64::new(1.0, 0.0), &g);
        }
        Ok(a)
    };

    let mut w = data.displacement.clone();
    let mut u = data.velocity.clone();
    let mut times = vec![0.0];
    let mut states = vec![(w.clone(), u.clone())];
    let mut energy = Vec::new();
    if with_energy {
        energy.push(energy_of(op, &w, &u)?);
    }

    for step in 0..nsteps {
        let t = step as f64 * h;
        // RK4 stages on (w, u)' = (u, A w + G).
        let k1w = u.clone();
        let k1u = rhs_accel(&w, t)?;

        let mut y2w = w.clone();
        y2w.axpy(Complex64::new(h / 2.0, 0.0), &k1w);
        let mut k2w = u.clone();
        k2w.axpy(Complex64::new(h / 2.0, 0.0), &k1u);
        let k2u = rhs_accel(&y2w, t + h / 2.0)?;

        let mut y3w = w.clone();
        y3w.axpy(Complex64::new(h / 2.0, 0.0), &k2w);
        let mut k3w = u.clone();
        k3w.axpy(Complex64::new(h / 2.0, 0.0), &k2u);
        let k3u = rhs_accel(&y3w, t + h / 2.0)?;

        let mut y4w = w.clone();
        y4w.axpy(Complex64::new(h, 0.0), &k3w);
        let mut k4w = u.clone();
        k4w.axpy(Complex64::new(h, 0.0), &k3u);
        let k4u = rhs_accel(&y4w, t + h)?;

        let c1 = Complex64::new(h / 6.0, 0.0);
        let c2 = Complex64::new(h / 3.0, 0.0);
        w.axpy(c1, &k1w);
        w.axpy(c2, &k2w);
        w.axpy(c2, &k3w);
        w.axpy(c1, &k4w);
        u.axpy(c1, &k1u);
        u.axpy(c2, &k2u);
        u.axpy(c2, &k3u);
        u.axpy(c1, &k4u);

        let wn = w.l2_norm();
        if !wn.is_finite() {
            return Err(Error::Numerical(format!(
                "solution became non-finite at t = {:.4}",
                (step + 1) as f64 * h
            )));
        }

        if (step + 1) % stride == 0 || step + 1 == nsteps {
            times.push((step + 1) as f64 * h);
            states.push((w.clone(), u.clone()));
            if with_energy {
                energy.push(energy_of(op, &w, &u)?);
            }
        }
    }
    let _ = grid;
    Ok(Trajectory { times, states, dt, energy })
}

fn energy_of(op: &EvolutionOperator, w: &VectorField, u: &VectorField) -> Result<f64> {
    let aw = op.apply(w)?;
    Ok(u.l2_norm().powi(2) - aw.inner(w).re)
}

/// Low-level signed evolution of the full system; `t_end < 0` integrates
/// backward. Used directly for time-symmetry checks.
pub fn evolve(
    f: &LameField,
    data: &CauchyData,
    t_end: f64,
    dt: f64,
    sample_stride: usize,
) -> Result<Trajectory> {
    if f.grid() != data.grid() {
        return Err(Error::GridMismatch);
    }
    check_cfl(f, dt)?;
    integrate(&EvolutionOperator::Full(f), data, t_end, dt, sample_stride, None, true)
}

/// Reference solver for the full system on `[0, t0]`.
pub fn reference_solve(
    f: &LameField,
    data: &CauchyData,
    t0: f64,
    dt: f64,
    sample_stride: usize,
) -> Result<Trajectory> {
    if !(t0 > 0.0) {
        return Err(Error::InvalidArgument("t0 must be positive".into()));
    }
    evolve(f, data, t0, dt, sample_stride)
}

/// Purely polarized solve: the stepper runs with `A` replaced by the
/// diagonal block of `mode`. Data (and any forcing) must be mode-pure.
pub fn mode_solve(
    mode: Mode,
    f: &LameField,
    data: &CauchyData,
    forcing: Option<&ForcingSamples>,
    t0: f64,
    dt: f64,
    sample_stride: usize,
) -> Result<Trajectory> {
    if f.grid() != data.grid() {
        return Err(Error::GridMismatch);
    }
    if !(t0 > 0.0) {
        return Err(Error::InvalidArgument("t0 must be positive".into()));
    }
    check_cfl(f, dt)?;
    let off = mode.opposite();
    for (label, field) in [("displacement", &data.displacement), ("velocity", &data.velocity)] {
        let norm = field.l2_norm();
        if norm > 0.0 && project(off, field).l2_norm() > 1e-10 * norm {
            return Err(Error::InvalidArgument(format!(
                "{label} carries off-mode content above 1e-10"
            )));
        }
    }
    if let Some(fs) = forcing {
        for g in fs.fields() {
            let norm = g.l2_norm();
            if norm > 0.0 && project(off, g).l2_norm() > 1e-10 * norm {
                return Err(Error::InvalidArgument(
                    "forcing carries off-mode content above 1e-10".into(),
                ));
            }
        }
    }
    integrate(&EvolutionOperator::Diagonal(mode, f), data, t0, dt, sample_stride, forcing, true)
}

/// Cosine or sine family of the propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorKind {
    Cosine,
    Sine,
}

/// Realizes one mode block of the cosine/sine propagator applied to
/// `datum`: evolve `(Pi_right datum, 0)` (cosine) or `(0, Pi_right datum)`
/// (sine) under the full system and project every sample with `Pi_left`.
pub fn propagator_component(
    block: ModeBlock,
    kind: PropagatorKind,
    f: &LameField,
    datum: &VectorField,
    t0: f64,
    dt: f64,
    sample_stride: usize,
) -> Result<Trajectory> {
    let projected = project(block.right, datum);
    let data = match kind {
        PropagatorKind::Cosine => CauchyData::from_displacement(projected),
        PropagatorKind::Sine => {
            CauchyData::new(VectorField::zeros(datum.grid()), projected)?
        }
    };
    let traj = reference_solve(f, &data, t0, dt, sample_stride)?;
    Ok(traj.map_states(|w| project(block.left, w)))
}

/// Output of the Volterra reconstruction.
#[derive(Debug)]
pub struct VolterraSolution {
    /// The conjugated unknown `v = (I+K) w` on `[-t0, t0]`.
    pub v: Trajectory,
    /// The reconstructed solution `w = (I+K)^-1 v`.
    pub w: Trajectory,
    /// Duhamel passes performed until convergence.
    pub iterations: usize,
    /// `max_t |v_{m+1} - v_m|` per pass.
    pub increments: Vec<f64>,
    /// Ratios of successive increments.
    pub ratios: Vec<f64>,
}

/// Uniformly sampled states over `[-t0, t0]` used by the iteration.
struct Sampled {
    disp: Vec<VectorField>,
    vel: Vec<VectorField>,
}

fn merge_two_sided(neg: Trajectory, pos: Trajectory) -> (Vec<f64>, Sampled) {
    let mut times = Vec::with_capacity(neg.len() + pos.len() - 1);
    let mut disp = Vec::with_capacity(times.capacity());
    let mut vel = Vec::with_capacity(times.capacity());
    for i in (1..neg.len()).rev() {
        times.push(neg.times[i]);
        disp.push(neg.states[i].0.clone());
        vel.push(neg.states[i].1.clone());
    }
    for i in 0..pos.len() {
        times.push(pos.times[i]);
        disp.push(pos.states[i].0.clone());
        vel.push(pos.states[i].1.clone());
    }
    (times, Sampled { disp, vel })
}

/// Solves the conjugated integral system on `[-t0, t0]` by Volterra
/// iteration and reconstructs the solution of the original system.
///
/// Each pass evaluates the driving defect
/// `R v = (I+K) A (I+K)^-1 v - A_PP v_P - A_SS v_S` along the previous
/// iterate and adds the Duhamel correction through the polarized solvers.
pub fn volterra_solve(
    f: &LameField,
    conj: &ConjugationOperator,
    data: &CauchyData,
    t0: f64,
    dt: f64,
    max_iter: usize,
    tol: f64,
) -> Result<VolterraSolution> {
    if f.grid() != data.grid() || conj.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    if !(t0 > 0.0) {
        return Err(Error::InvalidArgument("t0 must be positive".into()));
    }
    check_cfl(f, dt)?;
    let nsteps = ((t0 / dt - 1e-12).ceil() as usize).max(1);
    let dt_eff = t0 / nsteps as f64;

    // Conjugated data, split by mode.
    let mut ftilde = data.displacement.clone();
    ftilde.axpy(Complex64::new(1.0, 0.0), &conj.apply(&data.displacement)?);
    let mut gtilde = data.velocity.clone();
    gtilde.axpy(Complex64::new(1.0, 0.0), &conj.apply(&data.velocity)?);

    let mode_data = |mode: Mode| -> Result<CauchyData> {
        CauchyData::new(project(mode, &ftilde), project(mode, &gtilde))
    };

    // Homogeneous part: polarized solves in both time directions.
    let runs: Vec<(Mode, f64)> = vec![
        (Mode::P, -t0),
        (Mode::P, t0),
        (Mode::S, -t0),
        (Mode::S, t0),
    ];
    let hom: Vec<Trajectory> = runs
        .par_iter()
        .map(|&(mode, t_end)| {
            let d = mode_data(mode)?;
            integrate(&EvolutionOperator::Diagonal(mode, f), &d, t_end, dt_eff, 1, None, false)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut hom = hom.into_iter();
    let (hp_neg, hp_pos, hs_neg, hs_pos) =
        (hom.next().unwrap(), hom.next().unwrap(), hom.next().unwrap(), hom.next().unwrap());
    let (times, hom_p) = merge_two_sided(hp_neg, hp_pos);
    let (_, hom_s) = merge_two_sided(hs_neg, hs_pos);

    let nsamples = times.len();
    let v0 = Sampled {
        disp: (0..nsamples)
            .map(|j| hom_p.disp[j].add(&hom_s.disp[j]))
            .collect(),
        vel: (0..nsamples).map(|j| hom_p.vel[j].add(&hom_s.vel[j])).collect(),
    };

    let drive = |v: &VectorField| -> Result<VectorField> {
        let w_inner = conj.neumann_inverse(v, 1e-10)?;
        let aw = apply_elastic(f, &w_inner)?;
        let mut m1 = aw.clone();
        m1.axpy(Complex64::new(1.0, 0.0), &conj.apply(&aw)?);
        let vp = project(Mode::P, v);
        let vs = v.sub(&vp);
        let app = project(Mode::P, &apply_elastic(f, &vp)?);
        let ass = project(Mode::S, &apply_elastic(f, &vs)?);
        m1.axpy(Complex64::new(-1.0, 0.0), &app);
        m1.axpy(Complex64::new(-1.0, 0.0), &ass);
        Ok(m1)
    };

    let mut v_prev = v0;
    let mut increments: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let hom0 = Sampled {
        disp: v_prev.disp.clone(),
        vel: v_prev.vel.clone(),
    };

    while iterations < max_iter {
        iterations += 1;
        let forcing_fields: Vec<VectorField> = v_prev
            .disp
            .par_iter()
            .map(|v| drive(v))
            .collect::<Result<Vec<_>>>()?;
        let forcing = ForcingSamples::new(-t0, dt_eff, forcing_fields)?;

        let duhamel: Vec<Trajectory> = runs
            .par_iter()
            .map(|&(mode, t_end)| {
                let zero = CauchyData::new(
                    VectorField::zeros(f.grid()),
                    VectorField::zeros(f.grid()),
                )?;
                integrate(
                    &EvolutionOperator::Diagonal(mode, f),
                    &zero,
                    t_end,
                    dt_eff,
                    1,
                    Some(&forcing),
                    false,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut duhamel = duhamel.into_iter();
        let (zp_neg, zp_pos, zs_neg, zs_pos) = (
            duhamel.next().unwrap(),
            duhamel.next().unwrap(),
            duhamel.next().unwrap(),
            duhamel.next().unwrap(),
        );
        let (_, z_p) = merge_two_sided(zp_neg, zp_pos);
        let (_, z_s) = merge_two_sided(zs_neg, zs_pos);

        let v_next = Sampled {
            disp: (0..nsamples)
                .map(|j| hom0.disp[j].add(&z_p.disp[j]).add(&z_s.disp[j]))
                .collect(),
            vel: (0..nsamples)
                .map(|j| hom0.vel[j].add(&z_p.vel[j]).add(&z_s.vel[j]))
                .collect(),
        };

        let delta = (0..nsamples)
            .map(|j| v_next.disp[j].sub(&v_prev.disp[j]).l2_norm())
            .fold(0.0f64, f64::max);
        let scale = (0..nsamples)
            .map(|j| v_next.disp[j].l2_norm())
            .fold(0.0f64, f64::max);
        increments.push(delta);
        v_prev = v_next;
        if delta <= tol * scale.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    if !converged {
        let ratio = if increments.len() >= 2 {
            increments[increments.len() - 1] / increments[increments.len() - 2]
        } else {
            f64::NAN
        };
        return Err(Error::NonConvergence(format!(
            "Volterra iteration exceeded {max_iter} passes (last contraction ratio {ratio:.3})"
        )));
    }

    let ratios: Vec<f64> =
        increments.windows(2).map(|p| p[1] / p[0].max(f64::MIN_POSITIVE)).collect();

    // Reconstruct w = (I+K)^-1 v.
    let w_disp: Vec<VectorField> = v_prev
        .disp
        .par_iter()
        .map(|v| conj.neumann_inverse(v, 1e-10))
        .collect::<Result<Vec<_>>>()?;
    let w_vel: Vec<VectorField> = v_prev
        .vel
        .par_iter()
        .map(|v| conj.neumann_inverse(v, 1e-10))
        .collect::<Result<Vec<_>>>()?;

    let v_traj = Trajectory {
        times: times.clone(),
        states: v_prev.disp.into_iter().zip(v_prev.vel).collect(),
        dt: dt_eff,
        energy: vec![],
    };
    let w_traj = Trajectory {
        times,
        states: w_disp.into_iter().zip(w_vel).collect(),
        dt: dt_eff,
        energy: vec![],
    };
    Ok(VolterraSolution { v: v_traj, w: w_traj, iterations, increments, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::grid::GridSpec;
    use crate::media::MediumFamily;

    fn grid() -> GridSpec {
        GridSpec::new(2, 32, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn constant_medium(g: GridSpec) -> LameField {
        LameField::from_family(g, &MediumFamily::Constant { mu0: 1.0, lambda0: 1.0 }).unwrap()
    }

    fn plane_wave(g: GridSpec, comp: usize) -> VectorField {
        let e1 = ScalarField::fourier_mode(g, &[1, 0]).unwrap();
        let mut comps = vec![ScalarField::zeros(g), ScalarField::zeros(g)];
        comps[comp] = e1;
        VectorField::from_components(comps).unwrap()
    }

    #[test]
    fn constant_medium_dispersion() {
        let g = grid();
        let f = constant_medium(g);
        // P wave: w(t) = cos(sqrt(3) t) f.
        let data = CauchyData::from_displacement(plane_wave(g, 0));
        let traj = reference_solve(&f, &data, 1.0, 1e-3, 1000).unwrap();
        let (w, _) = traj.final_state();
        let expected = data.displacement.scaled((3f64.sqrt()).cos());
        assert!(w.sub(&expected).l2_norm() <= 1e-8);

        // S wave: w(t) = cos(t) f.
        let data = CauchyData::from_displacement(plane_wave(g, 1));
        let traj = reference_solve(&f, &data, 1.0, 1e-3, 1000).unwrap();
        let (w, _) = traj.final_state();
        let expected = data.displacement.scaled(1f64.cos());
        assert!(w.sub(&expected).l2_norm() <= 1e-8);
    }

    #[test]
    fn cfl_violation_rejected() {
        let g = grid();
        let f = constant_medium(g);
        let data = CauchyData::from_displacement(plane_wave(g, 0));
        let bound = cfl_bound(&f);
        let err = reference_solve(&f, &data, 0.5, bound * 1.5, 10).unwrap_err();
        assert!(matches!(err, Error::Cfl { .. }));
    }

    #[test]
    fn zero_data_gives_zero_trajectory() {
        let g = grid();
        let f = constant_medium(g);
        let data = CauchyData::new(VectorField::zeros(g), VectorField::zeros(g)).unwrap();
        let traj = mode_solve(Mode::P, &f, &data, None, 0.2, 1e-2, 5).unwrap();
        for i in 0..traj.len() {
            assert_eq!(traj.state(i).0.l2_norm(), 0.0);
        }
    }

    #[test]
    fn mode_solve_rejects_contaminated_data() {
        let g = grid();
        let f = constant_medium(g);
        // An S-polarized plane wave handed to the P solver.
        let data = CauchyData::from_displacement(plane_wave(g, 1));
        assert!(mode_solve(Mode::P, &f, &data, None, 0.2, 1e-2, 5).is_err());
    }

    #[test]
    fn constant_medium_mode_solve_matches_reference() {
        let g = grid();
        let f = constant_medium(g);
        let data = CauchyData::from_displacement(plane_wave(g, 0));
        let reference = reference_solve(&f, &data, 0.5, 2e-3, 250).unwrap();
        let mode = mode_solve(Mode::P, &f, &data, None, 0.5, 2e-3, 250).unwrap();
        let (wr, _) = reference.final_state();
        let (wm, _) = mode.final_state();
        assert!(wr.sub(wm).l2_norm() <= 1e-8);
    }

    #[test]
    fn time_symmetry_round_trip() {
        let g = grid();
        let f = constant_medium(g);
        let data = CauchyData::from_displacement(plane_wave(g, 0));
        let fwd = evolve(&f, &data, 0.4, 2e-3, 1000).unwrap();
        let (w, u) = fwd.final_state();
        let back_data = CauchyData::new(w.clone(), u.clone()).unwrap();
        let back = evolve(&f, &back_data, -0.4, 2e-3, 1000).unwrap();
        let (w0, _) = back.final_state();
        assert!(w0.sub(&data.displacement).l2_norm() <= 1e-6 * data.displacement.l2_norm());
    }

    #[test]
    fn propagator_component_initial_conditions() {
        let g = grid();
        let f = constant_medium(g);
        let datum = plane_wave(g, 0);
        let c = propagator_component(ModeBlock::PP, PropagatorKind::Cosine, &f, &datum, 0.1, 2e-3, 50)
            .unwrap();
        let (w0, _) = c.state(0);
        assert!(w0.sub(&project(Mode::P, &datum)).l2_norm() < 1e-13);
        let s = propagator_component(ModeBlock::PP, PropagatorKind::Sine, &f, &datum, 0.1, 2e-3, 50)
            .unwrap();
        assert_eq!(s.state(0).0.l2_norm(), 0.0);

        // Cross block on a constant medium: zero trajectory.
        let ps = propagator_component(ModeBlock::PS, PropagatorKind::Cosine, &f, &datum, 0.1, 2e-3, 50)
            .unwrap();
        for i in 0..ps.len() {
            assert!(ps.state(i).0.l2_norm() <= 1e-10);
        }
    }
}
