//! The elastic operator `A(x,D)`, the mode projectors, the four mode
//! blocks, and the vector-calculus identities behind the conjugation
//! argument.
//!
//! `A` is applied in its literal divergence form
//! `(A w)_i = sum_k d_k( mu (d_k w_i + d_i w_k) ) + d_i( lambda div w )`,
//! with spectral derivatives and dealiased physical products, which keeps
//! the discrete operator self-adjoint on dealias-band-limited fields.

use crate::conjugation::ConjugationOperator;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::MAX_DIM;
use crate::media::LameField;
use num_complex::Complex64;

/// P (curl-free) or S (divergence-free) polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    P,
    S,
}

impl Mode {
    pub fn opposite(&self) -> Mode {
        match self {
            Mode::P => Mode::S,
            Mode::S => Mode::P,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Mode::P => "P",
            Mode::S => "S",
        }
    }
}

/// One block `Pi_left A Pi_right` of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeBlock {
    pub left: Mode,
    pub right: Mode,
}

impl ModeBlock {
    pub const PP: ModeBlock = ModeBlock { left: Mode::P, right: Mode::P };
    pub const PS: ModeBlock = ModeBlock { left: Mode::P, right: Mode::S };
    pub const SP: ModeBlock = ModeBlock { left: Mode::S, right: Mode::P };
    pub const SS: ModeBlock = ModeBlock { left: Mode::S, right: Mode::S };

    pub const ALL: [ModeBlock; 4] = [Self::PP, Self::PS, Self::SP, Self::SS];

    pub fn label(&self) -> String {
        format!("{}{}", self.left.label(), self.right.label())
    }
}

/// Exact frequency-space mode projection. At `xi = 0` the P projector is
/// zero and the S projector is the identity.
pub fn project(mode: Mode, w: &VectorField) -> VectorField {
    let grid = w.grid();
    let d = grid.dim();
    let mut out = w.clone();
    let mut k = [0.0; MAX_DIM];
    for lin in 0..grid.total_points() {
        grid.wavevector(lin, &mut k);
        let ksq: f64 = k[..d].iter().map(|v| v * v).sum();
        let mut kdot = Complex64::default();
        if ksq > 0.0 {
            for a in 0..d {
                kdot += k[a] * w.component(a).hat()[lin];
            }
            kdot /= ksq;
        }
        for a in 0..d {
            let p_part = kdot * k[a];
            let v = match mode {
                Mode::P => p_part,
                Mode::S => w.component(a).hat()[lin] - p_part,
            };
            out.component_mut(a).hat_mut()[lin] = v;
        }
    }
    out
}

/// `A(x,D) w` in divergence form.
pub fn apply_elastic(f: &LameField, w: &VectorField) -> Result<VectorField> {
    if f.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = w.grid();
    let d = grid.dim();

    // Physical-space first derivatives d_k w_i.
    let mut deriv_phys: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut row = Vec::with_capacity(d);
        for k in 0..d {
            row.push(w.component(i).derivative(k).to_physical());
        }
        deriv_phys.push(row);
    }
    let div_phys: Vec<Complex64> = (0..grid.total_points())
        .map(|lin| (0..d).map(|i| deriv_phys[i][i][lin]).sum())
        .collect();

    // Symmetric stress-like products g_ik = mu (d_k w_i + d_i w_k).
    let mu = f.mu();
    let mut g_hat: Vec<Vec<Option<ScalarField>>> = vec![(0..d).map(|_| None).collect(); d];
    for i in 0..d {
        for k in i..d {
            let prod: Vec<Complex64> = (0..grid.total_points())
                .map(|lin| mu[lin] * (deriv_phys[i][k][lin] + deriv_phys[k][i][lin]))
                .collect();
            let mut s = ScalarField::from_physical(grid, &prod)?;
            s.dealias();
            g_hat[i][k] = Some(s);
        }
    }
    let lam_div: Vec<Complex64> =
        div_phys.iter().zip(f.lambda()).map(|(v, &l)| v * l).collect();
    let mut lam_div_hat = ScalarField::from_physical(grid, &lam_div)?;
    lam_div_hat.dealias();

    // Outer derivatives, assembled in frequency space.
    let mut out = VectorField::zeros(grid);
    let mut kap = [0.0; MAX_DIM];
    for lin in 0..grid.total_points() {
        grid.wavevector(lin, &mut kap);
        for i in 0..d {
            let mut acc = Complex64::default();
            for k in 0..d {
                let g = if i <= k {
                    g_hat[i][k].as_ref().unwrap()
                } else {
                    g_hat[k][i].as_ref().unwrap()
                };
                acc += Complex64::new(0.0, kap[k]) * g.hat()[lin];
            }
            acc += Complex64::new(0.0, kap[i]) * lam_div_hat.hat()[lin];
            out.component_mut(i).hat_mut()[lin] = acc;
        }
    }
    Ok(out)
}

/// `Pi_left A Pi_right` applied by composition.
pub fn apply_block(block: ModeBlock, f: &LameField, w: &VectorField) -> Result<VectorField> {
    let inner = project(block.right, w);
    let aw = apply_elastic(f, &inner)?;
    Ok(project(block.left, &aw))
}

/// Plain (unconjugated) dot product of two vector fields, in physical
/// space, returned as a spectral scalar.
fn bilinear_dot(a: &VectorField, b: &VectorField, dealias: bool) -> Result<ScalarField> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = a.grid();
    let d = grid.dim();
    let a_phys: Vec<Vec<Complex64>> = (0..d).map(|i| a.component(i).to_physical()).collect();
    let b_phys: Vec<Vec<Complex64>> = (0..d).map(|i| b.component(i).to_physical()).collect();
    let prod: Vec<Complex64> = (0..grid.total_points())
        .map(|lin| (0..d).map(|i| a_phys[i][lin] * b_phys[i][lin]).sum())
        .collect();
    let mut out = ScalarField::from_physical(grid, &prod)?;
    if dealias {
        out.dealias();
    }
    Ok(out)
}

fn require_band_limited(w: &VectorField, label: &str) -> Result<()> {
    let quarter = (w.grid().points_per_axis() / 4) as f64;
    if w.spectral_mass_outside(quarter) > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "{label} must be band-limited below half the Nyquist frequency"
        )));
    }
    Ok(())
}

/// Residual of `Lap(V.W) = V.Lap(W) + 2 div(W . grad V) - W.Lap(V)`
/// evaluated spectrally; returns the L2 norm of LHS - RHS.
pub fn identity_residual_laplacian(v: &VectorField, w: &VectorField) -> Result<f64> {
    if v.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    require_band_limited(v, "V")?;
    require_band_limited(w, "W")?;
    let grid = v.grid();
    let d = grid.dim();

    let lhs = bilinear_dot(v, w, true)?.laplacian();

    // V . Lap W
    let lap_w = VectorField::from_components(
        (0..d).map(|i| w.component(i).laplacian()).collect(),
    )?;
    let term1 = bilinear_dot(v, &lap_w, true)?;

    // 2 div_j ( sum_i W_i d_j V_i )
    let mut term2 = ScalarField::zeros(grid);
    for j in 0..d {
        let dv_j = VectorField::from_components(
            (0..d).map(|i| v.component(i).derivative(j)).collect(),
        )?;
        let u_j = bilinear_dot(w, &dv_j, true)?;
        term2.axpy(Complex64::new(2.0, 0.0), &u_j.derivative(j));
    }

    // W . Lap V
    let lap_v = VectorField::from_components(
        (0..d).map(|i| v.component(i).laplacian()).collect(),
    )?;
    let term3 = bilinear_dot(w, &lap_v, true)?;

    let mut res = lhs;
    res.axpy(Complex64::new(-1.0, 0.0), &term1);
    res.axpy(Complex64::new(-1.0, 0.0), &term2);
    res.axpy(Complex64::new(1.0, 0.0), &term3);
    Ok(res.l2_norm())
}

/// Residual of
/// `V . grad div W = div(V div W) - div(W div V) + W . grad div V`.
pub fn identity_residual_divergence(v: &VectorField, w: &VectorField) -> Result<f64> {
    if v.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    require_band_limited(v, "V")?;
    require_band_limited(w, "W")?;

    let div_w = w.divergence();
    let div_v = v.divergence();
    let grad_div_w = crate::field::gradient(&div_w);
    let grad_div_v = crate::field::gradient(&div_v);

    let lhs = bilinear_dot(v, &grad_div_w, true)?;

    let v_divw = scale_vector_by_scalar(v, &div_w)?;
    let w_divv = scale_vector_by_scalar(w, &div_v)?;
    let term1 = v_divw.divergence();
    let term2 = w_divv.divergence();
    let term3 = bilinear_dot(w, &grad_div_v, true)?;

    let mut res = lhs;
    res.axpy(Complex64::new(-1.0, 0.0), &term1);
    res.axpy(Complex64::new(1.0, 0.0), &term2);
    res.axpy(Complex64::new(-1.0, 0.0), &term3);
    Ok(res.l2_norm())
}

/// Pointwise `s(x) * v(x)` per component, dealiased.
fn scale_vector_by_scalar(v: &VectorField, s: &ScalarField) -> Result<VectorField> {
    crate::field::pointwise_multiply(s, v, true)
}

/// Adjoint claims checked by `adjoint_residual`.
pub enum AdjointPair<'a> {
    /// `A` is self-adjoint.
    FullOperator(&'a LameField),
    /// `A_PP` / `A_SS` are self-adjoint.
    DiagonalBlock(Mode, &'a LameField),
    /// `A_SP = A_PS^*`.
    CrossBlocks(&'a LameField),
    /// `K_SP = -K_PS^*`.
    ConjugationBlocks(&'a ConjugationOperator),
}

/// `|<Op w, v> - <w, Op~ v>|` with `Op~` the claimed (negated) adjoint.
pub fn adjoint_residual(pair: AdjointPair, w: &VectorField, v: &VectorField) -> Result<f64> {
    if w.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let r = match pair {
        AdjointPair::FullOperator(f) => {
            let aw = apply_elastic(f, w)?;
            let av = apply_elastic(f, v)?;
            aw.inner(v) - w.inner(&av)
        }
        AdjointPair::DiagonalBlock(mode, f) => {
            let block = ModeBlock { left: mode, right: mode };
            let bw = apply_block(block, f, w)?;
            let bv = apply_block(block, f, v)?;
            bw.inner(v) - w.inner(&bv)
        }
        AdjointPair::CrossBlocks(f) => {
            let ps = apply_block(ModeBlock::PS, f, w)?;
            let sp = apply_block(ModeBlock::SP, f, v)?;
            ps.inner(v) - w.inner(&sp)
        }
        AdjointPair::ConjugationBlocks(c) => {
            let ps = c.apply_ps(w)?;
            let sp = c.apply_sp(v)?;
            ps.inner(v) + w.inner(&sp)
        }
    };
    Ok(r.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{curl_2d, ScalarField};
    use crate::grid::GridSpec;
    use crate::media::{random_band_limited, MediumFamily, ProbeMode};

    fn grid() -> GridSpec {
        GridSpec::new(2, 64, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn constant_medium(g: GridSpec) -> LameField {
        LameField::from_family(g, &MediumFamily::Constant { mu0: 1.0, lambda0: 1.0 }).unwrap()
    }

    fn e1_along(g: GridSpec, comp: usize) -> VectorField {
        let e1 = ScalarField::fourier_mode(g, &[1, 0]).unwrap();
        let mut comps = vec![ScalarField::zeros(g), ScalarField::zeros(g)];
        comps[comp] = e1;
        VectorField::from_components(comps).unwrap()
    }

    #[test]
    fn projection_of_aligned_plane_wave() {
        let g = grid();
        // Polarization parallel to xi: pure P.
        let w = e1_along(g, 0);
        let p = project(Mode::P, &w);
        let s = project(Mode::S, &w);
        assert!(p.sub(&w).l2_norm() < 1e-14);
        assert!(s.l2_norm() < 1e-14);

        // Polarization orthogonal to xi: pure S.
        let w = e1_along(g, 1);
        assert!(project(Mode::P, &w).l2_norm() < 1e-14);
    }

    #[test]
    fn projectors_resolve_identity() {
        let g = grid();
        let w = random_band_limited(g, 3, (1.0, 20.0), ProbeMode::Full).unwrap();
        let sum = project(Mode::P, &w).add(&project(Mode::S, &w));
        assert!(sum.sub(&w).l2_norm() <= 1e-12 * w.l2_norm());

        let p = project(Mode::P, &w);
        assert!(project(Mode::P, &p).sub(&p).l2_norm() <= 1e-12 * w.l2_norm());
        assert!(project(Mode::S, &p).l2_norm() <= 1e-12 * w.l2_norm());
    }

    #[test]
    fn divergence_free_and_curl_free_ranges() {
        let g = grid();
        let w = random_band_limited(g, 11, (1.0, 20.0), ProbeMode::Full).unwrap();
        let s = project(Mode::S, &w);
        let p = project(Mode::P, &w);
        let h1 = w.sobolev_norm(1.0).unwrap();
        assert!(s.divergence().l2_norm() <= 1e-12 * h1);
        assert!(curl_2d(&p).unwrap().l2_norm() <= 1e-12 * h1);
    }

    #[test]
    fn constant_medium_eigenvalues() {
        let g = grid();
        let f = constant_medium(g);
        // P plane wave: eigenvalue -(2 mu + lambda) |k|^2 = -3.
        let w = e1_along(g, 0);
        let aw = apply_elastic(&f, &w).unwrap();
        let diff = aw.add(&w.scaled(3.0));
        assert!(diff.l2_norm() < 1e-12);
        // S plane wave: eigenvalue -mu |k|^2 = -1.
        let w = e1_along(g, 1);
        let aw = apply_elastic(&f, &w).unwrap();
        let diff = aw.add(&w);
        assert!(diff.l2_norm() < 1e-12);
    }

    #[test]
    fn constant_medium_blocks_vanish_and_sum() {
        let g = grid();
        let f = constant_medium(g);
        let w = random_band_limited(g, 5, (1.0, 15.0), ProbeMode::Full).unwrap();
        let ps = apply_block(ModeBlock::PS, &f, &w).unwrap();
        let sp = apply_block(ModeBlock::SP, &f, &w).unwrap();
        let scale = apply_elastic(&f, &w).unwrap().l2_norm();
        assert!(ps.l2_norm() <= 1e-12 * scale);
        assert!(sp.l2_norm() <= 1e-12 * scale);
    }

    #[test]
    fn blocks_resolve_full_operator() {
        let g = grid();
        let f = LameField::from_family(
            g,
            &MediumFamily::SmoothBump {
                mu0: 1.0,
                lambda0: 1.0,
                bumps: vec![crate::media::BumpSpec {
                    center: vec![std::f64::consts::PI, std::f64::consts::PI],
                    extent: 0.7,
                    amplitude_mu: 0.3,
                    amplitude_lambda: 0.3,
                }],
            },
        )
        .unwrap();
        let w = random_band_limited(g, 7, (1.0, 15.0), ProbeMode::Full).unwrap();
        let full = apply_elastic(&f, &w).unwrap();
        let mut sum = VectorField::zeros(g);
        for block in ModeBlock::ALL {
            sum.axpy(Complex64::new(1.0, 0.0), &apply_block(block, &f, &w).unwrap());
        }
        assert!(sum.sub(&full).l2_norm() <= 1e-12 * full.l2_norm());
    }

    #[test]
    fn identities_on_constants_and_plane_waves() {
        let g = grid();
        let one = ScalarField::fourier_mode(g, &[0, 0]).unwrap();
        let c = VectorField::from_components(vec![one.clone(), one]).unwrap();
        assert!(identity_residual_laplacian(&c, &c).unwrap() < 1e-14);
        assert!(identity_residual_divergence(&c, &c).unwrap() < 1e-14);

        let pw = e1_along(g, 0);
        let h2 = pw.sobolev_norm(2.0).unwrap();
        assert!(identity_residual_laplacian(&pw, &pw).unwrap() <= 1e-11 * h2 * h2);
        assert!(identity_residual_divergence(&pw, &pw).unwrap() <= 1e-11 * h2 * h2);
    }

    #[test]
    fn identity_band_limit_enforced() {
        let g = grid();
        let high = ScalarField::fourier_mode(g, &[20, 0]).unwrap();
        let w = VectorField::from_components(vec![high, ScalarField::zeros(g)]).unwrap();
        assert!(identity_residual_laplacian(&w, &w).is_err());
    }
}
