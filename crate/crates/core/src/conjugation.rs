//! The conjugation operator `K` that diagonalizes the elastic system to
//! one order beyond its principal symbol.
//!
//! The off-diagonal blocks are
//! `K_PS w = 2 Phi(D) Lap^-1 grad( b . Pi_S w )` with
//! `b = (mu + lambda)^-1 grad mu`, and `K_SP = -K_PS^*` evaluated
//! analytically (`grad^* = -div`; `Phi`, `Lap^-1` and the dealias mask are
//! self-adjoint), so the discrete anti-symmetry `<K_PS w, v> = -<w, K_SP v>`
//! holds to rounding for arbitrary fields.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{GridSpec, MAX_DIM};
use crate::media::LameField;
use crate::multiplier::cutoff_profile;
use crate::operators::{apply_block, project, Mode, ModeBlock};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct ConjugationOperator {
    lame: LameField,
    m_threshold: f64,
    /// Components of `(mu + lambda)^-1 grad mu`, physical samples.
    b_phys: Vec<Vec<f64>>,
    /// `grad mu` physical samples (kept for the frozen-symbol check).
    grad_mu_phys: Vec<Vec<f64>>,
    /// Sampled cutoff `Phi(|kappa|)` per frequency point.
    phi: Vec<f64>,
}

/// Result of evaluating the frozen-coefficient symbol identity at one
/// `(x, xi)` pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymbolCheck {
    pub residual: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
}

/// Outcome of the empirical cutoff calibration.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub m_threshold: f64,
    /// `(s, estimated operator norm of K on H^s)` pairs.
    pub norms: Vec<(f64, f64)>,
    pub attempts: usize,
}

impl ConjugationOperator {
    /// Precomputes `b` and the cutoff for threshold `m >= 1`.
    pub fn new(f: &LameField, m_threshold: f64) -> Result<Self> {
        if !(m_threshold >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cutoff threshold must be >= 1, got {m_threshold}"
            )));
        }
        f.validate()?;
        let grid = f.grid();
        let d = grid.dim();
        let mu_field = ScalarField::from_real_samples(grid, f.mu())?;
        let mut b_phys = Vec::with_capacity(d);
        let mut grad_mu_phys = Vec::with_capacity(d);
        for a in 0..d {
            let grad_a: Vec<f64> =
                mu_field.derivative(a).to_physical().iter().map(|v| v.re).collect();
            let b_a: Vec<f64> = grad_a
                .iter()
                .zip(f.mu().iter().zip(f.lambda()))
                .map(|(&g, (&m, &l))| g / (m + l))
                .collect();
            grad_mu_phys.push(grad_a);
            b_phys.push(b_a);
        }
        let phi: Vec<f64> = (0..grid.total_points())
            .map(|lin| cutoff_profile(grid.wavevector_sq(lin).sqrt(), m_threshold))
            .collect();
        Ok(Self { lame: f.clone(), m_threshold, b_phys, grad_mu_phys, phi })
    }

    /// Doubles the threshold from 2 until the power-iteration norm estimate
    /// of `K` on `H^s` is `<= 0.45` for every requested `s`.
    pub fn calibrate(f: &LameField, s_list: &[f64]) -> Result<(Self, CalibrationReport)> {
        let grid = f.grid();
        let nyquist = std::f64::consts::PI / grid.spacing();
        let mut m = 2.0;
        let mut attempts = 0;
        loop {
            if m > nyquist / 2.0 {
                return Err(Error::NonConvergence(format!(
                    "calibration threshold {m} exceeds half the Nyquist frequency \
                     {:.1}; medium too rough for this grid",
                    nyquist / 2.0
                )));
            }
            attempts += 1;
            let op = Self::new(f, m)?;
            let mut norms = Vec::with_capacity(s_list.len());
            let mut ok = true;
            for &s in s_list {
                let est = crate::analysis::operator_norm_estimate(
                    &crate::analysis::KHandle(&op),
                    s,
                    0xC0FFEE,
                    30,
                )?;
                ok &= est <= 0.45;
                norms.push((s, est));
            }
            if ok {
                return Ok((op, CalibrationReport { m_threshold: m, norms, attempts }));
            }
            m *= 2.0;
        }
    }

    pub fn lame(&self) -> &LameField {
        &self.lame
    }

    pub fn grid(&self) -> GridSpec {
        self.lame.grid()
    }

    pub fn m_threshold(&self) -> f64 {
        self.m_threshold
    }

    fn check_grid(&self, w: &VectorField) -> Result<()> {
        if w.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `K_PS w = 2 Phi(D) Lap^-1 grad( b . Pi_S w )`; the output is a
    /// gradient field, hence exactly P-polarized.
    pub fn apply_ps(&self, w: &VectorField) -> Result<VectorField> {
        self.check_grid(w)?;
        let grid = self.grid();
        let d = grid.dim();
        let s_part = project(Mode::S, w);
        let mut dot = vec![Complex64::default(); grid.total_points()];
        for a in 0..d {
            let phys = s_part.component(a).to_physical();
            for (acc, (p, &b)) in dot.iter_mut().zip(phys.iter().zip(&self.b_phys[a])) {
                *acc += p * b;
            }
        }
        let mut q = ScalarField::from_physical(grid, &dot)?;
        q.dealias();
        let mut out = VectorField::zeros(grid);
        let mut k = [0.0; MAX_DIM];
        for lin in 0..grid.total_points() {
            grid.wavevector(lin, &mut k);
            let ksq: f64 = k[..d].iter().map(|v| v * v).sum();
            if ksq == 0.0 {
                continue;
            }
            let factor = q.hat()[lin] * (2.0 * self.phi[lin] / -ksq);
            for a in 0..d {
                out.component_mut(a).hat_mut()[lin] = factor * Complex64::new(0.0, k[a]);
            }
        }
        Ok(out)
    }

    /// `K_SP = -K_PS^*`, applied as `2 Pi_S( b * (Phi(D) Lap^-1 div w) )`
    /// with the dealias mask on the scalar factor, mirroring `apply_ps` so
    /// the pair is an exact discrete adjoint pair.
    pub fn apply_sp(&self, w: &VectorField) -> Result<VectorField> {
        self.check_grid(w)?;
        let grid = self.grid();
        let d = grid.dim();
        let mut scalar = w.divergence();
        {
            let hat = scalar.hat_mut();
            for lin in 0..grid.total_points() {
                let ksq = grid.wavevector_sq(lin);
                hat[lin] = if ksq == 0.0 {
                    Complex64::default()
                } else {
                    hat[lin] * (self.phi[lin] / -ksq)
                };
            }
        }
        scalar.dealias();
        let s_phys = scalar.to_physical();
        let comps = (0..d)
            .map(|a| {
                let samples: Vec<Complex64> = s_phys
                    .iter()
                    .zip(&self.b_phys[a])
                    .map(|(&s, &b)| s * (2.0 * b))
                    .collect();
                ScalarField::from_physical(grid, &samples)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(project(Mode::S, &VectorField::from_components(comps)?))
    }

    /// `K = K_PS + K_SP` (the diagonal blocks vanish by construction).
    pub fn apply(&self, w: &VectorField) -> Result<VectorField> {
        let mut out = self.apply_ps(w)?;
        out.axpy(Complex64::new(1.0, 0.0), &self.apply_sp(w)?);
        Ok(out)
    }

    /// Solves `(I + K) w = v` by the Neumann series; requires the
    /// calibrated contraction (norm of K below 1/2).
    pub fn neumann_inverse(&self, v: &VectorField, tol: f64) -> Result<VectorField> {
        self.check_grid(v)?;
        let vnorm = v.l2_norm();
        if vnorm == 0.0 {
            return Ok(v.clone());
        }
        let mut out = v.clone();
        let mut term = v.clone();
        for _ in 0..50 {
            let mut next = self.apply(&term)?;
            next.scale(Complex64::new(-1.0, 0.0));
            term = next;
            out.axpy(Complex64::new(1.0, 0.0), &term);
            let tnorm = term.l2_norm();
            if !tnorm.is_finite() {
                return Err(Error::Numerical("Neumann term became non-finite".into()));
            }
            if tnorm <= tol * vnorm {
                return Ok(out);
            }
        }
        Err(Error::NonConvergence(
            "Neumann series for (I+K)^-1 did not reach tolerance in 50 terms; \
             check calibration"
                .into(),
        ))
    }

    /// The conjugation defect `(K_PS A_SS - A_PP K_PS + A_PS) w`, evaluated
    /// by composing the implemented blocks. The input must be essentially
    /// band-limited (spectral mass outside the dealias ball below 1e-6).
    pub fn remainder(&self, w: &VectorField) -> Result<VectorField> {
        self.check_grid(w)?;
        if w.spectral_mass_outside(self.grid().dealias_cutoff() as f64) > 1e-6 {
            return Err(Error::InvalidArgument(
                "remainder input carries spectral mass beyond the dealias ball".into(),
            ));
        }
        let ass = apply_block(ModeBlock::SS, &self.lame, w)?;
        let kps_ass = self.apply_ps(&ass)?;
        let kps_w = self.apply_ps(w)?;
        let app_kps = apply_block(ModeBlock::PP, &self.lame, &kps_w)?;
        let aps = apply_block(ModeBlock::PS, &self.lame, w)?;
        let mut out = kps_ass;
        out.axpy(Complex64::new(-1.0, 0.0), &app_kps);
        out.axpy(Complex64::new(1.0, 0.0), &aps);
        Ok(out)
    }

    /// Difference of the two sides of the composition identity behind the
    /// remainder bound:
    /// `Phi Lap^-1 grad( b . (Lap - grad div)(mu Pi_S w) )`
    /// versus `Phi grad( b . (mu Pi_S w) )`.
    pub fn composition_gap(&self, w: &VectorField) -> Result<VectorField> {
        self.check_grid(w)?;
        let grid = self.grid();
        let d = grid.dim();
        let s_part = project(Mode::S, w);

        // W = mu * Pi_S w
        let w_big = {
            let phys: Vec<Vec<Complex64>> =
                (0..d).map(|a| s_part.component(a).to_physical()).collect();
            crate::field::multiply_by_real_samples(self.lame.mu(), &phys, grid, true)?
        };

        // (Lap - grad div) W
        let div_w = w_big.divergence();
        let grad_div = crate::field::gradient(&div_w);
        let mut t_field = VectorField::from_components(
            (0..d).map(|a| w_big.component(a).laplacian()).collect(),
        )?;
        t_field.axpy(Complex64::new(-1.0, 0.0), &grad_div);

        let dot_with_b = |v: &VectorField| -> Result<ScalarField> {
            let mut acc = vec![Complex64::default(); grid.total_points()];
            for a in 0..d {
                let phys = v.component(a).to_physical();
                for (s, (p, &b)) in acc.iter_mut().zip(phys.iter().zip(&self.b_phys[a])) {
                    *s += p * b;
                }
            }
            let mut out = ScalarField::from_physical(grid, &acc)?;
            out.dealias();
            Ok(out)
        };

        let q_lhs = dot_with_b(&t_field)?;
        let q_rhs = dot_with_b(&w_big)?;

        let mut out = VectorField::zeros(grid);
        let mut k = [0.0; MAX_DIM];
        for lin in 0..grid.total_points() {
            grid.wavevector(lin, &mut k);
            let ksq: f64 = k[..d].iter().map(|v| v * v).sum();
            if ksq == 0.0 {
                continue;
            }
            let lhs_factor = q_lhs.hat()[lin] * (self.phi[lin] / -ksq);
            let rhs_factor = q_rhs.hat()[lin] * self.phi[lin];
            for a in 0..d {
                let ik = Complex64::new(0.0, k[a]);
                out.component_mut(a).hat_mut()[lin] = ik * (lhs_factor - rhs_factor);
            }
        }
        Ok(out)
    }

    /// Evaluates both sides of the frozen-coefficient symbol identity
    /// `sigma_-1(K_PS) = -sigma_1(A_PS) / ((mu + lambda)|xi|^2)` at a grid
    /// point `x` and frequency `xi = mag * direction`. Requires the cutoff
    /// fully open (`mag >= 2M`).
    pub fn symbol_check(&self, x: &[f64], direction: &[f64], mag: f64) -> Result<SymbolCheck> {
        let grid = self.grid();
        let d = grid.dim();
        if x.len() != d || direction.len() != d {
            return Err(Error::InvalidArgument("point/direction length != dimension".into()));
        }
        if mag < 2.0 * self.m_threshold {
            return Err(Error::InvalidArgument(format!(
                "|xi| = {mag} below the open-cutoff threshold 2M = {}",
                2.0 * self.m_threshold
            )));
        }
        // Snap x to the nearest grid point.
        let h = grid.spacing();
        let n = grid.points_per_axis();
        let mut idx = [0usize; MAX_DIM];
        for a in 0..d {
            idx[a] = ((x[a] / h).round() as i64).rem_euclid(n as i64) as usize;
        }
        let lin = grid.linear_index(&idx[..d]);

        let dirnorm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if dirnorm == 0.0 {
            return Err(Error::InvalidArgument("zero direction".into()));
        }
        let xi: Vec<f64> = direction.iter().map(|v| v / dirnorm * mag).collect();
        let xisq = mag * mag;

        // sigma_0(Pi_S) = I - xi xi^T / |xi|^2
        let pi_s = |i: usize, l: usize| -> f64 {
            let delta = if i == l { 1.0 } else { 0.0 };
            delta - xi[i] * xi[l] / xisq
        };

        let mu_plus_lambda = self.lame.mu()[lin] + self.lame.lambda()[lin];
        let mut residual_sq = 0.0;
        let mut lhs_sq = 0.0;
        let mut rhs_sq = 0.0;
        for i in 0..d {
            for m in 0..d {
                // Implemented K_PS frozen at x: 2 * (-1/|xi|^2) * (i xi_i) * (b . Pi_S)_m
                let mut b_pis = 0.0;
                let mut gmu_pis = 0.0;
                for l in 0..d {
                    b_pis += self.b_phys[l][lin] * pi_s(l, m);
                    gmu_pis += self.grad_mu_phys[l][lin] * pi_s(l, m);
                }
                let lhs = Complex64::new(0.0, xi[i]) * (-2.0 / xisq) * b_pis;
                // -sigma_1(A_PS) / ((mu+lambda)|xi|^2) with
                // sigma_1(A_PS) = 2 i xi_i (grad mu . Pi_S)_m
                let rhs = Complex64::new(0.0, xi[i]) * (-2.0 / (mu_plus_lambda * xisq)) * gmu_pis;
                residual_sq += (lhs - rhs).norm_sqr();
                lhs_sq += lhs.norm_sqr();
                rhs_sq += rhs.norm_sqr();
            }
        }
        Ok(SymbolCheck {
            residual: residual_sq.sqrt(),
            lhs_norm: lhs_sq.sqrt(),
            rhs_norm: rhs_sq.sqrt(),
        })
    }
}
