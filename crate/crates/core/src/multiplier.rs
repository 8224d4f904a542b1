//! Fourier multipliers: operators diagonal in frequency.
//!
//! A `Multiplier` samples a symbol `xi -> scalar` or `xi -> dim x dim`
//! matrix on the grid's wavevectors; the value at `xi = 0` is supplied
//! separately as the zero-mode rule and folded into the sampled data.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{GridSpec, MAX_DIM};
use num_complex::Complex64;

#[derive(Debug, Clone)]
enum SymbolData {
    Scalar(Vec<Complex64>),
    /// Row-major `dim x dim` matrix per frequency point.
    Matrix(Vec<Complex64>),
}

#[derive(Debug, Clone)]
pub struct Multiplier {
    grid: GridSpec,
    data: SymbolData,
}

impl Multiplier {
    /// Samples a scalar symbol; `zero_mode` is the value used at `xi = 0`.
    pub fn scalar(
        grid: GridSpec,
        symbol: impl Fn(&[f64]) -> Complex64,
        zero_mode: Complex64,
    ) -> Self {
        let mut k = [0.0; MAX_DIM];
        let data = (0..grid.total_points())
            .map(|lin| {
                grid.wavevector(lin, &mut k);
                if k[..grid.dim()].iter().all(|v| *v == 0.0) {
                    zero_mode
                } else {
                    symbol(&k[..grid.dim()])
                }
            })
            .collect();
        Self { grid, data: SymbolData::Scalar(data) }
    }

    /// Samples a matrix symbol (row-major `dim x dim` written into `out`).
    pub fn matrix(
        grid: GridSpec,
        symbol: impl Fn(&[f64], &mut [Complex64]),
        zero_mode: &[Complex64],
    ) -> Result<Self> {
        let d = grid.dim();
        if zero_mode.len() != d * d {
            return Err(Error::InvalidArgument("zero-mode matrix has wrong size".into()));
        }
        let mut k = [0.0; MAX_DIM];
        let mut data = vec![Complex64::default(); grid.total_points() * d * d];
        for lin in 0..grid.total_points() {
            grid.wavevector(lin, &mut k);
            let cell = &mut data[lin * d * d..(lin + 1) * d * d];
            if k[..d].iter().all(|v| *v == 0.0) {
                cell.copy_from_slice(zero_mode);
            } else {
                symbol(&k[..d], cell);
            }
        }
        Ok(Self { grid, data: SymbolData::Matrix(data) })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn apply(&self, w: &VectorField) -> Result<VectorField> {
        if w.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let d = self.grid.dim();
        match &self.data {
            SymbolData::Scalar(sym) => {
                let mut out = w.clone();
                for c in 0..d {
                    let hat = out.component_mut(c).hat_mut();
                    for (v, s) in hat.iter_mut().zip(sym) {
                        *v *= s;
                    }
                }
                Ok(out)
            }
            SymbolData::Matrix(sym) => {
                let mut out = VectorField::zeros(self.grid);
                for lin in 0..self.grid.total_points() {
                    let cell = &sym[lin * d * d..(lin + 1) * d * d];
                    for i in 0..d {
                        let mut acc = Complex64::default();
                        for l in 0..d {
                            acc += cell[i * d + l] * w.component(l).hat()[lin];
                        }
                        out.component_mut(i).hat_mut()[lin] = acc;
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn apply_scalar(&self, f: &ScalarField) -> Result<ScalarField> {
        if f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        match &self.data {
            SymbolData::Scalar(sym) => {
                let mut out = f.clone();
                for (v, s) in out.hat_mut().iter_mut().zip(sym) {
                    *v *= s;
                }
                Ok(out)
            }
            SymbolData::Matrix(_) => {
                Err(Error::InvalidArgument("matrix multiplier applied to scalar field".into()))
            }
        }
    }

    /// Pointwise composition: `self.compose(other)` applies `other` first,
    /// i.e. the symbol is the product `self(xi) * other(xi)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let d = self.grid.dim();
        let data = match (&self.data, &other.data) {
            (SymbolData::Scalar(a), SymbolData::Scalar(b)) => {
                SymbolData::Scalar(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (SymbolData::Matrix(a), SymbolData::Matrix(b)) => {
                let mut out = vec![Complex64::default(); a.len()];
                for lin in 0..self.grid.total_points() {
                    let ca = &a[lin * d * d..(lin + 1) * d * d];
                    let cb = &b[lin * d * d..(lin + 1) * d * d];
                    let cell = &mut out[lin * d * d..(lin + 1) * d * d];
                    for i in 0..d {
                        for j in 0..d {
                            let mut acc = Complex64::default();
                            for l in 0..d {
                                acc += ca[i * d + l] * cb[l * d + j];
                            }
                            cell[i * d + j] = acc;
                        }
                    }
                }
                SymbolData::Matrix(out)
            }
            (SymbolData::Scalar(a), SymbolData::Matrix(b))
            | (SymbolData::Matrix(b), SymbolData::Scalar(a)) => {
                let mut out = vec![Complex64::default(); b.len()];
                for lin in 0..self.grid.total_points() {
                    let s = a[lin];
                    for e in 0..d * d {
                        out[lin * d * d + e] = s * b[lin * d * d + e];
                    }
                }
                SymbolData::Matrix(out)
            }
        };
        Ok(Self { grid: self.grid, data })
    }

    pub fn laplacian(grid: GridSpec) -> Self {
        Self::scalar(
            grid,
            |k| Complex64::new(-k.iter().map(|v| v * v).sum::<f64>(), 0.0),
            Complex64::default(),
        )
    }

    /// `1 / (-|kappa|^2)` with the zero mode mapped to zero.
    pub fn inv_laplacian(grid: GridSpec) -> Self {
        Self::scalar(
            grid,
            |k| Complex64::new(-1.0 / k.iter().map(|v| v * v).sum::<f64>(), 0.0),
            Complex64::default(),
        )
    }

    pub fn derivative(grid: GridSpec, axis: usize) -> Self {
        Self::scalar(grid, |k| Complex64::new(0.0, k[axis]), Complex64::default())
    }

    pub fn sobolev_weight(grid: GridSpec, s: f64) -> Self {
        Self::scalar(
            grid,
            |k| Complex64::new((1.0 + k.iter().map(|v| v * v).sum::<f64>()).powf(s / 2.0), 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    /// Smooth radial cutoff: 0 for `|kappa| <= m`, 1 for `|kappa| >= 2m`,
    /// cubic blend `3t^2 - 2t^3` in `t = |kappa|/m - 1` between.
    pub fn radial_cutoff(grid: GridSpec, m: f64) -> Self {
        Self::scalar(
            grid,
            |k| Complex64::new(cutoff_profile(k.iter().map(|v| v * v).sum::<f64>().sqrt(), m), 0.0),
            Complex64::default(),
        )
    }

    /// Mode projector as a matrix multiplier (`P`: `xi xi^T / |xi|^2`,
    /// `S`: its complement; at `xi = 0` the P projector is 0 and S is I).
    pub fn projector(grid: GridSpec, mode: crate::operators::Mode) -> Self {
        let d = grid.dim();
        let mut zero = vec![Complex64::default(); d * d];
        if mode == crate::operators::Mode::S {
            for i in 0..d {
                zero[i * d + i] = Complex64::new(1.0, 0.0);
            }
        }
        Self::matrix(
            grid,
            |k, out| {
                let ksq: f64 = k.iter().map(|v| v * v).sum();
                for i in 0..d {
                    for l in 0..d {
                        let p = k[i] * k[l] / ksq;
                        let v = match mode {
                            crate::operators::Mode::P => p,
                            crate::operators::Mode::S => {
                                if i == l {
                                    1.0 - p
                                } else {
                                    -p
                                }
                            }
                        };
                        out[i * d + l] = Complex64::new(v, 0.0);
                    }
                }
            },
            &zero,
        )
        .expect("projector zero-mode matrix is square")
    }
}

/// The cutoff profile shared by the multiplier and frozen-symbol checks.
pub fn cutoff_profile(kmag: f64, m: f64) -> f64 {
    if kmag <= m {
        0.0
    } else if kmag >= 2.0 * m {
        1.0
    } else {
        let t = kmag / m - 1.0;
        3.0 * t * t - 2.0 * t * t * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(2, 32, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn e1_field(g: GridSpec) -> VectorField {
        let e1 = ScalarField::fourier_mode(g, &[1, 0]).unwrap();
        VectorField::from_components(vec![e1, ScalarField::zeros(g)]).unwrap()
    }

    #[test]
    fn modulus_squared_symbol_on_eigenfunction() {
        let g = grid();
        let m = Multiplier::scalar(
            g,
            |k| Complex64::new(k.iter().map(|v| v * v).sum::<f64>(), 0.0),
            Complex64::default(),
        );
        let w = e1_field(g);
        let out = m.apply(&w).unwrap();
        let diff = out.sub(&w);
        assert!(diff.l2_norm() < 1e-15);
    }

    #[test]
    fn inverse_laplacian_eigenvalue_and_zero_mode() {
        let g = grid();
        let m = Multiplier::inv_laplacian(g);
        let w = e1_field(g);
        let out = m.apply(&w).unwrap();
        let diff = out.add(&w);
        assert!(diff.l2_norm() < 1e-15);

        let one = ScalarField::fourier_mode(g, &[0, 0]).unwrap();
        let constant = VectorField::from_components(vec![one.clone(), one]).unwrap();
        let out = m.apply(&constant).unwrap();
        assert_eq!(out.l2_norm(), 0.0);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let g = grid();
        let d1 = Multiplier::derivative(g, 0);
        let lap = Multiplier::laplacian(g);
        let seq_first = |w: &VectorField| lap.apply(&d1.apply(w).unwrap()).unwrap();
        let composed = lap.compose(&d1).unwrap();

        let f = ScalarField::fourier_mode(g, &[3, -2]).unwrap();
        let w = VectorField::from_components(vec![f.clone(), f]).unwrap();
        let a = seq_first(&w);
        let b = composed.apply(&w).unwrap();
        let diff = a.sub(&b);
        assert!(diff.l2_norm() <= 1e-12 * a.l2_norm());
    }

    #[test]
    fn mismatched_grid_rejected() {
        let g = grid();
        let g2 = GridSpec::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
        let m = Multiplier::laplacian(g);
        assert!(matches!(m.apply(&VectorField::zeros(g2)), Err(Error::GridMismatch)));
    }

    #[test]
    fn cutoff_profile_shape() {
        assert_eq!(cutoff_profile(3.9, 4.0), 0.0);
        assert_eq!(cutoff_profile(8.0, 4.0), 1.0);
        assert_eq!(cutoff_profile(12.0, 4.0), 1.0);
        let mid = cutoff_profile(6.0, 4.0);
        assert!((mid - 0.5).abs() < 1e-14);
        // Monotone in the blend region.
        let mut prev = 0.0;
        for i in 0..=40 {
            let v = cutoff_profile(4.0 + i as f64 * 0.1, 4.0);
            assert!(v >= prev);
            prev = v;
        }
    }
}
