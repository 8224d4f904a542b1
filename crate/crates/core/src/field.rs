//! Complex scalar and vector fields on a periodic grid.
//!
//! Fields are stored canonically as Fourier coefficients; physical samples
//! are produced (and consumed) through explicit transforms. All arithmetic
//! that is diagonal in frequency acts on the coefficients directly, and
//! pointwise products go through physical space with the 2/3 dealiasing
//! rule applied on request.

use crate::error::{Error, Result};
use crate::grid::{fft_all_axes, GridSpec, MAX_DIM};
use num_complex::Complex64;

/// A complex scalar field, held as Fourier coefficients.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: GridSpec,
    hat: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, hat: vec![Complex64::default(); grid.total_points()] }
    }

    /// Builds a field from physical samples (forward transform).
    pub fn from_physical(grid: GridSpec, samples: &[Complex64]) -> Result<Self> {
        if samples.len() != grid.total_points() {
            return Err(Error::InvalidArgument(format!(
                "sample count {} does not match grid ({} points)",
                samples.len(),
                grid.total_points()
            )));
        }
        let mut hat = samples.to_vec();
        fft_all_axes(&grid, &mut hat, false);
        let scale = 1.0 / grid.total_points() as f64;
        for v in &mut hat {
            *v *= scale;
        }
        Ok(Self { grid, hat })
    }

    pub fn from_real_samples(grid: GridSpec, samples: &[f64]) -> Result<Self> {
        let complex: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_physical(grid, &complex)
    }

    /// Builds a field directly from coefficients.
    pub fn from_coefficients(grid: GridSpec, hat: Vec<Complex64>) -> Result<Self> {
        if hat.len() != grid.total_points() {
            return Err(Error::InvalidArgument("coefficient count does not match grid".into()));
        }
        Ok(Self { grid, hat })
    }

    /// Physical samples (inverse transform).
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.hat.clone();
        fft_all_axes(&self.grid, &mut data, true);
        data
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn hat(&self) -> &[Complex64] {
        &self.hat
    }

    pub fn hat_mut(&mut self) -> &mut [Complex64] {
        &mut self.hat
    }

    /// A single Fourier mode `exp(i kappa . x)` with integer wavevector `m`.
    pub fn fourier_mode(grid: GridSpec, m: &[i64]) -> Result<Self> {
        let n = grid.points_per_axis() as i64;
        if m.len() != grid.dim() {
            return Err(Error::InvalidArgument("wavevector length != dimension".into()));
        }
        let mut idx = [0usize; MAX_DIM];
        for a in 0..grid.dim() {
            if m[a] < -n / 2 || m[a] >= n / 2 {
                return Err(Error::InvalidArgument(format!("mode {} outside DFT range", m[a])));
            }
            idx[a] = m[a].rem_euclid(n) as usize;
        }
        let mut f = Self::zeros(grid);
        let lin = grid.linear_index(&idx[..grid.dim()]);
        f.hat[lin] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.hat {
            *v *= c;
        }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.hat.iter_mut().zip(&other.hat) {
            *a += c * b;
        }
    }

    /// Spectral derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = self.clone();
        let mut k = [0.0; MAX_DIM];
        for lin in 0..self.grid.total_points() {
            self.grid.wavevector(lin, &mut k);
            out.hat[lin] *= Complex64::new(0.0, k[axis]);
        }
        out
    }

    /// Inverse Laplacian with the zero mode mapped to zero.
    pub fn inv_laplacian(&self) -> Self {
        let mut out = self.clone();
        for lin in 0..self.grid.total_points() {
            let ksq = self.grid.wavevector_sq(lin);
            out.hat[lin] = if ksq == 0.0 {
                Complex64::default()
            } else {
                out.hat[lin] / (-ksq)
            };
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let mut out = self.clone();
        for lin in 0..self.grid.total_points() {
            out.hat[lin] *= -self.grid.wavevector_sq(lin);
        }
        out
    }

    /// Zeroes modes with `|m| > n/3` on any axis (2/3 rule).
    pub fn dealias(&mut self) {
        let cutoff = self.grid.dealias_cutoff();
        let mut m = [0i64; MAX_DIM];
        for lin in 0..self.grid.total_points() {
            self.grid.int_wavevector(lin, &mut m);
            if m[..self.grid.dim()].iter().any(|v| v.abs() > cutoff) {
                self.hat[lin] = Complex64::default();
            }
        }
    }

    /// L2 inner product `sum_m a(m) conj(b(m))`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.grid, other.grid);
        self.hat.iter().zip(&other.hat).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.hat.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        sobolev_check(s)?;
        let mut acc = 0.0;
        for lin in 0..self.grid.total_points() {
            acc += self.grid.sobolev_weight(lin, s) * self.hat[lin].norm_sqr();
        }
        finite(acc.sqrt())
    }

    /// Fraction of squared mass carried by modes with `|m| > radius`
    /// (Euclidean integer wavevector magnitude).
    pub fn spectral_mass_outside(&self, radius: f64) -> f64 {
        let total: f64 = self.hat.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let mut m = [0i64; MAX_DIM];
        let r2 = radius * radius;
        let mut outside = 0.0;
        for lin in 0..self.grid.total_points() {
            self.grid.int_wavevector(lin, &mut m);
            let msq: i64 = m[..self.grid.dim()].iter().map(|v| v * v).sum();
            if msq as f64 > r2 {
                outside += self.hat[lin].norm_sqr();
            }
        }
        outside / total
    }
}

/// A vector field with `dim` complex components.
#[derive(Debug, Clone)]
pub struct VectorField {
    grid: GridSpec,
    comps: Vec<ScalarField>,
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, comps: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect() }
    }

    pub fn from_components(comps: Vec<ScalarField>) -> Result<Self> {
        let grid = comps
            .first()
            .map(|c| c.grid())
            .ok_or_else(|| Error::InvalidArgument("empty component list".into()))?;
        if comps.len() != grid.dim() || comps.iter().any(|c| c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, comps })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.comps[i]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.comps
    }

    pub fn scale(&mut self, c: Complex64) {
        for comp in &mut self.comps {
            comp.scale(c);
        }
    }

    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.axpy(c, b);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale(Complex64::new(c, 0.0));
        out
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.comps.iter().zip(&other.comps).map(|(a, b)| a.inner(b)).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.comps.iter().map(|c| c.l2_norm().powi(2)).sum::<f64>().sqrt()
    }

    /// `( sum_m (1+|kappa|^2)^s |what(m)|^2 )^(1/2)` over all components.
    pub fn sobolev_norm(&self, s: f64) -> Result<f64> {
        sobolev_check(s)?;
        let mut acc = 0.0;
        for comp in &self.comps {
            acc += comp.sobolev_norm(s)?.powi(2);
        }
        finite(acc.sqrt())
    }

    pub fn divergence(&self) -> ScalarField {
        let mut out = ScalarField::zeros(self.grid);
        let mut k = [0.0; MAX_DIM];
        for lin in 0..self.grid.total_points() {
            self.grid.wavevector(lin, &mut k);
            let mut acc = Complex64::default();
            for a in 0..self.grid.dim() {
                acc += Complex64::new(0.0, k[a]) * self.comps[a].hat()[lin];
            }
            out.hat_mut()[lin] = acc;
        }
        out
    }

    pub fn dealias(&mut self) {
        for comp in &mut self.comps {
            comp.dealias();
        }
    }

    pub fn spectral_mass_outside(&self, radius: f64) -> f64 {
        let total: f64 = self.comps.iter().map(|c| c.l2_norm().powi(2)).sum();
        if total == 0.0 {
            return 0.0;
        }
        let outside: f64 = self
            .comps
            .iter()
            .map(|c| c.spectral_mass_outside(radius) * c.l2_norm().powi(2))
            .sum();
        outside / total
    }
}

/// Gradient of a scalar field.
pub fn gradient(s: &ScalarField) -> VectorField {
    let grid = s.grid();
    let comps = (0..grid.dim()).map(|a| s.derivative(a)).collect();
    VectorField { grid, comps }
}

/// Scalar curl in 2D: `d1 w2 - d2 w1`.
pub fn curl_2d(w: &VectorField) -> Result<ScalarField> {
    if w.dim() != 2 {
        return Err(Error::InvalidArgument("curl_2d requires a 2D field".into()));
    }
    let mut out = w.component(1).derivative(0);
    out.axpy(Complex64::new(-1.0, 0.0), &w.component(0).derivative(1));
    Ok(out)
}

/// Vector curl in 3D.
pub fn curl_3d(w: &VectorField) -> Result<VectorField> {
    if w.dim() != 3 {
        return Err(Error::InvalidArgument("curl_3d requires a 3D field".into()));
    }
    let c0 = {
        let mut t = w.component(2).derivative(1);
        t.axpy(Complex64::new(-1.0, 0.0), &w.component(1).derivative(2));
        t
    };
    let c1 = {
        let mut t = w.component(0).derivative(2);
        t.axpy(Complex64::new(-1.0, 0.0), &w.component(2).derivative(0));
        t
    };
    let c2 = {
        let mut t = w.component(1).derivative(0);
        t.axpy(Complex64::new(-1.0, 0.0), &w.component(0).derivative(1));
        t
    };
    VectorField::from_components(vec![c0, c1, c2])
}

/// Pointwise product of a scalar field with each component of `w`,
/// optionally dealiased.
pub fn pointwise_multiply(a: &ScalarField, w: &VectorField, dealias: bool) -> Result<VectorField> {
    if a.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let a_phys = a.to_physical();
    let comps = w
        .components()
        .iter()
        .map(|c| {
            let mut phys = c.to_physical();
            for (p, q) in phys.iter_mut().zip(&a_phys) {
                *p *= q;
            }
            let mut out = ScalarField::from_physical(a.grid(), &phys)?;
            if dealias {
                out.dealias();
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    VectorField::from_components(comps)
}

/// Product of a scalar field with another scalar field.
pub fn pointwise_multiply_scalar(
    a: &ScalarField,
    b: &ScalarField,
    dealias: bool,
) -> Result<ScalarField> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let a_phys = a.to_physical();
    let mut phys = b.to_physical();
    for (p, q) in phys.iter_mut().zip(&a_phys) {
        *p *= q;
    }
    let mut out = ScalarField::from_physical(a.grid(), &phys)?;
    if dealias {
        out.dealias();
    }
    Ok(out)
}

/// Multiplies physical samples of `w` by a cached real coefficient array,
/// returning spectral fields; the fast path used inside operator kernels.
pub(crate) fn multiply_by_real_samples(
    vals: &[f64],
    w_phys: &[Vec<Complex64>],
    grid: GridSpec,
    dealias: bool,
) -> Result<VectorField> {
    let comps = w_phys
        .iter()
        .map(|phys| {
            let prod: Vec<Complex64> =
                phys.iter().zip(vals).map(|(p, &v)| p * v).collect();
            let mut out = ScalarField::from_physical(grid, &prod)?;
            if dealias {
                out.dealias();
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    VectorField::from_components(comps)
}

fn sobolev_check(s: f64) -> Result<()> {
    if !(-2.0..=3.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("Sobolev index {s} outside [-2, 3]")));
    }
    Ok(())
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical("non-finite norm".into()))
    }
}
