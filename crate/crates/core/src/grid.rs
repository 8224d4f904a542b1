//! Periodic grids and the FFT machinery underneath every operator.
//!
//! A `GridSpec` describes a torus `[0, L)^d` sampled at `n` points per axis
//! with `n` a power of two. Frequencies are indexed by integer wavevectors
//! `m` in the symmetric DFT range `{-n/2, ..., n/2 - 1}` per axis; the
//! physical wavevector is `kappa = 2*pi*m / L`, so for the default period
//! `L = 2*pi` the two coincide.
//!
//! Transform normalization is fixed so that a field and its coefficients
//! satisfy `w(x) = sum_m what(m) exp(i kappa_m . x)` and Parseval reads
//! `(1/N) sum_x |w(x)|^2 = sum_m |what(m)|^2`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub const MAX_DIM: usize = 3;

/// Description of a periodic grid: dimension, points per axis, period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    period: f64,
}

impl GridSpec {
    /// Validates and builds a grid description.
    pub fn new(dim: usize, points_per_axis: usize, period: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        Ok(Self { dim, n: points_per_axis, period })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Grid spacing `h = L / n`.
    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn total_points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Integer frequency of a per-axis index, in the symmetric range.
    #[inline]
    pub fn freq_of_index(&self, idx: usize) -> i64 {
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Largest representable integer frequency magnitude per axis (`n/2 - 1`
    /// on the positive side).
    pub fn max_freq(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    /// Per-axis cutoff of the 2/3 dealiasing rule: modes with `|m| > n/3`
    /// are zeroed by [`crate::field::ScalarField::dealias`].
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Decomposes a linear index into per-axis indices (row-major layout).
    #[inline]
    pub fn axis_indices(&self, lin: usize, out: &mut [usize; MAX_DIM]) {
        let mut rem = lin;
        for a in (0..self.dim).rev() {
            out[a] = rem % self.n;
            rem /= self.n;
        }
    }

    /// Linear index from per-axis indices.
    #[inline]
    pub fn linear_index(&self, idx: &[usize]) -> usize {
        let mut lin = 0;
        for a in 0..self.dim {
            lin = lin * self.n + idx[a];
        }
        lin
    }

    /// Integer wavevector at a linear index.
    #[inline]
    pub fn int_wavevector(&self, lin: usize, out: &mut [i64; MAX_DIM]) {
        let mut rem = lin;
        for a in (0..self.dim).rev() {
            out[a] = self.freq_of_index(rem % self.n);
            rem /= self.n;
        }
    }

    /// Physical wavevector `kappa = 2*pi*m / L` at a linear index.
    #[inline]
    pub fn wavevector(&self, lin: usize, out: &mut [f64; MAX_DIM]) {
        let scale = 2.0 * std::f64::consts::PI / self.period;
        let mut rem = lin;
        for a in (0..self.dim).rev() {
            out[a] = scale * self.freq_of_index(rem % self.n) as f64;
            rem /= self.n;
        }
    }

    /// Physical coordinates of a grid point.
    #[inline]
    pub fn point(&self, lin: usize, out: &mut [f64; MAX_DIM]) {
        let h = self.spacing();
        let mut rem = lin;
        for a in (0..self.dim).rev() {
            out[a] = h * (rem % self.n) as f64;
            rem /= self.n;
        }
    }

    /// Squared physical wavevector magnitude at a linear index.
    #[inline]
    pub fn wavevector_sq(&self, lin: usize) -> f64 {
        let mut k = [0.0; MAX_DIM];
        self.wavevector(lin, &mut k);
        k[..self.dim].iter().map(|v| v * v).sum()
    }

    /// Sobolev weight `(1 + |kappa|^2)^s` at a linear index.
    #[inline]
    pub fn sobolev_weight(&self, lin: usize, s: f64) -> f64 {
        (1.0 + self.wavevector_sq(lin)).powf(s)
    }
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Unnormalized multi-dimensional DFT along every axis, in place.
///
/// Forward uses `exp(-i k x)` lanes, inverse `exp(+i k x)`; neither scales,
/// so forward-then-inverse multiplies by the total point count.
pub(crate) fn fft_all_axes(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = grid.points_per_axis();
    let total = grid.total_points();
    debug_assert_eq!(data.len(), total);
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len().max(1)];

    // Last axis is contiguous: one batched call over the whole buffer.
    fft.process_with_scratch(data, &mut scratch);

    // Remaining axes: gather lanes into an axis-contiguous buffer, batch
    // transform, scatter back.
    if grid.dim() >= 2 {
        let mut gathered = vec![Complex64::default(); total];
        for axis in (0..grid.dim() - 1).rev() {
            let stride = n.pow((grid.dim() - 1 - axis) as u32);
            let block = stride * n;
            let mut lane = 0;
            for base_block in (0..total).step_by(block) {
                for offset in 0..stride {
                    let base = base_block + offset;
                    let dst = lane * n;
                    for t in 0..n {
                        gathered[dst + t] = data[base + t * stride];
                    }
                    lane += 1;
                }
            }
            fft.process_with_scratch(&mut gathered, &mut scratch);
            let mut lane = 0;
            for base_block in (0..total).step_by(block) {
                for offset in 0..stride {
                    let base = base_block + offset;
                    let src = lane * n;
                    for t in 0..n {
                        data[base + t * stride] = gathered[src + t];
                    }
                    lane += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_construction() {
        let g = GridSpec::new(2, 64, 2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(g.total_points(), 64 * 64);
        assert_eq!(g.freq_of_index(0), 0);
        assert_eq!(g.freq_of_index(31), 31);
        assert_eq!(g.freq_of_index(32), -32);
        assert_eq!(g.freq_of_index(63), -1);
        assert_eq!(g.max_freq(), 31);

        let g3 = GridSpec::new(3, 8, 2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(g3.total_points(), 512);
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(GridSpec::new(2, 63, 1.0).is_err());
        assert!(GridSpec::new(2, 4, 1.0).is_err());
        assert!(GridSpec::new(1, 64, 1.0).is_err());
        assert!(GridSpec::new(4, 64, 1.0).is_err());
        assert!(GridSpec::new(2, 64, 0.0).is_err());
        assert!(GridSpec::new(2, 64, -1.0).is_err());
    }

    #[test]
    fn fft_round_trip() {
        let g = GridSpec::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
        let total = g.total_points();
        let orig: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        fft_all_axes(&g, &mut data, false);
        fft_all_axes(&g, &mut data, true);
        let scale = 1.0 / total as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a * scale - b).norm() < 1e-13);
        }
    }
}
