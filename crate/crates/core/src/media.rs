//! Construction and validation of Lame parameter fields, plus probe
//! wavefields (polarized packets and band-limited random fields).
//!
//! The `c11_radial` family realizes "C^{1,1} but not C^2" media at grid
//! scale: a radial quartic profile glued at its support radius with
//! matching value and first derivative but a jumping second derivative.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{GridSpec, MAX_DIM};
use crate::operators::{project, Mode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A localized perturbation of the background medium.
#[derive(Debug, Clone)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    /// Gaussian width for `smooth_bump`, support radius for `c11_radial`.
    pub extent: f64,
    pub amplitude_mu: f64,
    pub amplitude_lambda: f64,
}

#[derive(Debug, Clone)]
pub enum MediumFamily {
    Constant { mu0: f64, lambda0: f64 },
    SmoothBump { mu0: f64, lambda0: f64, bumps: Vec<BumpSpec> },
    C11Radial { mu0: f64, lambda0: f64, bumps: Vec<BumpSpec> },
}

impl MediumFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MediumFamily::Constant { .. } => "constant",
            MediumFamily::SmoothBump { .. } => "smooth_bump",
            MediumFamily::C11Radial { .. } => "c11_radial",
        }
    }
}

/// Finite-difference regularity estimates of a coefficient field.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct C11Norms {
    pub sup: f64,
    pub sup_gradient: f64,
    pub gradient_lipschitz: f64,
}

/// The Lame pair `(mu, lambda)` sampled on a grid.
#[derive(Debug, Clone)]
pub struct LameField {
    grid: GridSpec,
    mu: Vec<f64>,
    lambda: Vec<f64>,
    family: String,
    mu_norms: C11Norms,
    lambda_norms: C11Norms,
}

#[derive(Debug, Clone, Serialize)]
pub struct LameReport {
    pub min_mu: f64,
    pub min_mu_plus_lambda: f64,
    pub min_2mu_plus_lambda: f64,
    pub mu_norms: C11Norms,
    pub lambda_norms: C11Norms,
}

impl LameField {
    pub fn from_family(grid: GridSpec, family: &MediumFamily) -> Result<Self> {
        let total = grid.total_points();
        let (mut mu, mut lambda) = match family {
            MediumFamily::Constant { mu0, lambda0 } => {
                (vec![*mu0; total], vec![*lambda0; total])
            }
            MediumFamily::SmoothBump { mu0, lambda0, bumps } => {
                for b in bumps {
                    check_seam_clearance(grid, b, 3.0 * b.extent)?;
                }
                sample_bumps(grid, *mu0, *lambda0, bumps, smooth_profile)
            }
            MediumFamily::C11Radial { mu0, lambda0, bumps } => {
                for b in bumps {
                    check_seam_clearance(grid, b, b.extent)?;
                }
                sample_bumps(grid, *mu0, *lambda0, bumps, radial_quartic_profile)
            }
        };
        // Coefficients are real by construction; scrub negative zeros so
        // constant media hash identically across runs.
        for v in mu.iter_mut().chain(lambda.iter_mut()) {
            if *v == 0.0 {
                *v = 0.0;
            }
        }
        let field = Self {
            grid,
            mu_norms: c11_norms(grid, &mu),
            lambda_norms: c11_norms(grid, &lambda),
            mu,
            lambda,
            family: family.name().to_string(),
        };
        let report = field.validate()?;
        let _ = report;
        Ok(field)
    }

    /// Positivity report; errors name the first failing constraint.
    pub fn validate(&self) -> Result<LameReport> {
        let min_mu = self.mu.iter().cloned().fold(f64::INFINITY, f64::min);
        let min_ml = self
            .mu
            .iter()
            .zip(&self.lambda)
            .map(|(m, l)| m + l)
            .fold(f64::INFINITY, f64::min);
        let min_2ml = self
            .mu
            .iter()
            .zip(&self.lambda)
            .map(|(m, l)| 2.0 * m + l)
            .fold(f64::INFINITY, f64::min);
        let mut failures = Vec::new();
        if min_mu <= 0.0 {
            failures.push(format!("min mu = {min_mu:.6} <= 0"));
        }
        if min_ml <= 0.0 {
            failures.push(format!("min (mu + lambda) = {min_ml:.6} <= 0"));
        }
        if min_2ml <= 0.0 {
            failures.push(format!("min (2 mu + lambda) = {min_2ml:.6} <= 0"));
        }
        if !failures.is_empty() {
            return Err(Error::Positivity(failures.join("; ")));
        }
        Ok(LameReport {
            min_mu,
            min_mu_plus_lambda: min_ml,
            min_2mu_plus_lambda: min_2ml,
            mu_norms: self.mu_norms,
            lambda_norms: self.lambda_norms,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn mu_norms(&self) -> C11Norms {
        self.mu_norms
    }

    pub fn lambda_norms(&self) -> C11Norms {
        self.lambda_norms
    }

    /// Largest wave speed `sqrt(max(2 mu + lambda))`; sets the CFL bound.
    pub fn max_speed(&self) -> f64 {
        self.mu
            .iter()
            .zip(&self.lambda)
            .map(|(m, l)| 2.0 * m + l)
            .fold(0.0f64, f64::max)
            .sqrt()
    }

    pub fn is_constant(&self) -> bool {
        self.family == "constant"
    }
}

fn check_seam_clearance(grid: GridSpec, bump: &BumpSpec, reach: f64) -> Result<()> {
    if bump.center.len() != grid.dim() {
        return Err(Error::InvalidArgument("bump center length != dimension".into()));
    }
    if !(bump.extent > 0.0) {
        return Err(Error::InvalidArgument("bump extent must be positive".into()));
    }
    let period = grid.period();
    for &c in &bump.center {
        let c = c.rem_euclid(period);
        let clearance = c.min(period - c);
        if clearance < reach {
            return Err(Error::InvalidArgument(format!(
                "bump support (reach {reach:.3}) touches the periodic seam (clearance {clearance:.3})"
            )));
        }
    }
    Ok(())
}

/// Gaussian profile summed over nearest periodic images, so the sampled
/// field is exactly periodic and smooth.
fn smooth_profile(r2_images: &[f64], width: f64) -> f64 {
    r2_images.iter().map(|&r2| (-r2 / (2.0 * width * width)).exp()).sum()
}

/// Radial quartic `(1 - (r/R)^2)^2` on `r <= R`, zero outside: value and
/// first derivative match at the glue radius, the second derivative jumps.
fn radial_quartic_profile(r2_images: &[f64], radius: f64) -> f64 {
    r2_images
        .iter()
        .map(|&r2| {
            let q = r2 / (radius * radius);
            if q >= 1.0 {
                0.0
            } else {
                (1.0 - q) * (1.0 - q)
            }
        })
        .sum()
}

fn sample_bumps(
    grid: GridSpec,
    mu0: f64,
    lambda0: f64,
    bumps: &[BumpSpec],
    profile: fn(&[f64], f64) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let total = grid.total_points();
    let period = grid.period();
    let d = grid.dim();
    let mut mu = vec![mu0; total];
    let mut lambda = vec![lambda0; total];
    let mut x = [0.0; MAX_DIM];
    let offsets = [-period, 0.0, period];
    let mut r2s: Vec<f64> = Vec::with_capacity(3usize.pow(d as u32));
    for lin in 0..total {
        grid.point(lin, &mut x);
        for b in bumps {
            r2s.clear();
            // Squared distance to every neighbor image of the bump center.
            let image_count = 3usize.pow(d as u32);
            for img in 0..image_count {
                let mut rem = img;
                let mut r2 = 0.0;
                for a in 0..d {
                    let dx = x[a] - b.center[a] + offsets[rem % 3];
                    rem /= 3;
                    r2 += dx * dx;
                }
                r2s.push(r2);
            }
            let v = profile(&r2s, b.extent);
            mu[lin] += b.amplitude_mu * v;
            lambda[lin] += b.amplitude_lambda * v;
        }
    }
    (mu, lambda)
}

/// Finite-difference sup norms of a sampled coefficient field.
fn c11_norms(grid: GridSpec, vals: &[f64]) -> C11Norms {
    let n = grid.points_per_axis();
    let d = grid.dim();
    let h = grid.spacing();
    let mut sup = 0.0f64;
    let mut sup_grad = 0.0f64;
    let mut lip = 0.0f64;
    let mut idx = [0usize; MAX_DIM];
    let shift = |idx: &[usize; MAX_DIM], a: usize, by: i64| -> usize {
        let mut out = *idx;
        out[a] = (idx[a] as i64 + by).rem_euclid(n as i64) as usize;
        grid.linear_index(&out[..d])
    };
    for lin in 0..grid.total_points() {
        grid.axis_indices(lin, &mut idx);
        let v0 = vals[lin];
        sup = sup.max(v0.abs());
        for a in 0..d {
            let vp = vals[shift(&idx, a, 1)];
            let vm = vals[shift(&idx, a, -1)];
            sup_grad = sup_grad.max(((vp - vm) / (2.0 * h)).abs());
            lip = lip.max(((vp - 2.0 * v0 + vm) / (h * h)).abs());
            for b in (a + 1)..d {
                let mut pp = idx;
                pp[a] = (idx[a] + 1) % n;
                pp[b] = (idx[b] + 1) % n;
                let mut pm = idx;
                pm[a] = (idx[a] + 1) % n;
                pm[b] = (idx[b] + n - 1) % n;
                let mut mp = idx;
                mp[a] = (idx[a] + n - 1) % n;
                mp[b] = (idx[b] + 1) % n;
                let mut mm = idx;
                mm[a] = (idx[a] + n - 1) % n;
                mm[b] = (idx[b] + n - 1) % n;
                let mixed = (vals[grid.linear_index(&pp[..d])] - vals[grid.linear_index(&pm[..d])]
                    - vals[grid.linear_index(&mp[..d])]
                    + vals[grid.linear_index(&mm[..d])])
                    / (4.0 * h * h);
                lip = lip.max(mixed.abs());
            }
        }
    }
    C11Norms { sup, sup_gradient: sup_grad, gradient_lipschitz: lip }
}

/// Polarization of a probe packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    P,
    /// Shear branch index: 0 is the smallest-index coordinate vector
    /// orthogonalized against `k`; 1 (3D only) completes the frame.
    S(usize),
}

impl Polarization {
    pub fn mode(&self) -> Mode {
        match self {
            Polarization::P => Mode::P,
            Polarization::S(_) => Mode::S,
        }
    }
}

/// A Gaussian-enveloped plane-wave probe.
#[derive(Debug, Clone)]
pub struct PacketSpec {
    pub center: Vec<f64>,
    pub wavevector: Vec<i64>,
    pub polarization: Polarization,
    pub envelope_width: f64,
}

impl PacketSpec {
    /// Mode-pure packet with unit `L^2` norm, centered at the domain
    /// center, carrier `k` along the first axis.
    pub fn axis_carrier(grid: GridSpec, carrier: i64, polarization: Polarization, width: f64) -> Self {
        let mut wavevector = vec![0i64; grid.dim()];
        wavevector[0] = carrier;
        Self {
            center: vec![grid.period() / 2.0; grid.dim()],
            wavevector,
            polarization,
            envelope_width: width,
        }
    }
}

/// Deterministic unit polarization vector for carrier `k`.
pub fn polarization_vector(k: &[i64], pol: Polarization) -> Result<Vec<f64>> {
    let d = k.len();
    let kmag = (k.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt();
    if kmag < 1.0 {
        return Err(Error::InvalidArgument("carrier |k| must be >= 1".into()));
    }
    let khat: Vec<f64> = k.iter().map(|&v| v as f64 / kmag).collect();
    match pol {
        Polarization::P => Ok(khat),
        Polarization::S(branch) => {
            // First branch: smallest-index coordinate vector orthogonalized
            // against k.
            let j = (0..d)
                .min_by(|&a, &b| khat[a].abs().partial_cmp(&khat[b].abs()).unwrap())
                .unwrap();
            let mut v: Vec<f64> = (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            let dot: f64 = v.iter().zip(&khat).map(|(a, b)| a * b).sum();
            for i in 0..d {
                v[i] -= dot * khat[i];
            }
            let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            for a in &mut v {
                *a /= norm;
            }
            match branch {
                0 => Ok(v),
                1 if d == 3 => Ok(vec![
                    khat[1] * v[2] - khat[2] * v[1],
                    khat[2] * v[0] - khat[0] * v[2],
                    khat[0] * v[1] - khat[1] * v[0],
                ]),
                _ => Err(Error::InvalidArgument(format!(
                    "shear branch {branch} unavailable in {d}D"
                ))),
            }
        }
    }
}

/// Builds a Gaussian-enveloped plane-wave packet, exactly projected onto
/// its mode and normalized to unit `L^2` norm.
pub fn plane_wave_packet(grid: GridSpec, spec: &PacketSpec) -> Result<VectorField> {
    let d = grid.dim();
    if spec.center.len() != d || spec.wavevector.len() != d {
        return Err(Error::InvalidArgument("packet center/wavevector length != dimension".into()));
    }
    if !(spec.envelope_width > 0.0) {
        return Err(Error::InvalidArgument("envelope width must be positive".into()));
    }
    let pvec = polarization_vector(&spec.wavevector, spec.polarization)?;
    let period = grid.period();
    let w = spec.envelope_width;
    let freq_scale = 2.0 * std::f64::consts::PI / period;
    let total = grid.total_points();
    let mut x = [0.0; MAX_DIM];

    // Scalar profile: envelope times carrier.
    let mut scalar = vec![Complex64::default(); total];
    let mut boundary_mass = 0.0;
    let mut total_mass = 0.0;
    for lin in 0..total {
        grid.point(lin, &mut x);
        let mut r2 = 0.0;
        let mut phase = 0.0;
        let mut near_boundary = false;
        for a in 0..d {
            let mut dx = (x[a] - spec.center[a]).abs() % period;
            if dx > period / 2.0 {
                dx = period - dx;
            }
            r2 += dx * dx;
            phase += freq_scale * spec.wavevector[a] as f64 * x[a];
            let edge = x[a].min(period - x[a]);
            if edge < period / 4.0 {
                near_boundary = true;
            }
        }
        let env = (-r2 / (w * w)).exp();
        scalar[lin] = Complex64::from_polar(env, phase);
        let m = env * env;
        total_mass += m;
        if near_boundary {
            boundary_mass += m;
        }
    }
    if boundary_mass > 1e-8 * total_mass {
        return Err(Error::InvalidArgument(format!(
            "envelope too wide: boundary mass fraction {:.3e} exceeds 1e-8",
            boundary_mass / total_mass
        )));
    }

    let comps = (0..d)
        .map(|i| {
            let samples: Vec<Complex64> = scalar.iter().map(|&s| s * pvec[i]).collect();
            ScalarField::from_physical(grid, &samples)
        })
        .collect::<Result<Vec<_>>>()?;
    let raw = VectorField::from_components(comps)?;
    if raw.spectral_mass_outside(0.9 * (grid.points_per_axis() / 2) as f64) > 1e-8 {
        return Err(Error::InvalidArgument(
            "envelope too narrow: packet spectrum not resolved by the grid".into(),
        ));
    }
    let mut projected = project(spec.polarization.mode(), &raw);
    let norm = projected.l2_norm();
    if norm == 0.0 {
        return Err(Error::Numerical("packet vanished after projection".into()));
    }
    projected.scale(Complex64::new(1.0 / norm, 0.0));
    Ok(projected)
}

/// Which spectral content a random probe carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    P,
    S,
    Full,
}

/// Deterministic band-limited random field: coefficients supported on
/// `band.0 <= |m| <= band.1`, projected to the requested mode, unit norm.
pub fn random_band_limited(
    grid: GridSpec,
    seed: u64,
    band: (f64, f64),
    mode: ProbeMode,
) -> Result<VectorField> {
    if band.0 > band.1 || band.1 < 0.0 {
        return Err(Error::InvalidArgument("empty frequency band".into()));
    }
    if band.1 > grid.max_freq() as f64 {
        return Err(Error::InvalidArgument(format!(
            "band upper edge {} outside grid range (max |m| = {})",
            band.1,
            grid.max_freq()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.dim();
    let mut out = VectorField::zeros(grid);
    let mut m = [0i64; MAX_DIM];
    let mut populated = false;
    for lin in 0..grid.total_points() {
        grid.int_wavevector(lin, &mut m);
        let mag = (m[..d].iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt();
        if mag < band.0 || mag > band.1 {
            continue;
        }
        populated = true;
        for c in 0..d {
            let re: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            let im: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            out.component_mut(c).hat_mut()[lin] = Complex64::new(re, im);
        }
    }
    if !populated {
        return Err(Error::InvalidArgument("no lattice wavevectors inside band".into()));
    }
    let mut out = match mode {
        ProbeMode::P => project(Mode::P, &out),
        ProbeMode::S => project(Mode::S, &out),
        ProbeMode::Full => out,
    };
    let norm = out.l2_norm();
    if norm == 0.0 {
        return Err(Error::Numerical("random probe vanished after projection".into()));
    }
    out.scale(Complex64::new(1.0 / norm, 0.0));
    Ok(out)
}
