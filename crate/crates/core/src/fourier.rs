//! Grid and spectral representations of fields on the periodic unit cube.
//!
//! Samples live at `x = (i/N, j/N, k/N)` with x-fastest ordering. Spectra are
//! stored in FFT-native order with the Fourier-series normalization
//!
//! ```text
//! F(k) = N^-3 * sum_x f(x) exp(-2 pi i k.x),     f(x) = sum_k F(k) exp(2 pi i k.x)
//! ```
//!
//! The forward and inverse transforms are exact inverses of each other on the
//! full `N^3` bin set. Spectral calculus and everything built on it only uses
//! the retained band `|k_i| <= N/2 - 1`; the Nyquist planes are written as zero.

use std::ops::Neg;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Integer wavevector, in cycles per unit length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wavevector {
    pub kx: i64,
    pub ky: i64,
    pub kz: i64,
}

impl Wavevector {
    pub const ZERO: Wavevector = Wavevector {
        kx: 0,
        ky: 0,
        kz: 0,
    };

    pub const fn new(kx: i64, ky: i64, kz: i64) -> Self {
        Wavevector { kx, ky, kz }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn components(&self) -> [i64; 3] {
        [self.kx, self.ky, self.kz]
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.kx as f64, self.ky as f64, self.kz as f64]
    }

    pub fn norm_sq(&self) -> i64 {
        self.kx * self.kx + self.ky * self.ky + self.kz * self.kz
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }
}

impl Neg for Wavevector {
    type Output = Wavevector;

    fn neg(self) -> Wavevector {
        Wavevector::new(-self.kx, -self.ky, -self.kz)
    }
}

impl From<[i64; 3]> for Wavevector {
    fn from(k: [i64; 3]) -> Self {
        Wavevector::new(k[0], k[1], k[2])
    }
}

/// Rejects grid sizes that are not powers of two or smaller than 4.
pub fn check_grid_size(n: usize) -> Result<()> {
    if n >= 4 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::GridSize(n))
    }
}

/// Largest retained frequency magnitude per axis.
pub fn band_limit(n: usize) -> i64 {
    n as i64 / 2 - 1
}

/// Signed frequency of FFT bin `i`. The Nyquist bin maps to `-n/2`.
pub fn frequency(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT bin holding frequency `k` (taken modulo `n`).
pub fn bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Storage index of mode `k`, or `None` if `k` lies outside the retained band.
pub fn mode_index(n: usize, k: Wavevector) -> Option<usize> {
    let lim = band_limit(n);
    if k.components().iter().any(|c| c.abs() > lim) {
        return None;
    }
    Some(bin(k.kx, n) + n * (bin(k.ky, n) + n * bin(k.kz, n)))
}

/// Wavevector stored at `idx`, or `None` for bins on a Nyquist plane.
pub fn mode_at(n: usize, idx: usize) -> Option<Wavevector> {
    let half = n / 2;
    let (ix, iy, iz) = (idx % n, (idx / n) % n, idx / (n * n));
    if ix == half || iy == half || iz == half {
        return None;
    }
    Some(Wavevector::new(
        frequency(ix, n),
        frequency(iy, n),
        frequency(iz, n),
    ))
}

fn is_nyquist_bin(n: usize, idx: usize) -> bool {
    let half = n / 2;
    idx % n == half || (idx / n) % n == half || idx / (n * n) == half
}

/// Real scalar samples on an `n^3` periodic lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct GridScalarField {
    n: usize,
    samples: Vec<f64>,
}

impl GridScalarField {
    pub fn new(n: usize, samples: Vec<f64>) -> Result<Self> {
        check_grid_size(n)?;
        if samples.len() != n * n * n {
            return Err(Error::SizeMismatch {
                expected: n * n * n,
                found: samples.len(),
            });
        }
        Ok(GridScalarField { n, samples })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; n * n * n])
    }

    /// Samples `f(x, y, z)` at the lattice points.
    pub fn from_fn(n: usize, mut f: impl FnMut(f64, f64, f64) -> f64) -> Result<Self> {
        check_grid_size(n)?;
        let h = 1.0 / n as f64;
        let mut samples = Vec::with_capacity(n * n * n);
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    samples.push(f(ix as f64 * h, iy as f64 * h, iz as f64 * h));
                }
            }
        }
        Ok(GridScalarField { n, samples })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn get(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        let n = self.n;
        self.samples[ix % n + n * (iy % n + n * (iz % n))]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Grid mean of `f^2`, i.e. the discrete `L^2` norm squared.
    pub fn mean_square(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Real vector field sampled on an `n^3` periodic lattice, one grid per Cartesian component.
#[derive(Clone, Debug, PartialEq)]
pub struct GridVectorField {
    components: [GridScalarField; 3],
}

impl GridVectorField {
    pub fn new(ux: GridScalarField, uy: GridScalarField, uz: GridScalarField) -> Result<Self> {
        let n = ux.n;
        for c in [&uy, &uz] {
            if c.n != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: c.n,
                });
            }
        }
        Ok(GridVectorField {
            components: [ux, uy, uz],
        })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        let z = GridScalarField::zeros(n)?;
        Ok(GridVectorField {
            components: [z.clone(), z.clone(), z],
        })
    }

    /// Samples `f(x, y, z)` at the lattice points, visiting them in storage order.
    pub fn from_fn(n: usize, mut f: impl FnMut(f64, f64, f64) -> [f64; 3]) -> Result<Self> {
        check_grid_size(n)?;
        let h = 1.0 / n as f64;
        let mut comps = [0, 1, 2].map(|_| Vec::with_capacity(n * n * n));
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let v = f(ix as f64 * h, iy as f64 * h, iz as f64 * h);
                    for a in 0..3 {
                        comps[a].push(v[a]);
                    }
                }
            }
        }
        Ok(GridVectorField {
            components: comps.map(|samples| GridScalarField { n, samples }),
        })
    }

    pub fn n(&self) -> usize {
        self.components[0].n
    }

    pub fn component(&self, axis: usize) -> &GridScalarField {
        &self.components[axis]
    }

    pub fn component_mut(&mut self, axis: usize) -> &mut GridScalarField {
        &mut self.components[axis]
    }

    pub fn components(&self) -> &[GridScalarField; 3] {
        &self.components
    }

    pub fn into_components(self) -> [GridScalarField; 3] {
        self.components
    }

    pub fn get(&self, ix: usize, iy: usize, iz: usize) -> [f64; 3] {
        [0, 1, 2].map(|a| self.components[a].get(ix, iy, iz))
    }

    pub fn mean(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.components[a].mean())
    }

    pub fn mean_square(&self) -> f64 {
        self.components
            .iter()
            .map(GridScalarField::mean_square)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..3)
            .map(|a| self.components[a].max_abs_diff(&other.components[a]))
            .fold(0.0, f64::max)
    }
}

/// Fourier coefficients of a scalar field in FFT-native storage order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalar {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(n: usize) -> Result<Self> {
        check_grid_size(n)?;
        Ok(SpectralScalar {
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); n * n * n],
        })
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_grid_size(n)?;
        if coeffs.len() != n * n * n {
            return Err(Error::SizeMismatch {
                expected: n * n * n,
                found: coeffs.len(),
            });
        }
        Ok(SpectralScalar { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at `k`; zero outside the retained band.
    pub fn get(&self, k: Wavevector) -> Complex64 {
        mode_index(self.n, k)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// Sets the coefficient at `k`. Returns `false` (and stores nothing) outside the band.
    pub fn set(&mut self, k: Wavevector, value: Complex64) -> bool {
        match mode_index(self.n, k) {
            Some(i) => {
                self.coeffs[i] = value;
                true
            }
            None => false,
        }
    }

    /// Retained modes and their coefficients, in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (Wavevector, Complex64)> + '_ {
        let n = self.n;
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| mode_at(n, i).map(|k| (k, *c)))
    }

    /// `sum_k |F(k)|^2` over every stored bin.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(Complex64::norm_sqr).sum()
    }

    /// `<self, other> = sum_k conj(self(k)) other(k)`.
    pub fn inner(&self, other: &SpectralScalar) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn nyquist_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| is_nyquist_bin(self.n, *i))
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    pub fn zero_nyquist(&mut self) {
        let n = self.n;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if is_nyquist_bin(n, i) {
                *c = Complex64::default();
            }
        }
    }

    /// `max_k |F(-k) - conj F(k)|` over the retained band, relative to `max_k |F(k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        self.modes()
            .map(|(k, c)| (self.get(-k) - c.conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn map_modes(&self, f: impl Fn(Wavevector, Complex64) -> Complex64) -> SpectralScalar {
        let n = self.n;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match mode_at(n, i) {
                Some(k) => f(k, *c),
                None => Complex64::default(),
            })
            .collect();
        SpectralScalar { n, coeffs }
    }
}

/// Fourier coefficients of a vector field, one [`SpectralScalar`] per Cartesian component.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVector {
    components: [SpectralScalar; 3],
}

impl SpectralVector {
    pub fn zeros(n: usize) -> Result<Self> {
        let z = SpectralScalar::zeros(n)?;
        Ok(SpectralVector {
            components: [z.clone(), z.clone(), z],
        })
    }

    pub fn from_components(components: [SpectralScalar; 3]) -> Result<Self> {
        let n = components[0].n;
        for c in &components[1..] {
            if c.n != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: c.n,
                });
            }
        }
        Ok(SpectralVector { components })
    }

    pub fn n(&self) -> usize {
        self.components[0].n
    }

    pub fn component(&self, axis: usize) -> &SpectralScalar {
        &self.components[axis]
    }

    pub fn component_mut(&mut self, axis: usize) -> &mut SpectralScalar {
        &mut self.components[axis]
    }

    pub fn components(&self) -> &[SpectralScalar; 3] {
        &self.components
    }

    pub fn into_components(self) -> [SpectralScalar; 3] {
        self.components
    }

    pub fn get(&self, k: Wavevector) -> [Complex64; 3] {
        [0, 1, 2].map(|a| self.components[a].get(k))
    }

    pub fn set(&mut self, k: Wavevector, value: [Complex64; 3]) -> bool {
        let mut ok = true;
        for (a, v) in value.into_iter().enumerate() {
            ok &= self.components[a].set(k, v);
        }
        ok
    }

    /// Value stored at raw storage index `idx`.
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        [0, 1, 2].map(|a| self.components[a].coeffs[idx])
    }

    pub fn set_at(&mut self, idx: usize, value: [Complex64; 3]) {
        for (a, v) in value.into_iter().enumerate() {
            self.components[a].coeffs[idx] = v;
        }
    }

    pub fn energy(&self) -> f64 {
        self.components.iter().map(SpectralScalar::energy).sum()
    }

    pub fn inner(&self, other: &SpectralVector) -> Complex64 {
        (0..3)
            .map(|a| self.components[a].inner(&other.components[a]))
            .sum()
    }

    pub fn nyquist_energy(&self) -> f64 {
        self.components
            .iter()
            .map(SpectralScalar::nyquist_energy)
            .sum()
    }

    pub fn zero_nyquist(&mut self) {
        self.components
            .iter_mut()
            .for_each(SpectralScalar::zero_nyquist);
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.components
            .iter()
            .map(SpectralScalar::hermitian_defect)
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..3)
            .map(|a| self.components[a].max_abs_diff(&other.components[a]))
            .fold(0.0, f64::max)
    }

    /// Adds `scale * other` in place.
    pub fn add_scaled(&mut self, other: &SpectralVector, scale: f64) {
        for a in 0..3 {
            for (x, y) in self.components[a]
                .coeffs
                .iter_mut()
                .zip(&other.components[a].coeffs)
            {
                *x += y * scale;
            }
        }
    }
}

/// Sobolev exponent `r` in the weight `(1 + |k|^2)^(r/2)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct SobolevOrder(f64);

impl SobolevOrder {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() {
            Ok(SobolevOrder(r))
        } else {
            Err(Error::Usage(format!(
                "Sobolev order must be finite, got {r}"
            )))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Three-dimensional complex FFT over an `m^3` cube stored x-fastest.
pub(crate) struct Fft3 {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub(crate) fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    /// Unnormalized transform with kernel `exp(-+ 2 pi i k.x / m)`.
    pub(crate) fn process(&self, data: &mut [Complex64], direction: FftDirection) {
        let m = self.m;
        debug_assert_eq!(data.len(), m * m * m);
        if m == 1 {
            return;
        }
        let fft = match direction {
            FftDirection::Forward => &self.forward,
            FftDirection::Inverse => &self.inverse,
        };
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(data, &mut scratch);

        let mut plane = vec![Complex64::default(); m * m];
        // y lines, one z-slab at a time
        for iz in 0..m {
            let slab = &mut data[iz * m * m..(iz + 1) * m * m];
            for iy in 0..m {
                for ix in 0..m {
                    plane[ix * m + iy] = slab[ix + m * iy];
                }
            }
            fft.process_with_scratch(&mut plane, &mut scratch);
            for iy in 0..m {
                for ix in 0..m {
                    slab[ix + m * iy] = plane[ix * m + iy];
                }
            }
        }
        // z lines, one y-slab at a time
        for iy in 0..m {
            for iz in 0..m {
                for ix in 0..m {
                    plane[ix * m + iz] = data[ix + m * (iy + m * iz)];
                }
            }
            fft.process_with_scratch(&mut plane, &mut scratch);
            for iz in 0..m {
                for ix in 0..m {
                    data[ix + m * (iy + m * iz)] = plane[ix * m + iz];
                }
            }
        }
    }
}

/// Forward transform normalized to Fourier-series coefficients.
pub fn fft_scalar(f: &GridScalarField) -> SpectralScalar {
    let n = f.n;
    let mut coeffs: Vec<Complex64> = f.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Fft3::new(n).process(&mut coeffs, FftDirection::Forward);
    let scale = 1.0 / (n * n * n) as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    SpectralScalar { n, coeffs }
}

/// Complex samples `sum_k F(k) exp(2 pi i k.x)` at every lattice point.
pub fn ifft_scalar_complex(spectrum: &SpectralScalar) -> Vec<Complex64> {
    let mut data = spectrum.coeffs.clone();
    Fft3::new(spectrum.n).process(&mut data, FftDirection::Inverse);
    data
}

/// Inverse transform; returns the real part of the synthesis.
pub fn ifft_scalar(spectrum: &SpectralScalar) -> GridScalarField {
    GridScalarField {
        n: spectrum.n,
        samples: ifft_scalar_complex(spectrum)
            .into_iter()
            .map(|c| c.re)
            .collect(),
    }
}

pub fn fft_vector(u: &GridVectorField) -> SpectralVector {
    SpectralVector {
        components: [0, 1, 2].map(|a| fft_scalar(&u.components[a])),
    }
}

pub fn ifft_vector(spectrum: &SpectralVector) -> GridVectorField {
    GridVectorField {
        components: [0, 1, 2].map(|a| ifft_scalar(&spectrum.components[a])),
    }
}

pub fn ifft_vector_complex(spectrum: &SpectralVector) -> [Vec<Complex64>; 3] {
    [0, 1, 2].map(|a| ifft_scalar_complex(&spectrum.components[a]))
}

/// Largest imaginary part of the synthesized field on the lattice.
pub fn imaginary_residue(spectrum: &SpectralVector) -> f64 {
    ifft_vector_complex(spectrum)
        .iter()
        .flat_map(|c| c.iter().map(|v| v.im.abs()))
        .fold(0.0, f64::max)
}

/// `2 pi i k . U(k)` per retained mode.
pub fn spectral_divergence(u: &SpectralVector) -> SpectralScalar {
    let n = u.n();
    let mut out = SpectralScalar::zeros(n).expect("valid grid size");
    for (i, c) in out.coeffs.iter_mut().enumerate() {
        if let Some(k) = mode_at(n, i) {
            let kf = k.to_f64();
            let v = u.at(i);
            let dot = v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2];
            *c = Complex64::new(0.0, TWO_PI) * dot;
        }
    }
    out
}

/// `2 pi i k x U(k)` per retained mode.
pub fn spectral_curl(u: &SpectralVector) -> SpectralVector {
    let n = u.n();
    let mut out = SpectralVector::zeros(n).expect("valid grid size");
    let i2pi = Complex64::new(0.0, TWO_PI);
    for idx in 0..n * n * n {
        if let Some(k) = mode_at(n, idx) {
            let k = k.to_f64();
            let v = u.at(idx);
            out.set_at(
                idx,
                [
                    i2pi * (v[2] * k[1] - v[1] * k[2]),
                    i2pi * (v[0] * k[2] - v[2] * k[0]),
                    i2pi * (v[1] * k[0] - v[0] * k[1]),
                ],
            );
        }
    }
    out
}

/// `sqrt( sum_k (1 + |k|^2)^(r/2) |F(k)|^2 )` over the retained band.
pub fn sobolev_norm(f: &SpectralScalar, order: SobolevOrder) -> f64 {
    let half_r = order.0 / 2.0;
    f.modes()
        .map(|(k, c)| (1.0 + k.norm_sq() as f64).powf(half_r) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Mirror image `u(x) -> u(-x)` of a real-origin field, realized as per-mode conjugation.
pub trait Parity {
    fn parity(&self) -> Self;
}

impl Parity for SpectralScalar {
    fn parity(&self) -> Self {
        self.map_modes(|_, c| c.conj())
    }
}

impl Parity for SpectralVector {
    fn parity(&self) -> Self {
        SpectralVector {
            components: [0, 1, 2].map(|a| self.components[a].parity()),
        }
    }
}
