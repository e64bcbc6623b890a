//! Meyer (Littlewood-Paley) multiresolution analysis on the 3-torus.
//!
//! The 1D filters are
//!
//! ```text
//! b(k)      = exp(-1/k^2) for k > 0, 0 otherwise
//! g(k)      = b(2/3 - k) / (b(k - 1/3) + b(2/3 - k))
//! phi^(k)   = sqrt(g(k) g(-k))
//! psi^(k)   = sqrt(phi^(k/2)^2 - phi^(k)^2) exp(-i pi k)
//! ```
//!
//! Periodified 3D wavelets are tensor products indexed by level `j`, species
//! `eps = xi + 2 eta + 4 zeta` (bit set means `psi` on that axis) and location
//! `l in {0..2^j-1}^3`. Their Fourier coefficients are separable:
//!
//! ```text
//! w(k) = prod_a 2^(-j/2) g_a(k_a / 2^j) exp(-2 pi i k_a l_a / 2^j)
//! ```
//!
//! Because the filters have compact spectral support, analysis and synthesis
//! run in the Fourier domain: the coefficients of one (level, species) band are
//! a size-`2^j` DFT of the spectrum folded modulo `2^j`.

use std::fmt;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fourier::{bin, check_grid_size, Fft3, SpectralScalar, Wavevector};

/// Relative out-of-band energy above which an analysis is reported as lossy.
pub const LOSSY_TOLERANCE: f64 = 1e-12;

fn bump(k: f64) -> f64 {
    if k > 0.0 {
        (-1.0 / (k * k)).exp()
    } else {
        0.0
    }
}

fn transition(k: f64) -> f64 {
    let up = bump(2.0 / 3.0 - k);
    let down = bump(k - 1.0 / 3.0);
    up / (down + up)
}

/// Fourier transform of the Meyer scaling function on the line.
pub fn meyer_phi_hat(k: f64) -> f64 {
    (transition(k) * transition(-k)).sqrt()
}

/// Fourier transform of the Meyer mother wavelet on the line.
pub fn meyer_psi_hat(k: f64) -> Complex64 {
    let coarse = meyer_phi_hat(k / 2.0);
    let fine = meyer_phi_hat(k);
    let modulus = (coarse * coarse - fine * fine).max(0.0).sqrt();
    Complex64::from_polar(modulus, -std::f64::consts::PI * k)
}

/// Largest deviation of `sum_j phi^(k + j)^2` from one over the given points.
pub fn partition_check(samples: &[f64]) -> f64 {
    samples
        .iter()
        .map(|&k| {
            let s: f64 = (-2..=2).map(|j| meyer_phi_hat(k + j as f64).powi(2)).sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest `|k|` with a nonzero scaling-filter value at `level`.
pub fn scaling_support(level: u32) -> i64 {
    ((1i64 << (level + 1)) - 1) / 3
}

/// Largest `|k|` with a nonzero wavelet-filter value at `level`.
pub fn wavelet_support(level: u32) -> i64 {
    ((1i64 << (level + 2)) - 1) / 3
}

/// Per-axis frequency range represented exactly by the system through `j_max`.
pub fn mra_band_limit(j_max: u32) -> i64 {
    (1i64 << (j_max + 1)) / 3
}

/// Highest level whose wavelets fit inside the retained band of an `n^3` grid.
pub fn max_level(n: usize) -> Option<u32> {
    let lim = n as i64 / 2 - 1;
    (0..60u32).take_while(|&j| wavelet_support(j) <= lim).last()
}

pub fn check_level(level: u32, n: usize) -> Result<()> {
    check_grid_size(n)?;
    let max = max_level(n);
    match max {
        Some(m) if level <= m => Ok(()),
        _ => Err(Error::InadmissibleLevel { level, n, max }),
    }
}

/// Wavelet species 1..=7; bit `a` selects `psi` (set) or `phi` (clear) along axis `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Species(u8);

impl Species {
    pub fn new(eps: u8) -> Result<Self> {
        if (1..=7).contains(&eps) {
            Ok(Species(eps))
        } else {
            Err(Error::InvalidIndex(format!("species {eps} outside 1..=7")))
        }
    }

    pub fn all() -> impl Iterator<Item = Species> {
        (1..=7).map(Species)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// `(xi, eta, zeta)`.
    pub fn bits(self) -> [u8; 3] {
        [self.0 & 1, (self.0 >> 1) & 1, (self.0 >> 2) & 1]
    }

    /// The species whose helical pull-up reaches the `k || e_z` pole line.
    pub fn is_polar(self) -> bool {
        self.0 == 4
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `(level, species, location)` of a periodified 3D wavelet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveletIndex {
    pub level: u32,
    pub species: Species,
    pub loc: [u32; 3],
}

impl WaveletIndex {
    pub fn new(level: u32, eps: u8, loc: [u32; 3]) -> Result<Self> {
        let species = Species::new(eps)?;
        let m = 1u64 << level;
        if loc.iter().any(|&l| l as u64 >= m) {
            return Err(Error::InvalidIndex(format!(
                "location {loc:?} outside 0..{m} at level {level}"
            )));
        }
        Ok(WaveletIndex {
            level,
            species,
            loc,
        })
    }

    /// Every index from level 0 through `j_max`, in lexicographic order.
    pub fn enumerate(j_max: u32) -> impl Iterator<Item = WaveletIndex> {
        (0..=j_max).flat_map(|level| {
            let m = 1u32 << level;
            Species::all().flat_map(move |species| {
                (0..m).flat_map(move |lx| {
                    (0..m).flat_map(move |ly| {
                        (0..m).map(move |lz| WaveletIndex {
                            level,
                            species,
                            loc: [lx, ly, lz],
                        })
                    })
                })
            })
        })
    }
}

/// Nonzero samples of one separable factor: `(k, value)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisFactor {
    pub k: Vec<i64>,
    pub value: Vec<Complex64>,
}

impl AxisFactor {
    fn filter(level: u32, psi: bool, loc: u32) -> AxisFactor {
        let m = (1u64 << level) as f64;
        let amp = m.sqrt().recip();
        let lim = if psi {
            wavelet_support(level)
        } else {
            scaling_support(level)
        };
        let mut out = AxisFactor {
            k: Vec::new(),
            value: Vec::new(),
        };
        for k in -lim..=lim {
            let x = k as f64 / m;
            let g = if psi {
                meyer_psi_hat(x)
            } else {
                Complex64::new(meyer_phi_hat(x), 0.0)
            };
            if g.norm() == 0.0 {
                continue;
            }
            // k*l mod 2^j keeps the phase argument small
            let turns = ((k * loc as i64).rem_euclid(m as i64)) as f64 / m;
            let phase = Complex64::from_polar(amp, -2.0 * std::f64::consts::PI * turns);
            out.k.push(k);
            out.value.push(g * phase);
        }
        out
    }

    pub fn max_abs_k(&self) -> i64 {
        self.k.iter().map(|k| k.abs()).max().unwrap_or(0)
    }
}

/// Fourier coefficients of a separable periodic function, `w(k) = fx(kx) fy(ky) fz(kz)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableSpectrum {
    pub factors: [AxisFactor; 3],
}

impl SeparableSpectrum {
    pub fn max_abs_k(&self) -> i64 {
        self.factors
            .iter()
            .map(AxisFactor::max_abs_k)
            .max()
            .unwrap_or(0)
    }

    /// Nonzero modes as `(k, w(k))`.
    pub fn modes(&self) -> impl Iterator<Item = (Wavevector, Complex64)> + '_ {
        let [fx, fy, fz] = &self.factors;
        fz.k.iter().zip(&fz.value).flat_map(move |(&kz, &vz)| {
            fy.k.iter().zip(&fy.value).flat_map(move |(&ky, &vy)| {
                fx.k.iter()
                    .zip(&fx.value)
                    .map(move |(&kx, &vx)| (Wavevector::new(kx, ky, kz), vx * vy * vz))
            })
        })
    }

    /// `sum_k |w(k)|^2`, computed axis by axis.
    pub fn energy(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| f.value.iter().map(Complex64::norm_sqr).sum::<f64>())
            .product()
    }

    pub fn to_dense(&self, n: usize) -> Result<SpectralScalar> {
        let mut out = SpectralScalar::zeros(n)?;
        if self.max_abs_k() > n as i64 / 2 - 1 {
            return Err(Error::Usage(format!(
                "spectrum reaches |k| = {} beyond the band of n = {n}",
                self.max_abs_k()
            )));
        }
        for (k, v) in self.modes() {
            out.set(k, v);
        }
        Ok(out)
    }
}

/// Separable spectrum of the wavelet `idx` (independent of the grid).
pub fn wavelet_spectrum(idx: &WaveletIndex) -> SeparableSpectrum {
    let bits = idx.species.bits();
    SeparableSpectrum {
        factors: [0, 1, 2].map(|a| AxisFactor::filter(idx.level, bits[a] == 1, idx.loc[a])),
    }
}

/// Separable spectrum of the periodified scaling function at `level`, translated to `loc / 2^level`.
pub fn scaling_spectrum(level: u32, loc: [u32; 3]) -> SeparableSpectrum {
    SeparableSpectrum {
        factors: [0, 1, 2].map(|a| AxisFactor::filter(level, false, loc[a])),
    }
}

/// Fourier coefficients of the periodified wavelet `idx` on an `n^3` grid.
pub fn wavelet_fourier_coeffs(idx: &WaveletIndex, n: usize) -> Result<SpectralScalar> {
    check_level(idx.level, n)?;
    wavelet_spectrum(idx).to_dense(n)
}

/// Scalar wavelet coefficients through level `j_max`, plus the mean.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletCoeffs {
    n: usize,
    j_max: u32,
    pub mean: Complex64,
    /// One band per `(level, species)`, at `level * 7 + species - 1`, locations x-fastest.
    bands: Vec<Vec<Complex64>>,
    residual_energy: f64,
}

impl WaveletCoeffs {
    pub fn zeros(n: usize, j_max: u32) -> Result<Self> {
        check_level(j_max, n)?;
        let bands = (0..=j_max)
            .flat_map(|j| (0..7).map(move |_| vec![Complex64::default(); 1 << (3 * j)]))
            .collect();
        Ok(WaveletCoeffs {
            n,
            j_max,
            mean: Complex64::default(),
            bands,
            residual_energy: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    /// Number of coefficients including the mean: `8^(j_max+1)`.
    pub fn len(&self) -> usize {
        1 + self.bands.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn slot(&self, idx: &WaveletIndex) -> Result<(usize, usize)> {
        if idx.level > self.j_max {
            return Err(Error::InvalidIndex(format!(
                "level {} above j_max {}",
                idx.level, self.j_max
            )));
        }
        let m = 1usize << idx.level;
        let [lx, ly, lz] = idx.loc.map(|l| l as usize);
        if lx >= m || ly >= m || lz >= m {
            return Err(Error::InvalidIndex(format!("location {:?}", idx.loc)));
        }
        Ok((
            idx.level as usize * 7 + idx.species.value() as usize - 1,
            lx + m * (ly + m * lz),
        ))
    }

    pub fn get(&self, idx: &WaveletIndex) -> Result<Complex64> {
        let (b, i) = self.slot(idx)?;
        Ok(self.bands[b][i])
    }

    pub fn set(&mut self, idx: &WaveletIndex, value: Complex64) -> Result<()> {
        let (b, i) = self.slot(idx)?;
        self.bands[b][i] = value;
        Ok(())
    }

    /// Coefficients of one `(level, species)` band, locations stored x-fastest.
    pub fn band(&self, level: u32, species: Species) -> &[Complex64] {
        &self.bands[level as usize * 7 + species.value() as usize - 1]
    }

    pub fn band_mut(&mut self, level: u32, species: Species) -> &mut [Complex64] {
        &mut self.bands[level as usize * 7 + species.value() as usize - 1]
    }

    /// Wavelet coefficients (mean excluded) in lexicographic index order.
    pub fn iter(&self) -> impl Iterator<Item = (WaveletIndex, Complex64)> + '_ {
        WaveletIndex::enumerate(self.j_max).map(move |idx| {
            let (b, i) = self.slot(&idx).expect("enumerated index is in range");
            (idx, self.bands[b][i])
        })
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut Complex64> {
        self.bands.iter_mut().flat_map(|b| b.iter_mut())
    }

    /// `|mean|^2 + sum |c|^2`.
    pub fn energy(&self) -> f64 {
        self.mean.norm_sqr()
            + self
                .bands
                .iter()
                .flat_map(|b| b.iter())
                .map(Complex64::norm_sqr)
                .sum::<f64>()
    }

    /// Energy of the analyzed spectrum not captured by the coefficients.
    pub fn residual_energy(&self) -> f64 {
        self.residual_energy
    }

    pub fn is_lossy(&self) -> bool {
        self.residual_energy > LOSSY_TOLERANCE * (self.energy() + self.residual_energy)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mean = (self.mean - other.mean).norm();
        self.bands
            .iter()
            .flatten()
            .zip(other.bands.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(mean, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.bands
            .iter()
            .flatten()
            .map(|c| c.im.abs())
            .fold(self.mean.im.abs(), f64::max)
    }
}

struct BandPlan {
    level: u32,
    m: usize,
    /// Per-axis `(k, filter)` with `loc = 0`.
    factors: [AxisFactor; 3],
}

fn band_plans(j_max: u32) -> Vec<(Species, BandPlan)> {
    (0..=j_max)
        .flat_map(|level| {
            Species::all().map(move |species| {
                let spec = wavelet_spectrum(&WaveletIndex {
                    level,
                    species,
                    loc: [0; 3],
                });
                (
                    species,
                    BandPlan {
                        level,
                        m: 1 << level,
                        factors: spec.factors,
                    },
                )
            })
        })
        .collect()
}

/// Coefficients `<w_idx, F>` for every index through `j_max`, plus `mean = F(0)`.
pub fn analyze(f: &SpectralScalar, j_max: u32) -> Result<WaveletCoeffs> {
    let n = f.n();
    let mut out = WaveletCoeffs::zeros(n, j_max)?;
    out.mean = f.get(Wavevector::ZERO);
    let data = f.coeffs();
    let ffts: Vec<Fft3> = (0..=j_max).map(|j| Fft3::new(1 << j)).collect();
    for (species, plan) in band_plans(j_max) {
        let m = plan.m;
        let [fx, fy, fz] = &plan.factors;
        let mut folded = vec![Complex64::default(); m * m * m];
        for (&kz, &vz) in fz.k.iter().zip(&fz.value) {
            let (bz, nz) = (bin(kz, m), bin(kz, n));
            for (&ky, &vy) in fy.k.iter().zip(&fy.value) {
                let (by, ny) = (bin(ky, m), bin(ky, n));
                let vyz = (vy * vz).conj();
                let row = n * (ny + n * nz);
                let frow = m * (by + m * bz);
                for (&kx, &vx) in fx.k.iter().zip(&fx.value) {
                    folded[bin(kx, m) + frow] += vx.conj() * vyz * data[bin(kx, n) + row];
                }
            }
        }
        ffts[plan.level as usize].process(&mut folded, FftDirection::Inverse);
        out.band_mut(plan.level, species).copy_from_slice(&folded);
    }
    out.residual_energy = (f.energy() - out.energy()).max(0.0);
    Ok(out)
}

/// `mean + sum_idx c_idx w_idx` as a spectrum.
pub fn synthesize(coeffs: &WaveletCoeffs) -> SpectralScalar {
    let n = coeffs.n;
    let mut out = SpectralScalar::zeros(n).expect("validated grid size");
    out.set(Wavevector::ZERO, coeffs.mean);
    let ffts: Vec<Fft3> = (0..=coeffs.j_max).map(|j| Fft3::new(1 << j)).collect();
    let data = out.coeffs_mut();
    for (species, plan) in band_plans(coeffs.j_max) {
        let m = plan.m;
        let mut folded = coeffs.band(plan.level, species).to_vec();
        ffts[plan.level as usize].process(&mut folded, FftDirection::Forward);
        let [fx, fy, fz] = &plan.factors;
        for (&kz, &vz) in fz.k.iter().zip(&fz.value) {
            let (bz, nz) = (bin(kz, m), bin(kz, n));
            for (&ky, &vy) in fy.k.iter().zip(&fy.value) {
                let (by, ny) = (bin(ky, m), bin(ky, n));
                let vyz = vy * vz;
                let row = n * (ny + n * nz);
                let frow = m * (by + m * bz);
                for (&kx, &vx) in fx.k.iter().zip(&fx.value) {
                    data[bin(kx, n) + row] += vx * vyz * folded[bin(kx, m) + frow];
                }
            }
        }
    }
    out
}
