//! Helical wavelet transform: the scalar Meyer system pulled up along each polarity.
//!
//! A vector field `u` is represented by the coefficients
//!
//! ```text
//! u_{lambda,s} = <P+_s psi_lambda, u>,    s in {Sigma+, Sigma-, D},
//! ```
//!
//! over all wavelet indices `lambda = (j, eps, l)` with `j <= jMax`, plus the
//! harmonic (mean) 3-vector. The scalar systems use the zero-mean MRA, so their
//! means are always zero. Projection and scalar analysis are fused in the
//! Fourier domain: `u_{lambda,s} = <psi_lambda, P+*_s U>`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{fft_vector, ifft_vector, GridVectorField, SpectralVector, Wavevector};
use crate::helical::{uniform_triad, Polarity};
use crate::hodge::{pull_up, pull_up_adjoint};
use crate::meyer::{
    analyze, check_level, scaling_spectrum, synthesize, wavelet_fourier_coeffs, wavelet_spectrum,
    WaveletCoeffs, WaveletIndex, LOSSY_TOLERANCE,
};

/// Coefficients of a vector field in the helical wavelet basis.
#[derive(Clone, Debug, PartialEq)]
pub struct HelicalWaveletCoeffs {
    pub plus: WaveletCoeffs,
    pub minus: WaveletCoeffs,
    pub zero: WaveletCoeffs,
    /// Mean of the field (the harmonic part).
    pub harmonic: [f64; 3],
    residual_energy: f64,
}

impl HelicalWaveletCoeffs {
    pub fn zeros(n: usize, j_max: u32) -> Result<Self> {
        let z = WaveletCoeffs::zeros(n, j_max)?;
        Ok(HelicalWaveletCoeffs {
            plus: z.clone(),
            minus: z.clone(),
            zero: z,
            harmonic: [0.0; 3],
            residual_energy: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.plus.n()
    }

    pub fn j_max(&self) -> u32 {
        self.plus.j_max()
    }

    pub fn part(&self, polarity: Polarity) -> &WaveletCoeffs {
        match polarity {
            Polarity::SigmaPlus => &self.plus,
            Polarity::SigmaMinus => &self.minus,
            Polarity::D => &self.zero,
        }
    }

    pub fn part_mut(&mut self, polarity: Polarity) -> &mut WaveletCoeffs {
        match polarity {
            Polarity::SigmaPlus => &mut self.plus,
            Polarity::SigmaMinus => &mut self.minus,
            Polarity::D => &mut self.zero,
        }
    }

    /// Number of real degrees of freedom: `3 (8^(jMax+1) - 1) + 3`.
    pub fn len(&self) -> usize {
        3 * (self.plus.len() - 1) + 3
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, polarity: Polarity, idx: &WaveletIndex) -> Result<Complex64> {
        self.part(polarity).get(idx)
    }

    pub fn set(&mut self, polarity: Polarity, idx: &WaveletIndex, value: Complex64) -> Result<()> {
        self.part_mut(polarity).set(idx, value)
    }

    /// All wavelet coefficients, polarity-major, then in index order.
    pub fn iter(&self) -> impl Iterator<Item = (Polarity, WaveletIndex, Complex64)> + '_ {
        Polarity::ALL
            .into_iter()
            .flat_map(move |s| self.part(s).iter().map(move |(idx, c)| (s, idx, c)))
    }

    /// `sum |u_{lambda,s}|^2 + |harmonic|^2`.
    pub fn energy(&self) -> f64 {
        let wavelets: f64 = Polarity::ALL.iter().map(|&s| self.part(s).energy()).sum();
        wavelets + self.harmonic.iter().map(|h| h * h).sum::<f64>()
    }

    /// Energy of the analyzed field that the coefficients do not capture.
    pub fn residual_energy(&self) -> f64 {
        self.residual_energy
    }

    /// Whether the uncaptured energy exceeds `LOSSY_TOLERANCE` relative to the field energy.
    pub fn is_lossy(&self) -> bool {
        self.residual_energy > LOSSY_TOLERANCE * (self.energy() + self.residual_energy)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let h = (0..3)
            .map(|a| (self.harmonic[a] - other.harmonic[a]).abs())
            .fold(0.0, f64::max);
        Polarity::ALL
            .iter()
            .map(|&s| self.part(s).max_abs_diff(other.part(s)))
            .fold(h, f64::max)
    }

    /// Largest imaginary part over all wavelet coefficients.
    pub fn max_imag(&self) -> f64 {
        Polarity::ALL
            .iter()
            .map(|&s| self.part(s).max_imag())
            .fold(0.0, f64::max)
    }
}

/// Forward transform of a sampled real field.
pub fn forward(u: &GridVectorField, j_max: u32) -> Result<HelicalWaveletCoeffs> {
    forward_spectral(&fft_vector(u), j_max)
}

/// Forward transform of a spectrum. The harmonic part keeps only the real part of `U(0)`.
pub fn forward_spectral(u: &SpectralVector, j_max: u32) -> Result<HelicalWaveletCoeffs> {
    let n = u.n();
    check_level(j_max, n)?;
    let mean = u.get(Wavevector::ZERO);
    let mut out = HelicalWaveletCoeffs {
        plus: analyze(&pull_up_adjoint(u, Polarity::SigmaPlus), j_max)?,
        minus: analyze(&pull_up_adjoint(u, Polarity::SigmaMinus), j_max)?,
        zero: analyze(&pull_up_adjoint(u, Polarity::D), j_max)?,
        harmonic: mean.map(|c| c.re),
        residual_energy: 0.0,
    };
    for s in Polarity::ALL {
        // the adjoint already vanishes at k = 0; keep the zero-mean MRA exact
        out.part_mut(s).mean = Complex64::default();
    }
    out.residual_energy = (u.energy() - out.energy()).max(0.0);
    Ok(out)
}

/// Inverse transform to a spectrum: `sum u_{lambda,s} P+_s psi_lambda + harmonic`.
pub fn inverse_spectral(coeffs: &HelicalWaveletCoeffs) -> SpectralVector {
    let n = coeffs.n();
    let mut out = SpectralVector::zeros(n).expect("validated grid size");
    for s in Polarity::ALL {
        let part = pull_up(&synthesize(coeffs.part(s)), s);
        out.add_scaled(&part, 1.0);
    }
    out.set(
        Wavevector::ZERO,
        coeffs.harmonic.map(|h| Complex64::new(h, 0.0)),
    );
    out
}

/// Inverse transform to grid samples (real part of the synthesis).
pub fn inverse(coeffs: &HelicalWaveletCoeffs) -> GridVectorField {
    ifft_vector(&inverse_spectral(coeffs))
}

/// Spectrum of the basis function `P+_s psi_idx` on an `n^3` grid.
pub fn basis_function_spectrum(
    idx: &WaveletIndex,
    polarity: Polarity,
    n: usize,
) -> Result<SpectralVector> {
    Ok(pull_up(&wavelet_fourier_coeffs(idx, n)?, polarity))
}

/// Samples of the basis function `P+_s psi_idx` on an `n^3` grid.
pub fn synth_basis_function(
    idx: &WaveletIndex,
    polarity: Polarity,
    n: usize,
) -> Result<GridVectorField> {
    Ok(ifft_vector(&basis_function_spectrum(idx, polarity, n)?))
}

/// Whether the wavelet's spectrum reaches the pole line `kx = ky = 0, kz != 0`,
/// where the helical triad switches to its pole branch. Only species 4 does.
pub fn touches_pole_line(idx: &WaveletIndex) -> bool {
    let [fx, fy, fz] = &wavelet_spectrum(idx).factors;
    fx.k.contains(&0) && fy.k.contains(&0) && fz.k.iter().any(|&k| k != 0)
}

/// Spectrum of the solenoidal scaling function
/// `phi_{j,s} = phi_j^(0) h(0,s) + P+_s phi_j`, translated to `loc / 2^j`.
pub fn solenoidal_scaling_spectrum(
    level: u32,
    loc: [u32; 3],
    polarity: Polarity,
    n: usize,
) -> Result<SpectralVector> {
    check_level(level, n)?;
    let m = 1u32 << level;
    if loc.iter().any(|&l| l >= m) {
        return Err(Error::InvalidIndex(format!(
            "location {loc:?} outside 0..{m} at level {level}"
        )));
    }
    let phi = scaling_spectrum(level, loc).to_dense(n)?;
    let mut out = pull_up(&phi, polarity);
    let h0 = uniform_triad(polarity);
    let c0 = phi.get(Wavevector::ZERO);
    out.set(Wavevector::ZERO, h0.map(|h| c0 * h));
    Ok(out)
}

/// Real part of the solenoidal scaling function at `loc = 0`.
pub fn solenoidal_scaling_function(
    level: u32,
    polarity: Polarity,
    n: usize,
) -> Result<GridVectorField> {
    solenoidal_scaling_function_at(level, [0; 3], polarity, n)
}

/// Real part of the solenoidal scaling function translated to `loc / 2^level`.
pub fn solenoidal_scaling_function_at(
    level: u32,
    loc: [u32; 3],
    polarity: Polarity,
    n: usize,
) -> Result<GridVectorField> {
    Ok(ifft_vector(&solenoidal_scaling_spectrum(
        level, loc, polarity, n,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{spectral_curl, spectral_divergence, Parity};
    use crate::meyer::{mra_band_limit, Species};
    use std::f64::consts::PI;

    fn abc(n: usize) -> GridVectorField {
        GridVectorField::from_fn(n, |x, y, z| {
            let t = 2.0 * PI;
            [
                (t * z).sin() + (t * y).cos(),
                (t * x).sin() + (t * z).cos(),
                (t * y).sin() + (t * x).cos(),
            ]
        })
        .unwrap()
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed;
        move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
    }

    fn random_coeffs(n: usize, j_max: u32, seed: u64) -> HelicalWaveletCoeffs {
        let mut rng = lcg(seed);
        let mut c = HelicalWaveletCoeffs::zeros(n, j_max).unwrap();
        for s in Polarity::ALL {
            for v in c.part_mut(s).values_mut() {
                *v = Complex64::new(rng(), 0.0);
            }
        }
        c.harmonic = [rng(), rng(), rng()];
        c
    }

    #[test]
    fn constant_field_is_harmonic() {
        let u = GridVectorField::from_fn(8, |_, _, _| [1.0, -2.0, 0.5]).unwrap();
        let c = forward(&u, 1).unwrap();
        assert_eq!(c.harmonic, [1.0, -2.0, 0.5]);
        assert!(c.iter().all(|(_, _, v)| v.norm() < 1e-15));
        assert!(!c.is_lossy());
    }

    #[test]
    fn abc_field_is_pure_plus() {
        let u = abc(16);
        let c = forward(&u, 1).unwrap();
        assert!(c.minus.energy() < 1e-24);
        assert!(c.zero.energy() < 1e-24);
        assert!((c.plus.energy() - u.mean_square()).abs() < 1e-12);
        assert!(inverse(&c).max_abs_diff(&u) < 1e-12);
    }

    #[test]
    fn basis_function_has_unit_coefficient() {
        let idx = WaveletIndex::new(1, 5, [1, 0, 1]).unwrap();
        let u = synth_basis_function(&idx, Polarity::SigmaPlus, 16).unwrap();
        let c = forward(&u, 1).unwrap();
        for (s, i, v) in c.iter() {
            let want = if s == Polarity::SigmaPlus && i == idx {
                1.0
            } else {
                0.0
            };
            assert!(
                (v - Complex64::new(want, 0.0)).norm() < 1e-12,
                "{s} {i:?} {v}"
            );
        }
    }

    #[test]
    fn coefficient_round_trip() {
        let c = random_coeffs(16, 1, 3);
        let back = forward(&inverse(&c), 1).unwrap();
        assert!(back.max_abs_diff(&c) < 1e-12);
        assert!((back.energy() - c.energy()).abs() < 1e-10 * c.energy());
        assert_eq!(c.len(), 3 * 63 + 3);
        assert_eq!(
            inverse(&HelicalWaveletCoeffs::zeros(8, 0).unwrap()).mean_square(),
            0.0
        );
    }

    #[test]
    fn solenoidal_coefficients_give_divergence_free_fields() {
        let mut c = random_coeffs(16, 1, 4);
        c.zero = WaveletCoeffs::zeros(16, 1).unwrap();
        let u = inverse_spectral(&c);
        let div = spectral_divergence(&u);
        assert!(div.coeffs().iter().all(|d| d.norm() < 1e-10));
        let mean = u.get(Wavevector::ZERO);
        assert!((0..3).all(|a| mean[a] == Complex64::new(c.harmonic[a], 0.0)));
    }

    #[test]
    fn out_of_band_energy_is_reported() {
        let u =
            GridVectorField::from_fn(16, |x, _, _| [0.0, (2.0 * PI * 5.0 * x).cos(), 0.0]).unwrap();
        assert!(mra_band_limit(0) < 5);
        let c = forward(&u, 0).unwrap();
        assert!(c.is_lossy());
        assert!((c.residual_energy() + c.energy() - u.mean_square()).abs() < 1e-12);
        assert!(forward(&u, 5).is_err());
    }

    #[test]
    fn basis_functions_are_real_unit_and_typed() {
        let n = 16;
        for idx in WaveletIndex::enumerate(1).step_by(5) {
            for s in Polarity::ALL {
                let spec = basis_function_spectrum(&idx, s, n).unwrap();
                assert!((spec.energy() - 1.0).abs() < 1e-10);
                assert!(spec.hermitian_defect() < 1e-14);
                let grid = synth_basis_function(&idx, s, n).unwrap();
                assert!((grid.mean_square() - 1.0).abs() < 1e-10);
                if s.is_solenoidal() {
                    let div = spectral_divergence(&spec);
                    assert!(div.coeffs().iter().all(|d| d.norm() < 1e-12));
                } else {
                    assert!(spectral_curl(&spec).energy().sqrt() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn parity_maps_plus_to_minus() {
        let n = 16;
        let idx = WaveletIndex::new(1, 3, [1, 1, 0]).unwrap();
        let psi = wavelet_fourier_coeffs(&idx, n).unwrap();
        let lhs = basis_function_spectrum(&idx, Polarity::SigmaPlus, n)
            .unwrap()
            .parity();
        let rhs = pull_up(&psi.parity(), Polarity::SigmaMinus);
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn only_species_four_touches_the_pole_line() {
        for idx in WaveletIndex::enumerate(2) {
            assert_eq!(
                touches_pole_line(&idx),
                idx.species == Species::new(4).unwrap()
            );
        }
        let idx = WaveletIndex::new(2, 4, [0; 3]).unwrap();
        let spec = basis_function_spectrum(&idx, Polarity::SigmaPlus, 16).unwrap();
        let pole = spec.get(Wavevector::new(0, 0, 3));
        assert!(pole[0].norm() > 0.0 && pole[1].norm() > 0.0);
    }

    #[test]
    fn scaling_function_examples() {
        let u = solenoidal_scaling_function(0, Polarity::SigmaPlus, 8).unwrap();
        let want = GridVectorField::from_fn(8, |_, _, _| [0.5f64.sqrt(), 0.0, 0.0]).unwrap();
        assert!(u.max_abs_diff(&want) < 1e-15);

        let d = solenoidal_scaling_spectrum(2, [1, 2, 3], Polarity::D, 16).unwrap();
        assert!(spectral_curl(&d).energy().sqrt() < 1e-10);

        let c = [0.3, -1.0, 2.0];
        for s in Polarity::ALL {
            let reference = solenoidal_scaling_function_at(2, [0; 3], s, 16)
                .unwrap()
                .mean();
            for loc in [[1, 0, 0], [3, 2, 1], [2, 2, 2]] {
                let m = solenoidal_scaling_function_at(2, loc, s, 16)
                    .unwrap()
                    .mean();
                let ip = |v: [f64; 3]| v[0] * c[0] + v[1] * c[1] + v[2] * c[2];
                assert!((ip(m) - ip(reference)).abs() < 1e-12);
            }
        }
        assert!(solenoidal_scaling_spectrum(1, [2, 0, 0], Polarity::D, 8).is_err());
    }
}
