//! Hodge-Beltrami split of vector fields into positive-helicity, negative-helicity,
//! dilatational and harmonic parts, plus the scalar pull-up operators.

use num_complex::Complex64;

use crate::fourier::{mode_at, SpectralScalar, SpectralVector, Wavevector};
use crate::helical::{hdot, helical_triple, CVec3, Polarity};

/// The four orthogonal pieces of a spectral vector field.
#[derive(Clone, Debug, PartialEq)]
pub struct HelicalCoeffs {
    pub plus: SpectralScalar,
    pub minus: SpectralScalar,
    pub zero: SpectralScalar,
    /// `U(0)`, the uniform part.
    pub harmonic: CVec3,
}

impl HelicalCoeffs {
    pub fn zeros(n: usize) -> crate::Result<Self> {
        let z = SpectralScalar::zeros(n)?;
        Ok(HelicalCoeffs {
            plus: z.clone(),
            minus: z.clone(),
            zero: z,
            harmonic: [Complex64::default(); 3],
        })
    }

    pub fn n(&self) -> usize {
        self.plus.n()
    }

    pub fn part(&self, polarity: Polarity) -> &SpectralScalar {
        match polarity {
            Polarity::SigmaPlus => &self.plus,
            Polarity::SigmaMinus => &self.minus,
            Polarity::D => &self.zero,
        }
    }

    pub fn part_mut(&mut self, polarity: Polarity) -> &mut SpectralScalar {
        match polarity {
            Polarity::SigmaPlus => &mut self.plus,
            Polarity::SigmaMinus => &mut self.minus,
            Polarity::D => &mut self.zero,
        }
    }

    pub fn harmonic_energy(&self) -> f64 {
        self.harmonic.iter().map(Complex64::norm_sqr).sum()
    }

    /// Energies of the `[plus, minus, zero, harmonic]` parts.
    pub fn energies(&self) -> [f64; 4] {
        [
            self.plus.energy(),
            self.minus.energy(),
            self.zero.energy(),
            self.harmonic_energy(),
        ]
    }
}

fn for_each_mode(n: usize, mut f: impl FnMut(usize, Wavevector)) {
    for idx in 0..n * n * n {
        if let Some(k) = mode_at(n, idx) {
            if !k.is_zero() {
                f(idx, k);
            }
        }
    }
}

pub fn decompose(u: &SpectralVector) -> HelicalCoeffs {
    let n = u.n();
    let mut out = HelicalCoeffs::zeros(n).expect("valid grid size");
    for_each_mode(n, |idx, k| {
        let h = helical_triple(k);
        let v = u.at(idx);
        out.plus.coeffs_mut()[idx] = hdot(&h[0], &v);
        out.minus.coeffs_mut()[idx] = hdot(&h[1], &v);
        out.zero.coeffs_mut()[idx] = hdot(&h[2], &v);
    });
    out.harmonic = u.get(Wavevector::ZERO);
    out
}

pub fn assemble(coeffs: &HelicalCoeffs) -> SpectralVector {
    let n = coeffs.n();
    let mut out = SpectralVector::zeros(n).expect("valid grid size");
    for_each_mode(n, |idx, k| {
        let h = helical_triple(k);
        let c = [
            coeffs.plus.coeffs()[idx],
            coeffs.minus.coeffs()[idx],
            coeffs.zero.coeffs()[idx],
        ];
        out.set_at(
            idx,
            [0, 1, 2].map(|a| c[0] * h[0][a] + c[1] * h[1][a] + c[2] * h[2][a]),
        );
    });
    out.set(Wavevector::ZERO, coeffs.harmonic);
    out
}

/// Orthogonal projector onto the `polarity` subspace; the mean is discarded.
pub fn project(u: &SpectralVector, polarity: Polarity) -> SpectralVector {
    let n = u.n();
    let mut out = SpectralVector::zeros(n).expect("valid grid size");
    for_each_mode(n, |idx, k| {
        let h = helical_triple(k)[polarity.index()];
        let c = hdot(&h, &u.at(idx));
        out.set_at(idx, h.map(|v| c * v));
    });
    out
}

/// Multiplies every nonzero mode of `f` by `h(k, polarity)`; the mean is dropped.
pub fn pull_up(f: &SpectralScalar, polarity: Polarity) -> SpectralVector {
    let n = f.n();
    let mut out = SpectralVector::zeros(n).expect("valid grid size");
    for_each_mode(n, |idx, k| {
        let c = f.coeffs()[idx];
        if c != Complex64::default() {
            let h = helical_triple(k)[polarity.index()];
            out.set_at(idx, h.map(|v| c * v));
        }
    });
    out
}

/// Adjoint of [`pull_up`]: `U(k) . conj h(k, polarity)` for `k != 0`.
pub fn pull_up_adjoint(u: &SpectralVector, polarity: Polarity) -> SpectralScalar {
    let n = u.n();
    let mut out = SpectralScalar::zeros(n).expect("valid grid size");
    for_each_mode(n, |idx, k| {
        let h = helical_triple(k)[polarity.index()];
        out.coeffs_mut()[idx] = hdot(&h, &u.at(idx));
    });
    out
}
