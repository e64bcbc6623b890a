//! Spherical triads and helical vectors in wavevector space.
//!
//! For `k != 0`:
//!
//! ```text
//! e_r = k/|k|
//! e_phi = e_z x e_r / |e_z x e_r|        (e_r x e_x when k is on the z axis)
//! e_theta = e_phi x e_r
//! h(k,+) = (e_theta + i e_phi)/sqrt2,  h(k,-) = (e_theta - i e_phi)/sqrt2,  h(k,0) = -i e_r
//! ```
//!
//! `h(k,+-)` are eigenvectors of `i k x .` with eigenvalues `+-|k|`, and `h(k,0)`
//! spans the gradient direction. The z axis branch is used for both `+e_z` and
//! `-e_z`, which keeps `conj h(k,s) = h(-k,s)` bit-exact.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::Wavevector;

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];

/// Selects the positive-helicity, negative-helicity or dilatational subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    SigmaPlus,
    SigmaMinus,
    D,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::SigmaPlus, Polarity::SigmaMinus, Polarity::D];

    /// Polarity with the opposite helicity; `D` maps to itself.
    pub fn mirrored(self) -> Polarity {
        match self {
            Polarity::SigmaPlus => Polarity::SigmaMinus,
            Polarity::SigmaMinus => Polarity::SigmaPlus,
            Polarity::D => Polarity::D,
        }
    }

    pub fn is_solenoidal(self) -> bool {
        self != Polarity::D
    }

    /// Sign of the curl eigenvalue: +1, -1 or 0.
    pub fn sign(self) -> f64 {
        match self {
            Polarity::SigmaPlus => 1.0,
            Polarity::SigmaMinus => -1.0,
            Polarity::D => 0.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::SigmaPlus => "plus",
            Polarity::SigmaMinus => "minus",
            Polarity::D => "d",
        })
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "+" | "plus" | "sigma+" | "sigmaplus" => Ok(Polarity::SigmaPlus),
            "-" | "minus" | "sigma-" | "sigmaminus" => Ok(Polarity::SigmaMinus),
            "0" | "d" | "zero" => Ok(Polarity::D),
            other => Err(Error::Usage(format!("unknown polarity '{other}'"))),
        }
    }
}

/// Real orthonormal frame attached to a nonzero wavevector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealTriad {
    pub e_r: Vec3,
    pub e_theta: Vec3,
    pub e_phi: Vec3,
}

/// A helical vector together with the wavevector and polarity it belongs to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelicalVector {
    pub k: Wavevector,
    pub polarity: Polarity,
    pub value: CVec3,
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Hermitian product `conj(a) . b`.
pub fn hdot(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

pub fn spherical_triad(k: Wavevector) -> Result<RealTriad> {
    if k.is_zero() {
        return Err(Error::ZeroWavevector);
    }
    Ok(triad_unchecked(k))
}

fn triad_unchecked(k: Wavevector) -> RealTriad {
    let norm = k.norm();
    let kf = k.to_f64();
    let e_r = [kf[0] / norm, kf[1] / norm, kf[2] / norm];
    let e_phi = if k.kx == 0 && k.ky == 0 {
        cross(e_r, [1.0, 0.0, 0.0])
    } else {
        let c = cross([0.0, 0.0, 1.0], e_r);
        let len = (c[0] * c[0] + c[1] * c[1]).sqrt();
        [c[0] / len, c[1] / len, 0.0]
    };
    let e_theta = cross(e_phi, e_r);
    RealTriad {
        e_r,
        e_theta,
        e_phi,
    }
}

/// All three helical vectors at `k != 0`, indexed by [`Polarity::index`].
pub(crate) fn helical_triple(k: Wavevector) -> [CVec3; 3] {
    let t = triad_unchecked(k);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [0, 1, 2].map(|a| Complex64::new(t.e_theta[a] * s, t.e_phi[a] * s));
    let minus = [0, 1, 2].map(|a| Complex64::new(t.e_theta[a] * s, -t.e_phi[a] * s));
    let zero = [0, 1, 2].map(|a| Complex64::new(0.0, -t.e_r[a]));
    [plus, minus, zero]
}

pub fn helical_vector(k: Wavevector, polarity: Polarity) -> Result<HelicalVector> {
    if k.is_zero() {
        return Err(Error::ZeroWavevector);
    }
    Ok(HelicalVector {
        k,
        polarity,
        value: helical_triple(k)[polarity.index()],
    })
}

/// Fixed orthonormal triad used at `k = 0`.
pub fn uniform_triad(polarity: Polarity) -> CVec3 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    match polarity {
        Polarity::SigmaPlus => [Complex64::new(s, 0.0), Complex64::new(0.0, s), z],
        Polarity::SigmaMinus => [Complex64::new(s, 0.0), Complex64::new(0.0, -s), z],
        Polarity::D => [z, z, Complex64::new(0.0, -1.0)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close3(a: Vec3, b: Vec3) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() < 1e-15)
    }

    fn cclose3(a: CVec3, b: CVec3) -> bool {
        (0..3).all(|i| (a[i] - b[i]).norm() < 1e-15)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triad_examples() {
        let t = spherical_triad(Wavevector::new(0, 0, 1)).unwrap();
        assert!(close3(t.e_r, [0.0, 0.0, 1.0]));
        assert!(close3(t.e_phi, [0.0, 1.0, 0.0]));
        assert!(close3(t.e_theta, [1.0, 0.0, 0.0]));

        let t = spherical_triad(Wavevector::new(1, 0, 0)).unwrap();
        assert!(close3(t.e_r, [1.0, 0.0, 0.0]));
        assert!(close3(t.e_phi, [0.0, 1.0, 0.0]));
        assert!(close3(t.e_theta, [0.0, 0.0, -1.0]));

        let t = spherical_triad(Wavevector::new(0, 0, -1)).unwrap();
        assert!(close3(t.e_phi, [0.0, -1.0, 0.0]));
        assert!(close3(t.e_theta, [1.0, 0.0, 0.0]));

        assert!(matches!(
            spherical_triad(Wavevector::ZERO),
            Err(Error::ZeroWavevector)
        ));
    }

    #[test]
    fn triad_is_right_handed_orthonormal() {
        for kx in -3..=3 {
            for ky in -3..=3 {
                for kz in -3..=3 {
                    let k = Wavevector::new(kx, ky, kz);
                    if k.is_zero() {
                        continue;
                    }
                    let t = spherical_triad(k).unwrap();
                    let dot = |a: Vec3, b: Vec3| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                    for v in [t.e_r, t.e_theta, t.e_phi] {
                        assert!((dot(v, v) - 1.0).abs() < 1e-14);
                    }
                    assert!(dot(t.e_r, t.e_theta).abs() < 1e-14);
                    assert!(dot(t.e_r, t.e_phi).abs() < 1e-14);
                    assert!(dot(t.e_theta, t.e_phi).abs() < 1e-14);
                    let c = cross(t.e_phi, t.e_r);
                    assert!((0..3).all(|i| (c[i] - t.e_theta[i]).abs() < 1e-14));
                }
            }
        }
    }

    #[test]
    fn helical_vector_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = helical_vector(Wavevector::new(0, 0, 1), Polarity::SigmaPlus).unwrap();
        assert!(cclose3(h.value, [c(s, 0.0), c(0.0, s), c(0.0, 0.0)]));

        let h = helical_vector(Wavevector::new(1, 0, 0), Polarity::D).unwrap();
        assert!(cclose3(h.value, [c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0)]));

        let h = helical_vector(Wavevector::new(1, 0, 0), Polarity::SigmaPlus).unwrap();
        assert!(cclose3(h.value, [c(0.0, 0.0), c(0.0, s), c(-s, 0.0)]));

        assert!(helical_vector(Wavevector::ZERO, Polarity::D).is_err());
    }

    #[test]
    fn conjugation_laws_are_exact() {
        for k in [
            Wavevector::new(0, 0, 3),
            Wavevector::new(0, 0, -2),
            Wavevector::new(1, -2, 5),
            Wavevector::new(-7, 0, 1),
        ] {
            let hp = helical_triple(k);
            let hm = helical_triple(-k);
            for s in 0..3 {
                assert_eq!(hp[s].map(|v| v.conj()), hm[s]);
            }
            assert_eq!(hp[0].map(|v| v.conj()), hp[1]);
        }
    }

    #[test]
    fn uniform_triad_is_orthonormal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(cclose3(
            uniform_triad(Polarity::SigmaPlus),
            [c(s, 0.0), c(0.0, s), c(0.0, 0.0)]
        ));
        for a in Polarity::ALL {
            for b in Polarity::ALL {
                let d = hdot(&uniform_triad(a), &uniform_triad(b));
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - c(want, 0.0)).norm() < 1e-14);
            }
        }
        assert_eq!(
            uniform_triad(Polarity::SigmaPlus).map(|v| v.conj()),
            uniform_triad(Polarity::SigmaMinus)
        );
    }

    #[test]
    fn polarity_parsing() {
        assert_eq!("plus".parse::<Polarity>().unwrap(), Polarity::SigmaPlus);
        assert_eq!("-".parse::<Polarity>().unwrap(), Polarity::SigmaMinus);
        assert_eq!("D".parse::<Polarity>().unwrap(), Polarity::D);
        assert!("x".parse::<Polarity>().is_err());
        assert_eq!(Polarity::SigmaPlus.mirrored(), Polarity::SigmaMinus);
    }
}
