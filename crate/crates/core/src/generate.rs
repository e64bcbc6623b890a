//! Deterministic test fields.
//!
//! Seeded kinds draw from a counter-based SplitMix64 stream so that any
//! implementation can reproduce them exactly:
//!
//! ```text
//! z  = seed + (i + 1) * 0x9E3779B97F4A7C15          (wrapping u64 arithmetic)
//! z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z  =  z ^ (z >> 31)
//! value(i) = 2 * (z >> 11) * 2^-53 - 1               (uniform in [-1, 1))
//! ```
//!
//! Counter `i = stream * N^3 + (ix + N (iy + N iz))`. `random` uses streams 0, 1, 2
//! for the x, y, z components; `random-solenoidal` uses streams 0 and 1 for the
//! scalars pulled up to Sigma+ and Sigma-. Both kinds then drop the Nyquist
//! planes (and, for `random-solenoidal`, the mean) in Fourier space.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fourier::{
    check_grid_size, fft_scalar, fft_vector, ifft_vector, mode_at, GridScalarField,
    GridVectorField, SpectralScalar, SpectralVector, Wavevector,
};
use crate::helical::Polarity;
use crate::hodge::pull_up;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Value `i` of the SplitMix64 stream for `seed`, uniform in `[-1, 1)`.
pub fn splitmix_value(seed: u64, i: u64) -> f64 {
    let mut z = seed.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    2.0 * ((z >> 11) as f64 / (1u64 << 53) as f64) - 1.0
}

/// Raw noise grid for one stream.
pub fn noise_grid(n: usize, seed: u64, stream: u64) -> Result<GridScalarField> {
    check_grid_size(n)?;
    let base = stream * (n * n * n) as u64;
    let samples = (0..(n * n * n) as u64)
        .map(|i| splitmix_value(seed, base + i))
        .collect();
    GridScalarField::new(n, samples)
}

/// A generator kind with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldKind {
    /// Uniform field (harmonic).
    Constant([f64; 3]),
    /// `grad sin 2 pi x` (pure dilatational).
    Gradient,
    /// `(cos 2 pi z, sin 2 pi z, 0)` (pure Sigma-).
    BeltramiMinus,
    /// `(A sin 2 pi z + C cos 2 pi y, B sin 2 pi x + A cos 2 pi z, C sin 2 pi y + B cos 2 pi x)` (pure Sigma+).
    Abc { a: f64, b: f64, c: f64 },
    /// Random mixture of Sigma+ and Sigma- with zero mean.
    RandomSolenoidal { seed: u64 },
    /// Random real field with all four parts present.
    Random { seed: u64 },
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Constant(c) => write!(f, "constant({},{},{})", c[0], c[1], c[2]),
            FieldKind::Gradient => f.write_str("gradient"),
            FieldKind::BeltramiMinus => f.write_str("beltrami-minus"),
            FieldKind::Abc { a, b, c } => write!(f, "abc({a},{b},{c})"),
            FieldKind::RandomSolenoidal { seed } => write!(f, "random-solenoidal({seed})"),
            FieldKind::Random { seed } => write!(f, "random({seed})"),
        }
    }
}

fn parse_reals(name: &str, params: &[&str]) -> Result<[f64; 3]> {
    if params.len() != 3 {
        return Err(Error::Usage(format!("{name} takes three numbers")));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(params) {
        *o = p
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("{name}: '{p}' is not a number")))?;
    }
    Ok(out)
}

fn parse_seed(name: &str, params: &[&str]) -> Result<u64> {
    match params {
        [] => Ok(0),
        [s] => s
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("{name}: '{s}' is not a seed"))),
        _ => Err(Error::Usage(format!("{name} takes one seed"))),
    }
}

impl FromStr for FieldKind {
    type Err = Error;

    /// Accepts `name`, `name(p1,p2,..)` or `name:p1,p2,..`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = if let Some(open) = s.find('(') {
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Usage(format!("unbalanced parentheses in '{s}'")))?;
            (&s[..open], inner)
        } else if let Some((name, params)) = s.split_once(':') {
            (name, params)
        } else {
            (s, "")
        };
        let params: Vec<&str> = if params.trim().is_empty() {
            Vec::new()
        } else {
            params.split(',').collect()
        };
        let none = |kind: FieldKind| {
            if params.is_empty() {
                Ok(kind)
            } else {
                Err(Error::Usage(format!("{name} takes no parameters")))
            }
        };
        match name.trim() {
            "constant" if params.is_empty() => Ok(FieldKind::Constant([1.0, 1.0, 1.0])),
            "constant" => Ok(FieldKind::Constant(parse_reals(name, &params)?)),
            "gradient" => none(FieldKind::Gradient),
            "beltrami-minus" => none(FieldKind::BeltramiMinus),
            "abc" if params.is_empty() => Ok(FieldKind::Abc {
                a: 1.0,
                b: 1.0,
                c: 1.0,
            }),
            "abc" => {
                let [a, b, c] = parse_reals(name, &params)?;
                Ok(FieldKind::Abc { a, b, c })
            }
            "random-solenoidal" => Ok(FieldKind::RandomSolenoidal {
                seed: parse_seed(name, &params)?,
            }),
            "random" => Ok(FieldKind::Random {
                seed: parse_seed(name, &params)?,
            }),
            other => Err(Error::Usage(format!("unknown field kind '{other}'"))),
        }
    }
}

fn nyquist_free(f: &GridScalarField) -> SpectralScalar {
    let mut spec = fft_scalar(f);
    spec.zero_nyquist();
    spec
}

/// Samples the field `kind` on an `n^3` grid.
pub fn generate(kind: FieldKind, n: usize) -> Result<GridVectorField> {
    check_grid_size(n)?;
    let t = 2.0 * PI;
    match kind {
        FieldKind::Constant(c) => GridVectorField::from_fn(n, |_, _, _| c),
        FieldKind::Gradient => GridVectorField::from_fn(n, |x, _, _| [t * (t * x).cos(), 0.0, 0.0]),
        FieldKind::BeltramiMinus => {
            GridVectorField::from_fn(n, |_, _, z| [(t * z).cos(), (t * z).sin(), 0.0])
        }
        FieldKind::Abc { a, b, c } => GridVectorField::from_fn(n, |x, y, z| {
            [
                a * (t * z).sin() + c * (t * y).cos(),
                b * (t * x).sin() + a * (t * z).cos(),
                c * (t * y).sin() + b * (t * x).cos(),
            ]
        }),
        FieldKind::RandomSolenoidal { seed } => {
            let mut u = SpectralVector::zeros(n)?;
            for (stream, s) in [(0, Polarity::SigmaPlus), (1, Polarity::SigmaMinus)] {
                let f = nyquist_free(&noise_grid(n, seed, stream)?);
                u.add_scaled(&pull_up(&f, s), 1.0);
            }
            Ok(ifft_vector(&u))
        }
        FieldKind::Random { seed } => {
            let grids = [0, 1, 2].map(|a| noise_grid(n, seed, a));
            let [x, y, z] = grids;
            let mut spec = fft_vector(&GridVectorField::new(x?, y?, z?)?);
            spec.zero_nyquist();
            Ok(ifft_vector(&spec))
        }
    }
}

/// Removes every Fourier mode with some `|k_i| > k_max`.
pub fn low_pass(u: &GridVectorField, k_max: i64) -> GridVectorField {
    let n = u.n();
    let mut spec = fft_vector(u);
    let zero = [Default::default(); 3];
    for idx in 0..n * n * n {
        let keep = mode_at(n, idx)
            .map(|k: Wavevector| k.components().iter().all(|c| c.abs() <= k_max))
            .unwrap_or(false);
        if !keep {
            spec.set_at(idx, zero);
        }
    }
    ifft_vector(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::spectral_divergence;
    use crate::hodge::{decompose, project};

    #[test]
    fn splitmix_matches_reference_stream() {
        // reference SplitMix64 outputs for seed 0: 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4
        let first = 0xE220_A839_7B1D_CDAFu64;
        let want = 2.0 * ((first >> 11) as f64 / (1u64 << 53) as f64) - 1.0;
        assert_eq!(splitmix_value(0, 0), want);
        let second = 0x6E78_9E6A_A1B9_65F4u64;
        let want = 2.0 * ((second >> 11) as f64 / (1u64 << 53) as f64) - 1.0;
        assert_eq!(splitmix_value(0, 1), want);
        let g = noise_grid(4, 9, 2).unwrap();
        assert_eq!(g.samples()[5], splitmix_value(9, 2 * 64 + 5));
        assert!(g.samples().iter().all(|v| (-1.0..1.0).contains(v)));
    }

    #[test]
    fn kinds_parse_and_display() {
        assert_eq!(
            "constant(1,2,3)".parse::<FieldKind>().unwrap(),
            FieldKind::Constant([1.0, 2.0, 3.0])
        );
        assert_eq!(
            "abc:1,0.5,2".parse::<FieldKind>().unwrap(),
            FieldKind::Abc {
                a: 1.0,
                b: 0.5,
                c: 2.0
            }
        );
        assert_eq!(
            "random-solenoidal(42)".parse::<FieldKind>().unwrap(),
            FieldKind::RandomSolenoidal { seed: 42 }
        );
        assert_eq!(
            "random".parse::<FieldKind>().unwrap(),
            FieldKind::Random { seed: 0 }
        );
        for k in [
            "gradient",
            "beltrami-minus",
            "abc(1,2,3)",
            "random(7)",
            "constant(1,2,3)",
        ] {
            let kind: FieldKind = k.parse().unwrap();
            assert_eq!(kind.to_string().parse::<FieldKind>().unwrap(), kind);
        }
        for bad in [
            "vortex",
            "constant(1,2)",
            "gradient(1)",
            "random(x)",
            "abc(1,2,3",
        ] {
            assert!(
                matches!(bad.parse::<FieldKind>(), Err(Error::Usage(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn constant_is_harmonic() {
        let u = generate(FieldKind::Constant([1.0, 2.0, 3.0]), 16).unwrap();
        let h = decompose(&fft_vector(&u));
        assert_eq!(h.energies()[..3], [0.0, 0.0, 0.0]);
        let want = [1.0, 2.0, 3.0];
        assert!((0..3).all(|a| (h.harmonic[a].re - want[a]).abs() < 1e-15));
    }

    #[test]
    fn abc_is_pure_plus() {
        let u = fft_vector(
            &generate(
                FieldKind::Abc {
                    a: 1.0,
                    b: 1.0,
                    c: 1.0,
                },
                32,
            )
            .unwrap(),
        );
        let off = project(&u, Polarity::SigmaMinus).energy().sqrt()
            + project(&u, Polarity::D).energy().sqrt();
        assert!(off < 1e-12 * u.energy().sqrt());
    }

    #[test]
    fn random_solenoidal_is_divergence_free() {
        let u = fft_vector(&generate(FieldKind::RandomSolenoidal { seed: 5 }, 32).unwrap());
        let div = spectral_divergence(&u);
        assert!(div.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12);
        assert!(u.nyquist_energy() < 1e-28);
        assert!(u.get(Wavevector::ZERO).iter().all(|c| c.norm() < 1e-15));
        let h = decompose(&u);
        assert!(h.plus.energy() > 0.1 && h.minus.energy() > 0.1);
    }

    #[test]
    fn random_is_deterministic_and_nyquist_free() {
        let a = generate(FieldKind::Random { seed: 1 }, 8).unwrap();
        assert_eq!(a, generate(FieldKind::Random { seed: 1 }, 8).unwrap());
        assert_ne!(a, generate(FieldKind::Random { seed: 2 }, 8).unwrap());
        assert!(fft_vector(&a).nyquist_energy() < 1e-28);
    }

    #[test]
    fn low_pass_limits_the_band() {
        let u = generate(FieldKind::Random { seed: 3 }, 16).unwrap();
        let v = fft_vector(&low_pass(&u, 2));
        for (i, k) in (0..16 * 16 * 16).filter_map(|i| mode_at(16, i).map(|k| (i, k))) {
            if k.components().iter().any(|c| c.abs() > 2) {
                assert!(v.at(i).iter().all(|c| c.norm() < 1e-15));
            }
        }
        assert!(v.energy() > 0.0);
    }
}
