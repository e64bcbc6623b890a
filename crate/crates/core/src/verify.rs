//! Self-check suite: the library's structural invariants evaluated on seeded
//! random data at a chosen grid size.

use num_complex::Complex64;

use crate::error::Result;
use crate::fourier::{
    fft_vector, ifft_vector, mode_at, spectral_curl, spectral_divergence, GridVectorField,
};
use crate::generate::{generate, low_pass, splitmix_value, FieldKind};
use crate::helical::{hdot, helical_triple, Polarity};
use crate::helical_wavelet::{forward, inverse, HelicalWaveletCoeffs};
use crate::hodge::{assemble, decompose, project, pull_up, pull_up_adjoint};
use crate::io::{decode_coeffs, decode_field, encode_coeffs, encode_field, FieldData};
use crate::meyer::{
    analyze, max_level, mra_band_limit, partition_check, synthesize, WaveletCoeffs,
};

/// Outcome of one invariant: the measured deviation against its tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

fn max_norm(values: impl IntoIterator<Item = Complex64>) -> f64 {
    values.into_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn helical_algebra(n: usize) -> (f64, f64) {
    let mut ortho: f64 = 0.0;
    let mut algebra: f64 = 0.0;
    let i = Complex64::i();
    for idx in 0..n * n * n {
        let Some(k) = mode_at(n, idx) else { continue };
        if k.is_zero() {
            continue;
        }
        let h = helical_triple(k);
        let kf = k.to_f64();
        let norm = k.norm();
        for a in 0..3 {
            for b in 0..3 {
                let want = if a == b { 1.0 } else { 0.0 };
                ortho = ortho.max((hdot(&h[a], &h[b]) - want).norm());
            }
        }
        for (s, sign) in [(0, 1.0), (1, -1.0)] {
            let v = h[s];
            let div = i * (kf[0] * v[0] + kf[1] * v[1] + kf[2] * v[2]);
            let curl = [
                i * (kf[1] * v[2] - kf[2] * v[1]),
                i * (kf[2] * v[0] - kf[0] * v[2]),
                i * (kf[0] * v[1] - kf[1] * v[0]),
            ];
            algebra = algebra.max(div.norm() / norm);
            for a in 0..3 {
                algebra = algebra.max((curl[a] - sign * norm * v[a]).norm() / norm);
            }
            let minus = helical_triple(-k)[s];
            for a in 0..3 {
                algebra = algebra.max((v[a].conj() - minus[a]).norm());
            }
        }
    }
    (ortho, algebra)
}

/// Runs every invariant at grid size `n` with data drawn from `seed`.
pub fn invariant_suite(n: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut check = |name, value, tolerance| {
        out.push(CheckResult {
            name,
            value,
            tolerance,
        })
    };

    let u = generate(FieldKind::Random { seed }, n)?;
    let spec = fft_vector(&u);
    check("fft round trip", ifft_vector(&spec).max_abs_diff(&u), 1e-12);
    check(
        "parseval",
        (spec.energy() - u.mean_square()).abs() / u.mean_square(),
        1e-10,
    );

    let (ortho, algebra) = helical_algebra(n);
    check("helical orthonormality", ortho, 1e-12);
    check("helical algebra", algebra, 1e-12);

    let h = decompose(&spec);
    check(
        "decompose/assemble",
        assemble(&h).max_abs_diff(&spec),
        1e-12,
    );
    let parts = h.energies().iter().sum::<f64>();
    check(
        "energy split",
        (parts - spec.energy()).abs() / spec.energy(),
        1e-10,
    );
    let plus = project(&spec, Polarity::SigmaPlus);
    let minus = project(&spec, Polarity::SigmaMinus);
    let zero = project(&spec, Polarity::D);
    check(
        "pairwise orthogonality",
        [plus.inner(&minus), plus.inner(&zero), minus.inner(&zero)]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max),
        1e-12,
    );
    check(
        "solenoidal parts divergence-free",
        max_norm(
            spectral_divergence(&plus)
                .coeffs()
                .iter()
                .chain(spectral_divergence(&minus).coeffs())
                .copied(),
        ),
        1e-12,
    );
    check(
        "dilatational part curl-free",
        spectral_curl(&zero).energy().sqrt(),
        1e-12,
    );
    let f = h.plus.clone();
    let unitarity = Polarity::ALL
        .iter()
        .map(|&s| {
            let up = pull_up(&f, s);
            ((up.energy() - f.energy()).abs()).max(pull_up_adjoint(&up, s).max_abs_diff(&f))
        })
        .fold(0.0, f64::max);
    check("pull-up unitarity", unitarity, 1e-12);

    let samples: Vec<f64> = (0..10_000).map(|i| i as f64 / 10_000.0).collect();
    check("meyer partition of unity", partition_check(&samples), 1e-12);

    let j_max = max_level(n).expect("n >= 4 admits level 0");
    let mut c = WaveletCoeffs::zeros(n, j_max)?;
    for (i, v) in c.values_mut().enumerate() {
        *v = Complex64::new(splitmix_value(seed ^ 0x5eed, i as u64), 0.0);
    }
    c.mean = Complex64::new(0.25, 0.0);
    let back = analyze(&synthesize(&c), j_max)?;
    check("scalar mra round trip", back.max_abs_diff(&c), 1e-12);

    let band = low_pass(&u, mra_band_limit(j_max));
    let hw = forward(&band, j_max)?;
    check(
        "helical wavelet reconstruction",
        inverse(&hw).max_abs_diff(&band),
        1e-10,
    );
    check(
        "helical wavelet energy",
        (hw.energy() - band.mean_square()).abs() / band.mean_square(),
        1e-10,
    );
    let mut rc = HelicalWaveletCoeffs::zeros(n, j_max)?;
    for (s, stream) in Polarity::ALL.iter().zip(1u64..) {
        for (i, v) in rc.part_mut(*s).values_mut().enumerate() {
            *v = Complex64::new(splitmix_value(seed, stream << 40 | i as u64), 0.0);
        }
        rc.part_mut(*s).mean = Complex64::default();
    }
    rc.harmonic = [0.5, -0.25, 1.0];
    let back = forward(&inverse(&rc), j_max)?;
    check(
        "helical coefficient round trip",
        back.max_abs_diff(&rc),
        1e-10,
    );

    let field = FieldData::Vector(u.clone());
    let field_ok = decode_field(&encode_field(&field))? == field;
    let coeff_ok = decode_coeffs(&encode_coeffs(&rc))? == rc;
    check(
        "serialization round trip",
        if field_ok && coeff_ok { 0.0 } else { 1.0 },
        0.0,
    );
    Ok(out)
}

/// Whether every check in `results` passed.
pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(CheckResult::passed)
}

/// Convenience for callers holding a grid: the Sigma+/Sigma-/D energies plus the harmonic energy.
pub fn energy_split(u: &GridVectorField) -> [f64; 4] {
    decompose(&fft_vector(u)).energies()
}
