//! Localization diagnostics: shell-integrated coherence spectra, ray profiles
//! and log-log tail fits.
//!
//! The coherence spectrum of `u` about a centre `c` is
//!
//! ```text
//! E(r_j) = N^-3 * sum { |u(x)|^2 : r_j - D <= |x - c| < r_j + D },   r_j = j/N,  D = 1/(2N)
//! ```
//!
//! with the periodic minimum-image distance. The shells are half-open and cover
//! the cell, so the spectrum sums exactly to the grid mean square of `u`.

use crate::error::{Error, Result};
use crate::fourier::GridVectorField;

/// Residual above which a log-log fit is reported as not algebraic.
pub const NON_ALGEBRAIC_RESIDUAL: f64 = 0.1;

/// Minimum number of positive samples a tail fit needs inside its window.
pub const MIN_FIT_SAMPLES: usize = 8;

/// Default fit window `[0.05, 0.3]`.
pub const DEFAULT_WINDOW: (f64, f64) = (0.05, 0.3);

/// Shell-integrated energy about a centre, in total and per Cartesian component.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceSpectrum {
    pub center: [f64; 3],
    pub n: usize,
    /// `r_j = j / N`.
    pub radii: Vec<f64>,
    /// Half-width `D = 1/(2N)` of every shell.
    pub shell_width: f64,
    /// Total `|u|^2` per shell.
    pub values: Vec<f64>,
    /// `u_x^2`, `u_y^2`, `u_z^2` per shell.
    pub components: [Vec<f64>; 3],
}

impl CoherenceSpectrum {
    /// Whether shell `j` extends past the inscribed sphere `r = 1/2`, where the
    /// periodic cell covers it only partially.
    pub fn is_partial(&self, shell: usize) -> bool {
        self.radii[shell] + self.shell_width > 0.5
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Shell index whose radius is closest to `r`.
    pub fn shell_at(&self, r: f64) -> usize {
        ((r * self.n as f64).round().max(0.0) as usize).min(self.radii.len() - 1)
    }

    pub fn value_at(&self, r: f64) -> f64 {
        self.values[self.shell_at(r)]
    }

    pub fn component_at(&self, axis: usize, r: f64) -> f64 {
        self.components[axis][self.shell_at(r)]
    }

    /// `(r, value)` pairs of the total spectrum.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.radii
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .collect()
    }

    /// `(r, value)` pairs of one component's spectrum.
    pub fn component_points(&self, axis: usize) -> Vec<(f64, f64)> {
        self.radii
            .iter()
            .copied()
            .zip(self.components[axis].iter().copied())
            .collect()
    }
}

/// Minimum-image offsets `x_i - c` (as squared distances) along one axis.
fn axis_offsets(n: usize, c: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let d = i as f64 / n as f64 - c;
            let d = d - d.round();
            d * d
        })
        .collect()
}

pub fn coherence_spectrum(u: &GridVectorField, center: [f64; 3]) -> CoherenceSpectrum {
    let n = u.n();
    let nf = n as f64;
    // the farthest minimum-image point is at most sqrt(3)/2 away
    let shells = (0.75f64.sqrt() * nf + 0.5).floor() as usize + 1;
    let mut values = vec![0.0; shells];
    let mut components = [vec![0.0; shells], vec![0.0; shells], vec![0.0; shells]];
    let [dx, dy, dz] = [0, 1, 2].map(|a| axis_offsets(n, center[a]));
    let comps = u.components().each_ref().map(|c| c.samples());
    let scale = 1.0 / (nf * nf * nf);
    for (iz, dz2) in dz.iter().enumerate() {
        for (iy, dy2) in dy.iter().enumerate() {
            let dyz = dy2 + dz2;
            let row = n * (iy + n * iz);
            for (ix, dx2) in dx.iter().enumerate() {
                let d = (dx2 + dyz).sqrt();
                let shell = ((d * nf + 0.5).floor() as usize).min(shells - 1);
                let i = row + ix;
                for a in 0..3 {
                    let e = comps[a][i] * comps[a][i] * scale;
                    components[a][shell] += e;
                }
            }
        }
    }
    for (j, v) in values.iter_mut().enumerate() {
        *v = components[0][j] + components[1][j] + components[2][j];
    }
    CoherenceSpectrum {
        center,
        n,
        radii: (0..shells).map(|j| j as f64 / nf).collect(),
        shell_width: 0.5 / nf,
        values,
        components,
    }
}

/// Magnitudes of one Cartesian component sampled along a ray.
#[derive(Clone, Debug, PartialEq)]
pub struct RayProfile {
    pub component: usize,
    pub center: [f64; 3],
    pub direction: [f64; 3],
    /// `(r, |u_component|)` for `r = m/N`, `m = 1..=N/2`.
    pub samples: Vec<(f64, f64)>,
}

/// Samples `|u_axis|` at the grid points nearest to `center + r * direction`.
pub fn ray_profile(
    u: &GridVectorField,
    axis: usize,
    center: [f64; 3],
    direction: [f64; 3],
) -> Result<RayProfile> {
    if axis > 2 {
        return Err(Error::Usage(format!("component {axis} is not 0, 1 or 2")));
    }
    let len = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if !(len.is_finite() && len > 0.0) {
        return Err(Error::Usage(
            "ray direction must be a nonzero vector".into(),
        ));
    }
    let dir = direction.map(|d| d / len);
    let n = u.n();
    let nf = n as f64;
    let field = u.component(axis);
    let samples = (1..=n / 2)
        .map(|m| {
            let r = m as f64 / nf;
            let idx = [0, 1, 2].map(|a| {
                let x = (center[a] + r * dir[a]) * nf;
                x.round().rem_euclid(nf) as usize % n
            });
            (r, field.get(idx[0], idx[1], idx[2]).abs())
        })
        .collect();
    Ok(RayProfile {
        component: axis,
        center,
        direction: dir,
        samples,
    })
}

/// Ordinary least-squares line through `(log r, log value)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailFit {
    pub r_min: f64,
    pub r_max: f64,
    /// Fitted power: `value ~ r^exponent`.
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the fit in natural-log units.
    pub residual: f64,
    /// Number of samples used.
    pub samples: usize,
}

impl TailFit {
    /// A large residual means the profile is not a power law in the window.
    pub fn is_non_algebraic(&self) -> bool {
        self.residual > NON_ALGEBRAIC_RESIDUAL
    }
}

/// Anything that yields `(r, value)` samples for [`tail_fit`].
pub trait Profile {
    fn profile_points(&self) -> Vec<(f64, f64)>;
}

impl Profile for CoherenceSpectrum {
    fn profile_points(&self) -> Vec<(f64, f64)> {
        self.points()
    }
}

impl Profile for RayProfile {
    fn profile_points(&self) -> Vec<(f64, f64)> {
        self.samples.clone()
    }
}

impl Profile for [(f64, f64)] {
    fn profile_points(&self) -> Vec<(f64, f64)> {
        self.to_vec()
    }
}

impl Profile for Vec<(f64, f64)> {
    fn profile_points(&self) -> Vec<(f64, f64)> {
        self.clone()
    }
}

/// Fits `log value = exponent * log r + intercept` over `r_min <= r <= r_max`.
/// Samples with nonpositive values are skipped.
pub fn tail_fit<P: Profile + ?Sized>(profile: &P, r_min: f64, r_max: f64) -> Result<TailFit> {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::FitWindow(r_min, r_max));
    }
    let pts: Vec<(f64, f64)> = profile
        .profile_points()
        .into_iter()
        .filter(|&(r, v)| r >= r_min && r <= r_max && v > 0.0 && v.is_finite())
        .map(|(r, v)| (r.ln(), v.ln()))
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            found: pts.len(),
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - exponent * p.0 - intercept).powi(2))
        .sum();
    Ok(TailFit {
        r_min,
        r_max,
        exponent,
        intercept,
        residual: (sse / m).sqrt(),
        samples: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{fft_scalar, ifft_scalar, GridScalarField};
    use crate::meyer::{wavelet_fourier_coeffs, WaveletIndex};

    fn scalar_as_vector(f: GridScalarField) -> GridVectorField {
        let z = GridScalarField::zeros(f.n()).unwrap();
        GridVectorField::new(f, z.clone(), z).unwrap()
    }

    #[test]
    fn point_mass_sits_in_shell_zero() {
        let n = 16;
        let mut f = GridScalarField::zeros(n).unwrap();
        f.samples_mut()[3 + n * (5 + n * 7)] = 1.0;
        let spec = coherence_spectrum(&scalar_as_vector(f), [3.0 / 16.0, 5.0 / 16.0, 7.0 / 16.0]);
        assert_eq!(spec.values[0], 1.0 / 4096.0);
        assert!(spec.values[1..].iter().all(|&v| v == 0.0));
        assert_eq!(spec.radii[2], 2.0 / 16.0);
        assert_eq!(spec.shell_width, 1.0 / 32.0);
    }

    #[test]
    fn shells_partition_the_cell() {
        let u =
            GridVectorField::from_fn(16, |x, y, z| [x.sin(), (3.0 * y).cos() + z, x * y]).unwrap();
        let spec = coherence_spectrum(&u, [0.3, 0.71, 0.05]);
        assert!((spec.total() - u.mean_square()).abs() < 1e-12 * u.mean_square());
        for a in 0..3 {
            let s: f64 = spec.components[a].iter().sum();
            assert!((s - u.component(a).mean_square()).abs() < 1e-12);
        }
        assert!(spec.radii.windows(2).all(|w| w[0] < w[1]));
        assert!(!spec.is_partial(7) && spec.is_partial(8));
    }

    #[test]
    fn unit_wavelet_spectrum_sums_to_one() {
        let idx = WaveletIndex::new(2, 7, [1, 2, 3]).unwrap();
        let f = ifft_scalar(&wavelet_fourier_coeffs(&idx, 32).unwrap());
        let spec = coherence_spectrum(&scalar_as_vector(f), [0.2, 0.4, 0.6]);
        assert!((spec.total() - 1.0).abs() < 0.01);
    }

    #[test]
    fn ray_profile_of_constant_is_flat() {
        let u = GridVectorField::from_fn(16, |_, _, _| [0.0, -2.0, 0.0]).unwrap();
        let ray = ray_profile(&u, 1, [0.5, 0.5, 0.5], [1.0, 1.0, 0.0]).unwrap();
        assert_eq!(ray.samples.len(), 8);
        assert!(ray.samples.iter().all(|&(_, v)| v == 2.0));
        assert!(ray_profile(&u, 3, [0.0; 3], [1.0, 0.0, 0.0]).is_err());
        assert!(ray_profile(&u, 0, [0.0; 3], [0.0; 3]).is_err());
    }

    #[test]
    fn ray_profile_follows_the_direction() {
        let n = 16;
        let f = GridScalarField::from_fn(n, |x, y, z| x + 10.0 * y + 100.0 * z).unwrap();
        let u = scalar_as_vector(f);
        let ray = ray_profile(&u, 0, [0.0, 0.0, 0.25], [0.0, 0.0, 1.0]).unwrap();
        assert_eq!(ray.samples[0], (1.0 / 16.0, 100.0 * 5.0 / 16.0));
        // wraps around the periodic cell
        assert_eq!(ray.samples[7].1, 100.0 * 12.0 / 16.0);
        let _ = fft_scalar(u.component(0));
    }

    #[test]
    fn fits_an_exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..=64)
            .map(|m| m as f64 / 128.0)
            .map(|r| (r, r.powi(-2)))
            .collect();
        let fit = tail_fit(&pts, 0.05, 0.3).unwrap();
        assert!((fit.exponent + 2.0).abs() < 1e-3);
        assert!(fit.residual < 1e-12);
        assert!(!fit.is_non_algebraic());
        assert_eq!(fit.samples, 32);
    }

    #[test]
    fn exponential_profiles_are_flagged() {
        // e^{-10 r} is only mildly curved in log-log over [0.05, 0.3]
        let pts: Vec<(f64, f64)> = (1..=64)
            .map(|m| m as f64 / 128.0)
            .map(|r| (r, (-10.0 * r).exp()))
            .collect();
        let fit = tail_fit(&pts, 0.05, 0.3).unwrap();
        assert!((fit.exponent + 1.48).abs() < 0.02, "{}", fit.exponent);
        assert!(fit.is_non_algebraic());

        let pts: Vec<(f64, f64)> = (1..=64)
            .map(|m| m as f64 / 128.0)
            .map(|r| (r, (-40.0 * r).exp()))
            .collect();
        let fit = tail_fit(&pts, 0.05, 0.3).unwrap();
        assert!(fit.exponent < -4.0);
        assert!(fit.is_non_algebraic());
    }

    #[test]
    fn fit_rejects_thin_windows() {
        let pts: Vec<(f64, f64)> = (1..=64)
            .map(|m| m as f64 / 128.0)
            .map(|r| (r, if r < 0.2 { 0.0 } else { r }))
            .collect();
        assert!(matches!(
            tail_fit(&pts, 0.05, 0.25),
            Err(Error::TooFewSamples {
                needed: 8,
                found: 7
            })
        ));
        assert!(matches!(
            tail_fit(&pts, 0.3, 0.05),
            Err(Error::FitWindow(..))
        ));
    }
}
