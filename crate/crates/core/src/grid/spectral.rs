use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{GridError, GridFunction};

/// Angular Fourier energy of a grid function, integrated over rings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularEnergy {
    /// `Σ_k Σ_{m≠0} |a_m(r_k)|² · 2π r_k Δr`.
    pub nonradial: f64,
    /// The same sum including `m = 0`.
    pub total: f64,
}

impl AngularEnergy {
    pub fn nonradial_fraction(&self) -> f64 {
        if self.total == 0.0 {
            0.0
        } else {
            self.nonradial / self.total
        }
    }
}

/// Samples `f` on `n_rings` circles of radius `r_k = k·Δr`, `Δr = L/(√2 n_rings)`,
/// at `n_samples` equispaced angles each, and integrates the power of the
/// angular Fourier coefficients `a_m(r)` over the disk.
pub fn angular_energy(
    f: &GridFunction,
    n_rings: usize,
    n_samples: usize,
) -> Result<AngularEnergy, GridError> {
    if n_rings == 0 || n_samples < 8 || !n_samples.is_power_of_two() {
        return Err(GridError::SpectralParams { n_rings, n_samples });
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_samples);
    let dr = f.half_width() / std::f64::consts::SQRT_2 / n_rings as f64;
    let norm = 1.0 / n_samples as f64;
    let directions: Vec<(f64, f64)> = (0..n_samples)
        .map(|s| (std::f64::consts::TAU * s as f64 / n_samples as f64).sin_cos())
        .collect();

    let mut buf = vec![Complex::new(0.0, 0.0); n_samples];
    let mut nonradial = 0.0;
    let mut total = 0.0;
    for k in 1..=n_rings {
        let r = k as f64 * dr;
        for (slot, (s, c)) in buf.iter_mut().zip(&directions) {
            *slot = Complex::new(f.interpolate(r * c, r * s), 0.0);
        }
        fft.process(&mut buf);
        let dc = (buf[0] * norm).norm_sqr();
        let ac: f64 = buf[1..].iter().map(|x| (x * norm).norm_sqr()).sum();
        let area = std::f64::consts::TAU * r * dr;
        nonradial += ac * area;
        total += (dc + ac) * area;
    }
    Ok(AngularEnergy { nonradial, total })
}

/// Non-radial spectral energy; zero exactly when every sampled ring is
/// constant.
pub fn nonradial_energy(
    f: &GridFunction,
    n_rings: usize,
    n_samples: usize,
) -> Result<f64, GridError> {
    Ok(angular_energy(f, n_rings, n_samples)?.nonradial)
}
