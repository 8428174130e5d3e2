//! Image quality metrics and measurement-noise injection.

use serde::{Deserialize, Serialize};

use crate::linalg::{norm2, norm2_diff};
use crate::rng;
use crate::CoreError;

/// Row-major grayscale image with pixel values nominally in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self, CoreError> {
        if pixels.len() != width * height {
            return Err(CoreError::dimension(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            pixels,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        ImageBuffer {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        ImageBuffer {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    /// Clamps every pixel into `[0, 1]`.
    pub fn clamp_unit(&mut self) {
        for p in self.pixels.iter_mut() {
            *p = p.clamp(0.0, 1.0);
        }
    }
}

fn check_dims(a: &ImageBuffer, b: &ImageBuffer) -> Result<(), CoreError> {
    if a.width != b.width || a.height != b.height {
        return Err(CoreError::dimension(format!(
            "image dims {}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB with peak 1.0.
///
/// Identical images yield `f64::INFINITY`; see [`cap_db`] for the CSV
/// convention.
pub fn psnr(reference: &ImageBuffer, estimate: &ImageBuffer) -> Result<f64, CoreError> {
    check_dims(reference, estimate)?;
    let n = reference.pixels.len() as f64;
    let mse: f64 = reference
        .pixels
        .iter()
        .zip(&estimate.pixels)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

/// Experimental SNR in dB: `20 log10(|z| / |zhat - z|)`.
pub fn experimental_snr(z: &[f64], zhat: &[f64]) -> Result<f64, CoreError> {
    if z.len() != zhat.len() {
        return Err(CoreError::dimension(format!(
            "vector lengths {} vs {}",
            z.len(),
            zhat.len()
        )));
    }
    let signal = norm2(z);
    if signal == 0.0 {
        return Err(CoreError::input("experimental_snr undefined for zero signal"));
    }
    let err = norm2_diff(zhat, z);
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (signal / err).log10())
}

/// Infinite dB sentinels are written to CSV as a flagged 99.0.
pub fn cap_db(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        99.0
    }
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = 0.01 * 0.01;
const SSIM_C2: f64 = 0.03 * 0.03;

fn ssim_window() -> [f64; SSIM_WINDOW * SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as isize;
    let mut w = [0.0; SSIM_WINDOW * SSIM_WINDOW];
    let mut sum = 0.0;
    for dy in -half..=half {
        for dx in -half..=half {
            let v = (-((dx * dx + dy * dy) as f64) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
            w[((dy + half) * SSIM_WINDOW as isize + (dx + half)) as usize] = v;
            sum += v;
        }
    }
    for v in w.iter_mut() {
        *v /= sum;
    }
    w
}

/// Mean local structural similarity over all fully-interior 11x11 windows,
/// Gaussian-weighted with sigma 1.5, dynamic range 1.0.
///
/// Symmetric in its arguments; equals 1 exactly when the images coincide.
pub fn ssim(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, CoreError> {
    check_dims(a, b)?;
    if a.width < SSIM_WINDOW || a.height < SSIM_WINDOW {
        return Err(CoreError::dimension(format!(
            "ssim needs at least {SSIM_WINDOW}x{SSIM_WINDOW} images, got {}x{}",
            a.width, a.height
        )));
    }
    let win = ssim_window();
    let mut total = 0.0;
    let mut count = 0usize;
    for y0 in 0..=(a.height - SSIM_WINDOW) {
        for x0 in 0..=(a.width - SSIM_WINDOW) {
            let mut mu_x = 0.0;
            let mut mu_y = 0.0;
            let mut xx = 0.0;
            let mut yy = 0.0;
            let mut xy = 0.0;
            for wy in 0..SSIM_WINDOW {
                for wx in 0..SSIM_WINDOW {
                    let wgt = win[wy * SSIM_WINDOW + wx];
                    let pa = a.get(x0 + wx, y0 + wy);
                    let pb = b.get(x0 + wx, y0 + wy);
                    mu_x += wgt * pa;
                    mu_y += wgt * pb;
                    xx += wgt * pa * pa;
                    yy += wgt * pb * pb;
                    xy += wgt * pa * pb;
                }
            }
            let var_x = xx - mu_x * mu_x;
            let var_y = yy - mu_y * mu_y;
            let cov = xy - mu_x * mu_y;
            let local = ((2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov + SSIM_C2))
                / ((mu_x * mu_x + mu_y * mu_y + SSIM_C1) * (var_x + var_y + SSIM_C2));
            total += local;
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Adds white Gaussian noise scaled so the expected realized SNR equals
/// `snr_db`. `snr_db = +inf` returns the input unchanged; deterministic per
/// seed.
pub fn add_awgn(v: &[f64], snr_db: f64, seed: u64) -> Result<Vec<f64>, CoreError> {
    if snr_db == f64::INFINITY {
        return Ok(v.to_vec());
    }
    if !snr_db.is_finite() {
        return Err(CoreError::parameter(format!("invalid snr {snr_db}")));
    }
    let signal_sq = crate::linalg::dot(v, v);
    if signal_sq == 0.0 {
        return Err(CoreError::input("cannot scale noise for a zero-norm signal"));
    }
    let m = v.len() as f64;
    let sigma = (signal_sq / (m * 10f64.powf(snr_db / 10.0))).sqrt();
    let mut r = rng::seeded(seed);
    Ok(v.iter().map(|&x| x + sigma * rng::gaussian(&mut r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psnr_simple_cases() {
        let a = ImageBuffer::constant(4, 4, 1.0);
        let b = ImageBuffer::constant(4, 4, 0.9);
        let v = psnr(&a, &b).unwrap();
        assert!((v - 20.0).abs() < 1e-10);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert_eq!(cap_db(psnr(&a, &a).unwrap()), 99.0);
    }

    #[test]
    fn psnr_quarter_mse() {
        // MSE 0.25 -> 10 log10(4), frozen from a high-precision evaluation.
        let a = ImageBuffer::new(2, 1, vec![1.0, 0.0]).unwrap();
        let b = ImageBuffer::new(2, 1, vec![0.5, 0.5]).unwrap();
        assert!((psnr(&a, &b).unwrap() - 6.020599913279624).abs() < 1e-12);
    }

    #[test]
    fn psnr_is_symmetric() {
        let mut r = rng::seeded(31);
        let a = ImageBuffer::from_fn(8, 8, |_, _| rng::uniform(&mut r));
        let b = ImageBuffer::from_fn(8, 8, |_, _| rng::uniform(&mut r));
        assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
    }

    #[test]
    fn snr_formula_cases() {
        // |z| = 5, |err| = 0.5 -> 20 dB.
        let z = vec![3.0, 4.0];
        let zhat = vec![3.0, 4.5];
        assert!((experimental_snr(&z, &zhat).unwrap() - 20.0).abs() < 1e-12);
        // zhat = 2z: error norm equals signal norm -> 0 dB.
        let z = vec![0.6, 0.8];
        let zhat = vec![1.2, 1.6];
        assert!(experimental_snr(&z, &zhat).unwrap().abs() < 1e-12);
        assert_eq!(experimental_snr(&z, &z).unwrap(), f64::INFINITY);
        assert!(experimental_snr(&[0.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn ssim_identity_and_symmetry() {
        let mut r = rng::seeded(33);
        let a = ImageBuffer::from_fn(16, 16, |_, _| rng::uniform(&mut r));
        assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-14);
        let b = ImageBuffer::from_fn(16, 16, |_, _| rng::uniform(&mut r));
        let ab = ssim(&a, &b).unwrap();
        let ba = ssim(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
        assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn ssim_rejects_small_images() {
        let a = ImageBuffer::constant(10, 10, 0.5);
        assert!(ssim(&a, &a).is_err());
    }

    #[test]
    fn awgn_deterministic_and_infinite_snr() {
        let v: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = add_awgn(&v, 20.0, 5).unwrap();
        let b = add_awgn(&v, 20.0, 5).unwrap();
        let c = add_awgn(&v, 20.0, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(add_awgn(&v, f64::INFINITY, 5).unwrap(), v);
        assert!(add_awgn(&[0.0; 4], 20.0, 1).is_err());
    }

    #[test]
    fn awgn_realized_snr_concentrates() {
        let mut r = rng::seeded(40);
        let v: Vec<f64> = (0..10_000).map(|_| rng::uniform_in(&mut r, -1.0, 1.0)).collect();
        for seed in 0..20 {
            let noisy = add_awgn(&v, 20.0, seed).unwrap();
            let realized = experimental_snr(&v, &noisy).unwrap();
            assert!(
                (realized - 20.0).abs() < 0.5,
                "seed {seed}: realized {realized} dB"
            );
        }
    }
}
