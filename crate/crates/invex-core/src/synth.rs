//! Bundled synthetic test images.
//!
//! Desk-scale stand-ins for photographic test sets: a piecewise-constant
//! block mosaic (sparse under the Haar transform), a sinusoid grating, and
//! a sparse spike field. All are deterministic per seed and live in
//! `[0, 1]`.

use crate::metrics::ImageBuffer;
use crate::rng;

/// Piecewise-constant mosaic of `block x block` tiles with seeded levels.
pub fn blocks_image(width: usize, height: usize, block: usize, seed: u64) -> ImageBuffer {
    let block = block.max(1);
    let tiles_x = width.div_ceil(block);
    let tiles_y = height.div_ceil(block);
    let mut r = rng::seeded(seed);
    let levels: Vec<f64> = (0..tiles_x * tiles_y)
        .map(|_| rng::uniform(&mut r))
        .collect();
    ImageBuffer::from_fn(width, height, |x, y| {
        levels[(y / block) * tiles_x + (x / block)]
    })
}

/// Superposition of two sinusoid gratings, rescaled into `[0, 1]`.
pub fn gratings_image(width: usize, height: usize) -> ImageBuffer {
    use std::f64::consts::PI;
    ImageBuffer::from_fn(width, height, |x, y| {
        let u = x as f64 / width as f64;
        let v = y as f64 / height as f64;
        let s = (2.0 * PI * 4.0 * u).sin() + (2.0 * PI * 3.0 * (u * 0.5 + v)).sin();
        0.5 + 0.24 * s
    })
}

/// Mostly-dark image with `k` seeded bright spikes.
pub fn spikes_image(width: usize, height: usize, k: usize, seed: u64) -> ImageBuffer {
    let mut img = ImageBuffer::constant(width, height, 0.05);
    let mut r = rng::seeded(seed);
    for _ in 0..k {
        let x = rng::uniform_usize(&mut r, width);
        let y = rng::uniform_usize(&mut r, height);
        img.set(x, y, 0.6 + 0.4 * rng::uniform(&mut r));
    }
    img
}

/// Seeded `k`-sparse coefficient vector with standard normal magnitudes.
pub fn sparse_signal(n: usize, k: usize, seed: u64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    let mut r = rng::seeded(seed);
    let mut placed = 0;
    while placed < k {
        let idx = rng::uniform_usize(&mut r, n);
        if x[idx] == 0.0 {
            x[idx] = rng::gaussian(&mut r);
            placed += 1;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn images_live_in_unit_range() {
        for img in [
            blocks_image(64, 64, 8, 1),
            gratings_image(64, 48),
            spikes_image(32, 32, 10, 2),
        ] {
            assert!(img
                .pixels()
                .iter()
                .all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(blocks_image(32, 32, 8, 5), blocks_image(32, 32, 8, 5));
        assert_ne!(blocks_image(32, 32, 8, 5), blocks_image(32, 32, 8, 6));
        assert_eq!(sparse_signal(64, 5, 9), sparse_signal(64, 5, 9));
    }

    #[test]
    fn sparse_signal_has_exact_support() {
        let x = sparse_signal(128, 10, 3);
        assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 10);
    }
}
