use invex_core::denoise::{extract_patches, ThresholdMode};
use invex_core::metrics::{add_awgn, experimental_snr, ImageBuffer};
use invex_core::prox::prox_vector;
use invex_core::regularizers::{min_epsilon, Regularizer};
use invex_core::synth;
use nalgebra::DMatrix;

fn denoise_with_matrix(
    img: &ImageBuffer,
    w: &DMatrix<f64>,
    reg: &Regularizer,
    lambda2: f64,
    patch: usize,
    stride: usize,
) -> ImageBuffer {
    let dim = patch * patch;
    let mut accum = vec![0.0; img.width() * img.height()];
    let mut counts = vec![0.0; img.width() * img.height()];
    let xs: Vec<usize> = (0..=(img.width() - patch)).step_by(stride).collect();
    let ys: Vec<usize> = (0..=(img.height() - patch)).step_by(stride).collect();
    for &y0 in &ys {
        for &x0 in &xs {
            let mut v = Vec::with_capacity(dim);
            for dy in 0..patch {
                for dx in 0..patch {
                    v.push(img.get(x0 + dx, y0 + dy));
                }
            }
            let mean: f64 = v.iter().sum::<f64>() / dim as f64;
            let centered = DMatrix::from_column_slice(
                dim,
                1,
                &v.iter().map(|p| p - mean).collect::<Vec<_>>(),
            );
            let coeffs = w * &centered;
            let shrunk = prox_vector(reg, lambda2, coeffs.as_slice()).unwrap();
            let restored = w.transpose() * DMatrix::from_column_slice(dim, 1, &shrunk);
            for dy in 0..patch {
                for dx in 0..patch {
                    let idx = (y0 + dy) * img.width() + (x0 + dx);
                    accum[idx] += restored[(dy * patch + dx, 0)] + mean;
                    counts[idx] += 1.0;
                }
            }
        }
    }
    let px: Vec<f64> = accum
        .iter()
        .zip(&counts)
        .map(|(a, c)| (a / c).clamp(0.0, 1.0))
        .collect();
    ImageBuffer::new(img.width(), img.height(), px).unwrap()
}

#[test]
fn loop_from_pca_start() {
    let clean = synth::blocks_image(64, 64, 8, 11);
    let noisy_pixels = add_awgn(clean.pixels(), 20.0, 12).unwrap();
    let mut noisy = ImageBuffer::new(64, 64, noisy_pixels).unwrap();
    noisy.clamp_unit();
    let snr_in = experimental_snr(clean.pixels(), noisy.pixels()).unwrap();
    println!("snr_in = {snr_in:.3}");

    let reg = Regularizer::lp(0.5, min_epsilon(0.5).unwrap()).unwrap();
    let patch = 16;
    let dim = patch * patch;

    let p = extract_patches(&noisy, 2048, patch, 0).unwrap();
    let cov = &p * p.transpose();
    let eig = nalgebra::SymmetricEigen::new(cov);
    // Sort eigenvectors by descending eigenvalue, directions as rows.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut wpca = DMatrix::zeros(dim, dim);
    for (row, &idx) in order.iter().enumerate() {
        for k in 0..dim {
            wpca[(row, k)] = eig.eigenvectors[(k, idx)];
        }
    }

    let a = p.clone(); // centered patches; the residual projector is a no-op here

    for mode in [ThresholdMode::KeepSmall, ThresholdMode::KeepLarge] {
        for l1 in [0.1, 0.5] {
            let mut w = wpca.clone();
            for k in 1..=10 {
                let mut coeffs = w.transpose() * &p;
                for c in coeffs.iter_mut() {
                    let keep = match mode {
                        ThresholdMode::KeepSmall => c.abs() <= l1,
                        ThresholdMode::KeepLarge => c.abs() > l1,
                    };
                    if !keep {
                        *c = 0.0;
                    }
                }
                let m = &a * coeffs.transpose();
                let svd = m.svd(true, true);
                w = svd.u.unwrap() * svd.v_t.unwrap();
                if k == 10 {
                    for l2 in [0.02, 0.05, 0.1] {
                        let out = denoise_with_matrix(&noisy, &w, &reg, l2, patch, 8);
                        let snr = experimental_snr(clean.pixels(), out.pixels()).unwrap();
                        println!("mode={mode:?} l1={l1} K=10 l2={l2}: snr -> {snr:.2} dB");
                    }
                }
            }
        }
    }
}
