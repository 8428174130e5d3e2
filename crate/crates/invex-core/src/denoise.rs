//! Data-adaptive tight-frame denoising.
//!
//! The pipeline learns a square orthonormal transform from random patches
//! of the noisy image itself: alternate between thresholding the current
//! transform coefficients and re-fitting the frame as the polar factor (an
//! orthogonal-Procrustes step) of the residual/coefficient cross-product.
//! The learned frame then denoises every sliding-window patch by proximal
//! shrinkage in the transform domain, and overlapping reconstructions are
//! averaged per pixel.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::metrics::ImageBuffer;
use crate::prox::prox_vector;
use crate::regularizers::Regularizer;
use crate::rng;
use crate::CoreError;

/// Which coefficients the frame-learning threshold keeps.
///
/// The update as specified keeps the small coefficients (the residual
/// matrix drives the Procrustes step); `KeepLarge` is the conventional
/// hard-thresholding alternative, exposed as a switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    KeepSmall,
    KeepLarge,
}

/// Configuration for frame learning and the denoising pass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameLearnConfig {
    /// Number of random training patches (S).
    pub patches: usize,
    /// Frame-update iterations (K).
    pub iters: usize,
    /// Hard threshold on coefficients during learning.
    pub lambda1: f64,
    /// Proximal weight of the final shrinkage.
    pub lambda2: f64,
    /// Patch side length; the frame has dimension `patch * patch`.
    pub patch: usize,
    /// Sliding-window stride of the denoising pass.
    pub stride: usize,
    pub seed: u64,
    pub threshold_mode: ThresholdMode,
}

impl Default for FrameLearnConfig {
    fn default() -> Self {
        FrameLearnConfig {
            patches: 2048,
            iters: 10,
            lambda1: 0.1,
            lambda2: 0.5,
            patch: 16,
            stride: 8,
            seed: 0,
            threshold_mode: ThresholdMode::KeepSmall,
        }
    }
}

impl FrameLearnConfig {
    fn validate(&self) -> Result<(), CoreError> {
        let dim = self.patch * self.patch;
        if self.patch == 0 {
            return Err(CoreError::parameter("patch size must be positive"));
        }
        if self.patches < dim {
            return Err(CoreError::parameter(format!(
                "need at least {dim} patches for a {dim}-dimensional frame, got {}",
                self.patches
            )));
        }
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(CoreError::parameter(format!("{name} must lie in (0,1], got {v}")));
            }
        }
        if self.stride == 0 || self.stride > self.patch {
            return Err(CoreError::parameter(format!(
                "stride must lie in [1, patch], got {}",
                self.stride
            )));
        }
        Ok(())
    }
}

/// A learned square transform with (after at least one update) orthonormal
/// columns.
#[derive(Debug, Clone)]
pub struct TightFrame {
    w: DMatrix<f64>,
    repaired: bool,
}

impl TightFrame {
    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// True when a rank-deficient Procrustes step had to be completed with
    /// identity basis vectors.
    pub fn repaired(&self) -> bool {
        self.repaired
    }

    /// `max_ij |W^T W - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect_of(&self.w)
    }

    /// Patch vector -> coefficients (`W x`).
    pub fn analyze(&self, x: &[f64]) -> Vec<f64> {
        let v = DMatrix::from_column_slice(x.len(), 1, x);
        let c = &self.w * v;
        c.as_slice().to_vec()
    }

    /// Coefficients -> patch vector (`W^T c`).
    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        let v = DMatrix::from_column_slice(c.len(), 1, c);
        let x = self.w.transpose() * v;
        x.as_slice().to_vec()
    }
}

/// Extracts `s` random `patch x patch` patches at seeded positions and
/// stacks them mean-removed as the columns of a `patch^2 x s` matrix.
pub fn extract_patches(
    img: &ImageBuffer,
    s: usize,
    patch: usize,
    seed: u64,
) -> Result<DMatrix<f64>, CoreError> {
    if img.width() < patch || img.height() < patch {
        return Err(CoreError::dimension(format!(
            "image {}x{} smaller than patch {patch}",
            img.width(),
            img.height()
        )));
    }
    if s == 0 {
        return Err(CoreError::parameter("need at least one patch"));
    }
    let dim = patch * patch;
    let mut r = rng::seeded(seed);
    let max_x = img.width() - patch + 1;
    let max_y = img.height() - patch + 1;
    let mut data = Vec::with_capacity(dim * s);
    for _ in 0..s {
        let x0 = rng::uniform_usize(&mut r, max_x);
        let y0 = rng::uniform_usize(&mut r, max_y);
        let start = data.len();
        let mut mean = 0.0;
        for dy in 0..patch {
            for dx in 0..patch {
                let v = img.get(x0 + dx, y0 + dy);
                mean += v;
                data.push(v);
            }
        }
        mean /= dim as f64;
        for v in &mut data[start..] {
            *v -= mean;
        }
    }
    // Column-major constructor; each patch occupies one column.
    Ok(DMatrix::from_column_slice(dim, s, &data))
}

/// Polar factor `U V^T` of `m`. When the SVD does not converge or the
/// product comes out short of orthonormal (rank-deficient input), the
/// factor is completed to a full orthonormal basis with identity basis
/// vectors and the repair is flagged.
fn polar_orthonormal(m: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let dim = m.nrows();
    let w = match m.clone().try_svd(true, true, f64::EPSILON, 10_000) {
        Some(svd) => {
            let u = svd.u.expect("svd requested U");
            let v_t = svd.v_t.expect("svd requested V^T");
            u * v_t
        }
        None => DMatrix::identity(dim, dim),
    };
    let defect = orthonormality_defect_of(&w);
    if defect <= 1e-8 {
        (w, false)
    } else {
        (complete_orthonormal(&w), true)
    }
}

fn orthonormality_defect_of(w: &DMatrix<f64>) -> f64 {
    let gram = w.transpose() * w;
    let mut defect: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((gram[(i, j)] - target).abs());
        }
    }
    defect
}

/// Gram-Schmidt over the columns of `w` followed by identity basis
/// vectors: keeps the well-determined directions and fills the missing
/// ones.
fn complete_orthonormal(w: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = w.nrows();
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(dim);
    let candidates = w.column_iter().map(|c| c.into_owned()).chain((0..dim).map(|k| {
        let mut e = nalgebra::DVector::zeros(dim);
        e[k] = 1.0;
        e
    }));
    for mut cand in candidates {
        if cols.len() == dim {
            break;
        }
        for c in &cols {
            let proj = c.dot(&cand);
            cand -= c * proj;
        }
        let norm = cand.norm();
        if norm > 1e-6 {
            cols.push(cand / norm);
        }
    }
    DMatrix::from_columns(&cols)
}

/// Learns the frame from a `dim x S` patch matrix by `cfg.iters` rounds of
/// coefficient thresholding and orthogonal-Procrustes refitting.
///
/// With `iters = 0` the initial rank-one frame `(1/dim) * ones` is returned
/// unchanged; every SVD round replaces it with an exactly orthonormal
/// factor.
pub fn learn_tight_frame(
    p: &DMatrix<f64>,
    cfg: &FrameLearnConfig,
) -> Result<TightFrame, CoreError> {
    let dim = p.nrows();
    if dim == 0 || p.ncols() == 0 {
        return Err(CoreError::dimension("empty patch matrix"));
    }
    if !(cfg.lambda1 > 0.0 && cfg.lambda1 <= 1.0) {
        return Err(CoreError::parameter(format!(
            "lambda1 must lie in (0,1], got {}",
            cfg.lambda1
        )));
    }
    let mut w = DMatrix::from_element(dim, dim, 1.0 / dim as f64);
    // Residual against the rank-one initial frame; fixed outside the loop.
    let a = {
        let proj = &w * w.transpose();
        let ident = DMatrix::identity(dim, dim);
        (ident - proj) * p
    };
    let mut repaired = false;
    for _ in 0..cfg.iters {
        let mut coeffs = w.transpose() * p;
        for c in coeffs.iter_mut() {
            let keep = match cfg.threshold_mode {
                ThresholdMode::KeepSmall => c.abs() <= cfg.lambda1,
                ThresholdMode::KeepLarge => c.abs() > cfg.lambda1,
            };
            if !keep {
                *c = 0.0;
            }
        }
        let m = &a * coeffs.transpose();
        let (next, was_repaired) = polar_orthonormal(&m);
        w = next;
        repaired |= was_repaired;
    }
    Ok(TightFrame { w, repaired })
}

/// Result of [`denoise_image`].
#[derive(Debug, Clone)]
pub struct DenoiseOutput {
    pub image: ImageBuffer,
    /// Final `|W^T W - I|` defect of the learned frame.
    pub frame_defect: f64,
    /// Whether a rank-deficient frame update was repaired.
    pub frame_repaired: bool,
}

fn window_starts(extent: usize, patch: usize, stride: usize) -> Vec<usize> {
    let last = extent - patch;
    let mut starts: Vec<usize> = (0..=last).step_by(stride).collect();
    if *starts.last().unwrap() != last {
        starts.push(last);
    }
    starts
}

/// Two-step denoising: learn the frame from the noisy image, then shrink
/// every sliding-window patch in the transform domain.
///
/// Each patch has its mean removed before analysis and restored after
/// synthesis; overlapping reconstructions are averaged by per-pixel counts
/// and the result is clamped to `[0, 1]`. Deterministic for a fixed
/// `(image, config)` pair.
pub fn denoise_image(
    img: &ImageBuffer,
    reg: &Regularizer,
    cfg: &FrameLearnConfig,
) -> Result<DenoiseOutput, CoreError> {
    cfg.validate()?;
    if img.pixels().iter().any(|v| !(-1e-9..=1.0 + 1e-9).contains(v)) {
        return Err(CoreError::input("image pixels must lie in [0,1]"));
    }
    let patches = extract_patches(img, cfg.patches, cfg.patch, cfg.seed)?;
    let frame = learn_tight_frame(&patches, cfg)?;

    let dim = cfg.patch * cfg.patch;
    let mut accum = vec![0.0; img.width() * img.height()];
    let mut counts = vec![0.0; img.width() * img.height()];
    let mut patch_buf = vec![0.0; dim];

    for &y0 in window_starts(img.height(), cfg.patch, cfg.stride).iter() {
        for &x0 in window_starts(img.width(), cfg.patch, cfg.stride).iter() {
            let mut mean = 0.0;
            for dy in 0..cfg.patch {
                for dx in 0..cfg.patch {
                    let v = img.get(x0 + dx, y0 + dy);
                    patch_buf[dy * cfg.patch + dx] = v;
                    mean += v;
                }
            }
            mean /= dim as f64;
            for v in patch_buf.iter_mut() {
                *v -= mean;
            }
            let coeffs = frame.analyze(&patch_buf);
            let shrunk = prox_vector(reg, cfg.lambda2, &coeffs)?;
            let restored = frame.synthesize(&shrunk);
            for dy in 0..cfg.patch {
                for dx in 0..cfg.patch {
                    let idx = (y0 + dy) * img.width() + (x0 + dx);
                    accum[idx] += restored[dy * cfg.patch + dx] + mean;
                    counts[idx] += 1.0;
                }
            }
        }
    }

    let pixels: Vec<f64> = accum
        .iter()
        .zip(&counts)
        .map(|(a, c)| (a / c).clamp(0.0, 1.0))
        .collect();
    let image = ImageBuffer::new(img.width(), img.height(), pixels)?;
    Ok(DenoiseOutput {
        image,
        frame_defect: frame.orthonormality_defect(),
        frame_repaired: frame.repaired(),
    })
}
