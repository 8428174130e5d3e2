//! Linear operators for the reconstruction experiments.
//!
//! Forward models are built from three pieces: a periodic Gaussian blur, an
//! orthonormal multi-level Haar synthesis, and dense Gaussian sensing
//! matrices, glued together with [`compose`]. Every operator exposes an
//! exact adjoint; `adjoint_mismatch` measures how well the pair satisfies
//! `<Ax, y> = <x, A^T y>` on random probes and is asserted to be below
//! `1e-8` for each construction.

use std::io::{BufRead, Write};

use crate::linalg::{dot, norm2};
use crate::rng;
use crate::CoreError;

/// A linear map with an explicit adjoint over flat `f64` vectors.
pub trait LinearOperator: Send + Sync {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;

    /// `out = A x`. Panics if slice lengths do not match the dims.
    fn forward_into(&self, x: &[f64], out: &mut [f64]);

    /// `out = A^T y`. Panics if slice lengths do not match the dims.
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]);

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.out_dim()];
        self.forward_into(x, &mut out);
        out
    }

    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.in_dim()];
        self.adjoint_into(y, &mut out);
        out
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn in_dim(&self) -> usize {
        (**self).in_dim()
    }
    fn out_dim(&self) -> usize {
        (**self).out_dim()
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).forward_into(x, out)
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).adjoint_into(y, out)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Box<T> {
    fn in_dim(&self) -> usize {
        (**self).in_dim()
    }
    fn out_dim(&self) -> usize {
        (**self).out_dim()
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).forward_into(x, out)
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).adjoint_into(y, out)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for std::sync::Arc<T> {
    fn in_dim(&self) -> usize {
        (**self).in_dim()
    }
    fn out_dim(&self) -> usize {
        (**self).out_dim()
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).forward_into(x, out)
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).adjoint_into(y, out)
    }
}

/// The identity map on `dim` coordinates.
#[derive(Debug, Clone)]
pub struct Identity {
    dim: usize,
}

impl Identity {
    pub fn new(dim: usize) -> Self {
        Identity { dim }
    }
}

impl LinearOperator for Identity {
    fn in_dim(&self) -> usize {
        self.dim
    }
    fn out_dim(&self) -> usize {
        self.dim
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
    }
}

/// Coordinate-wise scaling.
#[derive(Debug, Clone)]
pub struct Diagonal {
    diag: Vec<f64>,
}

impl Diagonal {
    pub fn new(diag: Vec<f64>) -> Self {
        Diagonal { diag }
    }
}

impl LinearOperator for Diagonal {
    fn in_dim(&self) -> usize {
        self.diag.len()
    }
    fn out_dim(&self) -> usize {
        self.diag.len()
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.diag.len() {
            out[i] = self.diag[i] * x[i];
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        self.forward_into(y, out);
    }
}

/// Periodic 2-D Gaussian blur, applied separably along rows then columns.
///
/// The 2-D kernel is the outer product of a normalized 1-D Gaussian with
/// itself, so it sums to one and constant images pass through unchanged.
/// The forward pass correlates with the kernel; the adjoint convolves,
/// which for the symmetric Gaussian is the same map.
#[derive(Debug, Clone)]
pub struct GaussianBlur {
    width: usize,
    height: usize,
    kernel: Vec<f64>,
}

/// Builds a periodic blur with an odd `ksize` x `ksize` kernel.
pub fn make_gaussian_blur(
    width: usize,
    height: usize,
    ksize: usize,
    sigma: f64,
) -> Result<GaussianBlur, CoreError> {
    if ksize % 2 == 0 || ksize == 0 {
        return Err(CoreError::parameter(format!("kernel size must be odd, got {ksize}")));
    }
    if !(sigma > 0.0) {
        return Err(CoreError::parameter(format!("sigma must be positive, got {sigma}")));
    }
    if width == 0 || height == 0 {
        return Err(CoreError::parameter("image dimensions must be positive"));
    }
    let half = (ksize / 2) as isize;
    let mut kernel: Vec<f64> = (-half..=half)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = kernel.iter().sum();
    for k in kernel.iter_mut() {
        *k /= sum;
    }
    Ok(GaussianBlur {
        width,
        height,
        kernel,
    })
}

impl GaussianBlur {
    /// Center weight of the normalized 2-D kernel.
    pub fn center_weight(&self) -> f64 {
        let c = self.kernel[self.kernel.len() / 2];
        c * c
    }

    /// 1-D pass along a strided line. `correlate` picks the tap direction:
    /// correlation for the forward map, convolution for the adjoint.
    fn line_pass(&self, src: &[f64], dst: &mut [f64], start: usize, stride: usize, len: usize, correlate: bool) {
        let half = (self.kernel.len() / 2) as isize;
        for i in 0..len {
            let mut acc = 0.0;
            for (j, &k) in self.kernel.iter().enumerate() {
                let d = j as isize - half;
                let offset = if correlate { d } else { -d };
                let idx = (i as isize + offset).rem_euclid(len as isize) as usize;
                acc += k * src[start + idx * stride];
            }
            dst[start + i * stride] = acc;
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64], correlate: bool) {
        assert_eq!(x.len(), self.width * self.height);
        assert_eq!(out.len(), x.len());
        let mut tmp = vec![0.0; x.len()];
        for row in 0..self.height {
            self.line_pass(x, &mut tmp, row * self.width, 1, self.width, correlate);
        }
        for col in 0..self.width {
            self.line_pass(&tmp, out, col, self.width, self.height, correlate);
        }
    }
}

impl LinearOperator for GaussianBlur {
    fn in_dim(&self) -> usize {
        self.width * self.height
    }
    fn out_dim(&self) -> usize {
        self.width * self.height
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        self.apply(x, out, true);
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        self.apply(y, out, false);
    }
}

/// Orthonormal multi-level 2-D Haar synthesis (coefficients to image).
///
/// The forward map inverts the analysis transform; since the transform is
/// orthonormal the adjoint of synthesis is exactly the analysis pass, and
/// both round trips are the identity to machine precision.
#[derive(Debug, Clone)]
pub struct HaarSynthesis {
    width: usize,
    height: usize,
    levels: usize,
}

/// Builds the synthesis operator; `width` and `height` must be divisible by
/// `2^levels`.
pub fn make_haar(levels: usize, width: usize, height: usize) -> Result<HaarSynthesis, CoreError> {
    if levels == 0 {
        return Err(CoreError::parameter("levels must be at least 1"));
    }
    let factor = 1usize << levels;
    if width == 0 || height == 0 || width % factor != 0 || height % factor != 0 {
        return Err(CoreError::parameter(format!(
            "dimensions {width}x{height} not divisible by 2^{levels}"
        )));
    }
    Ok(HaarSynthesis {
        width,
        height,
        levels,
    })
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

impl HaarSynthesis {
    fn split_line(buf: &mut [f64], scratch: &mut [f64], start: usize, stride: usize, len: usize) {
        let half = len / 2;
        for j in 0..half {
            let a = buf[start + (2 * j) * stride];
            let b = buf[start + (2 * j + 1) * stride];
            scratch[j] = SQRT_HALF * (a + b);
            scratch[half + j] = SQRT_HALF * (a - b);
        }
        for j in 0..len {
            buf[start + j * stride] = scratch[j];
        }
    }

    fn merge_line(buf: &mut [f64], scratch: &mut [f64], start: usize, stride: usize, len: usize) {
        let half = len / 2;
        for j in 0..half {
            let lo = buf[start + j * stride];
            let hi = buf[start + (half + j) * stride];
            scratch[2 * j] = SQRT_HALF * (lo + hi);
            scratch[2 * j + 1] = SQRT_HALF * (lo - hi);
        }
        for j in 0..len {
            buf[start + j * stride] = scratch[j];
        }
    }

    /// Image -> coefficients.
    fn analysis(&self, buf: &mut [f64]) {
        let mut scratch = vec![0.0; self.width.max(self.height)];
        for level in 0..self.levels {
            let cw = self.width >> level;
            let ch = self.height >> level;
            for row in 0..ch {
                Self::split_line(buf, &mut scratch, row * self.width, 1, cw);
            }
            for col in 0..cw {
                Self::split_line(buf, &mut scratch, col, self.width, ch);
            }
        }
    }

    /// Coefficients -> image.
    fn synthesis(&self, buf: &mut [f64]) {
        let mut scratch = vec![0.0; self.width.max(self.height)];
        for level in (0..self.levels).rev() {
            let cw = self.width >> level;
            let ch = self.height >> level;
            for col in 0..cw {
                Self::merge_line(buf, &mut scratch, col, self.width, ch);
            }
            for row in 0..ch {
                Self::merge_line(buf, &mut scratch, row * self.width, 1, cw);
            }
        }
    }
}

impl LinearOperator for HaarSynthesis {
    fn in_dim(&self) -> usize {
        self.width * self.height
    }
    fn out_dim(&self) -> usize {
        self.width * self.height
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.in_dim());
        out.copy_from_slice(x);
        self.synthesis(out);
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.out_dim());
        out.copy_from_slice(y);
        self.analysis(out);
    }
}

/// Dense row-major matrix operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, CoreError> {
        if data.len() != rows * cols {
            return Err(CoreError::dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Writes the matrix as CSV, one row per line, full-precision decimals.
    pub fn to_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Reads a matrix written by [`DenseMatrix::to_csv`].
    pub fn from_csv<R: BufRead>(r: R) -> Result<Self, CoreError> {
        let mut data = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for line in r.lines() {
            let line = line.map_err(|e| CoreError::input(format!("csv read: {e}")))?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| CoreError::input(format!("csv parse: {e}")))?;
            match cols {
                None => cols = Some(vals.len()),
                Some(c) if c != vals.len() => {
                    return Err(CoreError::input("ragged csv rows"));
                }
                _ => {}
            }
            rows += 1;
            data.extend(vals);
        }
        let cols = cols.ok_or_else(|| CoreError::input("empty csv"))?;
        DenseMatrix::new(rows, cols, data)
    }
}

impl LinearOperator for DenseMatrix {
    fn in_dim(&self) -> usize {
        self.cols
    }
    fn out_dim(&self) -> usize {
        self.rows
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(out.len(), self.rows);
        for i in 0..self.rows {
            out[i] = dot(&self.data[i * self.cols..(i + 1) * self.cols], x);
        }
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.rows);
        assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let yi = y[i];
            for j in 0..self.cols {
                out[j] += yi * row[j];
            }
        }
    }
}

/// Dense `m x n` sensing matrix with `N(0, 1/m)` entries from the seeded
/// generator, columns rescaled to unit Euclidean norm. Deterministic per
/// seed.
pub fn make_gaussian_sensing(m: usize, n: usize, seed: u64) -> Result<DenseMatrix, CoreError> {
    if m >= n {
        return Err(CoreError::parameter(format!(
            "sensing requires m < n, got m={m}, n={n}"
        )));
    }
    if m == 0 {
        return Err(CoreError::parameter("m must be positive"));
    }
    let mut r = rng::seeded(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let mut mat = DenseMatrix::from_fn(m, n, |_, _| scale * rng::gaussian(&mut r));
    for j in 0..n {
        let mut norm_sq = 0.0;
        for i in 0..m {
            let v = mat.data[i * n + j];
            norm_sq += v * v;
        }
        let inv = 1.0 / norm_sq.sqrt();
        for i in 0..m {
            mat.data[i * n + j] *= inv;
        }
    }
    Ok(mat)
}

/// Composition `outer . inner`, with adjoint `inner^T . outer^T`.
#[derive(Debug, Clone)]
pub struct Composed<A, B> {
    outer: A,
    inner: B,
}

/// Builds `x -> outer(inner(x))`; fails if the interface dims disagree.
pub fn compose<A: LinearOperator, B: LinearOperator>(
    outer: A,
    inner: B,
) -> Result<Composed<A, B>, CoreError> {
    if outer.in_dim() != inner.out_dim() {
        return Err(CoreError::dimension(format!(
            "outer expects {} inputs but inner produces {}",
            outer.in_dim(),
            inner.out_dim()
        )));
    }
    Ok(Composed { outer, inner })
}

impl<A: LinearOperator, B: LinearOperator> LinearOperator for Composed<A, B> {
    fn in_dim(&self) -> usize {
        self.inner.in_dim()
    }
    fn out_dim(&self) -> usize {
        self.outer.out_dim()
    }
    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        let mut mid = vec![0.0; self.inner.out_dim()];
        self.inner.forward_into(x, &mut mid);
        self.outer.forward_into(&mid, out);
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        let mut mid = vec![0.0; self.outer.in_dim()];
        self.outer.adjoint_into(y, &mut mid);
        self.inner.adjoint_into(&mid, out);
    }
}

/// Largest eigenvalue of `H^T H` by power iteration from a seeded start.
///
/// Stops when the Rayleigh quotient's relative change drops below `tol` or
/// after `iters` steps. The estimate approaches the true value from below.
pub fn estimate_lipschitz<H: LinearOperator>(h: &H, iters: usize, tol: f64, seed: u64) -> f64 {
    estimate_lipschitz_trace(h, iters, tol, seed).0
}

/// As [`estimate_lipschitz`], also returning the Rayleigh quotient history
/// (non-decreasing up to rounding).
pub fn estimate_lipschitz_trace<H: LinearOperator>(
    h: &H,
    iters: usize,
    tol: f64,
    seed: u64,
) -> (f64, Vec<f64>) {
    assert!(iters >= 1);
    let n = h.in_dim();
    let mut r = rng::seeded(seed);
    let mut v = vec![0.0; n];
    rng::fill_gaussian(&mut r, &mut v);
    let nv = norm2(&v);
    for x in v.iter_mut() {
        *x /= nv;
    }

    let mut hv = vec![0.0; h.out_dim()];
    let mut w = vec![0.0; n];
    let mut history = Vec::new();
    let mut ray = 0.0;
    for _ in 0..iters {
        h.forward_into(&v, &mut hv);
        h.adjoint_into(&hv, &mut w);
        let new_ray = dot(&v, &w);
        history.push(new_ray);
        let done = !history.is_empty()
            && history.len() > 1
            && (new_ray - ray).abs() <= tol * new_ray.abs().max(1.0);
        ray = new_ray;
        if done {
            break;
        }
        let nw = norm2(&w);
        if nw == 0.0 {
            break;
        }
        for i in 0..n {
            v[i] = w[i] / nw;
        }
    }
    (ray, history)
}

/// Normalized adjoint-pair mismatch `|<Ax,y> - <x,A^T y>| / (|x| |y|)` on a
/// seeded random probe.
pub fn adjoint_mismatch<H: LinearOperator>(h: &H, seed: u64) -> f64 {
    let mut r = rng::seeded(seed);
    let mut x = vec![0.0; h.in_dim()];
    let mut y = vec![0.0; h.out_dim()];
    rng::fill_gaussian(&mut r, &mut x);
    rng::fill_gaussian(&mut r, &mut y);
    let ax = h.forward(&x);
    let aty = h.adjoint(&y);
    (dot(&ax, &y) - dot(&x, &aty)).abs() / (norm2(&x) * norm2(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blur_preserves_constants() {
        let blur = make_gaussian_blur(16, 12, 9, 4.0).unwrap();
        let x = vec![0.37; 16 * 12];
        let y = blur.forward(&x);
        for v in y {
            assert!((v - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn blur_impulse_center_weight() {
        // Frozen oracle: center of the normalized 9x9, sigma=4 kernel,
        // cross-checked against a high-precision direct summation.
        let blur = make_gaussian_blur(32, 32, 9, 4.0).unwrap();
        assert!((blur.center_weight() - 0.018132873177146123).abs() < 1e-15);
        let mut x = vec![0.0; 32 * 32];
        x[16 * 32 + 16] = 1.0;
        let y = blur.forward(&x);
        assert!((y[16 * 32 + 16] - blur.center_weight()).abs() < 1e-15);
        let total: f64 = y.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blur_rejects_even_kernel() {
        assert!(make_gaussian_blur(8, 8, 8, 2.0).is_err());
        assert!(make_gaussian_blur(8, 8, 3, 0.0).is_err());
    }

    #[test]
    fn blur_adjoint_pair() {
        let blur = make_gaussian_blur(24, 16, 9, 4.0).unwrap();
        assert!(adjoint_mismatch(&blur, 5) < 1e-12);
    }

    #[test]
    fn haar_constant_image_concentrates() {
        let haar = make_haar(1, 2, 2).unwrap();
        let coeffs = haar.adjoint(&[0.5, 0.5, 0.5, 0.5]);
        assert!((coeffs[0] - 1.0).abs() < 1e-14);
        assert!(coeffs[1].abs() < 1e-14 && coeffs[2].abs() < 1e-14 && coeffs[3].abs() < 1e-14);
    }

    #[test]
    fn haar_round_trip_and_parseval() {
        let haar = make_haar(3, 16, 16).unwrap();
        let mut r = rng::seeded(9);
        let x: Vec<f64> = (0..256).map(|_| rng::gaussian(&mut r)).collect();
        let coeffs = haar.adjoint(&x);
        let back = haar.forward(&coeffs);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!((norm2(&coeffs) - norm2(&x)).abs() < 1e-10);
        // And the other round trip.
        let img = haar.forward(&x);
        let again = haar.adjoint(&img);
        for (a, b) in x.iter().zip(&again) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn haar_rejects_bad_dims() {
        assert!(make_haar(3, 12, 16).is_err());
        assert!(make_haar(0, 16, 16).is_err());
    }

    #[test]
    fn sensing_columns_are_unit() {
        let mat = make_gaussian_sensing(32, 64, 71).unwrap();
        for j in 0..64 {
            let norm_sq: f64 = (0..32).map(|i| mat.get(i, j) * mat.get(i, j)).sum();
            assert!((norm_sq.sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sensing_is_deterministic_per_seed() {
        let a = make_gaussian_sensing(16, 32, 3).unwrap();
        let b = make_gaussian_sensing(16, 32, 3).unwrap();
        let c = make_gaussian_sensing(16, 32, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sensing_rejects_fat_shapes() {
        assert!(make_gaussian_sensing(32, 32, 0).is_err());
        assert!(make_gaussian_sensing(33, 32, 0).is_err());
    }

    #[test]
    fn compose_matches_parts() {
        let a = make_gaussian_sensing(8, 16, 1).unwrap();
        let id = Identity::new(16);
        let comp = compose(a.clone(), id).unwrap();
        let mut r = rng::seeded(2);
        let x: Vec<f64> = (0..16).map(|_| rng::gaussian(&mut r)).collect();
        assert_eq!(comp.forward(&x), a.forward(&x));
        assert_eq!(comp.out_dim(), 8);

        let blur = make_gaussian_blur(8, 8, 3, 1.0).unwrap();
        let haar = make_haar(2, 8, 8).unwrap();
        let h = compose(blur, haar).unwrap();
        assert!(adjoint_mismatch(&h, 17) < 1e-12);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = make_gaussian_sensing(8, 16, 1).unwrap();
        let b = make_gaussian_sensing(8, 16, 2).unwrap();
        assert!(compose(a, b).is_err());
    }

    #[test]
    fn lipschitz_of_identity_and_diagonal() {
        let id = Identity::new(10);
        assert!((estimate_lipschitz(&id, 100, 1e-14, 1) - 1.0).abs() < 1e-10);
        let d = Diagonal::new(vec![3.0, 1.0]);
        assert!((estimate_lipschitz(&d, 500, 1e-14, 1) - 9.0).abs() < 1e-8);
    }

    #[test]
    fn rayleigh_history_is_monotone() {
        let mat = make_gaussian_sensing(24, 48, 5).unwrap();
        let (_, history) = estimate_lipschitz_trace(&mat, 300, 0.0, 8);
        for pair in history.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12, "{} -> {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn dense_csv_round_trip() {
        let mat = make_gaussian_sensing(6, 12, 13).unwrap();
        let mut buf = Vec::new();
        mat.to_csv(&mut buf).unwrap();
        let back = DenseMatrix::from_csv(std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(mat, back);
    }
}
