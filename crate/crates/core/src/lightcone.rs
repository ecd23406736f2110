//! The future lightcone model.
//!
//! Vectors live in Minkowski space `R^{n,1}` with coordinates
//! `(x_0, ..., x_{n-1}, t)` and inner product `x·x' - t t'`. The map
//! [`psi`] sends a kissing sphere to a future-directed null vector so that
//! `-<psi(p), psi(q)> = d_K(p, q)^2`; [`psi_inverse`] undoes it. Orthochronous
//! Lorentz maps act on the cone the way Möbius transformations act on kissing
//! spheres, and [`lorentz_align`] finds one carrying a configuration onto a
//! congruent one.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kissing::{KissingError, KissingSphere};
use crate::numkernel::{sym_eigen, KernelError, SymMatrix, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LightconeError {
    #[error("dimension mismatch: {left} vs {right} spatial coordinates")]
    DimensionMismatch { left: usize, right: usize },
    #[error("vector is not null: <x,x> = {0:e}")]
    NotNull(f64),
    #[error("vector is not future-directed: t = {0:e}")]
    PastDirected(f64),
    #[error("curvature must be non-zero and finite (use psi for a flat reference)")]
    FlatReference,
    #[error("signed diameter must be non-zero")]
    ZeroDiameter,
    #[error("direction must be a unit vector, |t̂| = {0}")]
    NotUnitDirection(f64),
    #[error("alignment inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("Gram matrices differ at ({i}, {j}): {x:e} vs {y:e}")]
    GramMismatch { i: usize, j: usize, x: f64, y: f64 },
    #[error("vector {0} is zero on one side only")]
    ZeroMismatch(usize),
    #[error("vector {index} has an irreconcilable time orientation")]
    TimeOrientation { index: usize },
    #[error("spanned subspace is too degenerate to align")]
    DegenerateSpan,
    #[error("complement signatures differ")]
    SignatureMismatch,
    #[error("aligned map misses target {index} by {residual:e}")]
    AlignmentResidual { index: usize, residual: f64 },
    #[error("constructed map is not an orthochronous Lorentz transformation")]
    NotLorentz,
    #[error(transparent)]
    Kissing(#[from] KissingError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A vector of `R^{n,1}`: `n` spatial coordinates and one time coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct MinkowskiVector {
    pub spatial: Vec<f64>,
    pub time: f64,
}

impl From<MinkowskiVector> for Vec<f64> {
    fn from(v: MinkowskiVector) -> Self {
        v.coords()
    }
}

impl TryFrom<Vec<f64>> for MinkowskiVector {
    type Error = String;

    fn try_from(mut c: Vec<f64>) -> Result<Self, Self::Error> {
        if c.len() < 2 {
            return Err(format!("need at least 2 coordinates, got {}", c.len()));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err("non-finite coordinate".into());
        }
        let time = c.pop().unwrap();
        Ok(MinkowskiVector { spatial: c, time })
    }
}

impl MinkowskiVector {
    pub fn new(spatial: Vec<f64>, time: f64) -> Self {
        MinkowskiVector { spatial, time }
    }

    pub fn zero(n: usize) -> Self {
        MinkowskiVector::new(vec![0.0; n], 0.0)
    }

    /// Builds a vector from `(x_0, ..., x_{n-1}, t)`.
    pub fn from_coords(c: &[f64]) -> Self {
        let (t, s) = c.split_last().expect("at least one coordinate");
        MinkowskiVector::new(s.to_vec(), *t)
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.spatial.clone();
        c.push(self.time);
        c
    }

    /// Number of spatial coordinates `n`.
    pub fn dim(&self) -> usize {
        self.spatial.len()
    }

    pub fn inner(&self, other: &MinkowskiVector) -> Result<f64, LightconeError> {
        if self.dim() != other.dim() {
            return Err(LightconeError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .spatial
            .iter()
            .zip(&other.spatial)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            - self.time * other.time)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).unwrap()
    }

    /// Euclidean length of the coordinate vector.
    pub fn euclidean_norm(&self) -> f64 {
        (self.spatial.iter().map(|x| x * x).sum::<f64>() + self.time * self.time).sqrt()
    }

    pub fn is_future(&self) -> bool {
        self.time > 0.0
    }

    pub fn scaled(&self, k: f64) -> MinkowskiVector {
        MinkowskiVector::new(self.spatial.iter().map(|x| k * x).collect(), k * self.time)
    }

    pub fn add(&self, other: &MinkowskiVector) -> MinkowskiVector {
        MinkowskiVector::new(
            self.spatial.iter().zip(&other.spatial).map(|(a, b)| a + b).collect(),
            self.time + other.time,
        )
    }

    fn to_dvector(&self) -> DVector<f64> {
        DVector::from_vec(self.coords())
    }

    fn from_dvector(v: &DVector<f64>) -> Self {
        MinkowskiVector::from_coords(v.as_slice())
    }
}

pub fn minkowski_inner(x: &MinkowskiVector, y: &MinkowskiVector) -> Result<f64, LightconeError> {
    x.inner(y)
}

/// `d_M(x, y)^2 = -<x, y>`.
pub fn d_m_squared(x: &MinkowskiVector, y: &MinkowskiVector) -> Result<f64, LightconeError> {
    x.inner(y).map(|v| -v)
}

/// Image of a kissing sphere of ambient dimension `n` on the future lightcone.
pub fn psi(p: &KissingSphere, n: usize) -> Result<MinkowskiVector, LightconeError> {
    p.check_ambient(n)?;
    Ok(match p {
        KissingSphere::Finite { tangent, diameter } => {
            let c = SQRT_2 / (2.0 * diameter);
            let t2: f64 = tangent.iter().map(|x| x * x).sum();
            let mut spatial = Vec::with_capacity(n);
            spatial.push(c * (1.0 - t2));
            spatial.extend(tangent.iter().map(|x| 2.0 * c * x));
            MinkowskiVector::new(spatial, c * (1.0 + t2))
        }
        KissingSphere::Hyperplane { height } => {
            let mut spatial = vec![0.0; n];
            spatial[0] = -height * SQRT_2 / 2.0;
            MinkowskiVector::new(spatial, height * SQRT_2 / 2.0)
        }
    })
}

/// Recovers the kissing sphere from a future null vector.
///
/// Writing `w = x_0 + t`, a finite sphere has `φ = sqrt(2)/w` and tangent
/// point `(x_1, ..., x_{n-1}) / w`; `w = 0` is the hyperplane at height
/// `sqrt(2) t`.
pub fn psi_inverse(x: &MinkowskiVector, tol: &Tolerance) -> Result<KissingSphere, LightconeError> {
    if x.dim() < 1 {
        return Err(KissingError::AmbientTooSmall(x.dim()).into());
    }
    if !(x.time > 0.0) {
        return Err(LightconeError::PastDirected(x.time));
    }
    let q = x.norm_sq();
    if q.abs() > tol.residual * x.time * x.time {
        return Err(LightconeError::NotNull(q));
    }
    let w = x.spatial[0] + x.time;
    if w <= tol.eig_zero * x.time {
        return Ok(KissingSphere::hyperplane(SQRT_2 * x.time)?);
    }
    let tangent = x.spatial[1..].iter().map(|v| v / w).collect();
    Ok(KissingSphere::finite(tangent, SQRT_2 / w)?)
}

/// Image of a sphere kissing a reference ball of curvature `κ != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvedImage {
    pub vector: MinkowskiVector,
    /// Set when `κ φ = -2`, where the image collapses to the origin.
    pub degenerate: bool,
}

/// `(sqrt(2)/2 + sqrt(2)/(κ φ)) (t̂, 1)` for a sphere of signed diameter `φ`
/// (negative when it surrounds the reference ball, infinite allowed) whose
/// tangent point lies in unit direction `t̂` from the reference centre.
pub fn psi_curved(
    direction: &[f64],
    signed_diameter: f64,
    kappa: f64,
) -> Result<CurvedImage, LightconeError> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(LightconeError::FlatReference);
    }
    if signed_diameter == 0.0 || signed_diameter.is_nan() {
        return Err(LightconeError::ZeroDiameter);
    }
    let len = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (len - 1.0).abs() > 1e-9 {
        return Err(LightconeError::NotUnitDirection(len));
    }
    let coef = SQRT_2 / 2.0 + SQRT_2 / (kappa * signed_diameter);
    let degenerate = coef.abs() <= 1e-12;
    let coef = if degenerate { 0.0 } else { coef };
    Ok(CurvedImage {
        vector: MinkowskiVector::new(direction.iter().map(|x| coef * x).collect(), coef),
        degenerate,
    })
}

/// A linear map of `R^{n,1}`, intended to preserve the Minkowski form.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMap {
    matrix: DMatrix<f64>,
}

fn eta(size: usize) -> DMatrix<f64> {
    let mut e = DMatrix::identity(size, size);
    e[(size - 1, size - 1)] = -1.0;
    e
}

impl LorentzMap {
    pub fn identity(n: usize) -> Self {
        LorentzMap {
            matrix: DMatrix::identity(n + 1, n + 1),
        }
    }

    /// Wraps an `(n+1) x (n+1)` matrix; use [`LorentzMap::is_lorentz`] to
    /// check it.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        assert!(matrix.is_square() && matrix.nrows() >= 2);
        LorentzMap { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Number of spatial coordinates.
    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    /// Form preservation `L^T η L = η` (relative to `|L|^2`) and `L_tt > 0`.
    pub fn is_lorentz(&self, tol: &Tolerance) -> bool {
        let size = self.matrix.nrows();
        let e = eta(size);
        let drift = (self.matrix.transpose() * &e * &self.matrix - &e).amax();
        let scale = self.matrix.amax().powi(2).max(1.0);
        drift <= tol.residual * scale && self.matrix[(size - 1, size - 1)] > 0.0
    }

    pub fn apply(&self, x: &MinkowskiVector) -> Result<MinkowskiVector, LightconeError> {
        if x.dim() != self.dim() {
            return Err(LightconeError::DimensionMismatch {
                left: self.dim(),
                right: x.dim(),
            });
        }
        Ok(MinkowskiVector::from_dvector(&(&self.matrix * x.to_dvector())))
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &LorentzMap) -> Result<LorentzMap, LightconeError> {
        if self.dim() != other.dim() {
            return Err(LightconeError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(LorentzMap {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `η L^T η`, the inverse of a Lorentz map.
    pub fn lorentz_inverse(&self) -> LorentzMap {
        let e = eta(self.matrix.nrows());
        LorentzMap {
            matrix: &e * self.matrix.transpose() * &e,
        }
    }

    /// Pulls a nearly-Lorentz matrix back onto the group with a few
    /// Newton–Schulz steps `L <- L (3I - L^# L) / 2`, `L^# = η L^T η`.
    fn polish(mut self, steps: usize) -> LorentzMap {
        let size = self.matrix.nrows();
        let e = eta(size);
        let three = DMatrix::<f64>::identity(size, size) * 3.0;
        for _ in 0..steps {
            let adj = &e * self.matrix.transpose() * &e;
            self.matrix = &self.matrix * (&three - adj * &self.matrix) * 0.5;
        }
        self
    }
}

pub fn is_lorentz(l: &LorentzMap, tol: &Tolerance) -> bool {
    l.is_lorentz(tol)
}

pub fn apply(l: &LorentzMap, x: &MinkowskiVector) -> Result<MinkowskiVector, LightconeError> {
    l.apply(x)
}

pub fn compose(l1: &LorentzMap, l2: &LorentzMap) -> Result<LorentzMap, LightconeError> {
    l1.compose(l2)
}

fn gram(cols: &DMatrix<f64>) -> DMatrix<f64> {
    cols.transpose() * eta(cols.nrows()) * cols
}

/// Gram–Schmidt residual of `v` against the orthonormal columns `basis`.
fn residual_against(basis: &[DVector<f64>], v: &DVector<f64>) -> DVector<f64> {
    let mut r = v.clone();
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(&r);
            r -= q * c;
        }
    }
    r
}

const INDEPENDENCE: f64 = 1e-8;

/// One side of an alignment: the chosen independent vectors, the partner for
/// the radical when the span is degenerate, and an η-orthonormal basis of the
/// complement (space-like first, then time-like).
struct Frame {
    columns: DMatrix<f64>,
    complement_signs: Vec<f64>,
    first_complement: usize,
}

fn build_frame(
    chosen: &DMatrix<f64>,
    radical: Option<(&DVector<f64>, &DVector<f64>)>,
    tol: &Tolerance,
) -> Result<Frame, LightconeError> {
    let size = chosen.nrows();
    let e = eta(size);
    let mut cols: Vec<DVector<f64>> = chosen.column_iter().map(|c| c.into_owned()).collect();

    if let Some((kernel, target)) = radical {
        // u with <u, x_b> = target_b and <u, u> = 0
        let a = chosen.transpose() * &e;
        let svd = a.clone().svd(true, true);
        let u0 = svd
            .solve(target, 1e-14)
            .map_err(|_| LightconeError::DegenerateSpan)?;
        let r = chosen * kernel;
        let s = -(u0.transpose() * &e * &u0)[(0, 0)] / 2.0;
        cols.push(u0 + r * s);
    }

    let span = DMatrix::from_columns(&cols);
    let m = cols.len();
    // η-orthogonal projector onto the complement of span(F)
    let projector = if m == 0 {
        DMatrix::identity(size, size)
    } else {
        let g = gram(&span);
        let g_inv = g.try_inverse().ok_or(LightconeError::DegenerateSpan)?;
        DMatrix::identity(size, size) - &span * g_inv * span.transpose() * &e
    };
    let mut ortho: Vec<DVector<f64>> = cols
        .iter()
        .filter(|c| c.norm() > 0.0)
        .map(|c| c.normalize())
        .collect();
    // re-orthonormalize the span itself for the independence test
    let mut q_basis: Vec<DVector<f64>> = Vec::new();
    for c in ortho.drain(..) {
        let r = residual_against(&q_basis, &c);
        if r.norm() > INDEPENDENCE {
            q_basis.push(r.normalize());
        }
    }
    let mut complement: Vec<DVector<f64>> = Vec::new();
    for k in 0..size {
        if complement.len() + m == size {
            break;
        }
        let cand = projector.column(k).into_owned();
        if cand.norm() <= INDEPENDENCE {
            continue;
        }
        let r = residual_against(&q_basis, &cand);
        if r.norm() > INDEPENDENCE * cand.norm() {
            q_basis.push(r.normalize());
            complement.push(cand);
        }
    }
    if complement.len() + m != size {
        return Err(LightconeError::DegenerateSpan);
    }

    let mut signs = Vec::with_capacity(complement.len());
    if !complement.is_empty() {
        let n_mat = DMatrix::from_columns(&complement);
        let c = SymMatrix::symmetrize(&gram(&n_mat));
        let eig = sym_eigen(&c, tol)?;
        let thr = tol.zero_threshold(eig.max_abs_value());
        for (j, &lam) in eig.values.iter().enumerate() {
            if lam.abs() <= thr {
                return Err(LightconeError::DegenerateSpan);
            }
            let v = &n_mat * eig.vectors.column(j) / lam.abs().sqrt();
            cols.push(v);
            signs.push(lam.signum());
        }
    }
    Ok(Frame {
        columns: DMatrix::from_columns(&cols),
        complement_signs: signs,
        first_complement: m,
    })
}

/// An orthochronous Lorentz map with `L x_i = y_i`.
///
/// The two configurations must have matching Gram matrices. Independent
/// vectors are chosen greedily (in index order, independent on both sides);
/// a degenerate span gets a null partner for its radical so the span becomes
/// non-degenerate; the rest of the space is filled with an η-orthonormal basis
/// of the complement. The frame on each side depends only on that side's
/// vectors, so aligning `Y` onto `X` yields the inverse map.
pub fn lorentz_align(
    xs: &[MinkowskiVector],
    ys: &[MinkowskiVector],
    tol: &Tolerance,
) -> Result<LorentzMap, LightconeError> {
    if xs.len() != ys.len() {
        return Err(LightconeError::LengthMismatch(xs.len(), ys.len()));
    }
    let Some(n) = xs.first().or(ys.first()).map(MinkowskiVector::dim) else {
        return Err(LightconeError::LengthMismatch(0, 0));
    };
    for v in xs.iter().chain(ys) {
        if v.dim() != n {
            return Err(LightconeError::DimensionMismatch {
                left: n,
                right: v.dim(),
            });
        }
    }
    let scale = xs
        .iter()
        .chain(ys)
        .map(MinkowskiVector::euclidean_norm)
        .fold(0.0_f64, f64::max);
    let zero_cut = tol.eig_zero * scale;
    let mut active = Vec::new();
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        let (zx, zy) = (x.euclidean_norm() <= zero_cut, y.euclidean_norm() <= zero_cut);
        if zx != zy {
            return Err(LightconeError::ZeroMismatch(i));
        }
        if zx {
            continue;
        }
        if !x.is_future() || !y.is_future() {
            return Err(LightconeError::TimeOrientation { index: i });
        }
        active.push(i);
    }
    let gram_tol = tol.residual * scale * scale;
    for &i in &active {
        for &j in &active {
            let (gx, gy) = (xs[i].inner(&xs[j])?, ys[i].inner(&ys[j])?);
            if (gx - gy).abs() > gram_tol {
                return Err(LightconeError::GramMismatch { i, j, x: gx, y: gy });
            }
        }
    }

    // independent on both sides, in index order
    let (mut qx, mut qy) = (Vec::new(), Vec::new());
    let mut chosen = Vec::new();
    for &i in &active {
        let (vx, vy) = (xs[i].to_dvector(), ys[i].to_dvector());
        let (rx, ry) = (residual_against(&qx, &vx), residual_against(&qy, &vy));
        if rx.norm() > INDEPENDENCE * vx.norm() && ry.norm() > INDEPENDENCE * vy.norm() {
            qx.push(rx.normalize());
            qy.push(ry.normalize());
            chosen.push(i);
        }
    }
    let size = n + 1;
    let cx = DMatrix::from_columns(&chosen.iter().map(|&i| xs[i].to_dvector()).collect::<Vec<_>>());
    let cy = DMatrix::from_columns(&chosen.iter().map(|&i| ys[i].to_dvector()).collect::<Vec<_>>());
    let (cx, cy) = if chosen.is_empty() {
        (DMatrix::zeros(size, 0), DMatrix::zeros(size, 0))
    } else {
        (cx, cy)
    };

    let mut radical = None;
    if !chosen.is_empty() {
        let g = SymMatrix::symmetrize(&((gram(&cx) + gram(&cy)) * 0.5));
        let eig = sym_eigen(&g, tol)?;
        let thr = tol.zero_threshold(eig.max_abs_value());
        let kernel: Vec<usize> = (0..eig.values.len())
            .filter(|&k| eig.values[k].abs() <= thr)
            .collect();
        match kernel.len() {
            0 => {}
            1 => {
                let mut c = eig.vectors.column(kernel[0]).into_owned();
                let lead = c.iter().copied().fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
                if lead < 0.0 {
                    c = -c;
                }
                radical = Some(c);
            }
            _ => return Err(LightconeError::DegenerateSpan),
        }
    }
    let fx = build_frame(&cx, radical.as_ref().map(|c| (c, c)), tol)?;
    let mut fy = build_frame(&cy, radical.as_ref().map(|c| (c, c)), tol)?;
    let pos = |f: &Frame| f.complement_signs.iter().filter(|&&s| s > 0.0).count();
    if pos(&fx) != pos(&fy) || fx.complement_signs.len() != fy.complement_signs.len() {
        return Err(LightconeError::SignatureMismatch);
    }

    let ax_inv = fx
        .columns
        .clone()
        .try_inverse()
        .ok_or(LightconeError::DegenerateSpan)?;
    let mut l = &fy.columns * &ax_inv;
    if l[(n, n)] < 0.0 {
        // only possible when nothing future-directed pins the orientation
        if let Some(k) = fy.complement_signs.iter().position(|&s| s < 0.0) {
            let col = fy.first_complement + k;
            let flipped = -fy.columns.column(col);
            fy.columns.set_column(col, &flipped);
            l = &fy.columns * &ax_inv;
        }
    }
    let l = LorentzMap::from_matrix(l).polish(3);
    if !l.is_lorentz(tol) {
        return Err(LightconeError::NotLorentz);
    }
    for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
        let lx = l.apply(x)?;
        let diff = lx
            .coords()
            .iter()
            .zip(y.coords())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        if diff > tol.residual * scale.max(f64::MIN_POSITIVE) {
            return Err(LightconeError::AlignmentResidual {
                index: i,
                residual: diff,
            });
        }
    }
    Ok(l)
}
