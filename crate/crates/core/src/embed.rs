//! Embeddability of finite distance spaces.
//!
//! A squared distance matrix `D` embeds into the kissing spheres of dimension
//! `n` when `D` has exactly one positive eigenvalue and at most `n` negative
//! ones, or equivalently when `(-1)^|J| det D_J <= 0` for every principal
//! submatrix and `rank D <= n + 1`. The all-zero matrix (every sphere sharing
//! one tangent point) is also embeddable; it is the one case the eigenvalue
//! count alone misses.
//!
//! The Euclidean counterpart works on the bordered Cayley–Menger matrix
//! `M = [[D, e], [e^T, 0]]`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::kissing::{distance_matrix, KissingError, KissingSphere};
use crate::lightcone::{psi, psi_inverse, LightconeError, LorentzMap, MinkowskiVector};
use crate::numkernel::{
    gram_factor_lorentz, inertia, rank, schur_complement, sym_eigen, GramOutcome, Inertia,
    KernelError, LorentzInfeasibility, SymMatrix, Tolerance,
};
use nalgebra::{DMatrix, DVector};

/// Largest index set for which Minors mode enumerates every subset.
pub const MINORS_MAX_ORDER: usize = 12;

/// Relative entrywise tolerance for the realization round trip.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("diagonal entry {0} is not zero")]
    NonZeroDiagonal(usize),
    #[error("entry ({i}, {j}) = {value} is negative")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("{got} labels for a matrix of order {order}")]
    LabelCount { got: usize, order: usize },
    #[error("order {0} exceeds the Minors mode cap of {MINORS_MAX_ORDER}")]
    TooLargeForMinors(usize),
    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { got: usize, min: usize },
    #[error("method {0:?} does not apply here")]
    UnsupportedMethod(Method),
    #[error("inadmissible pivot: {0}")]
    InadmissiblePivot(String),
    #[error("Schur complement is not negative semidefinite (eigenvalue {0:e})")]
    NotSemidefinite(f64),
    #[error("Schur complement has rank {rank}, at most {max} allowed")]
    SchurRankTooHigh { rank: usize, max: usize },
    #[error("not embeddable: {inertia} ({reason})")]
    Infeasible {
        inertia: Inertia,
        reason: LorentzInfeasibility,
    },
    #[error("realization failed: {0}")]
    Realization(RealizationFailure),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Kissing(#[from] KissingError),
}

/// Why an algebraically admissible matrix could not be realized by spheres.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RealizationFailure {
    /// Rows that vanish in a non-zero matrix: such a sphere would share its
    /// tangent point with every other one.
    ZeroColumns { indices: Vec<usize> },
    MixedTimeOrientation { future: Vec<usize>, past: Vec<usize> },
    OffCone { index: usize, detail: String },
    RoundTrip { relative_error: f64 },
}

impl fmt::Display for RealizationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealizationFailure::ZeroColumns { indices } => write!(
                f,
                "degenerate zero-distance pattern: zero lightcone vectors at {indices:?}"
            ),
            RealizationFailure::MixedTimeOrientation { future, past } => {
                write!(f, "mixed time orientation (future {future:?}, past {past:?})")
            }
            RealizationFailure::OffCone { index, detail } => {
                write!(f, "vector {index} cannot be mapped back to a sphere: {detail}")
            }
            RealizationFailure::RoundTrip { relative_error } => {
                write!(f, "round trip misses the input by {relative_error:e} (relative)")
            }
        }
    }
}

/// Symmetric, nonnegative, zero-diagonal matrix of squared distances.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistanceMatrix {
    matrix: SymMatrix,
    labels: Option<Vec<String>>,
}

impl SquaredDistanceMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, EmbedError> {
        Self::from_sym(SymMatrix::from_rows(rows)?)
    }

    pub fn from_sym(matrix: SymMatrix) -> Result<Self, EmbedError> {
        for i in 0..matrix.order() {
            if matrix.get(i, i) != 0.0 {
                return Err(EmbedError::NonZeroDiagonal(i));
            }
            for j in (i + 1)..matrix.order() {
                let value = matrix.get(i, j);
                if value < 0.0 {
                    return Err(EmbedError::NegativeEntry { i, j, value });
                }
            }
        }
        Ok(SquaredDistanceMatrix {
            matrix,
            labels: None,
        })
    }

    /// Cleans up a computed matrix: symmetrizes, zeroes the diagonal and clips
    /// negative round-off no larger than `tol.eig_zero` relative to the
    /// largest entry.
    pub fn from_computed(m: &DMatrix<f64>, tol: &Tolerance) -> Result<Self, EmbedError> {
        let sym = SymMatrix::symmetrize(m);
        let cut = tol.eig_zero * sym.max_abs();
        let mut bad = None;
        let cleaned = SymMatrix::from_fn(sym.order(), |i, j| {
            let v = sym.get(i, j);
            if i == j {
                0.0
            } else if v < 0.0 {
                if -v > cut && bad.is_none() {
                    bad = Some((i, j, v));
                }
                0.0
            } else {
                v
            }
        });
        if let Some((i, j, value)) = bad {
            return Err(EmbedError::NegativeEntry { i, j, value });
        }
        Self::from_sym(cleaned)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, EmbedError> {
        if labels.len() != self.order() {
            return Err(EmbedError::LabelCount {
                got: labels.len(),
                order: self.order(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.matrix.to_rows()
    }

    pub fn principal(&self, indices: &[usize]) -> SquaredDistanceMatrix {
        SquaredDistanceMatrix {
            matrix: self.matrix.principal(indices),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.max_abs() == 0.0
    }

    /// `max |self - other| / max |self|`.
    pub fn relative_error(&self, other: &SquaredDistanceMatrix) -> f64 {
        let diff = (self.matrix.as_matrix() - other.matrix.as_matrix()).amax();
        let scale = self.matrix.max_abs();
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

/// `M = [[D, e], [e^T, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyMengerMatrix {
    matrix: SymMatrix,
}

impl CayleyMengerMatrix {
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }
}

pub fn cayley_menger(d: &SquaredDistanceMatrix) -> CayleyMengerMatrix {
    let k = d.order();
    CayleyMengerMatrix {
        matrix: SymMatrix::from_fn(k + 1, |i, j| match (i == k, j == k) {
            (true, true) => 0.0,
            (true, false) | (false, true) => 1.0,
            (false, false) => d.get(i, j),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Embeddable,
    NotEmbeddable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Principal-minor signs plus a rank bound.
    Minors,
    /// Eigenvalue counts.
    Inertia,
    /// Euclidean only: eigenvalue counts of `D` itself, a necessary
    /// condition.
    DistanceInertia,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// First violating subset in (size, lexicographic) order with its
    /// `(-1)^|J| det`.
    Minor { subset: Vec<usize>, signed_det: f64 },
    RankExcess { rank: usize, max: usize },
    Inertia { inertia: Inertia },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub method: Method,
    /// Present exactly when the verdict is `NotEmbeddable`.
    pub witness: Option<Witness>,
    /// Inertia of the matrix the method inspected (Inertia modes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inertia: Option<Inertia>,
    /// Numerical rank of the matrix the method inspected (Minors mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

impl Certificate {
    pub fn is_embeddable(&self) -> bool {
        self.verdict == Verdict::Embeddable
    }

    fn new(method: Method, witness: Option<Witness>) -> Self {
        Certificate {
            verdict: if witness.is_some() {
                Verdict::NotEmbeddable
            } else {
                Verdict::Embeddable
            },
            method,
            witness,
            inertia: None,
            rank: None,
        }
    }
}

/// Visits non-empty subsets of `0..k` by size, then lexicographically, and
/// stops at the first one for which `f` returns `Some`.
pub(crate) fn first_subset<T>(
    k: usize,
    min_size: usize,
    mut f: impl FnMut(&[usize]) -> Option<T>,
) -> Option<T> {
    let mut subset = Vec::with_capacity(k);
    for size in min_size.max(1)..=k {
        subset.clear();
        subset.extend(0..size);
        loop {
            if let Some(v) = f(&subset) {
                return Some(v);
            }
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if subset[i] < k - size + i {
                    subset[i] += 1;
                    for j in (i + 1)..size {
                        subset[j] = subset[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
    None
}

fn sign(size: usize) -> f64 {
    if size.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Accepts one positive eigenvalue with at most `max_negative` negatives, or
/// a numerically zero matrix.
fn lightcone_inertia_ok(i: &Inertia, max_negative: usize) -> bool {
    (i.positive == 1 && i.negative <= max_negative) || i.rank() == 0
}

pub fn check_kissing(
    d: &SquaredDistanceMatrix,
    n: usize,
    method: Method,
    tol: &Tolerance,
) -> Result<Certificate, EmbedError> {
    match method {
        Method::Inertia => {
            let inr = inertia(d.matrix(), tol)?;
            let witness = (!lightcone_inertia_ok(&inr, n)).then_some(Witness::Inertia { inertia: inr });
            let mut c = Certificate::new(method, witness);
            c.inertia = Some(inr);
            Ok(c)
        }
        Method::Minors => {
            let k = d.order();
            if k > MINORS_MAX_ORDER {
                return Err(EmbedError::TooLargeForMinors(k));
            }
            let m = d.matrix();
            let violation = first_subset(k, 2, |subset| {
                let sub = m.principal(subset);
                let signed = sign(subset.len()) * sub.determinant();
                (signed > tol.eig_zero * sub.hadamard_bound()).then(|| Witness::Minor {
                    subset: subset.to_vec(),
                    signed_det: signed,
                })
            });
            let r = rank(m, tol)?;
            let witness = violation.or_else(|| {
                (r > n + 1).then_some(Witness::RankExcess { rank: r, max: n + 1 })
            });
            let mut c = Certificate::new(method, witness);
            c.rank = Some(r);
            Ok(c)
        }
        Method::DistanceInertia => Err(EmbedError::UnsupportedMethod(method)),
    }
}

pub fn check_euclidean(
    d: &SquaredDistanceMatrix,
    n: usize,
    method: Method,
    tol: &Tolerance,
) -> Result<Certificate, EmbedError> {
    match method {
        Method::Inertia => {
            let inr = inertia(cayley_menger(d).matrix(), tol)?;
            let ok = inr.positive == 1 && inr.negative <= n + 1;
            let mut c = Certificate::new(method, (!ok).then_some(Witness::Inertia { inertia: inr }));
            c.inertia = Some(inr);
            Ok(c)
        }
        Method::DistanceInertia => {
            let inr = inertia(d.matrix(), tol)?;
            let witness = (!lightcone_inertia_ok(&inr, n + 1)).then_some(Witness::Inertia { inertia: inr });
            let mut c = Certificate::new(method, witness);
            c.inertia = Some(inr);
            Ok(c)
        }
        Method::Minors => {
            let k = d.order();
            if k > MINORS_MAX_ORDER {
                return Err(EmbedError::TooLargeForMinors(k));
            }
            let violation = first_subset(k, 1, |subset| {
                let cm = cayley_menger(&d.principal(subset));
                let signed = sign(subset.len()) * cm.determinant();
                (signed < -tol.eig_zero * cm.matrix().hadamard_bound()).then(|| Witness::Minor {
                    subset: subset.to_vec(),
                    signed_det: signed,
                })
            });
            let r = rank(cayley_menger(d).matrix(), tol)?;
            let witness = violation.or_else(|| {
                (r > n + 2).then_some(Witness::RankExcess { rank: r, max: n + 2 })
            });
            let mut c = Certificate::new(method, witness);
            c.rank = Some(r);
            Ok(c)
        }
    }
}

/// Spheres realizing a distance matrix, with their lightcone images.
#[derive(Debug, Clone)]
pub struct Realization {
    pub spheres: Vec<KissingSphere>,
    pub vectors: Vec<MinkowskiVector>,
    /// Relative round-trip error against the input matrix.
    pub relative_error: f64,
}

fn finish(
    d: &SquaredDistanceMatrix,
    n: usize,
    spheres: Vec<KissingSphere>,
) -> Result<Realization, EmbedError> {
    let back = distance_matrix(&spheres)?;
    let relative_error = d.relative_error(&back);
    if !(relative_error <= ROUND_TRIP_TOLERANCE) {
        return Err(EmbedError::Realization(RealizationFailure::RoundTrip { relative_error }));
    }
    let vectors = spheres
        .iter()
        .map(|s| psi(s, n))
        .collect::<Result<Vec<_>, LightconeError>>()
        .map_err(|e| {
            EmbedError::Realization(RealizationFailure::OffCone {
                index: 0,
                detail: e.to_string(),
            })
        })?;
    Ok(Realization {
        spheres,
        vectors,
        relative_error,
    })
}

fn check_dimension(n: usize) -> Result<(), EmbedError> {
    if n < 1 {
        Err(EmbedError::DimensionTooSmall { got: n, min: 1 })
    } else {
        Ok(())
    }
}

/// Boost taking the future time-like unit vector `tau` to `(0, ..., 0, 1)`.
fn rest_frame_boost(tau: &MinkowskiVector) -> DMatrix<f64> {
    let n = tau.dim();
    let gamma = tau.time;
    let v: Vec<f64> = tau.spatial.iter().map(|x| x / gamma).collect();
    let v2: f64 = v.iter().map(|x| x * x).sum();
    let mut l = DMatrix::identity(n + 1, n + 1);
    l[(n, n)] = gamma;
    for i in 0..n {
        l[(n, i)] = -gamma * v[i];
        l[(i, n)] = -gamma * v[i];
        for j in 0..n {
            if v2 > 0.0 {
                l[(i, j)] += (gamma - 1.0) * v[i] * v[j] / v2;
            }
        }
    }
    l
}

/// Moves a configuration of future null vectors into a well-conditioned
/// frame before reading spheres off it: boost to the rest frame of their sum,
/// then reflect the spatial part so the first axis points away from every
/// vector (keeping `x_0 + t` bounded away from zero).
fn condition_frame(vectors: &[MinkowskiVector]) -> Vec<MinkowskiVector> {
    let n = vectors[0].dim();
    let mut sum = MinkowskiVector::zero(n);
    for v in vectors {
        sum = sum.add(&v.scaled(1.0 / v.time));
    }
    let q = -sum.norm_sq();
    let boosted: Vec<MinkowskiVector> = if q > 1e-12 * sum.time * sum.time {
        let tau = sum.scaled(1.0 / q.sqrt());
        let l = LorentzMap::from_matrix(rest_frame_boost(&tau));
        vectors.iter().map(|v| l.apply(v).expect("same dimension")).collect()
    } else {
        vectors.to_vec()
    };
    let dirs: Vec<Vec<f64>> = boosted
        .iter()
        .map(|v| v.spatial.iter().map(|x| x / v.time).collect())
        .collect();
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        candidates.push(e.clone());
        e[k] = -1.0;
        candidates.push(e);
    }
    for d in &dirs {
        let len = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 0.0 {
            candidates.push(d.iter().map(|x| -x / len).collect());
        }
    }
    let score = |e: &[f64]| {
        dirs.iter()
            .map(|d| 1.0 + d.iter().zip(e).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    };
    let best = candidates
        .iter()
        .max_by(|a, b| score(a).total_cmp(&score(b)))
        .expect("n >= 1")
        .clone();
    // Householder reflection sending `best` to the first axis.
    let mut w = DVector::from_vec(best);
    w[0] -= 1.0;
    let wn = w.norm_squared();
    boosted
        .into_iter()
        .map(|v| {
            if wn < 1e-30 {
                return v;
            }
            let x = DVector::from_vec(v.spatial.clone());
            let y = &x - &w * (2.0 * w.dot(&x) / wn);
            MinkowskiVector::new(y.iter().copied().collect(), v.time)
        })
        .collect()
}

/// Realizes `D` by kissing spheres in dimension `n` through the lightcone
/// factorization, then verifies the result by recomputing its distances.
pub fn construct_embedding(
    d: &SquaredDistanceMatrix,
    n: usize,
    tol: &Tolerance,
) -> Result<Realization, EmbedError> {
    check_dimension(n)?;
    if d.is_zero() {
        let spheres = (0..d.order())
            .map(|i| KissingSphere::finite(vec![0.0; n - 1], (i + 1) as f64))
            .collect::<Result<Vec<_>, _>>()?;
        return finish(d, n, spheres);
    }
    let factor = match gram_factor_lorentz(d.matrix(), n, tol)? {
        GramOutcome::Factored(f) => f,
        GramOutcome::Infeasible { inertia, reason } => {
            return Err(EmbedError::Infeasible { inertia, reason })
        }
    };
    if factor.has_degenerate_columns() {
        return Err(EmbedError::Realization(RealizationFailure::ZeroColumns {
            indices: factor.degenerate_columns,
        }));
    }
    let (future, past): (Vec<usize>, Vec<usize>) =
        (0..factor.vectors.len()).partition(|&i| factor.vectors[i].time > 0.0);
    let vectors: Vec<MinkowskiVector> = match (future.is_empty(), past.is_empty()) {
        (_, true) => factor.vectors,
        (true, false) => factor.vectors.iter().map(|v| v.scaled(-1.0)).collect(),
        (false, false) => {
            return Err(EmbedError::Realization(
                RealizationFailure::MixedTimeOrientation { future, past },
            ))
        }
    };
    let vectors = condition_frame(&vectors);
    let mut spheres = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let s = psi_inverse(v, tol).map_err(|e| {
            EmbedError::Realization(RealizationFailure::OffCone {
                index,
                detail: e.to_string(),
            })
        })?;
        spheres.push(s);
    }
    finish(d, n, spheres)
}

/// Realizes `D` with the explicit Schur-complement construction: sphere `b`
/// becomes the hyperplane at height 1, sphere `a` touches the origin, and the
/// rest are read off a Gram factorization of `-P/2` where `P` is the Schur
/// complement of the `{a, b}` block.
pub fn schur_construction(
    d: &SquaredDistanceMatrix,
    n: usize,
    pivot: (usize, usize),
    tol: &Tolerance,
) -> Result<Vec<KissingSphere>, EmbedError> {
    check_dimension(n)?;
    let (a, b) = pivot;
    let k = d.order();
    if a >= k || b >= k || a == b {
        return Err(EmbedError::InadmissiblePivot(format!(
            "pivot ({a}, {b}) invalid for order {k}"
        )));
    }
    for i in (0..k).filter(|&i| i != b) {
        if !(d.get(i, b) > 0.0) {
            return Err(EmbedError::InadmissiblePivot(format!(
                "entry ({i}, {b}) is zero, so sphere {i} has no finite diameter"
            )));
        }
    }
    let rest: Vec<usize> = (0..k).filter(|&i| i != a && i != b).collect();
    let p = schur_complement(d.matrix(), &[a, b], tol)?;
    let mut coords = vec![vec![0.0; n - 1]; rest.len()];
    if !rest.is_empty() {
        let g = SymMatrix::from_fn(p.order(), |i, j| -0.5 * p.get(i, j));
        let eig = sym_eigen(&g, tol)?;
        let thr = tol.zero_threshold(eig.max_abs_value().max(d.matrix().max_abs()));
        if let Some(&low) = eig.values.last() {
            if low < -thr {
                return Err(EmbedError::NotSemidefinite(low));
            }
        }
        let kept: Vec<usize> = (0..eig.values.len()).filter(|&j| eig.values[j] > thr).collect();
        if kept.len() > n - 1 {
            return Err(EmbedError::SchurRankTooHigh {
                rank: kept.len(),
                max: n - 1,
            });
        }
        for (r, row) in coords.iter_mut().enumerate() {
            for (slot, &j) in kept.iter().enumerate() {
                row[slot] = eig.values[j].sqrt() * eig.vectors[(r, j)];
            }
        }
    }
    let mut spheres = vec![KissingSphere::hyperplane(1.0)?; k];
    spheres[a] = KissingSphere::finite(vec![0.0; n - 1], 1.0 / d.get(a, b))?;
    for (r, &i) in rest.iter().enumerate() {
        let w = d.get(i, b);
        spheres[i] = KissingSphere::finite(coords[r].iter().map(|v| v / w).collect(), 1.0 / w)?;
    }
    finish(d, n, spheres.clone())?;
    Ok(spheres)
}

/// Determinant, inertia and rank relations between `D` and the Schur
/// complement `P` of its `{a, b}` block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Relations7Report {
    pub det_d: f64,
    pub det_p: f64,
    /// Diameter of the sphere at `a` in the construction, `1 / D_ab`.
    pub phi0: f64,
    pub det_holds: bool,
    pub inertia_d: Inertia,
    pub inertia_p: Inertia,
    pub inertia_holds: bool,
    pub rank_d: usize,
    pub rank_p: usize,
    pub rank_holds: bool,
}

impl Relations7Report {
    pub fn all_hold(&self) -> bool {
        self.det_holds && self.inertia_holds && self.rank_holds
    }
}

/// Relative tolerance for the determinant relation.
pub const RELATIONS_DET_TOLERANCE: f64 = 1e-7;

pub fn verify_relations7(
    d: &SquaredDistanceMatrix,
    pivot: (usize, usize),
    tol: &Tolerance,
) -> Result<Relations7Report, EmbedError> {
    let (a, b) = pivot;
    let p = schur_complement(d.matrix(), &[a, b], tol)?;
    let det_d = d.matrix().determinant();
    let det_p = p.determinant();
    let phi0 = 1.0 / d.get(a, b);
    let predicted = -det_p / (phi0 * phi0);
    let scale = d.matrix().hadamard_bound().max(det_d.abs()).max(predicted.abs());
    let inertia_d = inertia(d.matrix(), tol)?;
    let inertia_p = inertia(&p, tol)?;
    let rank_d = inertia_d.rank();
    let rank_p = inertia_p.rank();
    Ok(Relations7Report {
        det_d,
        det_p,
        phi0,
        det_holds: (det_d - predicted).abs() <= RELATIONS_DET_TOLERANCE * scale,
        inertia_d,
        inertia_p,
        inertia_holds: inertia_d == Inertia::new(1, 1, 0).plus(&inertia_p),
        rank_d,
        rank_p,
        rank_holds: rank_d == rank_p + 2,
    })
}
