//! Signature-aware dense linear algebra.
//!
//! Everything here works on small dense symmetric matrices: eigenvalues,
//! inertia and rank under a relative zero threshold, Schur complements, and
//! factorization of a matrix as `-<x_i, x_j>` for vectors in Minkowski space
//! of signature `(n, 1)`.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::lightcone::MinkowskiVector;

/// Absolute floor for the eigenvalue zero threshold.
pub const ABSOLUTE_ZERO_FLOOR: f64 = 1e-14;

const EIGEN_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("matrix must be square and non-empty (got {rows} rows, row {bad_row} has {bad_len} entries)")]
    NotSquare {
        rows: usize,
        bad_row: usize,
        bad_len: usize,
    },
    #[error("matrix must be non-empty")]
    Empty,
    #[error("entry ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("matrix is not symmetric at ({i}, {j}): {a} vs {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("symmetric eigensolver did not converge")]
    EigenNonConvergence,
    #[error("eigendecomposition residual {residual:e} exceeds the allowed {allowed:e}")]
    EigenResidual { residual: f64, allowed: f64 },
    #[error("pivot index {index} out of range for order {order}")]
    PivotOutOfRange { index: usize, order: usize },
    #[error("pivot index {0} repeated")]
    PivotRepeated(usize),
    #[error("pivot block on {pivots:?} is singular (smallest |eigenvalue| {smallest:e})")]
    SingularPivot { pivots: Vec<usize>, smallest: f64 },
    #[error("tolerances must be strictly positive and finite")]
    InvalidTolerance,
}

/// Numerical thresholds shared by every decision procedure in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Eigenvalues with `|λ| <= eig_zero * max|λ|` count as zero.
    pub eig_zero: f64,
    /// Maximum allowed factorization / reconstruction residual (relative).
    pub residual: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eig_zero: 1e-9,
            residual: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(eig_zero: f64, residual: f64) -> Result<Self, KernelError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if ok(eig_zero) && ok(residual) {
            Ok(Tolerance { eig_zero, residual })
        } else {
            Err(KernelError::InvalidTolerance)
        }
    }

    /// Zero threshold for a spectrum whose largest absolute value is `scale`.
    pub fn zero_threshold(&self, scale: f64) -> f64 {
        (self.eig_zero * scale).max(ABSOLUTE_ZERO_FLOOR)
    }
}

/// A real symmetric matrix. Symmetry is exact: `m[i][j] == m[j][i]` bitwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    inner: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds a matrix from rows, rejecting anything that is not exactly
    /// symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, KernelError> {
        let order = rows.len();
        if order == 0 {
            return Err(KernelError::Empty);
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(KernelError::NotSquare {
                    rows: order,
                    bad_row: r,
                    bad_len: row.len(),
                });
            }
        }
        for i in 0..order {
            for j in 0..order {
                if !rows[i][j].is_finite() {
                    return Err(KernelError::NonFinite { i, j });
                }
                if j > i && rows[i][j] != rows[j][i] {
                    return Err(KernelError::NotSymmetric {
                        i,
                        j,
                        a: rows[i][j],
                        b: rows[j][i],
                    });
                }
            }
        }
        Ok(SymMatrix {
            inner: DMatrix::from_fn(order, order, |i, j| rows[i][j]),
        })
    }

    /// Builds a matrix from the upper triangle of `f`; the lower triangle is
    /// mirrored.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut inner = DMatrix::zeros(order, order);
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                inner[(i, j)] = v;
                inner[(j, i)] = v;
            }
        }
        SymMatrix { inner }
    }

    /// Averages `m` with its transpose.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        assert!(m.is_square(), "symmetrize needs a square matrix");
        let order = m.nrows();
        Self::from_fn(order, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            inner: DMatrix::zeros(order, order),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        SymMatrix {
            inner: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)),
        }
    }

    pub fn order(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.order())
            .map(|i| (0..self.order()).map(|j| self.inner[(i, j)]).collect())
            .collect()
    }

    /// Largest absolute entry (0 for the empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn principal(&self, indices: &[usize]) -> SymMatrix {
        SymMatrix {
            inner: DMatrix::from_fn(indices.len(), indices.len(), |a, b| {
                self.inner[(indices[a], indices[b])]
            }),
        }
    }

    /// Determinant by LU; the empty matrix has determinant 1.
    pub fn determinant(&self) -> f64 {
        if self.order() == 0 {
            1.0
        } else {
            self.inner.clone().lu().determinant()
        }
    }

    /// Product of the Euclidean row norms, an upper bound on `|det|`.
    pub fn hadamard_bound(&self) -> f64 {
        self.inner.row_iter().map(|r| r.norm()).product()
    }

    /// `P^T M P`.
    pub fn congruence(&self, p: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::symmetrize(&(p.transpose() * &self.inner * p))
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

pub fn sym_eigen(m: &SymMatrix, tol: &Tolerance) -> Result<Eigen, KernelError> {
    let order = m.order();
    if order == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(m.inner.clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or(KernelError::EigenNonConvergence)?;

    let mut idx: Vec<usize> = (0..order).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(order, order, |r, c| eig.eigenvectors[(r, idx[c])]);

    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&values));
    let recon = &vectors * lambda * vectors.transpose();
    let scale = m.max_abs().max(ABSOLUTE_ZERO_FLOOR);
    let residual = (&recon - &m.inner).amax();
    let ortho = (vectors.transpose() * &vectors - DMatrix::identity(order, order)).amax();
    let allowed = tol.residual * scale;
    if residual > allowed {
        return Err(KernelError::EigenResidual { residual, allowed });
    }
    if ortho > tol.residual {
        return Err(KernelError::EigenResidual {
            residual: ortho,
            allowed: tol.residual,
        });
    }
    Ok(Eigen { values, vectors })
}

/// Counts of positive, negative and zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn new(positive: usize, negative: usize, zero: usize) -> Self {
        Inertia {
            positive,
            negative,
            zero,
        }
    }

    pub fn rank(&self) -> usize {
        self.positive + self.negative
    }

    pub fn order(&self) -> usize {
        self.positive + self.negative + self.zero
    }

    /// Componentwise sum.
    pub fn plus(&self, other: &Inertia) -> Inertia {
        Inertia::new(
            self.positive + other.positive,
            self.negative + other.negative,
            self.zero + other.zero,
        )
    }

    fn from_values(values: &[f64], tol: &Tolerance) -> Inertia {
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let thr = tol.zero_threshold(scale);
        let positive = values.iter().filter(|&&v| v > thr).count();
        let negative = values.iter().filter(|&&v| v < -thr).count();
        Inertia::new(positive, negative, values.len() - positive - negative)
    }
}

impl std::fmt::Display for Inertia {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.positive, self.negative, self.zero)
    }
}

pub fn inertia(m: &SymMatrix, tol: &Tolerance) -> Result<Inertia, KernelError> {
    let eig = sym_eigen(m, tol)?;
    Ok(Inertia::from_values(&eig.values, tol))
}

pub fn rank(m: &SymMatrix, tol: &Tolerance) -> Result<usize, KernelError> {
    inertia(m, tol).map(|i| i.rank())
}

/// `A - B D^{-1} C` where `D` is the principal block on `pivots` and `A` the
/// block on the remaining indices (kept in ascending order).
pub fn schur_complement(
    m: &SymMatrix,
    pivots: &[usize],
    tol: &Tolerance,
) -> Result<SymMatrix, KernelError> {
    let order = m.order();
    let mut seen = vec![false; order];
    for &p in pivots {
        if p >= order {
            return Err(KernelError::PivotOutOfRange { index: p, order });
        }
        if seen[p] {
            return Err(KernelError::PivotRepeated(p));
        }
        seen[p] = true;
    }
    let rest: Vec<usize> = (0..order).filter(|&i| !seen[i]).collect();

    let d = m.principal(pivots);
    let eig = sym_eigen(&d, tol)?;
    let largest = eig.max_abs_value();
    let smallest = eig.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if pivots.is_empty() {
        return Ok(m.principal(&rest));
    }
    if largest <= ABSOLUTE_ZERO_FLOOR || smallest <= tol.eig_zero * largest {
        return Err(KernelError::SingularPivot {
            pivots: pivots.to_vec(),
            smallest,
        });
    }

    let b = DMatrix::from_fn(rest.len(), pivots.len(), |r, c| m.get(rest[r], pivots[c]));
    let a = m.principal(&rest);
    // D^{-1} B^T via the eigendecomposition already in hand.
    let inv_vals = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|v| 1.0 / v),
    ));
    let d_inv = &eig.vectors * inv_vals * eig.vectors.transpose();
    let p = &a.inner - &b * d_inv * b.transpose();
    Ok(SymMatrix::symmetrize(&p))
}

/// Why a matrix has no factorization `M_ij = -<x_i, x_j>` in signature `(n, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum LorentzInfeasibility {
    /// Needs exactly one positive eigenvalue.
    PositiveCount { found: usize },
    /// Needs at most `max` negative eigenvalues.
    NegativeCount { found: usize, max: usize },
}

impl std::fmt::Display for LorentzInfeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LorentzInfeasibility::PositiveCount { found } => {
                write!(f, "{found} positive eigenvalues, exactly one required")
            }
            LorentzInfeasibility::NegativeCount { found, max } => {
                write!(f, "{found} negative eigenvalues, at most {max} allowed")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum GramOutcome {
    Factored(LorentzFactor),
    Infeasible {
        inertia: Inertia,
        reason: LorentzInfeasibility,
    },
}

/// Columns `x_i` with `-<x_i, x_j> = M_ij`.
#[derive(Debug, Clone)]
pub struct LorentzFactor {
    pub vectors: Vec<MinkowskiVector>,
    pub inertia: Inertia,
    /// Indices whose vector is exactly zero (their matrix row vanishes).
    pub degenerate_columns: Vec<usize>,
}

impl LorentzFactor {
    pub fn has_degenerate_columns(&self) -> bool {
        !self.degenerate_columns.is_empty()
    }
}

/// Factors `M` as `-<x_i, x_j>_{n,1}`. The positive eigendirection becomes the
/// time coordinate, negative ones fill the leading spatial coordinates. Time
/// orientation of the columns is left to the caller.
pub fn gram_factor_lorentz(
    m: &SymMatrix,
    n: usize,
    tol: &Tolerance,
) -> Result<GramOutcome, KernelError> {
    let eig = sym_eigen(m, tol)?;
    let inertia = Inertia::from_values(&eig.values, tol);
    let order = m.order();

    if inertia.positive == 0 && inertia.negative == 0 {
        return Ok(GramOutcome::Factored(LorentzFactor {
            vectors: vec![MinkowskiVector::zero(n); order],
            inertia,
            degenerate_columns: (0..order).collect(),
        }));
    }
    if inertia.positive != 1 {
        return Ok(GramOutcome::Infeasible {
            inertia,
            reason: LorentzInfeasibility::PositiveCount {
                found: inertia.positive,
            },
        });
    }
    if inertia.negative > n {
        return Ok(GramOutcome::Infeasible {
            inertia,
            reason: LorentzInfeasibility::NegativeCount {
                found: inertia.negative,
                max: n,
            },
        });
    }

    let thr = tol.zero_threshold(eig.max_abs_value());
    let row_thr = tol.eig_zero * m.max_abs();
    let mut degenerate = Vec::new();
    let mut vectors = Vec::with_capacity(order);
    for i in 0..order {
        let row_zero = (0..order).all(|j| m.get(i, j).abs() <= row_thr);
        if row_zero {
            degenerate.push(i);
            vectors.push(MinkowskiVector::zero(n));
            continue;
        }
        // eigenvalues are sorted descending: the positive one comes first,
        // negatives sit at the tail.
        let time = eig.values[0].sqrt() * eig.vectors[(i, 0)];
        let mut spatial = vec![0.0; n];
        for (slot, k) in (0..order).rev().enumerate() {
            if eig.values[k] >= -thr {
                break;
            }
            spatial[slot] = (-eig.values[k]).sqrt() * eig.vectors[(i, k)];
        }
        vectors.push(MinkowskiVector::new(spatial, time));
    }
    Ok(GramOutcome::Factored(LorentzFactor {
        vectors,
        inertia,
        degenerate_columns: degenerate,
    }))
}
