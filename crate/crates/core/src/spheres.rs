//! Ordinary Euclidean spheres and their separation.
//!
//! A sphere with center `c` and radius `r` maps to the unit vector
//! `(1 - |c|^2 + r^2, 2c, 1 + |c|^2 - r^2) / (2r)` of signature `(n+1, 1)`,
//! and `-<x_p, x_q>` is the separation of `p` and `q`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{first_subset, Certificate, Method, Verdict, Witness, MINORS_MAX_ORDER};
use crate::kissing::TANGENCY_BAND;
use crate::lightcone::{LightconeError, MinkowskiVector};
use crate::numkernel::{inertia, Inertia, KernelError, SymMatrix, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpheresError {
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("center has a non-finite coordinate")]
    BadCenter,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("diagonal entry {index} is {value}, expected -1")]
    BadDiagonal { index: usize, value: f64 },
    #[error("inversion center lies on the sphere")]
    CenterOnSphere,
    #[error("<x, x> = {0}, expected 1")]
    NotUnit(f64),
    #[error("<x, x_p> = {0}, expected -1")]
    NotTangent(f64),
    #[error("order {0} exceeds the Minors mode cap of {MINORS_MAX_ORDER}")]
    TooLargeForMinors(usize),
    #[error("method {0:?} does not apply to sphere matrices")]
    UnsupportedMethod(Method),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Lightcone(#[from] LightconeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanSphere {
    #[serde(rename = "c")]
    pub center: Vec<f64>,
    #[serde(rename = "r")]
    pub radius: f64,
}

impl EuclideanSphere {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self, SpheresError> {
        let s = EuclideanSphere { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SpheresError> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(SpheresError::BadRadius(self.radius));
        }
        if self.center.iter().any(|v| !v.is_finite()) {
            return Err(SpheresError::BadCenter);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Image under inversion in the sphere of center `o` and radius `k`.
    pub fn invert(&self, o: &[f64], k: f64) -> Result<EuclideanSphere, SpheresError> {
        same_dim(self.dim(), o.len())?;
        let d2: f64 = self.center.iter().zip(o).map(|(c, o)| (c - o) * (c - o)).sum();
        let denom = d2 - self.radius * self.radius;
        if denom.abs() <= 1e-15 * d2.max(self.radius * self.radius) {
            return Err(SpheresError::CenterOnSphere);
        }
        let s = k * k / denom;
        EuclideanSphere::new(
            self.center.iter().zip(o).map(|(c, o)| o + s * (c - o)).collect(),
            s.abs() * self.radius,
        )
    }
}

fn same_dim(left: usize, right: usize) -> Result<(), SpheresError> {
    if left == right {
        Ok(())
    } else {
        Err(SpheresError::DimensionMismatch { left, right })
    }
}

/// `(d^2 - r_p^2 - r_q^2) / (2 r_p r_q)`, signed; never square-rooted.
pub fn separation(p: &EuclideanSphere, q: &EuclideanSphere) -> Result<f64, SpheresError> {
    same_dim(p.dim(), q.dim())?;
    let d2: f64 = p.center.iter().zip(&q.center).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((d2 - p.radius * p.radius - q.radius * q.radius) / (2.0 * p.radius * q.radius))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereRelation {
    ExternallyDisjoint,
    ExternallyTangent,
    Intersecting,
    InternallyTangent,
    Nested,
}

/// Reads the relation off the separation value; `+-1` within the tangency
/// band counts as tangent.
pub fn classify_spheres(p: &EuclideanSphere, q: &EuclideanSphere) -> Result<SphereRelation, SpheresError> {
    let s = separation(p, q)?;
    Ok(if (s - 1.0).abs() <= TANGENCY_BAND {
        SphereRelation::ExternallyTangent
    } else if (s + 1.0).abs() <= TANGENCY_BAND {
        SphereRelation::InternallyTangent
    } else if s > 1.0 {
        SphereRelation::ExternallyDisjoint
    } else if s < -1.0 {
        SphereRelation::Nested
    } else {
        SphereRelation::Intersecting
    })
}

/// Unit vector of signature `(n+1, 1)`; the first `n + 1` coordinates are
/// spatial. The time coordinate is negative for spheres with
/// `r^2 > 1 + |c|^2`, whereas the sum of first and last coordinates is
/// always `1 / r > 0`.
pub fn hyperboloid_embed(p: &EuclideanSphere) -> MinkowskiVector {
    let c2: f64 = p.center.iter().map(|v| v * v).sum();
    let r = p.radius;
    let k = 1.0 / (2.0 * r);
    let mut spatial = Vec::with_capacity(p.dim() + 1);
    spatial.push(k * (1.0 - c2 + r * r));
    spatial.extend(p.center.iter().map(|c| c / r));
    MinkowskiVector::new(spatial, k * (1.0 + c2 - r * r))
}

/// `sqrt(2)/2 (x + x_p)` for `x` on the unit hyperboloid with
/// `<x, x_p> = -1`, i.e. a sphere externally tangent to `p`.
pub fn kissing_cone_embed(
    x_p: &MinkowskiVector,
    x: &MinkowskiVector,
    tol: &Tolerance,
) -> Result<MinkowskiVector, SpheresError> {
    let scale = x.euclidean_norm().max(x_p.euclidean_norm()).max(1.0);
    let band = tol.residual * scale * scale;
    let xx = x.norm_sq();
    if (xx - 1.0).abs() > band {
        return Err(SpheresError::NotUnit(xx));
    }
    let pp = x_p.norm_sq();
    if (pp - 1.0).abs() > band {
        return Err(SpheresError::NotUnit(pp));
    }
    let xp = x.inner(x_p)?;
    if (xp + 1.0).abs() > band {
        return Err(SpheresError::NotTangent(xp));
    }
    Ok(x.add(x_p).scaled(std::f64::consts::FRAC_1_SQRT_2))
}

/// Symmetric matrix of pairwise separations with `-1` on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationMatrix {
    matrix: SymMatrix,
}

impl SeparationMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SpheresError> {
        Self::from_sym(SymMatrix::from_rows(rows)?)
    }

    pub fn from_sym(matrix: SymMatrix) -> Result<Self, SpheresError> {
        for index in 0..matrix.order() {
            let value = matrix.get(index, index);
            if value != -1.0 {
                return Err(SpheresError::BadDiagonal { index, value });
            }
        }
        Ok(SeparationMatrix { matrix })
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.matrix.to_rows()
    }
}

pub fn separation_matrix(spheres: &[EuclideanSphere]) -> Result<SeparationMatrix, SpheresError> {
    let k = spheres.len();
    let mut rows = vec![vec![-1.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let s = separation(&spheres[i], &spheres[j])?;
            rows[i][j] = s;
            rows[j][i] = s;
        }
    }
    SeparationMatrix::from_rows(&rows)
}

/// Eigenvalue signs from principal minors alone. With `E_k` the sum of the
/// `k x k` principal minors, the characteristic polynomial is
/// `sum_k (-1)^k E_k x^(m-k)`. All its roots are real, so Descartes' rule of
/// signs counts positive and negative eigenvalues exactly.
fn inertia_from_minors(m: &SymMatrix, tol: &Tolerance) -> Inertia {
    let order = m.order();
    let mut e = vec![0.0; order + 1];
    let mut scale = vec![0.0; order + 1];
    e[0] = 1.0;
    scale[0] = 1.0;
    first_subset::<()>(order, 1, |subset| {
        let sub = m.principal(subset);
        e[subset.len()] += sub.determinant();
        scale[subset.len()] += sub.hadamard_bound();
        None
    });
    let e: Vec<f64> = e
        .iter()
        .zip(&scale)
        .map(|(v, s)| if v.abs() <= tol.eig_zero * s { 0.0 } else { *v })
        .collect();
    let rank = (0..=order).rev().find(|&k| e[k] != 0.0).unwrap_or(0);
    let changes = |signs: &[f64]| {
        let nz: Vec<f64> = signs.iter().copied().filter(|v| *v != 0.0).collect();
        nz.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    };
    // coefficients of x^(m-k), highest degree first
    let pos: Vec<f64> = (0..=order).map(|k| if k % 2 == 0 { e[k] } else { -e[k] }).collect();
    // p(-x): multiply the x^(m-k) coefficient by (-1)^(m-k)
    let neg: Vec<f64> = (0..=order)
        .map(|k| if (order - k).is_multiple_of(2) { pos[k] } else { -pos[k] })
        .collect();
    let positive = changes(&pos);
    let negative = changes(&neg);
    Inertia::new(positive, negative, order - rank)
}

/// Embeddable when at most one eigenvalue is positive and at most `n + 1`
/// are negative (so rank `<= n + 2`).
pub fn check_spheres(
    s: &SeparationMatrix,
    n: usize,
    method: Method,
    tol: &Tolerance,
) -> Result<Certificate, SpheresError> {
    let inr = match method {
        Method::Inertia => inertia(s.matrix(), tol)?,
        Method::Minors => {
            if s.order() > MINORS_MAX_ORDER {
                return Err(SpheresError::TooLargeForMinors(s.order()));
            }
            inertia_from_minors(s.matrix(), tol)
        }
        Method::DistanceInertia => return Err(SpheresError::UnsupportedMethod(method)),
    };
    let ok = inr.positive <= 1 && inr.negative <= n + 1;
    Ok(Certificate {
        verdict: if ok { Verdict::Embeddable } else { Verdict::NotEmbeddable },
        method,
        witness: (!ok).then_some(Witness::Inertia { inertia: inr }),
        inertia: (method == Method::Inertia).then_some(inr),
        rank: (method == Method::Minors).then_some(inr.rank()),
    })
}
