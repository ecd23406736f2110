//! Kissing spheres in the upper half-space `x_0 >= 0`, tangent to `x_0 = 0`.
//!
//! A kissing sphere is either finite (tangent point `t` on the boundary
//! hyperplane plus a diameter `φ`) or a hyperplane `x_0 = h`, which touches the
//! boundary at infinity. The distance
//!
//! ```text
//! d_K(p, q) = |t(p) - t(q)| / sqrt(φ(p) φ(q))      both finite
//! d_K(p, q) = sqrt(h / φ(q))                       p a hyperplane
//! d_K(p, q) = 0                                    shared tangent point
//! ```
//!
//! is invariant under Möbius transformations preserving the half-space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::SquaredDistanceMatrix;

/// Relative band around `d_K = 1` inside which a pair counts as tangent.
pub const TANGENCY_BAND: f64 = 1e-9;

/// `d_K` at or below this counts as a shared tangent point.
pub const SHARED_POINT_BAND: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KissingError {
    #[error("diameter must be finite and strictly positive, got {0}")]
    BadDiameter(f64),
    #[error("hyperplane height must be finite and strictly positive, got {0}")]
    BadHeight(f64),
    #[error("inversion radius must be finite and strictly positive, got {0}")]
    BadRadius(f64),
    #[error("dilation factor must be finite and strictly positive, got {0}")]
    BadDilation(f64),
    #[error("reflection normal must be non-zero")]
    ZeroNormal,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("dimension mismatch: {left} vs {right} boundary coordinates")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ambient dimension must be at least 1, got {0}")]
    AmbientTooSmall(usize),
    #[error("empty sphere list")]
    Empty,
    #[error("no Möbius transformation gives both spheres unit diameter: {0}")]
    NoNormalizer(&'static str),
}

/// A sphere in `x_0 >= 0` tangent to the hyperplane `x_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KissingSphere {
    Finite {
        #[serde(rename = "t")]
        tangent: Vec<f64>,
        #[serde(rename = "phi")]
        diameter: f64,
    },
    Hyperplane {
        #[serde(rename = "h")]
        height: f64,
    },
}

impl KissingSphere {
    pub fn finite(tangent: Vec<f64>, diameter: f64) -> Result<Self, KissingError> {
        if !(diameter.is_finite() && diameter > 0.0) {
            return Err(KissingError::BadDiameter(diameter));
        }
        if tangent.iter().any(|x| !x.is_finite()) {
            return Err(KissingError::NonFinite);
        }
        Ok(KissingSphere::Finite { tangent, diameter })
    }

    pub fn hyperplane(height: f64) -> Result<Self, KissingError> {
        if !(height.is_finite() && height > 0.0) {
            return Err(KissingError::BadHeight(height));
        }
        Ok(KissingSphere::Hyperplane { height })
    }

    /// Re-checks the invariants, e.g. after deserialization.
    pub fn validate(&self) -> Result<(), KissingError> {
        match self {
            KissingSphere::Finite { tangent, diameter } => {
                KissingSphere::finite(tangent.clone(), *diameter).map(|_| ())
            }
            KissingSphere::Hyperplane { height } => {
                KissingSphere::hyperplane(*height).map(|_| ())
            }
        }
    }

    pub fn tangent(&self) -> Option<&[f64]> {
        match self {
            KissingSphere::Finite { tangent, .. } => Some(tangent),
            KissingSphere::Hyperplane { .. } => None,
        }
    }

    /// Diameter; infinite for a hyperplane.
    pub fn diameter(&self) -> f64 {
        match self {
            KissingSphere::Finite { diameter, .. } => *diameter,
            KissingSphere::Hyperplane { .. } => f64::INFINITY,
        }
    }

    pub fn is_hyperplane(&self) -> bool {
        matches!(self, KissingSphere::Hyperplane { .. })
    }

    /// Number of boundary coordinates, `None` for a hyperplane.
    pub fn boundary_dim(&self) -> Option<usize> {
        self.tangent().map(<[f64]>::len)
    }

    /// Checks that the sphere lives in ambient dimension `n`.
    pub fn check_ambient(&self, n: usize) -> Result<(), KissingError> {
        if n < 1 {
            return Err(KissingError::AmbientTooSmall(n));
        }
        match self.boundary_dim() {
            Some(d) if d != n - 1 => Err(KissingError::DimensionMismatch {
                left: d,
                right: n - 1,
            }),
            _ => Ok(()),
        }
    }
}

fn check_same_dim(a: &[f64], b: &[f64]) -> Result<(), KissingError> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(KissingError::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        })
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// The Möbius-invariant distance `d_K`.
pub fn dist_k(p: &KissingSphere, q: &KissingSphere) -> Result<f64, KissingError> {
    use KissingSphere::*;
    match (p, q) {
        (
            Finite {
                tangent: tp,
                diameter: fp,
            },
            Finite {
                tangent: tq,
                diameter: fq,
            },
        ) => {
            check_same_dim(tp, tq)?;
            Ok(euclid(tp, tq) / (fp * fq).sqrt())
        }
        (Hyperplane { height }, Finite { diameter, .. })
        | (Finite { diameter, .. }, Hyperplane { height }) => Ok((height / diameter).sqrt()),
        (Hyperplane { .. }, Hyperplane { .. }) => Ok(0.0),
    }
}

/// Combinatorial relation between two kissing spheres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    Tangent,
    Disjoint,
    Intersecting,
    SharedTangentPoint,
}

pub fn classify_pair(p: &KissingSphere, q: &KissingSphere) -> Result<PairClass, KissingError> {
    let d = dist_k(p, q)?;
    Ok(if d <= SHARED_POINT_BAND {
        PairClass::SharedTangentPoint
    } else if (d - 1.0).abs() <= TANGENCY_BAND {
        PairClass::Tangent
    } else if d > 1.0 {
        PairClass::Disjoint
    } else {
        PairClass::Intersecting
    })
}

/// A sphere centred on the boundary hyperplane, used for inversions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionSphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl InversionSphere {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self, KissingError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(KissingError::BadRadius(radius));
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(KissingError::NonFinite);
        }
        Ok(InversionSphere { center, radius })
    }
}

/// Image of `p` under inversion in `s`.
pub fn invert(p: &KissingSphere, s: &InversionSphere) -> Result<KissingSphere, KissingError> {
    let r2 = s.radius * s.radius;
    match p {
        KissingSphere::Finite { tangent, diameter } => {
            check_same_dim(tangent, &s.center)?;
            let d2: f64 = tangent
                .iter()
                .zip(&s.center)
                .map(|(t, o)| (t - o) * (t - o))
                .sum();
            if d2 == 0.0 {
                return KissingSphere::hyperplane(r2 / diameter);
            }
            let scale = r2 / d2;
            let image: Vec<f64> = tangent
                .iter()
                .zip(&s.center)
                .map(|(t, o)| o + scale * (t - o))
                .collect();
            KissingSphere::finite(image, scale * diameter)
        }
        KissingSphere::Hyperplane { height } => {
            KissingSphere::finite(s.center.clone(), r2 / height)
        }
    }
}

/// Generators of the Möbius transformations preserving the half-space.
#[derive(Debug, Clone, PartialEq)]
pub enum MobiusGenerator {
    /// Translation parallel to the boundary hyperplane.
    Translation(Vec<f64>),
    /// Dilation about the origin.
    Dilation(f64),
    /// Reflection in `{ y : <normal, y> = offset }`, a hyperplane orthogonal
    /// to the boundary.
    Reflection { normal: Vec<f64>, offset: f64 },
    Inversion(InversionSphere),
}

pub fn apply_generator(
    p: &KissingSphere,
    g: &MobiusGenerator,
) -> Result<KissingSphere, KissingError> {
    match g {
        MobiusGenerator::Translation(v) => match p {
            KissingSphere::Finite { tangent, diameter } => {
                check_same_dim(tangent, v)?;
                KissingSphere::finite(tangent.iter().zip(v).map(|(t, s)| t + s).collect(), *diameter)
            }
            KissingSphere::Hyperplane { .. } => Ok(p.clone()),
        },
        MobiusGenerator::Dilation(lambda) => {
            if !(lambda.is_finite() && *lambda > 0.0) {
                return Err(KissingError::BadDilation(*lambda));
            }
            match p {
                KissingSphere::Finite { tangent, diameter } => KissingSphere::finite(
                    tangent.iter().map(|t| lambda * t).collect(),
                    lambda * diameter,
                ),
                KissingSphere::Hyperplane { height } => KissingSphere::hyperplane(lambda * height),
            }
        }
        MobiusGenerator::Reflection { normal, offset } => {
            let nn: f64 = normal.iter().map(|x| x * x).sum();
            if nn == 0.0 {
                return Err(KissingError::ZeroNormal);
            }
            match p {
                KissingSphere::Finite { tangent, diameter } => {
                    check_same_dim(tangent, normal)?;
                    let dot: f64 = tangent.iter().zip(normal).map(|(t, a)| t * a).sum();
                    let k = 2.0 * (dot - offset) / nn;
                    KissingSphere::finite(
                        tangent.iter().zip(normal).map(|(t, a)| t - k * a).collect(),
                        *diameter,
                    )
                }
                KissingSphere::Hyperplane { .. } => Ok(p.clone()),
            }
        }
        MobiusGenerator::Inversion(s) => invert(p, s),
    }
}

/// An inversion sending both spheres to unit-diameter spheres.
///
/// For two finite spheres the centre sits on the segment between the tangent
/// points, splitting it in ratio `sqrt(φ(p)) : sqrt(φ(q))`, with radius
/// `|t(p) - t(q)| / (sqrt(φ(p)) + sqrt(φ(q)))`. For a hyperplane at height `h`
/// and a finite `q`, the centre is offset from `t(q)` by `sqrt(h φ(q))` along
/// the first boundary axis and the radius is `sqrt(h)`.
pub fn normalize_pair(
    p: &KissingSphere,
    q: &KissingSphere,
) -> Result<InversionSphere, KissingError> {
    use KissingSphere::*;
    match (p, q) {
        (
            Finite {
                tangent: tp,
                diameter: fp,
            },
            Finite {
                tangent: tq,
                diameter: fq,
            },
        ) => {
            check_same_dim(tp, tq)?;
            let dist = euclid(tp, tq);
            if dist == 0.0 {
                return Err(KissingError::NoNormalizer("shared tangent point"));
            }
            let (sp, sq) = (fp.sqrt(), fq.sqrt());
            let ratio = sp / (sp + sq);
            let center = tp.iter().zip(tq).map(|(a, b)| a + ratio * (b - a)).collect();
            InversionSphere::new(center, dist / (sp + sq))
        }
        (Hyperplane { height }, Finite { tangent, diameter })
        | (Finite { tangent, diameter }, Hyperplane { height }) => {
            if tangent.is_empty() {
                return Err(KissingError::NoNormalizer("the boundary of a line is a single point"));
            }
            let mut center = tangent.clone();
            center[0] += (height * diameter).sqrt();
            InversionSphere::new(center, height.sqrt())
        }
        (Hyperplane { .. }, Hyperplane { .. }) => {
            Err(KissingError::NoNormalizer("both spheres touch at infinity"))
        }
    }
}

/// Squared `d_K` distance matrix of a sphere list.
pub fn distance_matrix(spheres: &[KissingSphere]) -> Result<SquaredDistanceMatrix, KissingError> {
    if spheres.is_empty() {
        return Err(KissingError::Empty);
    }
    let dim = spheres.iter().find_map(KissingSphere::boundary_dim);
    if let Some(d) = dim {
        for s in spheres {
            if let Some(e) = s.boundary_dim() {
                if e != d {
                    return Err(KissingError::DimensionMismatch { left: d, right: e });
                }
            }
        }
    }
    let k = spheres.len();
    let mut rows = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let d = dist_k(&spheres[i], &spheres[j])?;
            rows[i][j] = d * d;
            rows[j][i] = d * d;
        }
    }
    Ok(SquaredDistanceMatrix::from_rows(&rows).expect("d_K squares are symmetric and nonnegative"))
}
