//! Translative kissing configurations of the cross-polytope.
//!
//! A configuration at scale `m` is a point set with every ℓ¹ norm equal to `m`
//! and every pairwise ℓ¹ distance at least `m`.

mod bounds;
mod code;

pub use bounds::{
    hadwiger_bound, lattice_kissing_upper_bound, small_support_scan, support_size_bound,
    SmallSupportRow, SmallSupportScan,
};
pub use code::{
    ball_size_bruteforce, ball_size_formula, ball_size_formula_unchecked, certify, construct_x,
    greedy_kissing_subset, lower_bound_certificate, lower_bound_params, union_bound_floor,
    BallCount, BallMethod, CodeParams, CodeSet, LowerBoundCertificate, UnionBoundFloor,
    BALL_LIMIT, CONSTRUCT_LIMIT,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{l1_norm, rational_str, Rational, RationalVector};

#[derive(Clone, Debug)]
pub struct KissingConfiguration {
    n: usize,
    scale: Rational,
    points: Vec<RationalVector>,
    verified: bool,
}

impl KissingConfiguration {
    pub fn new(n: usize, scale: Rational, points: Vec<RationalVector>) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::Domain(format!("scale must be positive, got {scale}")));
        }
        if let Some(bad) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: bad.dim(),
            });
        }
        Ok(Self {
            n,
            scale,
            points,
            verified: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn points(&self) -> &[RationalVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Set only by [`KissingConfiguration::verify`] on success.
    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Runs the verifier and records the outcome on `self`.
    pub fn verify(&mut self) -> Result<ValidityReport> {
        let report = verify_kissing_configuration(self)?;
        self.verified = report.valid;
        Ok(report)
    }

    pub fn to_file(&self) -> ConfigFile {
        ConfigFile {
            n: self.n,
            scale: self.scale.clone(),
            points: self.points.clone(),
        }
    }
}

/// JSON form `{"n": int, "scale": "p/q", "points": […]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigFile {
    pub n: usize,
    #[serde(with = "rational_str")]
    pub scale: Rational,
    pub points: Vec<RationalVector>,
}

impl ConfigFile {
    pub fn into_configuration(self) -> Result<KissingConfiguration> {
        KissingConfiguration::new(self.n, self.scale, self.points)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A point whose norm differs from the scale (index is 0-based).
    Norm {
        index: usize,
        #[serde(with = "rational_str")]
        norm: Rational,
    },
    /// A pair closer than the scale; the first such pair in index order.
    Distance {
        i: usize,
        j: usize,
        #[serde(with = "rational_str")]
        distance: Rational,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub count: usize,
    pub violation: Option<Violation>,
}

/// Points scaled to integers by a common denominator, stored row-major.
pub(crate) struct IntegerPoints {
    pub n: usize,
    pub denom: BigInt,
    pub coords: Vec<i64>,
}

impl IntegerPoints {
    pub fn from_rational(n: usize, points: &[RationalVector], extra: &Rational) -> Result<Self> {
        let denom = points
            .iter()
            .fold(extra.denom().clone(), |acc, p| acc.lcm(&p.denominator_lcm()));
        let d = Rational::from_integer(denom.clone());
        let mut coords = Vec::with_capacity(n * points.len());
        for p in points {
            for c in p.iter() {
                coords.push((c * &d).to_integer().to_i64().ok_or(Error::Overflow)?);
            }
        }
        Ok(Self { n, denom, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.n).unwrap_or(0)
    }

    pub fn point(&self, i: usize) -> &[i64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    pub fn scaled(&self, r: &Rational) -> Result<i64> {
        (r * Rational::from_integer(self.denom.clone()))
            .to_integer()
            .to_i64()
            .ok_or(Error::Overflow)
    }

    pub fn unscale(&self, v: i64) -> Rational {
        Rational::new(BigInt::from(v), self.denom.clone())
    }
}

pub(crate) fn l1_int(a: &[i64]) -> i64 {
    a.iter().map(|x| x.abs()).sum()
}

pub(crate) fn dist_int(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// True iff `‖a − b‖₁ ≥ bound`, stopping as soon as the bound is reached.
#[inline]
pub(crate) fn at_least(a: &[i64], b: &[i64], bound: i64) -> bool {
    let mut acc = 0;
    for (x, y) in a.iter().zip(b) {
        acc += (x - y).abs();
        if acc >= bound {
            return true;
        }
    }
    false
}

/// Checks equal norms and pairwise separation; reports the first violation.
pub fn verify_kissing_configuration(cfg: &KissingConfiguration) -> Result<ValidityReport> {
    let pts = IntegerPoints::from_rational(cfg.n, &cfg.points, &cfg.scale)?;
    let m = pts.scaled(&cfg.scale)?;
    let count = pts.len();

    if let Some(index) = (0..count).find(|&i| l1_int(pts.point(i)) != m) {
        return Ok(ValidityReport {
            valid: false,
            count,
            violation: Some(Violation::Norm {
                index,
                norm: l1_norm(&cfg.points[index]),
            }),
        });
    }

    let close = (0..count).into_par_iter().find_map_first(|i| {
        let a = pts.point(i);
        (i + 1..count)
            .find(|&j| !at_least(a, pts.point(j), m))
            .map(|j| (i, j))
    });
    let violation = close.map(|(i, j)| Violation::Distance {
        i,
        j,
        distance: pts.unscale(dist_int(pts.point(i), pts.point(j))),
    });
    Ok(ValidityReport {
        valid: violation.is_none(),
        count,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::lattice::{minimal_vectors, named_lattice};

    #[test]
    fn optimal_d4_configuration_is_valid() {
        let set = minimal_vectors(&named_lattice("half_d4_plus", None).unwrap()).unwrap();
        let mut cfg = KissingConfiguration::new(4, int(1), set.vectors().to_vec()).unwrap();
        assert!(!cfg.is_verified());
        let r = cfg.verify().unwrap();
        assert!(r.valid);
        assert_eq!(r.count, 40);
        assert!(cfg.is_verified());
    }

    #[test]
    fn duplicate_point_is_reported() {
        let mut pts: Vec<RationalVector> = (0..3)
            .flat_map(|i| {
                let mut c = [0i64; 3];
                c[i] = 1;
                let p = RationalVector::from_ints(&c);
                [p.clone(), -&p]
            })
            .collect();
        pts.push(RationalVector::from_ints(&[0, 1, 0]));
        let cfg = KissingConfiguration::new(3, int(1), pts).unwrap();
        let r = verify_kissing_configuration(&cfg).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.violation,
            Some(Violation::Distance {
                i: 2,
                j: 6,
                distance: int(0)
            })
        );
    }

    #[test]
    fn wrong_norm_is_reported() {
        let pts = vec![RationalVector::from_ints(&[1, 0]), RationalVector::from_ints(&[1, 1])];
        let cfg = KissingConfiguration::new(2, int(1), pts).unwrap();
        let r = verify_kissing_configuration(&cfg).unwrap();
        assert_eq!(r.violation, Some(Violation::Norm { index: 1, norm: int(2) }));
    }

    #[test]
    fn config_file_round_trip() {
        let cfg = KissingConfiguration::new(
            2,
            int(1),
            vec![RationalVector::from_fracs(&[(1, 2), (-1, 2)])],
        )
        .unwrap();
        let json = serde_json::to_string(&cfg.to_file()).unwrap();
        assert_eq!(json, r#"{"n":2,"scale":"1","points":[["1/2","-1/2"]]}"#);
        let back: ConfigFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_configuration().unwrap().points(), cfg.points());
        assert!(KissingConfiguration::new(2, int(0), vec![]).is_err());
    }
}
