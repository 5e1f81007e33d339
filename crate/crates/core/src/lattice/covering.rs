//! Deep holes and the covering radius of `H₂ ⊕ H₂`, where `H₂` is the planar
//! lattice spanned by `(1,0)` and `(½,½)`.
//!
//! The pair transform `(x, y) ↦ (x+y, x−y)` maps `H₂` onto `ℤ²` and the ℓ¹
//! norm onto ℓ∞, so both facts reduce to the cube geometry of `ℤ²`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{closest_point_l1, Lattice};
use crate::error::{Error, Result};
use crate::exact::{
    blockwise_hadamard, hadamard_pair_transform, int, l1_norm, linf_norm, rat, rational_str,
    Rational, RationalVector,
};

pub fn h2() -> Lattice {
    Lattice::from_basis(vec![
        RationalVector::from_ints(&[1, 0]),
        RationalVector::from_fracs(&[(1, 2), (1, 2)]),
    ])
    .expect("H2 basis is nonsingular")
}

pub fn h2_sum_h2() -> Lattice {
    h2().direct_sum(&h2()).expect("direct sum of nonsingular bases")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    V1,
    V2,
    V2Prime,
    V3,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [Self::V1, Self::V2, Self::V2Prime, Self::V3];
}

/// One of the four two-parameter families of deep holes, `0 ≤ x₁, x₂ ≤ ½`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DeepHoleFamily {
    pub kind: FamilyKind,
}

impl DeepHoleFamily {
    pub fn new(kind: FamilyKind) -> Self {
        Self { kind }
    }

    pub fn instantiate(&self, x1: &Rational, x2: &Rational) -> Result<RationalVector> {
        let half = rat(1, 2);
        for x in [x1, x2] {
            if *x < Rational::zero() || *x > half {
                return Err(Error::Domain(format!("family parameter {x} outside [0, 1/2]")));
            }
        }
        // second coordinate of each block is either ½−x or x−½
        let (up1, up2) = match self.kind {
            FamilyKind::V1 => (true, true),
            FamilyKind::V2 => (false, true),
            FamilyKind::V2Prime => (true, false),
            FamilyKind::V3 => (false, false),
        };
        let partner = |x: &Rational, up: bool| if up { &half - x } else { x - &half };
        Ok(RationalVector::new(vec![
            x1.clone(),
            partner(x1, up1),
            x2.clone(),
            partner(x2, up2),
        ]))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeepHoleReport {
    pub point: RationalVector,
    pub nearest: RationalVector,
    #[serde(with = "rational_str")]
    pub distance: Rational,
    pub is_deep_hole: bool,
    /// Membership in `{(x₁,±(½−x₁),x₂,±(½−x₂))} + H₂⊕H₂`, decided in closed form.
    pub in_family: bool,
}

impl DeepHoleReport {
    pub fn consistent(&self) -> bool {
        self.is_deep_hole == self.in_family
    }
}

/// `2t` is an odd integer.
fn is_half_odd(t: &Rational) -> bool {
    let doubled = t * int(2);
    doubled.is_integer() && doubled.to_integer().is_odd()
}

/// Closed-form test: each block, after the pair transform, must have a
/// coordinate in `½ + ℤ` (a deep hole of `ℤ²` under ℓ∞).
fn in_family(y: &RationalVector) -> Result<bool> {
    let t = blockwise_hadamard(y)?;
    Ok(t.coords()
        .chunks(2)
        .all(|block| block.iter().any(is_half_odd)))
}

pub fn is_deep_hole_h2sum(y: &RationalVector) -> Result<DeepHoleReport> {
    if y.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: y.dim(),
        });
    }
    let cp = closest_point_l1(&h2_sum_h2(), y)?;
    Ok(DeepHoleReport {
        point: y.clone(),
        is_deep_hole: cp.distance == Rational::one(),
        nearest: cp.point,
        distance: cp.distance,
        in_family: in_family(y)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateStep {
    pub claim: String,
    pub value: String,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoveringCertificate {
    #[serde(with = "rational_str")]
    pub radius: Rational,
    pub steps: Vec<CertificateStep>,
}

impl CoveringCertificate {
    pub fn verified(&self) -> bool {
        self.steps.iter().all(|s| s.verified)
    }
}

/// ℓ∞ covering radius of `ℤᵏ`, from the per-coordinate worst case
/// `sup_t dist(t, ℤ) = ½`, confirmed at the witness `(½, …, ½)`.
fn linf_covering_radius_of_integers(k: usize) -> (Rational, bool) {
    let half = rat(1, 2);
    let witness = RationalVector::new(vec![half.clone(); k]);
    // nearest integer points to (½,…,½) are the corners of the unit cube
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << k) {
        let corner = RationalVector::from_ints(
            &(0..k).map(|i| i64::from(mask >> i & 1)).collect::<Vec<_>>(),
        );
        let d = linf_norm(&(&witness - &corner));
        best = Some(best.map_or(d.clone(), |b: Rational| b.min(d)));
    }
    let attained = best.as_ref() == Some(&half);
    (half, attained)
}

/// Computes `ρ(H₂⊕H₂)` by reduction to `ℤ²` under ℓ∞ and records each step.
pub fn covering_radius_h2sum() -> Result<CoveringCertificate> {
    let mut steps = Vec::new();
    let base = h2();

    let images: Vec<RationalVector> = base
        .basis()
        .iter()
        .map(hadamard_pair_transform)
        .collect::<Result<_>>()?;
    let image = Lattice::from_basis(images.clone())?;
    let integral = images.iter().flat_map(|v| v.iter()).all(|c| c.is_integer());
    let unimodular = image.determinant().abs() == Rational::one();
    steps.push(CertificateStep {
        claim: "pair transform maps the H2 basis to a basis of Z^2".into(),
        value: format!("{} , {}", images[0], images[1]),
        verified: integral && unimodular,
    });

    let probes = [
        RationalVector::from_ints(&[1, 0]),
        RationalVector::from_fracs(&[(1, 2), (1, 2)]),
        RationalVector::from_fracs(&[(3, 7), (-2, 5)]),
        RationalVector::from_fracs(&[(-1, 3), (-1, 8)]),
    ];
    let isometric = probes
        .iter()
        .map(|v| Ok(linf_norm(&hadamard_pair_transform(v)?) == l1_norm(v)))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .all(|b| b);
    steps.push(CertificateStep {
        claim: "max(|x+y|,|x-y|) = |x|+|y|: l1 on H2 is l-infinity on Z^2".into(),
        value: format!("{} probes", probes.len()),
        verified: isometric,
    });

    let (rho_cube, attained) = linf_covering_radius_of_integers(2);
    steps.push(CertificateStep {
        claim: "l-infinity covering radius of Z^2, deep hole (1/2,1/2)".into(),
        value: rho_cube.to_string(),
        verified: attained,
    });

    let rho_h2 = rho_cube.clone();
    steps.push(CertificateStep {
        claim: "l1 covering radius of H2 equals that of Z^2 under l-infinity".into(),
        value: rho_h2.to_string(),
        verified: isometric,
    });

    // ℓ¹ distance to a direct sum splits blockwise; spot-check the split
    let sum = h2_sum_h2();
    let radius = &rho_h2 + &rho_h2;
    let samples = [
        RationalVector::from_fracs(&[(1, 4), (1, 4), (1, 4), (1, 4)]),
        RationalVector::from_fracs(&[(1, 3), (-1, 5), (7, 8), (1, 6)]),
        RationalVector::from_fracs(&[(-2, 3), (1, 9), (0, 1), (5, 4)]),
    ];
    let mut additive = true;
    for y in &samples {
        let whole = closest_point_l1(&sum, y)?.distance;
        let a = closest_point_l1(&base, &RationalVector::new(y.coords()[..2].to_vec()))?.distance;
        let b = closest_point_l1(&base, &RationalVector::new(y.coords()[2..].to_vec()))?.distance;
        additive &= whole == a + b;
    }
    steps.push(CertificateStep {
        claim: "covering radius is additive over l1 direct sums: rho(H2+H2) = rho(H2) + rho(H2)".into(),
        value: radius.to_string(),
        verified: additive,
    });

    let witness = RationalVector::from_fracs(&[(1, 4); 4]);
    let cp = closest_point_l1(&sum, &witness)?;
    steps.push(CertificateStep {
        claim: "bound attained: distance from (1/4,1/4,1/4,1/4) to H2+H2".into(),
        value: cp.distance.to_string(),
        verified: cp.distance == radius,
    });

    Ok(CoveringCertificate { radius, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named_lattice;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn radius_is_one_with_certificate() {
        let cert = covering_radius_h2sum().unwrap();
        assert_eq!(cert.radius, int(1));
        assert!(cert.verified(), "{cert:#?}");
        assert_eq!(linf_covering_radius_of_integers(2).0, rat(1, 2));
    }

    #[test]
    fn deep_hole_examples() {
        let r = is_deep_hole_h2sum(&RationalVector::from_fracs(&[(1, 4); 4])).unwrap();
        assert!(r.is_deep_hole && r.consistent());
        let r = is_deep_hole_h2sum(&RationalVector::zero(4)).unwrap();
        assert!(!r.is_deep_hole && r.consistent());
        assert_eq!(r.distance, int(0));
        let r = is_deep_hole_h2sum(&RationalVector::from_fracs(&[(1, 8), (3, 8), (1, 2), (0, 1)]))
            .unwrap();
        assert!(r.is_deep_hole && r.consistent());
        assert_eq!(r.distance, int(1));
    }

    #[test]
    fn families_sit_at_distance_one() {
        let grid: Vec<Rational> = (0..=4).map(|k| rat(k, 8)).collect();
        for kind in FamilyKind::ALL {
            let fam = DeepHoleFamily::new(kind);
            for x1 in &grid {
                for x2 in &grid {
                    let y = fam.instantiate(x1, x2).unwrap();
                    let r = is_deep_hole_h2sum(&y).unwrap();
                    assert_eq!(r.distance, int(1), "{kind:?} {y}");
                    assert!(r.in_family);
                }
            }
        }
        assert!(DeepHoleFamily::new(FamilyKind::V1).instantiate(&rat(3, 4), &rat(0, 1)).is_err());
    }

    #[test]
    fn random_points_agree_with_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let y = RationalVector::from_fracs(
                &(0..4).map(|_| (rng.gen_range(-24..=24), 8)).collect::<Vec<_>>(),
            );
            let r = is_deep_hole_h2sum(&y).unwrap();
            assert!(r.distance <= int(1));
            assert!(r.consistent(), "{y}: {r:?}");
        }
    }

    #[test]
    fn direct_sum_distances_add() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pieces = [h2(), named_lattice("zn", Some(2)).unwrap()];
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let sum = pieces[a].direct_sum(&pieces[b]).unwrap();
            for _ in 0..10 {
                let c: Vec<(i64, i64)> = (0..4).map(|_| (rng.gen_range(-30..=30), 12)).collect();
                let y = RationalVector::from_fracs(&c);
                let ya = RationalVector::from_fracs(&c[..2]);
                let yb = RationalVector::from_fracs(&c[2..]);
                let whole = closest_point_l1(&sum, &y).unwrap().distance;
                let split = closest_point_l1(&pieces[a], &ya).unwrap().distance
                    + closest_point_l1(&pieces[b], &yb).unwrap().distance;
                assert_eq!(whole, split);
            }
        }
    }
}
