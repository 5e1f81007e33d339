//! ℓ¹ enumeration over coefficient boxes.
//!
//! For `v = u·B` we have `u_i = Σ_j v_j (B⁻¹)_{ji}`, so every lattice vector of
//! ℓ¹ norm at most `β` has `|u_i| ≤ β · max_j |(B⁻¹)_{ji}|`. Searches walk that
//! box in exact integer arithmetic (basis scaled by its common denominator)
//! and tighten `β` whenever a shorter vector turns up.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{scaled_integer_rows, Lattice};
use crate::error::{Error, Result};
use crate::exact::{canonical_cmp, rational_str, Rational, RationalVector};

/// Refuse boxes with more leaves than this.
pub const ENUMERATION_LIMIT: u128 = 10_000_000_000;

trait Visitor {
    /// Inclusive coefficient range at `level`, read fresh on every step.
    fn range(&self, level: usize) -> (i64, i64);
    fn leaf(&mut self, coeffs: &[i64], point: &[i128]);
}

fn walk<V: Visitor>(
    rows: &[Vec<i128>],
    level: usize,
    coeffs: &mut [i64],
    partial: &mut [i128],
    visitor: &mut V,
) {
    if level == rows.len() {
        visitor.leaf(coeffs, partial);
        return;
    }
    let row = &rows[level];
    let (lo, _) = visitor.range(level);
    let mut u = lo;
    add_scaled(partial, row, lo as i128);
    loop {
        let (_, hi) = visitor.range(level);
        if u > hi {
            break;
        }
        coeffs[level] = u;
        walk(rows, level + 1, coeffs, partial, visitor);
        add_scaled(partial, row, 1);
        u += 1;
    }
    add_scaled(partial, row, -(u as i128));
    coeffs[level] = 0;
}

fn add_scaled(acc: &mut [i128], row: &[i128], k: i128) {
    for (a, r) in acc.iter_mut().zip(row) {
        *a += k * r;
    }
}

fn l1(p: &[i128]) -> i128 {
    p.iter().map(|x| x.abs()).sum()
}

fn box_volume(ranges: &[(i64, i64)]) -> u128 {
    ranges
        .iter()
        .map(|&(lo, hi)| (hi - lo + 1).max(0) as u128)
        .fold(1u128, |acc, w| acc.saturating_mul(w))
}

fn guard(ranges: &[(i64, i64)]) -> Result<()> {
    let work = box_volume(ranges);
    if work > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard {
            work,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn floor_i64(r: &Rational) -> Result<i64> {
    r.floor().to_integer().to_i64().ok_or(Error::Overflow)
}

fn ceil_i64(r: &Rational) -> Result<i64> {
    r.ceil().to_integer().to_i64().ok_or(Error::Overflow)
}

/// Integer view of a lattice: rows scaled by `denom`, plus the inverse
/// column maxima that size the coefficient box.
struct Scaled {
    denom: BigInt,
    rows: Vec<Vec<i128>>,
    colmax: Vec<Rational>,
}

impl Scaled {
    fn new(lattice: &Lattice, extra_denominator: Option<&BigInt>) -> Result<Self> {
        let mut denom = lattice
            .basis()
            .iter()
            .fold(BigInt::from(1), |acc, b| acc.lcm(&b.denominator_lcm()));
        if let Some(d) = extra_denominator {
            denom = denom.lcm(d);
        }
        let rows = scaled_integer_rows(lattice.basis(), &denom)?;
        Ok(Self {
            denom,
            rows,
            colmax: lattice.inverse_column_max(),
        })
    }

    /// `|u_i| ≤ floor(β·colmax_i)` for a scaled norm bound `β·denom`.
    fn symmetric_bounds(&self, scaled_bound: i128) -> Result<Vec<i64>> {
        let beta = Rational::new(BigInt::from(scaled_bound), self.denom.clone());
        self.colmax.iter().map(|c| floor_i64(&(&beta * c))).collect()
    }

    fn unscale(&self, p: &[i128]) -> RationalVector {
        RationalVector::new(
            p.iter()
                .map(|&x| Rational::new(BigInt::from(x), self.denom.clone()))
                .collect(),
        )
    }
}

struct Shortest<'a> {
    scaled: &'a Scaled,
    best: i128,
    bounds: Vec<i64>,
}

impl Visitor for Shortest<'_> {
    fn range(&self, level: usize) -> (i64, i64) {
        (-self.bounds[level], self.bounds[level])
    }

    fn leaf(&mut self, coeffs: &[i64], point: &[i128]) {
        if coeffs.iter().all(|&c| c == 0) {
            return;
        }
        let norm = l1(point);
        if norm < self.best {
            self.best = norm;
            // bounds only shrink, so a stale value is still sound
            if let Ok(b) = self.scaled.symmetric_bounds(norm) {
                self.bounds = b;
            }
        }
    }
}

struct Collect {
    target: i128,
    bounds: Vec<i64>,
    found: Vec<Vec<i128>>,
}

impl Visitor for Collect {
    fn range(&self, level: usize) -> (i64, i64) {
        (-self.bounds[level], self.bounds[level])
    }

    fn leaf(&mut self, coeffs: &[i64], point: &[i128]) {
        if coeffs.iter().any(|&c| c != 0) && l1(point) == self.target {
            self.found.push(point.to_vec());
        }
    }
}

/// Runs one visitor per value of the first coefficient, in parallel.
fn split_first<V, F>(rows: &[Vec<i128>], first: (i64, i64), make: F) -> Vec<V>
where
    V: Visitor + Send,
    F: Fn() -> V + Sync,
{
    let n = rows.len();
    (first.0..=first.1)
        .into_par_iter()
        .map(|u0| {
            let mut visitor = make();
            let (lo, hi) = visitor.range(0);
            if u0 < lo || u0 > hi {
                return visitor;
            }
            let mut coeffs = vec![0i64; n];
            coeffs[0] = u0;
            let mut partial = vec![0i128; n];
            add_scaled(&mut partial, &rows[0], u0 as i128);
            walk(rows, 1, &mut coeffs, &mut partial, &mut visitor);
            visitor
        })
        .collect()
}

fn scaled_minimum(scaled: &Scaled) -> Result<i128> {
    let seed = scaled
        .rows
        .iter()
        .map(|r| l1(r))
        .min()
        .expect("lattice has at least one row");
    let bounds = scaled.symmetric_bounds(seed)?;
    let ranges: Vec<_> = bounds.iter().map(|&b| (-b, b)).collect();
    guard(&ranges)?;
    let runs = split_first(&scaled.rows, ranges[0], || Shortest {
        scaled,
        best: seed,
        bounds: bounds.clone(),
    });
    Ok(runs.into_iter().map(|r| r.best).min().unwrap_or(seed))
}

/// The ℓ¹ minimum `λ₁ = min ‖v‖₁` over nonzero lattice vectors, exactly.
pub fn l1_minimum(lattice: &Lattice) -> Result<Rational> {
    let scaled = Scaled::new(lattice, None)?;
    let best = scaled_minimum(&scaled)?;
    Ok(Rational::new(BigInt::from(best), scaled.denom))
}

/// All lattice vectors of minimal ℓ¹ norm.
#[derive(Clone, Debug)]
pub struct MinimalVectorSet {
    lattice: Lattice,
    minimum: Rational,
    vectors: Vec<RationalVector>,
}

/// JSON form: `{"minimum": "p/q", "count": int, "vectors": […]}`.
#[derive(Clone, Debug, Serialize)]
pub struct MinimalVectorReport {
    #[serde(with = "rational_str")]
    pub minimum: Rational,
    pub count: usize,
    pub vectors: Vec<RationalVector>,
}

impl MinimalVectorSet {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn minimum(&self) -> &Rational {
        &self.minimum
    }

    pub fn vectors(&self) -> &[RationalVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// One vector per `±` pair: those whose first nonzero coordinate is positive.
    pub fn representatives(&self) -> Vec<RationalVector> {
        self.vectors
            .iter()
            .filter(|v| v.sign_normalized() == **v)
            .cloned()
            .collect()
    }

    /// Multiset of support sizes, as a sorted list.
    pub fn support_sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .vectors
            .iter()
            .map(|v| crate::exact::support(v).len())
            .collect();
        s.sort_unstable();
        s
    }

    pub fn report(&self) -> MinimalVectorReport {
        MinimalVectorReport {
            minimum: self.minimum.clone(),
            count: self.vectors.len(),
            vectors: self.vectors.clone(),
        }
    }
}

/// Canonical order on vectors that keeps each `±` pair adjacent: compare the
/// sign-normalized representatives, then put the representative first.
pub(crate) fn pair_canonical_cmp(a: &RationalVector, b: &RationalVector) -> Ordering {
    let (na, nb) = (a.sign_normalized(), b.sign_normalized());
    canonical_cmp(&na, &nb).then_with(|| (na != *a).cmp(&(nb != *b)))
}

pub fn minimal_vectors(lattice: &Lattice) -> Result<MinimalVectorSet> {
    let scaled = Scaled::new(lattice, None)?;
    let target = scaled_minimum(&scaled)?;
    let bounds = scaled.symmetric_bounds(target)?;
    let ranges: Vec<_> = bounds.iter().map(|&b| (-b, b)).collect();
    guard(&ranges)?;
    let runs = split_first(&scaled.rows, ranges[0], || Collect {
        target,
        bounds: bounds.clone(),
        found: Vec::new(),
    });
    let mut vectors: Vec<RationalVector> = runs
        .into_iter()
        .flat_map(|r| r.found)
        .map(|p| scaled.unscale(&p))
        .collect();
    vectors.sort_by(pair_canonical_cmp);
    Ok(MinimalVectorSet {
        lattice: lattice.clone(),
        minimum: Rational::new(BigInt::from(target), scaled.denom),
        vectors,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosestPoint {
    pub point: RationalVector,
    #[serde(with = "rational_str")]
    pub distance: Rational,
}

struct Nearest<'a> {
    scaled: &'a Scaled,
    center: Vec<Rational>,
    target: Vec<i128>,
    best: i128,
    best_point: Vec<i128>,
    ranges: Vec<(i64, i64)>,
}

impl Nearest<'_> {
    fn ranges_for(&self, scaled_bound: i128) -> Result<Vec<(i64, i64)>> {
        let beta = Rational::new(BigInt::from(scaled_bound), self.scaled.denom.clone());
        self.center
            .iter()
            .zip(&self.scaled.colmax)
            .map(|(c, m)| {
                let r = &beta * m;
                Ok((ceil_i64(&(c - &r))?, floor_i64(&(c + &r))?))
            })
            .collect()
    }
}

impl Visitor for Nearest<'_> {
    fn range(&self, level: usize) -> (i64, i64) {
        self.ranges[level]
    }

    fn leaf(&mut self, _coeffs: &[i64], point: &[i128]) {
        let d: i128 = point
            .iter()
            .zip(&self.target)
            .map(|(p, t)| (p - t).abs())
            .sum();
        if d < self.best {
            self.best = d;
            self.best_point = point.to_vec();
            if let Ok(r) = self.ranges_for(d) {
                self.ranges = r;
            }
        } else if d == self.best && point < self.best_point.as_slice() {
            self.best_point = point.to_vec();
        }
    }
}

/// Nearest lattice point to `y` under ℓ¹, with the exact distance. Ties go to
/// the lexicographically smallest point.
pub fn closest_point_l1(lattice: &Lattice, y: &RationalVector) -> Result<ClosestPoint> {
    let center = lattice.coefficients(y)?;
    let scaled = Scaled::new(lattice, Some(&y.denominator_lcm()))?;
    let d = Rational::from_integer(scaled.denom.clone());
    let target: Vec<i128> = y
        .iter()
        .map(|c| (c * &d).to_integer().to_i64().map(i128::from).ok_or(Error::Overflow))
        .collect::<Result<_>>()?;

    let rounded: Vec<i64> = center
        .iter()
        .map(|c| c.round().to_integer().to_i64().ok_or(Error::Overflow))
        .collect::<Result<_>>()?;
    let mut start = vec![0i128; lattice.dim()];
    for (u, row) in rounded.iter().zip(&scaled.rows) {
        add_scaled(&mut start, row, *u as i128);
    }
    let start_dist: i128 = start.iter().zip(&target).map(|(p, t)| (p - t).abs()).sum();

    let mut search = Nearest {
        scaled: &scaled,
        center,
        target,
        best: start_dist,
        best_point: start,
        ranges: Vec::new(),
    };
    search.ranges = search.ranges_for(start_dist)?;
    guard(&search.ranges)?;
    let n = lattice.dim();
    walk(&scaled.rows, 0, &mut vec![0; n], &mut vec![0; n], &mut search);

    let distance = Rational::new(BigInt::from(search.best), scaled.denom.clone());
    if distance.is_zero() {
        debug_assert!(lattice.member(y).unwrap_or(false));
    }
    Ok(ClosestPoint {
        point: scaled.unscale(&search.best_point),
        distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, l1_distance, l1_norm, rat};
    use crate::lattice::named_lattice;

    fn quarter() -> RationalVector {
        RationalVector::from_fracs(&[(1, 4); 4])
    }

    #[test]
    fn minimum_of_standard_lattices() {
        for n in 1..=5 {
            assert_eq!(l1_minimum(&named_lattice("zn", Some(n)).unwrap()).unwrap(), int(1));
        }
        assert_eq!(l1_minimum(&named_lattice("half_d4_plus", None).unwrap()).unwrap(), int(1));
        assert_eq!(l1_minimum(&named_lattice("dn", Some(4)).unwrap()).unwrap(), int(2));
    }

    /// Independent oracle: every cataloged 4-dim lattice lies in (1/8)ℤ⁴, so
    /// scan all of (1/8)ℤ⁴ inside the ℓ¹ ball of radius 2 and filter by membership.
    fn grid_oracle(lattice: &Lattice) -> (Rational, usize) {
        let mut best: Option<(i64, usize)> = None;
        let r = 16i64;
        for a in -r..=r {
            for b in -(r - a.abs())..=(r - a.abs()) {
                let rest = r - a.abs() - b.abs();
                for c in -rest..=rest {
                    let rest2 = rest - c.abs();
                    for d in -rest2..=rest2 {
                        if (a, b, c, d) == (0, 0, 0, 0) {
                            continue;
                        }
                        let v = RationalVector::from_fracs(&[(a, 8), (b, 8), (c, 8), (d, 8)]);
                        if !lattice.member(&v).unwrap() {
                            continue;
                        }
                        let norm = a.abs() + b.abs() + c.abs() + d.abs();
                        best = match best {
                            Some((m, k)) if norm == m => Some((m, k + 1)),
                            Some((m, _)) if norm < m => Some((norm, 1)),
                            None => Some((norm, 1)),
                            keep => keep,
                        };
                    }
                }
            }
        }
        let (m, k) = best.expect("some lattice vector of norm ≤ 2");
        (rat(m, 8), k)
    }

    #[test]
    fn enumeration_matches_grid_oracle() {
        for key in ["half_d4_plus", "l_prime", "l0", "l1", "l1_prime", "h2_sum_h2"] {
            let l = named_lattice(key, None).unwrap();
            let (m, k) = grid_oracle(&l);
            let set = minimal_vectors(&l).unwrap();
            assert_eq!(*set.minimum(), m, "{key}");
            assert_eq!(set.len(), k, "{key}");
        }
    }

    #[test]
    fn minimal_vector_counts() {
        let count = |k: &str, n: Option<usize>| minimal_vectors(&named_lattice(k, n).unwrap()).unwrap().len();
        assert_eq!(count("half_d4_plus", None), 40);
        assert_eq!(count("dn", Some(4)), 32);
        assert_eq!(count("l_prime", None), 20);
        assert_eq!(count("zn", Some(4)), 8);
    }

    #[test]
    fn minimal_set_is_negation_closed_members() {
        let l = named_lattice("l0", None).unwrap();
        let set = minimal_vectors(&l).unwrap();
        for v in set.vectors() {
            assert!(l.member(v).unwrap());
            assert_eq!(l1_norm(v), *set.minimum());
            assert!(set.vectors().contains(&-v));
        }
        assert_eq!(set.representatives().len() * 2, set.len());
        // pairs sit next to each other, representative first
        for pair in set.vectors().chunks(2) {
            assert_eq!(pair[0], -&pair[1]);
            assert_eq!(pair[0], pair[0].sign_normalized());
        }
    }

    #[test]
    fn closest_point_examples() {
        let z4 = named_lattice("zn", Some(4)).unwrap();
        let cp = closest_point_l1(&z4, &quarter()).unwrap();
        assert_eq!(cp.distance, int(1));
        assert_eq!(cp.point, RationalVector::zero(4));

        let h = named_lattice("h2_sum_h2", None).unwrap();
        assert_eq!(closest_point_l1(&h, &quarter()).unwrap().distance, int(1));

        let half = named_lattice("half_d4_plus", None).unwrap();
        let cp = closest_point_l1(&half, &quarter()).unwrap();
        assert_eq!(cp.distance, int(0));
        assert_eq!(cp.point, quarter());
    }

    #[test]
    fn closest_point_agrees_with_local_scan() {
        let h = named_lattice("h2_sum_h2", None).unwrap();
        let y = RationalVector::from_fracs(&[(3, 7), (-2, 5), (9, 8), (1, 3)]);
        let cp = closest_point_l1(&h, &y).unwrap();
        let mut best = None::<Rational>;
        for a in -3..=3 {
            for b in -3..=3 {
                for c in -3..=3 {
                    for d in -3..=3 {
                        let p = h.combine(&[a, b, c, d]);
                        let dist = l1_distance(&p, &y);
                        if best.as_ref().is_none_or(|m| dist < *m) {
                            best = Some(dist);
                        }
                    }
                }
            }
        }
        assert_eq!(Some(cp.distance.clone()), best);
        assert_eq!(l1_distance(&cp.point, &y), cp.distance);
        assert!(h.member(&cp.point).unwrap());
    }

    #[test]
    fn report_json_shape() {
        let r = minimal_vectors(&named_lattice("zn", Some(2)).unwrap()).unwrap().report();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"minimum":"1","count":4,"vectors":[["0","1"],["0","-1"],["1","0"],["-1","0"]]}"#
        );
    }
}
