//! The code `X_{m₁,m₂}` of vectors in `{0,±1,±2}ⁿ` with exactly `m₁`
//! coordinates of modulus 1 and `m₂` of modulus 2, its ℓ¹ balls, and greedy
//! extraction of a kissing configuration.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bounds::binomial;
use super::{at_least, dist_int, l1_int, IntegerPoints, KissingConfiguration};
use crate::error::{Error, Result};
use crate::exact::{int, Rational, RationalVector};
use crate::lattice::SignedPermutation;

/// Most points `construct_x` will materialize.
pub const CONSTRUCT_LIMIT: u128 = 10_000_000;
/// Most points a brute-force ball count will stream through.
pub const BALL_LIMIT: u128 = 100_000_000;
const GREEDY_BLOCK: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CodeParams {
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub m: usize,
}

impl CodeParams {
    pub fn new(n: usize, m1: usize, m2: usize) -> Result<Self> {
        if n == 0 || m1 + m2 == 0 || m1 + m2 > n {
            return Err(Error::InfeasibleParams(format!(
                "need n ≥ 1 and 1 ≤ m1+m2 ≤ n, got n={n}, m1={m1}, m2={m2}"
            )));
        }
        Ok(Self {
            n,
            m1,
            m2,
            m: m1 + 2 * m2,
        })
    }

    /// `m₂ < m₁/2`, the range in which the ball formula is an upper bound.
    pub fn formula_in_range(&self) -> bool {
        2 * self.m2 < self.m1
    }

    /// `C(n,m₁)·C(n−m₁,m₂)·2^{m₁+m₂}`.
    pub fn size(&self) -> BigUint {
        binomial(self.n as u64, self.m1 as u64)
            * binomial((self.n - self.m1) as u64, self.m2 as u64)
            * (BigUint::one() << (self.m1 + self.m2))
    }

    /// `(1,…,1,2,…,2,0,…,0)`.
    pub fn base_center(&self) -> Vec<i64> {
        let mut c = vec![0; self.n];
        c[..self.m1].fill(1);
        c[self.m1..self.m1 + self.m2].fill(2);
        c
    }

    fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.n
            && x.iter().all(|v| v.abs() <= 2)
            && x.iter().filter(|v| v.abs() == 1).count() == self.m1
            && x.iter().filter(|v| v.abs() == 2).count() == self.m2
    }

    fn size_u128(&self) -> Result<u128> {
        self.size().to_u128().ok_or(Error::Overflow)
    }
}

/// Visits every point of `X`, coordinates chosen in the order `0, ±1, ±2`.
fn for_each_point(p: &CodeParams, mut f: impl FnMut(&[i64])) {
    fn rec(i: usize, r1: usize, r2: usize, buf: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
        let n = buf.len();
        if i == n {
            f(buf);
            return;
        }
        let left = n - i;
        if r1 + r2 < left {
            buf[i] = 0;
            rec(i + 1, r1, r2, buf, f);
        }
        for v in [1, -1, 2, -2] {
            let (a, b) = if v == 1 || v == -1 { (r1, r2) } else { (r2, r1) };
            if a == 0 {
                continue;
            }
            buf[i] = v;
            if v.abs() == 1 {
                rec(i + 1, a - 1, b, buf, f);
            } else {
                rec(i + 1, b, a - 1, buf, f);
            }
        }
        buf[i] = 0;
    }
    let mut buf = vec![0; p.n];
    rec(0, p.m1, p.m2, &mut buf, &mut f);
}

/// Integer analogue of the lattice-engine pair order.
fn pair_cmp_int(a: &[i64], b: &[i64]) -> Ordering {
    let flip = |v: &[i64]| v.iter().find(|x| **x != 0).is_some_and(|x| *x < 0);
    let (fa, fb) = (flip(a), flip(b));
    let sa = if fa { -1 } else { 1 };
    let sb = if fb { -1 } else { 1 };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * sa).cmp(&(y * sb)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then(fa.cmp(&fb))
}

/// Sorts the rows of `pts` in the canonical pair order; returns the permutation.
fn canonical_order(pts: &IntegerPoints) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.par_sort_by(|&i, &j| pair_cmp_int(pts.point(i), pts.point(j)));
    idx
}

/// The points of `X`, sorted canonically.
#[derive(Clone, Debug)]
pub struct CodeSet {
    params: CodeParams,
    coords: Vec<i64>,
}

impl CodeSet {
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.params.n
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[i64] {
        let n = self.params.n;
        &self.coords[i * n..(i + 1) * n]
    }

    pub fn vectors(&self) -> Vec<RationalVector> {
        self.coords
            .chunks(self.params.n)
            .map(RationalVector::from_ints)
            .collect()
    }

    /// The whole set as an unverified configuration at scale `m`.
    pub fn to_configuration(&self) -> KissingConfiguration {
        KissingConfiguration::new(self.params.n, int(self.params.m as i64), self.vectors())
            .expect("points have dimension n")
    }

    /// `k` distinct points drawn with a seeded generator.
    pub fn sample_centers(&self, k: usize, seed: u64) -> Vec<RationalVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks = sample(&mut rng, self.len(), k.min(self.len())).into_vec();
        picks.sort_unstable();
        picks
            .into_iter()
            .map(|i| RationalVector::from_ints(self.point(i)))
            .collect()
    }
}

pub fn construct_x(params: &CodeParams) -> Result<CodeSet> {
    let size = params.size_u128()?;
    if size > CONSTRUCT_LIMIT {
        return Err(Error::SizeGuard {
            work: size,
            limit: CONSTRUCT_LIMIT,
        });
    }
    let n = params.n;
    let mut raw = Vec::with_capacity(size as usize * n);
    for_each_point(params, |x| raw.extend_from_slice(x));
    let pts = IntegerPoints {
        n,
        denom: One::one(),
        coords: raw,
    };
    let coords = canonical_order(&pts)
        .into_iter()
        .flat_map(|i| pts.point(i).to_vec())
        .collect();
    Ok(CodeSet {
        params: *params,
        coords,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallMethod {
    Bruteforce,
    Formula,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallCount {
    pub params: CodeParams,
    pub center: RationalVector,
    pub count: u128,
    pub method: BallMethod,
}

/// `σ` with `σ(center) = (1,…,1,2,…,2,0,…,0)`.
fn to_base_center(params: &CodeParams, center: &[i64]) -> SignedPermutation {
    let mut perm = Vec::with_capacity(params.n);
    for modulus in [1, 2, 0] {
        perm.extend((0..params.n).filter(|&i| center[i].abs() == modulus));
    }
    let signs = perm.iter().map(|&p| if center[p] < 0 { -1 } else { 1 }).collect();
    SignedPermutation::new(perm, signs).expect("a signed permutation")
}

/// `2c₁ + 4c₂ + 2c₃ > m` for a point already moved so the center is canonical.
fn criterion(params: &CodeParams, y: &[i64]) -> bool {
    let (m1, m2) = (params.m1, params.m2);
    let c1 = y[..m1].iter().filter(|v| **v == 2).count();
    let c2 = y[m1..m1 + m2].iter().filter(|v| **v == 2).count();
    let c3 = y[..m1 + m2].iter().filter(|v| **v == 1).count();
    2 * c1 + 4 * c2 + 2 * c3 > params.m
}

/// `|{y ∈ X : ‖center − y‖₁ < m}|`, the center included.
pub fn ball_size_bruteforce(params: &CodeParams, center: &RationalVector) -> Result<BallCount> {
    let size = params.size_u128()?;
    if size > BALL_LIMIT {
        return Err(Error::SizeGuard {
            work: size,
            limit: BALL_LIMIT,
        });
    }
    if center.dim() != params.n {
        return Err(Error::Dimension {
            expected: params.n,
            got: center.dim(),
        });
    }
    let c: Vec<i64> = center
        .iter()
        .map(|v| if v.is_integer() { v.to_integer().to_i64() } else { None })
        .collect::<Option<_>>()
        .filter(|c: &Vec<i64>| params.contains(c))
        .ok_or_else(|| Error::Domain(format!("{center} is not a point of X")))?;

    let sigma = to_base_center(params, &c);
    let (perm, signs) = (sigma.perm(), sigma.signs());
    let m = params.m as i64;
    let mut moved = vec![0; params.n];
    let (mut by_distance, mut by_criterion) = (0u128, 0u128);
    for_each_point(params, |y| {
        if dist_int(&c, y) < m {
            by_distance += 1;
        }
        for i in 0..moved.len() {
            moved[i] = i64::from(signs[i]) * y[perm[i]];
        }
        if criterion(params, &moved) {
            by_criterion += 1;
        }
    });
    assert_eq!(by_distance, by_criterion, "distance and criterion counts differ");
    Ok(BallCount {
        params: *params,
        center: center.clone(),
        count: by_distance,
        method: BallMethod::Bruteforce,
    })
}

fn binom_i(a: i64, b: i64) -> BigUint {
    if a < 0 || b < 0 || b > a {
        BigUint::zero()
    } else {
        binomial(a as u64, b as u64)
    }
}

/// `g(x₁,x₂;m₁,m₂)`; out-of-range binomials contribute 0.
fn g_term(params: &CodeParams, x1: i64, x2: i64) -> BigUint {
    let (n, m1, m2, m) = (params.n as i64, params.m1 as i64, params.m2 as i64, params.m as i64);
    let h = (m - 2 * x1 - 4 * x2).div_euclid(2) + 1;
    let e = m1 + m2 - x1 - x2 - h;
    if e < 0 {
        return BigUint::zero();
    }
    binom_i(m1, x1)
        * binom_i(m2, x2)
        * binom_i(m1 + m2 - x1 - x2, h)
        * binom_i(n - x1 - x2 - h, m1 - h)
        * binom_i(n - m1 - x1 - x2, m2 - x1 - x2)
        * (BigUint::one() << e as usize)
}

/// `Σ_{x₁+x₂ ≤ m₂} g(x₁,x₂)` without the range check.
pub fn ball_size_formula_unchecked(params: &CodeParams) -> BigUint {
    let m2 = params.m2 as i64;
    (0..=m2)
        .flat_map(|x1| (0..=m2 - x1).map(move |x2| (x1, x2)))
        .map(|(x1, x2)| g_term(params, x1, x2))
        .sum()
}

pub fn ball_size_formula(params: &CodeParams) -> Result<BallCount> {
    if !params.formula_in_range() {
        return Err(Error::FormulaRange {
            m1: params.m1,
            m2: params.m2,
        });
    }
    Ok(BallCount {
        params: *params,
        center: RationalVector::from_ints(&params.base_center()),
        count: ball_size_formula_unchecked(params)
            .to_u128()
            .ok_or(Error::Overflow)?,
        method: BallMethod::Formula,
    })
}

/// Indices of the greedy choice over `order`. Each block is filtered in
/// parallel against earlier picks, then scanned sequentially, which gives
/// exactly the sequential greedy result.
fn greedy_indices(pts: &IntegerPoints, order: &[usize], m: i64) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for block in order.chunks(GREEDY_BLOCK) {
        let survivors: Vec<usize> = block
            .par_iter()
            .copied()
            .filter(|&c| chosen.iter().all(|&s| at_least(pts.point(c), pts.point(s), m)))
            .collect();
        let start = chosen.len();
        for c in survivors {
            if chosen[start..]
                .iter()
                .all(|&s| at_least(pts.point(c), pts.point(s), m))
            {
                chosen.push(c);
            }
        }
    }
    chosen
}

/// Greedy maximal subset with pairwise ℓ¹ distances `≥ scale`, scanning
/// candidates in canonical order. The result has been through the verifier.
pub fn greedy_kissing_subset(
    candidates: &[RationalVector],
    scale: &Rational,
) -> Result<KissingConfiguration> {
    let n = candidates.first().map_or(0, |p| p.dim());
    let pts = IntegerPoints::from_rational(n, candidates, scale)?;
    let m = pts.scaled(scale)?;
    if let Some(i) = (0..pts.len()).find(|&i| l1_int(pts.point(i)) != m) {
        return Err(Error::Domain(format!(
            "candidate {} does not have norm {scale}",
            candidates[i]
        )));
    }
    let order = canonical_order(&pts);
    let picks = greedy_indices(&pts, &order, m);
    let mut cfg = KissingConfiguration::new(
        n,
        scale.clone(),
        picks.into_iter().map(|i| candidates[i].clone()).collect(),
    )?;
    cfg.verify()?;
    Ok(cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionBoundFloor {
    pub params: CodeParams,
    #[serde(rename = "sizeX")]
    pub size_x: u128,
    #[serde(rename = "ballFormula")]
    pub ball_formula: u128,
    pub formula_in_range: bool,
    /// `⌈|X| / ballFormula⌉`.
    pub floor: u128,
}

pub fn union_bound_floor(params: &CodeParams) -> Result<UnionBoundFloor> {
    let size_x = params.size_u128()?;
    let ball_formula = ball_size_formula_unchecked(params)
        .to_u128()
        .ok_or(Error::Overflow)?;
    if ball_formula == 0 {
        return Err(Error::Domain("ball formula evaluates to 0".into()));
    }
    Ok(UnionBoundFloor {
        params: *params,
        size_x,
        ball_formula,
        formula_in_range: params.formula_in_range(),
        floor: size_x.div_ceil(ball_formula),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundCertificate {
    pub params: CodeParams,
    #[serde(rename = "sizeX")]
    pub size_x: u128,
    #[serde(rename = "maxBall_bruteforce")]
    pub max_ball_bruteforce: u128,
    /// Evaluated even outside the validity range; see `formula_in_range`.
    #[serde(rename = "ballFormula")]
    pub ball_formula: u128,
    pub formula_in_range: bool,
    /// `⌈|X| / maxBall⌉`.
    pub union_bound_floor: u128,
    #[serde(rename = "greedySize")]
    pub greedy_size: usize,
    pub meets_floor: bool,
    pub valid: bool,
    /// `log₂|S| / n`.
    pub log2_rate: f64,
}

/// Builds `X`, counts a ball, extracts a greedy configuration and checks it.
pub fn certify(params: &CodeParams) -> Result<(LowerBoundCertificate, KissingConfiguration)> {
    let set = construct_x(params)?;
    let size_x = set.len() as u128;
    let max_ball = ball_size_bruteforce(params, &RationalVector::from_ints(&params.base_center()))?.count;
    let ball_formula = ball_size_formula_unchecked(params)
        .to_u128()
        .ok_or(Error::Overflow)?;
    let scale = int(params.m as i64);
    let pts = IntegerPoints {
        n: params.n,
        denom: One::one(),
        coords: set.coords.clone(),
    };
    let order: Vec<usize> = (0..set.len()).collect();
    let picks = greedy_indices(&pts, &order, params.m as i64);
    let mut cfg = KissingConfiguration::new(
        params.n,
        scale,
        picks
            .iter()
            .map(|&i| RationalVector::from_ints(set.point(i)))
            .collect(),
    )?;
    let valid = cfg.verify()?.valid;
    let floor = size_x.div_ceil(max_ball);
    let greedy_size = cfg.len();
    let cert = LowerBoundCertificate {
        params: *params,
        size_x,
        max_ball_bruteforce: max_ball,
        ball_formula,
        formula_in_range: params.formula_in_range(),
        union_bound_floor: floor,
        greedy_size,
        meets_floor: greedy_size as u128 >= floor,
        valid,
        log2_rate: (greedy_size as f64).log2() / params.n as f64,
    };
    Ok((cert, cfg))
}

/// `m₁ = ⌊0.19n⌋`, `m₂ = ⌊0.09n⌋`.
pub fn lower_bound_params(n: usize) -> Result<CodeParams> {
    if n < 12 {
        return Err(Error::InfeasibleParams(format!("need n ≥ 12, got {n}")));
    }
    CodeParams::new(n, 19 * n / 100, 9 * n / 100)
}

pub fn lower_bound_certificate(n: usize) -> Result<LowerBoundCertificate> {
    certify(&lower_bound_params(n)?).map(|(c, _)| c)
}
