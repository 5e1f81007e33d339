//! Ball volumes, the Blichfeldt density integral, and the cap-in-cylinder
//! estimate.

use std::f64::consts::PI;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::exact::{rat, rational_str, Rational};

/// `ln vol(Bₙ) = (n/2)·ln π − ln Γ(n/2 + 1)`.
pub fn ln_ball_volume(n: usize) -> f64 {
    let nf = n as f64;
    nf / 2.0 * PI.ln() - ln_gamma(nf / 2.0 + 1.0)
}

/// `(vol(Bₙ)/vol(Bₙ₋₁)) / √(2π/n)`.
pub fn ball_volume_ratio(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("need n ≥ 2".into()));
    }
    let nf = n as f64;
    Ok((ln_ball_volume(n) - ln_ball_volume(n - 1) - 0.5 * (2.0 * PI / nf).ln()).exp())
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub n: usize,
    /// `∫₀¹ (1 − t²)·n·t^{n−1} dt`, the ball average of the density.
    #[serde(with = "rational_str")]
    pub radial_integral: Rational,
    #[serde(with = "rational_str")]
    pub expected: Rational,
    pub holds: bool,
}

/// Integrates `1 − 2n r²` over the ball of radius `1/√(2n)` exactly, relative
/// to its volume, and compares with `2/(n+2)`.
pub fn blichfeldt_integral_identity(n: usize) -> Result<IdentityCheck> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let n_big = BigInt::from(n);
    // in t = r·√(2n) the integrand is (1 − t²)·n·t^{n−1} on [0,1]
    let monomials = [(1i64, n - 1), (-1i64, n + 1)];
    let radial_integral: Rational = monomials
        .iter()
        .map(|&(coef, deg)| Rational::new(&n_big * coef, BigInt::from(deg + 1)))
        .sum();
    let expected = rat(2, n as i64 + 2);
    Ok(IdentityCheck {
        n,
        holds: radial_integral == expected,
        radial_integral,
        expected,
    })
}

/// Monte Carlo ball average of `1 − t²` for `t` the radius of a uniform
/// point in the unit `n`-ball.
pub fn blichfeldt_monte_carlo(n: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = (0..samples)
        .map(|_| {
            let t = rng.gen::<f64>().powf(1.0 / n as f64);
            1.0 - t * t
        })
        .sum();
    total / samples as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct CapCylinderReport {
    pub n: usize,
    pub r: f64,
    pub h: f64,
    pub samples: usize,
    pub cap_estimate: f64,
    pub std_error: f64,
    /// `h·(r² − (r−h)²)^{(n−1)/2}·vol(Bₙ₋₁)`.
    pub cylinder: f64,
    pub holds: bool,
}

pub const CAP_MAX_DIM: usize = 12;

/// Estimates the volume of `{x ∈ r·Bₙ : x₁ ≥ r − h}` by rejection from its
/// bounding box and compares with the enclosing cylinder.
pub fn cap_cylinder_bound_check(
    n: usize,
    r: f64,
    h: f64,
    samples: usize,
    seed: u64,
) -> Result<CapCylinderReport> {
    if !(2..=CAP_MAX_DIM).contains(&n) {
        return Err(Error::Domain(format!("need 2 ≤ n ≤ {CAP_MAX_DIM}, got {n}")));
    }
    if !(h > 0.0 && h <= r) {
        return Err(Error::Domain(format!("need 0 < h ≤ r, got h={h}, r={r}")));
    }
    if samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    let rho = (r * r - (r - h) * (r - h)).sqrt();
    let box_volume = h * (2.0 * rho).powi(n as i32 - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let x1 = r - h + h * rng.gen::<f64>();
        let mut norm2 = x1 * x1;
        for _ in 1..n {
            let x = rho * (2.0 * rng.gen::<f64>() - 1.0);
            norm2 += x * x;
        }
        if norm2 <= r * r {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let cap_estimate = p * box_volume;
    let std_error = (p * (1.0 - p) / samples as f64).sqrt() * box_volume;
    let cylinder = h * rho.powi(n as i32 - 1) * ln_ball_volume(n - 1).exp();
    Ok(CapCylinderReport {
        n,
        r,
        h,
        samples,
        cap_estimate,
        std_error,
        cylinder,
        holds: cap_estimate <= cylinder + 3.0 * std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_small_cases() {
        assert_eq!(blichfeldt_integral_identity(1).unwrap().radial_integral, rat(2, 3));
        assert_eq!(blichfeldt_integral_identity(4).unwrap().radial_integral, rat(1, 3));
        assert!((1..=50).all(|n| blichfeldt_integral_identity(n).unwrap().holds));
    }

    #[test]
    fn identity_monte_carlo() {
        let mc = blichfeldt_monte_carlo(10, 1_000_000, 3);
        assert!((mc - 1.0 / 6.0).abs() < 1e-3);
    }

    #[test]
    fn volume_ratio_tends_to_one() {
        assert!((ln_ball_volume(2) - PI.ln()).abs() < 1e-12);
        assert!((ln_ball_volume(3) - (4.0 * PI / 3.0).ln()).abs() < 1e-12);
        assert!((ball_volume_ratio(1000).unwrap() - 1.0).abs() < 1e-3);
        assert!((ball_volume_ratio(10_000).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn hemisphere_in_cylinder() {
        let rep = cap_cylinder_bound_check(3, 1.0, 1.0, 200_000, 1).unwrap();
        let hemisphere = 2.0 / 3.0 * PI;
        assert!((rep.cap_estimate - hemisphere).abs() < 4.0 * rep.std_error + 1e-3);
        assert!((rep.cylinder - PI).abs() < 1e-12);
        assert!(rep.holds);
    }

    #[test]
    fn thin_caps() {
        let rep = cap_cylinder_bound_check(5, 1.0, 0.2, 200_000, 2).unwrap();
        assert!(rep.holds);
        let tiny = cap_cylinder_bound_check(5, 1.0, 1e-6, 10_000, 2).unwrap();
        assert!(tiny.cap_estimate < 1e-5 && tiny.cylinder < 1e-5);
        assert!(cap_cylinder_bound_check(5, 1.0, 1.5, 10, 2).is_err());
        assert!(cap_cylinder_bound_check(12, 1.0, 0.5, 100_000, 4).unwrap().holds);
    }
}
