use std::f64::consts::{E, FRAC_1_SQRT_2, PI};

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::volume::ln_ball_volume;
use super::RateReport;
use crate::error::{Error, Result};
use crate::exact::{entropy_unchecked, log2_binomial};

const ALPHA_GRID: usize = 2000;
const GOLDEN_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UpperRateParams {
    pub b: f64,
    pub c: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl UpperRateParams {
    /// `0 < c < 1`, `0 < a < ½` with `a = b(1−c)`, `R > 1`.
    pub fn new(b: f64, c: f64, r: f64) -> Result<Self> {
        let p = Self { b, c, r };
        let a = p.a();
        if !(c > 0.0 && c < 1.0 && a > 0.0 && a < 0.5 && r > 1.0) {
            return Err(Error::InfeasibleParams(format!(
                "need 0 < c < 1, 0 < b(1-c) < 1/2, R > 1; got b={b}, c={c}, R={r}"
            )));
        }
        Ok(p)
    }

    pub fn standard() -> Self {
        Self {
            b: 0.334,
            c: 0.296,
            r: 1.5675,
        }
    }

    pub fn a(&self) -> f64 {
        self.b * (1.0 - self.c)
    }

    /// Upper end of the `k′` interval, capped at `c`; `None` when empty.
    fn kprime_max(&self) -> Option<f64> {
        let k = (1.0 + FRAC_1_SQRT_2 - self.r) / (2.0 * self.b);
        (k > 0.0).then(|| k.min(self.c))
    }

    fn report(&self, function: &str, value: f64) -> RateReport {
        RateReport::new(function, value)
            .param("b", self.b)
            .param("c", self.c)
            .param("R", self.r)
    }
}

/// `2^{cH(k′/c) + (1−c)} · (1 − 2(R−1+2k′b)²)^{1/2}`.
pub fn alpha_function(kprime: f64, p: &UpperRateParams) -> Result<f64> {
    let kmax = p.kprime_max().ok_or(Error::EmptyCapInterval)?;
    if !(0.0..=kmax + 1e-12).contains(&kprime) {
        return Err(Error::Domain(format!("k' = {kprime} outside [0, {kmax}]")));
    }
    let k = kprime.min(kmax);
    let s = p.r - 1.0 + 2.0 * k * p.b;
    let root = (1.0 - 2.0 * s * s).max(0.0).sqrt();
    Ok((p.c * entropy_unchecked(k / p.c) + 1.0 - p.c).exp2() * root)
}

/// Supremum of [`alpha_function`] by a grid scan and golden-section search.
pub fn alpha_sup(p: &UpperRateParams) -> Result<RateReport> {
    let kmax = p.kprime_max().ok_or(Error::EmptyCapInterval)?;
    let h = kmax / ALPHA_GRID as f64;
    let eval = |k: f64| alpha_function(k.clamp(0.0, kmax), p).unwrap_or(0.0);
    let i = (0..=ALPHA_GRID)
        .map(|i| (i, eval(i as f64 * h)))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
        .0;
    let (mut lo, mut hi) = ((i as f64 - 1.0).max(0.0) * h, ((i + 1) as f64 * h).min(kmax));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    while hi - lo > GOLDEN_TOLERANCE {
        if f1 < f2 {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + phi * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - phi * (hi - lo);
            f1 = eval(x1);
        }
    }
    let (k, alpha) = [(i as f64 * h, eval(i as f64 * h)), ((lo + hi) / 2.0, eval((lo + hi) / 2.0))]
        .into_iter()
        .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let mut r = p.report("alpha_sup", alpha.log2()).with_extra("kprime_max", kmax);
    r.base = alpha;
    r.argmax = Some(vec![k]);
    r.grid = Some(ALPHA_GRID);
    r.tolerance = Some(GOLDEN_TOLERANCE);
    r.feasible = Some(alpha < 1.0);
    Ok(r)
}

fn xprime_log2(c: f64, a: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&a) {
        return Err(Error::Domain(format!("a = {a} must lie in [0, 1/2)")));
    }
    Ok(entropy_unchecked(c) + c * ((3.0 - 2.0 * a) / (1.0 - 2.0 * a)).log2())
}

/// `2^{H(c)} · ((3−2a)/(1−2a))^c` with `a = b(1−c)`.
pub fn xprime_complement_rate(p: &UpperRateParams) -> Result<RateReport> {
    let a = p.a();
    Ok(p.report("xprime", xprime_log2(p.c, a)?).with_extra("a", a))
}

/// Finite-`n` version: `a = b(1−c) + b/n` and `(1/n)·log₂(C(n,⌊cn⌋)·((3−2a)/(1−2a))^{⌊cn⌋})`.
pub fn xprime_complement_rate_at(p: &UpperRateParams, n: usize) -> Result<RateReport> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let a = p.a() + p.b / n as f64;
    if a >= 0.5 {
        return Err(Error::Domain(format!("a = {a} must be below 1/2")));
    }
    let k = (p.c * n as f64).floor();
    let log2 = (log2_binomial(n as u64, k as u64) + k * ((3.0 - 2.0 * a) / (1.0 - 2.0 * a)).log2())
        / n as f64;
    Ok(p.report("xprime_finite", log2).with_extra("a", a).with_extra("n", n as f64))
}

/// `2R·√(e/π)`.
pub fn blichfeldt_rate(r: f64) -> Result<RateReport> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    Ok(RateReport::new("blichfeldt", (2.0 * r * (E / PI).sqrt()).log2()).param("R", r))
}

/// `(1/n)·ln((2R)ⁿ / (n!·(2n)^{−n/2}·vol(Bₙ)))`.
pub fn blichfeldt_finite_log(r: f64, n: usize) -> f64 {
    let nf = n as f64;
    (nf * (2.0 * r).ln() - ln_gamma(nf + 1.0) + nf / 2.0 * (2.0 * nf).ln() - ln_ball_volume(n)) / nf
}

/// Larger of the two exponents; requires `α < 1`.
pub fn upper_bound_rate(p: &UpperRateParams) -> Result<RateReport> {
    let alpha = match alpha_sup(p) {
        Ok(r) => r.base,
        Err(Error::EmptyCapInterval) => 0.0,
        Err(e) => return Err(e),
    };
    if alpha >= 1.0 {
        return Err(Error::BlichfeldtInfeasible { alpha });
    }
    let xp = xprime_complement_rate(p)?;
    let bl = blichfeldt_rate(p.r)?;
    let mut r = p
        .report("upper", xp.value.max(bl.value))
        .with_extra("alpha", alpha)
        .with_extra("xprime_base", xp.base)
        .with_extra("blichfeldt_base", bl.base);
    r.feasible = Some(true);
    Ok(r)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRanges {
    pub b: (f64, f64, usize),
    pub c: (f64, f64, usize),
    pub r: (f64, f64, usize),
}

impl Default for SweepRanges {
    fn default() -> Self {
        Self {
            b: (0.30, 0.37, 15),
            c: (0.26, 0.33, 15),
            r: (1.52, 1.62, 21),
        }
    }
}

fn linspace((lo, hi, steps): (f64, f64, usize)) -> Vec<f64> {
    if steps <= 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub b: f64,
    pub c: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub a: f64,
    pub xprime_base: f64,
    pub blichfeldt_base: f64,
    pub alpha: f64,
    pub feasible: bool,
    pub upper_base: Option<f64>,
}

/// One row per grid point, in `b`, `c`, `R` order.
pub fn upper_sweep(ranges: &SweepRanges) -> Result<Vec<SweepRow>> {
    let mut triples = Vec::new();
    for b in linspace(ranges.b) {
        for c in linspace(ranges.c) {
            for r in linspace(ranges.r) {
                triples.push(UpperRateParams::new(b, c, r)?);
            }
        }
    }
    triples
        .par_iter()
        .map(|p| {
            let alpha = match alpha_sup(p) {
                Ok(r) => r.base,
                Err(Error::EmptyCapInterval) => 0.0,
                Err(e) => return Err(e),
            };
            let xp = xprime_complement_rate(p)?.base;
            let bl = blichfeldt_rate(p.r)?.base;
            let feasible = alpha < 1.0;
            Ok(SweepRow {
                b: p.b,
                c: p.c,
                r: p.r,
                a: p.a(),
                xprime_base: xp,
                blichfeldt_base: bl,
                alpha,
                feasible,
                upper_base: feasible.then_some(xp.max(bl)),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_endpoints() {
        let p = UpperRateParams::standard();
        let kmax = p.kprime_max().unwrap();
        assert!(alpha_function(kmax, &p).unwrap().abs() < 1e-6);
        let at0 = (1.0 - p.c).exp2() * (1.0 - 2.0 * (p.r - 1.0).powi(2)).sqrt();
        assert!((alpha_function(0.0, &p).unwrap() - at0).abs() < 1e-12);
        assert!(alpha_function(kmax + 0.01, &p).is_err());
        assert!(alpha_function(-0.01, &p).is_err());
    }

    #[test]
    fn alpha_sup_standard_params() {
        let r = alpha_sup(&UpperRateParams::standard()).unwrap();
        assert!(r.base < 1.0 && r.feasible == Some(true));
        // tight: the supremum sits just under 1
        assert!(r.base > 0.9999);
        let k = r.argmax.unwrap()[0];
        assert!((k - 0.0237).abs() < 1e-3);
    }

    #[test]
    fn alpha_sup_extremes() {
        let near = UpperRateParams::new(0.334, 0.296, 1.70).unwrap();
        let r = alpha_sup(&near).unwrap();
        let at0 = alpha_function(0.0, &near).unwrap();
        assert!((r.base - at0).abs() < 0.05);
        let wide = UpperRateParams::new(0.334, 0.296, 1.2).unwrap();
        assert_eq!(alpha_sup(&wide).unwrap().feasible, Some(false));
        let empty = UpperRateParams::new(0.334, 0.296, 1.71).unwrap();
        assert!(matches!(alpha_sup(&empty), Err(Error::EmptyCapInterval)));
    }

    #[test]
    fn xprime_values() {
        let r = xprime_complement_rate(&UpperRateParams::standard()).unwrap();
        assert!((r.base - 2.9161).abs() < 2e-3);
        let small = UpperRateParams::new(0.334, 1e-9, 1.5).unwrap();
        assert!((xprime_complement_rate(&small).unwrap().base - 1.0).abs() < 1e-6);
        let other = UpperRateParams::new(0.30, 0.296, 1.5675).unwrap();
        assert!((xprime_complement_rate(&other).unwrap().base - r.base).abs() > 1e-3);
        let bad = UpperRateParams { b: 0.9, c: 0.1, r: 1.5 };
        assert!(xprime_complement_rate(&bad).is_err());
    }

    #[test]
    fn xprime_finite_approaches_limit() {
        let p = UpperRateParams::standard();
        let limit = xprime_complement_rate(&p).unwrap().value;
        let far = xprime_complement_rate_at(&p, 100_000).unwrap().value;
        assert!((far - limit).abs() < 1e-3);
    }

    #[test]
    fn blichfeldt_values() {
        assert!((blichfeldt_rate(1.5675).unwrap().base - 2.91616).abs() < 1e-4);
        let unit = 0.5 * (PI / E).sqrt();
        assert!((blichfeldt_rate(unit).unwrap().base - 1.0).abs() < 1e-12);
        let r = 1.5675;
        let limit = (2.0 * r * (E / PI).sqrt()).ln();
        assert!((blichfeldt_finite_log(r, 2000) - limit).abs() < 5e-3);
        assert!(blichfeldt_rate(0.0).is_err());
    }

    #[test]
    fn upper_rate_standard_params() {
        let r = upper_bound_rate(&UpperRateParams::standard()).unwrap();
        assert!((r.base - 2.9162).abs() < 1e-3);
        assert!(r.base < 3.0);
        let wide = UpperRateParams::new(0.334, 0.296, 1.2).unwrap();
        assert!(matches!(upper_bound_rate(&wide), Err(Error::BlichfeldtInfeasible { .. })));
    }

    #[test]
    fn sweep_finds_no_improvement() {
        let ranges = SweepRanges {
            b: (0.30, 0.37, 8),
            c: (0.26, 0.33, 8),
            r: (1.52, 1.62, 11),
        };
        let rows = upper_sweep(&ranges).unwrap();
        assert_eq!(rows.len(), 8 * 8 * 11);
        let reference = upper_bound_rate(&UpperRateParams::standard()).unwrap().base;
        let best = rows.iter().filter_map(|r| r.upper_base).fold(f64::INFINITY, f64::min);
        assert!(best > reference - 1e-3);
    }
}
