//! Rate functions looked up by name at run time.

use std::collections::BTreeMap;

use super::lower::{f_rate, lower_bound_rate, sup_f, LowerRateParams, LowerRateVars, DEFAULT_GRID};
use super::upper::{
    alpha_sup, blichfeldt_finite_log, blichfeldt_rate, upper_bound_rate, xprime_complement_rate,
    xprime_complement_rate_at, UpperRateParams,
};
use super::RateReport;
use crate::error::{Error, Result};

/// Named numeric arguments; missing names fall back to the defaults below.
#[derive(Clone, Debug, Default)]
pub struct RateArgs(BTreeMap<String, f64>);

impl RateArgs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, key: &str, v: f64) -> Self {
        self.0.insert(key.to_string(), v);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    fn or(&self, key: &str, default: f64) -> f64 {
        self.get(key).unwrap_or(default)
    }

    fn lower(&self) -> Result<LowerRateParams> {
        let d = LowerRateParams::standard();
        LowerRateParams::new(self.or("z1", d.z1), self.or("z2", d.z2))
    }

    fn upper(&self) -> Result<UpperRateParams> {
        let d = UpperRateParams::standard();
        UpperRateParams::new(self.or("b", d.b), self.or("c", d.c), self.or("R", d.r))
    }

    fn grid(&self) -> Result<usize> {
        let g = self.or("grid", DEFAULT_GRID as f64);
        if g < 1.0 || g.fract() != 0.0 {
            return Err(Error::Domain(format!("grid must be a positive integer, got {g}")));
        }
        Ok(g as usize)
    }

    fn n(&self) -> Result<Option<usize>> {
        match self.get("n") {
            None => Ok(None),
            Some(n) if n >= 1.0 && n.fract() == 0.0 => Ok(Some(n as usize)),
            Some(n) => Err(Error::Domain(format!("n must be a positive integer, got {n}"))),
        }
    }
}

pub trait RateFunction: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Argument names this function reads.
    fn args(&self) -> &'static [&'static str];
    fn evaluate(&self, args: &RateArgs) -> Result<RateReport>;
}

pub struct RateRegistry {
    entries: BTreeMap<&'static str, Box<dyn RateFunction>>,
}

impl Default for RateRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(F));
        r.register(Box::new(SupF));
        r.register(Box::new(Lower));
        r.register(Box::new(Alpha));
        r.register(Box::new(Xprime));
        r.register(Box::new(Blichfeldt));
        r.register(Box::new(Upper));
        r
    }
}

impl RateRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, f: Box<dyn RateFunction>) {
        self.entries.insert(f.name(), f);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn get(&self, name: &str) -> Result<&dyn RateFunction> {
        self.entries
            .get(name)
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownName {
                name: name.to_string(),
                known: self.names().collect::<Vec<_>>().join(", "),
            })
    }

    pub fn evaluate(&self, name: &str, args: &RateArgs) -> Result<RateReport> {
        self.get(name)?.evaluate(args)
    }
}

struct F;

impl RateFunction for F {
    fn name(&self) -> &'static str {
        "f"
    }
    fn description(&self) -> &'static str {
        "ball-size exponent f(y1, y2; z1, z2); -inf when infeasible"
    }
    fn args(&self) -> &'static [&'static str] {
        &["y1", "y2", "z1", "z2"]
    }
    fn evaluate(&self, args: &RateArgs) -> Result<RateReport> {
        let p = args.lower()?;
        let v = LowerRateVars {
            y1: args.or("y1", 0.0),
            y2: args.or("y2", 0.0),
        };
        let mut r = RateReport::new("f", f_rate(v, p))
            .param("y1", v.y1)
            .param("y2", v.y2)
            .param("z1", p.z1)
            .param("z2", p.z2);
        r.feasible = Some(r.value.is_finite());
        Ok(r)
    }
}

struct SupF;

impl RateFunction for SupF {
    fn name(&self) -> &'static str {
        "sup-f"
    }
    fn description(&self) -> &'static str {
        "supremum of f over the feasible triangle"
    }
    fn args(&self) -> &'static [&'static str] {
        &["z1", "z2", "grid"]
    }
    fn evaluate(&self, args: &RateArgs) -> Result<RateReport> {
        sup_f(args.lower()?, args.grid()?)
    }
}

struct Lower;

impl RateFunction for Lower {
    fn name(&self) -> &'static str {
        "lower"
    }
    fn description(&self) -> &'static str {
        "lower-bound exponent from the {0,±1,±2} code"
    }
    fn args(&self) -> &'static [&'static str] {
        &["z1", "z2", "grid"]
    }
    fn evaluate(&self, args: &RateArgs) -> Result<RateReport> {
        lower_bound_rate(args.lower()?, args.grid()?)
    }
}

struct Alpha;

impl RateFunction for Alpha {
    fn name(&self) -> &'static str {
        "alpha"
    }
    fn description(&self) -> &'static str {
        "supremum of the cap factor alpha; feasible iff below 1"
    }
    fn args(&self) -> &'static [&'static str] {
        &["b", "c", "R"]
    }
    fn evaluate(&self, args: &RateArgs) -> Result<RateReport> {
        alpha_sup(&args.upper()?)
    }
}

struct Xprime;

impl RateFunction for Xprime {
    fn name(&self) -> &'static str {
        "xprime"
    }
    fn description(&self) -> &'static str {
        "exponent of the points with a large support part; finite-n form when n is given"
    }
    fn args(&self) -> &'static [&'static str] {
        &["b", "c", "R", "n"]
    }
    fn evaluate(&self, args: &RateArgs) -> Result<RateReport> {
        let p = args.upper()?;
        match args.n()? {
            Some(n) => xprime_complement_rate_at(&p, n),
            None => xprime_complement_rate(&p),
        }
    }
}

struct Blichfeldt;

impl RateFunction for Blichfeldt {
    fn name(&self) -> &'static str {
        "blichfeldt"
    }
    fn description(&self) -> &'static str {
        "volume exponent 2R*sqrt(e/pi); finite-n quotient when n is given"
    }
    fn args(&self) -> &'static [&'static str] {
        &["R", "n"]
    }
    fn evaluate(&self, args: &RateArgs) -> Result<RateReport> {
        let r = args.or("R", UpperRateParams::standard().r);
        let report = blichfeldt_rate(r)?;
        Ok(match args.n()? {
            Some(n) => report
                .with_extra("n", n as f64)
                .with_extra("finite_ln_per_n", blichfeldt_finite_log(r, n)),
            None => report,
        })
    }
}

struct Upper;

impl RateFunction for Upper {
    fn name(&self) -> &'static str {
        "upper"
    }
    fn description(&self) -> &'static str {
        "upper-bound exponent, the larger of xprime and blichfeldt"
    }
    fn args(&self) -> &'static [&'static str] {
        &["b", "c", "R"]
    }
    fn evaluate(&self, args: &RateArgs) -> Result<RateReport> {
        upper_bound_rate(&args.upper()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_lookup() {
        let reg = RateRegistry::default();
        let names: Vec<_> = reg.names().collect();
        assert_eq!(names, ["alpha", "blichfeldt", "f", "lower", "sup-f", "upper", "xprime"]);
        assert!(matches!(reg.get("nope"), Err(Error::UnknownName { .. })));
    }

    #[test]
    fn defaults_and_overrides() {
        let reg = RateRegistry::default();
        let bl = reg.evaluate("blichfeldt", &RateArgs::new()).unwrap();
        assert!((bl.base - 2.91616).abs() < 1e-4);
        let f = reg
            .evaluate("f", &RateArgs::new().set("y1", 0.01728).set("y2", 0.04327))
            .unwrap();
        assert!((f.value - 1.17029).abs() < 1e-4);
        assert!(reg.evaluate("lower", &RateArgs::new().set("grid", 0.5)).is_err());
        assert!(reg.evaluate("lower", &RateArgs::new().set("z2", 0.2)).is_err());
        let fin = reg.evaluate("xprime", &RateArgs::new().set("n", 1000.0)).unwrap();
        assert_eq!(fin.function, "xprime_finite");
    }
}
