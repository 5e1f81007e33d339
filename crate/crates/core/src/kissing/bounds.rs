use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::Serialize;

use crate::error::{Error, Result};

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u8);
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `3ⁿ − 1`.
pub fn hadwiger_bound(n: usize) -> Result<BigUint> {
    check_dim(n)?;
    Ok(BigUint::from(3u8).pow(n) - 1u8)
}

/// `C(n,k)·3ᵏ`.
pub fn support_size_bound(n: usize, k: usize) -> Result<BigUint> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    Ok(binomial(n as u64, k as u64) * BigUint::from(3u8).pow(k))
}

/// `12(2ⁿ − 1)`.
pub fn lattice_kissing_upper_bound(n: usize) -> Result<BigUint> {
    check_dim(n)?;
    Ok((BigUint::from(2u8).pow(n) - 1u8) * 12u8)
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallSupportRow {
    pub n: usize,
    #[serde(serialize_with = "big_str")]
    pub small_support_sum: BigUint,
    #[serde(serialize_with = "big_str")]
    pub two_pow_minus_one: BigUint,
    #[serde(serialize_with = "big_str")]
    pub lattice_upper: BigUint,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallSupportScan {
    pub rows: Vec<SmallSupportRow>,
    /// Least `n₀` with the inequality holding on all of `n₀..=max_n`.
    pub n0: Option<usize>,
}

fn big_str<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `Σ_{k=1}^{⌊n/6⌋} C(n,k)3ᵏ < 2ⁿ − 1` for `n = 1..=max_n`.
pub fn small_support_scan(max_n: usize) -> Result<SmallSupportScan> {
    check_dim(max_n)?;
    let mut rows = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        let sum = (1..=n / 6).try_fold(BigUint::from(0u8), |acc, k| {
            support_size_bound(n, k).map(|b| acc + b)
        })?;
        let rhs = BigUint::from(2u8).pow(n) - 1u8;
        rows.push(SmallSupportRow {
            n,
            holds: sum < rhs,
            small_support_sum: sum,
            two_pow_minus_one: rhs,
            lattice_upper: lattice_kissing_upper_bound(n)?,
        });
    }
    let n0 = match rows.iter().rposition(|r| !r.holds) {
        None => Some(1),
        Some(i) if i + 1 < rows.len() => Some(rows[i + 1].n),
        Some(_) => None,
    };
    Ok(SmallSupportScan { rows, n0 })
}
