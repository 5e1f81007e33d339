//! Full-rank rational lattices.
//!
//! A [`Lattice`] stores its generators as the rows of an `n×n` basis matrix
//! together with the exact inverse, so that `v ∈ L` iff `v·B⁻¹ ∈ ℤⁿ`.

mod catalog;
mod covering;
mod enumerate;
mod quotient;
mod symmetry;

pub use catalog::{dn_plus_closure_check, named_lattice, LatticeCatalog, LatticeEntry};
pub use covering::{
    covering_radius_h2sum, h2_sum_h2, is_deep_hole_h2sum, CertificateStep, CoveringCertificate,
    DeepHoleFamily, DeepHoleReport, FamilyKind,
};
pub use enumerate::{closest_point_l1, l1_minimum, minimal_vectors, ClosestPoint, MinimalVectorSet};
pub use quotient::{mod_2l_classes, Mod2Class, Mod2Classes, PairCheck};
pub use symmetry::{find_signed_permutation_equivalence, SignedPermutation, EQUIVALENCE_SEARCH_LIMIT};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Rational, RationalVector};

#[derive(Clone, Debug)]
pub struct Lattice {
    basis: Vec<RationalVector>,
    inverse: Vec<Vec<Rational>>,
}

impl PartialEq for Lattice {
    /// Lattice equality (same point set), not basis equality.
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.contains_lattice(other) && other.contains_lattice(self)
    }
}

impl Lattice {
    /// Builds a lattice from `n` basis rows of length `n`.
    pub fn from_basis(rows: Vec<RationalVector>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Dimension { expected: 1, got: 0 });
        }
        if let Some(bad) = rows.iter().find(|r| r.dim() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: bad.dim(),
            });
        }
        let inverse = invert(&rows)?;
        Ok(Self {
            basis: rows,
            inverse,
        })
    }

    /// Builds the lattice spanned by an arbitrary generating set of rank `n`,
    /// using the Hermite normal form of the integer-scaled generators.
    pub fn from_generators(generators: &[RationalVector]) -> Result<Self> {
        let n = generators
            .first()
            .map(RationalVector::dim)
            .ok_or(Error::Dimension { expected: 1, got: 0 })?;
        if let Some(bad) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: bad.dim(),
            });
        }
        let denom = generators
            .iter()
            .fold(BigInt::one(), |acc, g| acc.lcm(&g.denominator_lcm()));
        let scaled: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|c| (c * Rational::from_integer(denom.clone())).to_integer())
                    .collect()
            })
            .collect();
        let hnf = hermite_normal_form(scaled, n);
        if hnf.len() < n {
            return Err(Error::DegenerateBasis);
        }
        let rows = hnf
            .into_iter()
            .take(n)
            .map(|r| {
                RationalVector::new(
                    r.into_iter()
                        .map(|c| Rational::new(c, denom.clone()))
                        .collect(),
                )
            })
            .collect();
        Self::from_basis(rows)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RationalVector] {
        &self.basis
    }

    pub fn inverse(&self) -> &[Vec<Rational>] {
        &self.inverse
    }

    /// Coordinates of `v` in the basis: `u = v·B⁻¹`.
    pub fn coefficients(&self, v: &RationalVector) -> Result<Vec<Rational>> {
        self.check_dim(v)?;
        let n = self.dim();
        Ok((0..n)
            .map(|i| {
                (0..n).fold(Rational::zero(), |acc, j| acc + &v[j] * &self.inverse[j][i])
            })
            .collect())
    }

    /// `Σ u_i b_i` for integer coefficients.
    pub fn combine(&self, coeffs: &[i64]) -> RationalVector {
        let mut acc = RationalVector::zero(self.dim());
        for (c, row) in coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                acc = &acc + &row.scale(&Rational::from_integer(BigInt::from(*c)));
            }
        }
        acc
    }

    pub fn member(&self, v: &RationalVector) -> Result<bool> {
        Ok(self.coefficients(v)?.iter().all(|c| c.is_integer()))
    }

    /// Exact determinant of the basis matrix (up to sign, the covolume).
    pub fn determinant(&self) -> Rational {
        determinant(&self.basis)
    }

    /// True when every basis vector of `other` lies in `self`.
    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other
            .basis
            .iter()
            .all(|b| self.member(b).unwrap_or(false))
    }

    /// The lattice `k·L`.
    pub fn scaled(&self, k: &Rational) -> Result<Self> {
        Self::from_basis(self.basis.iter().map(|b| b.scale(k)).collect())
    }

    /// Lattice spanned by `self` together with extra vectors.
    pub fn extended(&self, extra: &[RationalVector]) -> Result<Self> {
        let mut gens = self.basis.clone();
        gens.extend_from_slice(extra);
        Self::from_generators(&gens)
    }

    /// `L_a ⊕ L_b` on the concatenated coordinates.
    pub fn direct_sum(&self, other: &Lattice) -> Result<Self> {
        let (na, nb) = (self.dim(), other.dim());
        let pad = |v: &RationalVector, before: usize, after: usize| {
            let mut c = vec![Rational::zero(); before];
            c.extend(v.iter().cloned());
            c.extend(std::iter::repeat_n(Rational::zero(), after));
            RationalVector::new(c)
        };
        let rows = self
            .basis
            .iter()
            .map(|b| pad(b, 0, nb))
            .chain(other.basis.iter().map(|b| pad(b, na, 0)))
            .collect();
        Self::from_basis(rows)
    }

    /// Largest absolute inverse entry in column `i`: `|u_i| ≤ ‖v‖₁ · colmax_i`
    /// for `u = v·B⁻¹`.
    pub(crate) fn inverse_column_max(&self) -> Vec<Rational> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.inverse[j][i].abs())
                    .max()
                    .unwrap_or_else(Rational::zero)
            })
            .collect()
    }

    fn check_dim(&self, v: &RationalVector) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(())
    }

    pub fn to_file(&self) -> LatticeFile {
        LatticeFile {
            n: self.dim(),
            basis: self.basis.clone(),
        }
    }
}

/// On-disk form: `{"n": int, "basis": [["p/q", …], …]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeFile {
    pub n: usize,
    pub basis: Vec<RationalVector>,
}

impl LatticeFile {
    pub fn into_lattice(self) -> Result<Lattice> {
        if self.basis.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: self.basis.len(),
            });
        }
        Lattice::from_basis(self.basis)
    }
}

/// Integer rows `D·B` for a common denominator `D`, as machine integers.
pub(crate) fn scaled_integer_rows(rows: &[RationalVector], denom: &BigInt) -> Result<Vec<Vec<i128>>> {
    let d = Rational::from_integer(denom.clone());
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|c| {
                    (c * &d)
                        .to_integer()
                        .to_i64()
                        .map(i128::from)
                        .ok_or(Error::Overflow)
                })
                .collect()
        })
        .collect()
}

fn invert(rows: &[RationalVector]) -> Result<Vec<Vec<Rational>>> {
    let n = rows.len();
    let mut a: Vec<Vec<Rational>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::DegenerateBasis)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
                let t = &f * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Ok(inv)
}

fn determinant(rows: &[RationalVector]) -> Rational {
    let n = rows.len();
    let mut a: Vec<Vec<Rational>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            let (top, rest) = a.split_at_mut(r);
            for (x, p) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= &f * p;
            }
        }
    }
    det
}

/// Row-style Hermite normal form; returns the nonzero rows (upper triangular,
/// positive pivots, entries above each pivot reduced into `[0, pivot)`).
fn hermite_normal_form(mut a: Vec<Vec<BigInt>>, n: usize) -> Vec<Vec<BigInt>> {
    let m = a.len();
    let mut p = 0;
    for col in 0..n {
        if p >= m {
            break;
        }
        loop {
            let best = (p..m)
                .filter(|&r| !a[r][col].is_zero())
                .min_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
            let Some(best) = best else { break };
            a.swap(p, best);
            let mut clean = true;
            for r in p + 1..m {
                if a[r][col].is_zero() {
                    continue;
                }
                let q = a[r][col].div_floor(&a[p][col]);
                let pivot_row = a[p].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !a[r][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[p][col].is_zero() {
            continue;
        }
        if a[p][col].is_negative() {
            for x in a[p].iter_mut() {
                *x = -x.clone();
            }
        }
        for r in 0..p {
            let q = a[r][col].div_floor(&a[p][col]);
            if q.is_zero() {
                continue;
            }
            let pivot_row = a[p].clone();
            for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                *x -= &q * y;
            }
        }
        p += 1;
    }
    a.truncate(p);
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn v(c: &[(i64, i64)]) -> RationalVector {
        RationalVector::from_fracs(c)
    }

    #[test]
    fn identity_is_zn() {
        let rows = (0..4)
            .map(|i| {
                let mut c = [0; 4];
                c[i] = 1;
                RationalVector::from_ints(&c)
            })
            .collect();
        let z4 = Lattice::from_basis(rows).unwrap();
        assert_eq!(z4.determinant(), int(1));
        assert!(z4.member(&RationalVector::from_ints(&[3, -1, 0, 7])).unwrap());
        assert!(!z4.member(&v(&[(1, 2), (0, 1), (0, 1), (0, 1)])).unwrap());
    }

    #[test]
    fn d4_basis() {
        let rows = vec![
            RationalVector::from_ints(&[1, 1, 0, 0]),
            RationalVector::from_ints(&[1, -1, 0, 0]),
            RationalVector::from_ints(&[0, 1, 1, 0]),
            RationalVector::from_ints(&[0, 0, 1, 1]),
        ];
        for r in &rows {
            let s: Rational = r.iter().sum();
            assert!(s.to_integer().is_even());
        }
        let d4 = Lattice::from_basis(rows).unwrap();
        assert_eq!(d4.determinant().abs(), int(2));
        assert!(!d4.member(&RationalVector::from_ints(&[1, 0, 0, 0])).unwrap());
        assert!(d4.member(&RationalVector::from_ints(&[2, 0, 0, 0])).unwrap());
    }

    #[test]
    fn h2_basis_and_errors() {
        let h2 = Lattice::from_basis(vec![v(&[(1, 1), (0, 1)]), v(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(h2.determinant(), rat(1, 2));
        assert!(h2.member(&v(&[(1, 2), (-1, 2)])).unwrap());

        let singular = Lattice::from_basis(vec![v(&[(1, 1), (1, 1)]), v(&[(2, 1), (2, 1)])]);
        assert!(matches!(singular, Err(Error::DegenerateBasis)));
        let ragged = Lattice::from_basis(vec![v(&[(1, 1), (0, 1)]), v(&[(1, 1)])]);
        assert!(matches!(ragged, Err(Error::Dimension { .. })));
        assert!(matches!(
            h2.member(&RationalVector::zero(3)),
            Err(Error::Dimension { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn inverse_is_exact() {
        let b = vec![v(&[(1, 8), (-3, 8), (1, 8), (-3, 8)]), v(&[(1, 1), (0, 1), (0, 1), (0, 1)]),
                     v(&[(1, 2), (1, 2), (0, 1), (0, 1)]), v(&[(0, 1), (0, 1), (1, 2), (1, 2)])];
        let l = Lattice::from_basis(b.clone()).unwrap();
        for (i, row) in b.iter().enumerate() {
            let u = l.coefficients(row).unwrap();
            for (j, c) in u.iter().enumerate() {
                assert_eq!(*c, if i == j { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn generators_give_same_lattice() {
        // ℤ² plus (1/2,1/2) is H₂
        let gens = vec![
            RationalVector::from_ints(&[1, 0]),
            RationalVector::from_ints(&[0, 1]),
            v(&[(1, 2), (1, 2)]),
        ];
        let a = Lattice::from_generators(&gens).unwrap();
        let h2 = Lattice::from_basis(vec![v(&[(1, 1), (0, 1)]), v(&[(1, 2), (1, 2)])]).unwrap();
        assert_eq!(a, h2);
        assert_eq!(a.determinant().abs(), rat(1, 2));
        let dependent = vec![RationalVector::from_ints(&[1, 1]), RationalVector::from_ints(&[2, 2])];
        assert!(matches!(Lattice::from_generators(&dependent), Err(Error::DegenerateBasis)));
    }

    #[test]
    fn lattice_file_round_trip() {
        let h2 = Lattice::from_basis(vec![v(&[(1, 1), (0, 1)]), v(&[(1, 2), (1, 2)])]).unwrap();
        let json = serde_json::to_string(&h2.to_file()).unwrap();
        assert_eq!(json, r#"{"n":2,"basis":[["1","0"],["1/2","1/2"]]}"#);
        let back: LatticeFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_lattice().unwrap(), h2);
    }
}
