//! Classes of minimal vectors in `L/2L`.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use super::{Lattice, MinimalVectorSet};
use crate::error::{Error, Result};
use crate::exact::{rat, support, RationalVector};

#[derive(Clone, Debug, Serialize)]
pub struct Mod2Class {
    /// Basis coefficients mod 2.
    pub residue: Vec<u8>,
    pub members: Vec<RationalVector>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mod2Classes {
    pub representatives: usize,
    /// `2ⁿ − 1`.
    pub nonzero_classes: usize,
    pub classes: Vec<Mod2Class>,
}

impl Mod2Classes {
    pub fn occupied(&self) -> usize {
        self.classes.len()
    }

    /// Number of occupied classes holding exactly `size` representatives.
    pub fn classes_of_size(&self, size: usize) -> usize {
        self.classes.iter().filter(|c| c.members.len() == size).count()
    }

    /// Checks the halving argument on every same-class pair: `(x±y)/2 ∈ L`,
    /// and for minimal `x, y` the supports are disjoint.
    pub fn check_pairs(&self, lattice: &Lattice) -> Result<Vec<PairCheck>> {
        let half = rat(1, 2);
        let mut out = Vec::new();
        for class in &self.classes {
            for (i, x) in class.members.iter().enumerate() {
                for y in &class.members[i + 1..] {
                    let sum_half = (x + y).scale(&half);
                    let diff_half = (x - y).scale(&half);
                    out.push(PairCheck {
                        x: x.clone(),
                        y: y.clone(),
                        halves_in_lattice: lattice.member(&sum_half)? && lattice.member(&diff_half)?,
                        disjoint_supports: support(x).is_disjoint(&support(y)),
                    });
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub x: RationalVector,
    pub y: RationalVector,
    pub halves_in_lattice: bool,
    pub disjoint_supports: bool,
}

impl PairCheck {
    pub fn holds(&self) -> bool {
        self.halves_in_lattice && self.disjoint_supports
    }
}

/// Groups one representative per `±` pair of `set` by its coset in `L/2L`.
pub fn mod_2l_classes(lattice: &Lattice, set: &MinimalVectorSet) -> Result<Mod2Classes> {
    let n = lattice.dim();
    if set.lattice().dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: set.lattice().dim(),
        });
    }
    let reps = set.representatives();
    let mut classes: BTreeMap<Vec<u8>, Vec<RationalVector>> = BTreeMap::new();
    for v in &reps {
        let coeffs = lattice.coefficients(v)?;
        if coeffs.iter().any(|c| !c.is_integer()) {
            return Err(Error::Domain(format!("{v} is not in the lattice")));
        }
        let residue = coeffs
            .iter()
            .map(|c| u8::from(c.to_integer().is_odd()))
            .collect();
        classes.entry(residue).or_default().push(v.clone());
    }
    Ok(Mod2Classes {
        representatives: reps.len(),
        nonzero_classes: (1usize << n) - 1,
        classes: classes
            .into_iter()
            .map(|(residue, members)| Mod2Class { residue, members })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{minimal_vectors, named_lattice};

    fn classes(key: &str, n: Option<usize>) -> (Lattice, Mod2Classes) {
        let l = named_lattice(key, n).unwrap();
        let set = minimal_vectors(&l).unwrap();
        let c = mod_2l_classes(&l, &set).unwrap();
        (l, c)
    }

    #[test]
    fn half_d4_plus_classes() {
        let (l, c) = classes("half_d4_plus", None);
        assert_eq!(c.representatives, 20);
        assert_eq!(c.nonzero_classes, 15);
        // e_i − e_j = 2·(½(e_i − e_j)) ∈ 2L, so all four unit vectors share a class
        assert_eq!(c.occupied(), 11);
        assert_eq!(c.classes_of_size(4), 1);
        assert_eq!(c.classes_of_size(2), 6);
        assert_eq!(c.classes_of_size(1), 4);
        // same class iff (x − y)/2 ∈ L, checked directly on the representatives
        let reps: Vec<_> = c.classes.iter().flat_map(|k| k.members.iter().map(move |m| (k, m))).collect();
        for (ka, x) in &reps {
            for (kb, y) in &reps {
                let half = (*x - *y).scale(&rat(1, 2));
                assert_eq!(l.member(&half).unwrap(), ka.residue == kb.residue);
            }
        }
        assert!(c.check_pairs(&l).unwrap().iter().all(PairCheck::holds));
    }

    #[test]
    fn z4_classes() {
        let (_, c) = classes("zn", Some(4));
        assert_eq!(c.representatives, 4);
        assert_eq!(c.occupied(), 4);
        assert!(c.classes.iter().all(|k| k.members.len() == 1));
    }

    #[test]
    fn l_prime_pairs_have_disjoint_support() {
        let (l, c) = classes("l_prime", None);
        assert_eq!(c.representatives, 10);
        let checks = c.check_pairs(&l).unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(PairCheck::holds));
    }
}
