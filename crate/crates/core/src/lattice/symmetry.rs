//! Signed permutations of coordinates (the symmetry group of the
//! cross-polytope, of order `2ⁿ·n!`) and equivalence search.

use std::collections::HashSet;

use num_traits::Signed;
use serde::{Serialize, Serializer};

use super::{minimal_vectors, Lattice};
use crate::error::{Error, Result};
use crate::exact::RationalVector;

/// Largest dimension for which the exhaustive equivalence search runs.
pub const EQUIVALENCE_SEARCH_LIMIT: usize = 6;

/// `(σx)_i = signs_i · x_{perm_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: signs.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Domain(format!("{perm:?} is not a permutation")));
            }
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::Domain("signs must be ±1".into()));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim())
    }

    pub fn apply(&self, x: &RationalVector) -> RationalVector {
        assert_eq!(x.dim(), self.dim(), "dimension mismatch");
        RationalVector::new(
            self.perm
                .iter()
                .zip(&self.signs)
                .map(|(&p, &s)| if s < 0 { -x[p].clone() } else { x[p].clone() })
                .collect(),
        )
    }

    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        Self { perm, signs }
    }

    /// `σ(L)`, spanned by the images of a basis.
    pub fn apply_lattice(&self, lattice: &Lattice) -> Result<Lattice> {
        Lattice::from_basis(lattice.basis().iter().map(|b| self.apply(b)).collect())
    }
}

impl Serialize for SignedPermutation {
    /// `{"perm": [1-based], "signs": [±1]}`.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            perm: Vec<usize>,
            signs: &'a [i8],
        }
        Wire {
            perm: self.perm.iter().map(|p| p + 1).collect(),
            signs: &self.signs,
        }
        .serialize(s)
    }
}

/// Lexicographic successor; false when `p` was the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Finds `σ` with `σ(b) = a`, or `None` when the lattices are inequivalent.
///
/// Candidates are tried in lexicographic permutation order, sign patterns in
/// binary order, so the answer is deterministic. A candidate must carry the
/// minimal vectors of `b` onto those of `a` and is then confirmed by mutual
/// basis membership.
pub fn find_signed_permutation_equivalence(
    a: &Lattice,
    b: &Lattice,
) -> Result<Option<SignedPermutation>> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.dim(),
        });
    }
    if n > EQUIVALENCE_SEARCH_LIMIT {
        return Err(Error::SearchInfeasible {
            n,
            limit: EQUIVALENCE_SEARCH_LIMIT,
        });
    }
    if a.determinant().abs() != b.determinant().abs() {
        return Ok(None);
    }
    let (ma, mb) = (minimal_vectors(a)?, minimal_vectors(b)?);
    if ma.minimum() != mb.minimum()
        || ma.len() != mb.len()
        || ma.support_sizes() != mb.support_sizes()
    {
        return Ok(None);
    }
    let targets: HashSet<&RationalVector> = ma.vectors().iter().collect();

    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        for mask in 0u32..(1 << n) {
            let signs = (0..n)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect();
            let sigma = SignedPermutation {
                perm: perm.clone(),
                signs,
            };
            if !mb.vectors().iter().all(|v| targets.contains(&sigma.apply(v))) {
                continue;
            }
            let forward = b.basis().iter().all(|v| a.member(&sigma.apply(v)).unwrap_or(false));
            let inv = sigma.inverse();
            let backward = a.basis().iter().all(|v| b.member(&inv.apply(v)).unwrap_or(false));
            if forward && backward {
                return Ok(Some(sigma));
            }
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}
