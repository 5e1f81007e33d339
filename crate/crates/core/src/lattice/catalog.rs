//! Registry of named lattices.
//!
//! Every entry implements [`LatticeEntry`] and is looked up by key at run
//! time (`lattice min-vectors --name l1_prime`). Keys are case-insensitive.
//!
//! | key            | generators                                              |
//! |----------------|---------------------------------------------------------|
//! | `zn`           | standard basis of ℤⁿ                                    |
//! | `dn`           | (1,1,0,…), (1,−1,0,…), (0,1,1,0,…), …, (0,…,0,1,1)       |
//! | `dn_plus`      | `dn` together with (½,…,½); `n` even                    |
//! | `half_d4_plus` | ½·`dn_plus` at n = 4                                    |
//! | `h2`           | (1,0), (½,½)                                            |
//! | `h2_sum_h2`    | `h2` ⊕ `h2`                                              |
//! | `l_prime`      | ℤ⁴, (½,½,0,0), (0,0,½,½), (¼,¼,¼,¼)                     |
//! | `l0`           | `l_prime`, (¼,−¼,0,½)                                   |
//! | `l1`           | `l_prime`, (⅛,−⅜,⅛,−⅜)                                  |
//! | `l1_prime`     | `l_prime`, (⅛,−⅜,⅜,−⅛)                                  |
//!
//! Lattices given by a generating set get the Hermite normal form basis of
//! those generators.

use std::collections::BTreeMap;

use super::covering::{h2, h2_sum_h2};
use super::Lattice;
use crate::error::{Error, Result};
use crate::exact::{rat, RationalVector};

pub trait LatticeEntry: Send + Sync {
    fn key(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Fixed dimension, or `None` when the caller picks `n`.
    fn fixed_dim(&self) -> Option<usize>;
    fn build(&self, n: usize) -> Result<Lattice>;
}

pub struct LatticeCatalog {
    entries: BTreeMap<&'static str, Box<dyn LatticeEntry>>,
}

impl Default for LatticeCatalog {
    fn default() -> Self {
        let mut c = Self::empty();
        c.register(Box::new(Zn));
        c.register(Box::new(Dn));
        c.register(Box::new(DnPlus));
        for f in fixed_entries() {
            c.register(Box::new(f));
        }
        c
    }
}

impl LatticeCatalog {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// Adds an entry, replacing any previous entry with the same key.
    pub fn register(&mut self, entry: Box<dyn LatticeEntry>) {
        self.entries.insert(entry.key(), entry);
    }

    pub fn keys(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn get(&self, name: &str) -> Result<&dyn LatticeEntry> {
        let key = name.to_ascii_lowercase();
        self.entries
            .get(key.as_str())
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownName {
                name: name.to_string(),
                known: self.keys().collect::<Vec<_>>().join(", "),
            })
    }

    pub fn build(&self, name: &str, n: Option<usize>) -> Result<Lattice> {
        let entry = self.get(name)?;
        match (entry.fixed_dim(), n) {
            (Some(d), Some(n)) if d != n => Err(Error::Dimension { expected: d, got: n }),
            (Some(d), _) => entry.build(d),
            (None, Some(n)) if n >= 1 => entry.build(n),
            (None, _) => Err(Error::Domain(format!("lattice {:?} needs a dimension n ≥ 1", entry.key()))),
        }
    }
}

/// Looks `name` up in the default catalog.
pub fn named_lattice(name: &str, n: Option<usize>) -> Result<Lattice> {
    LatticeCatalog::default().build(name, n)
}

fn unit(n: usize, i: usize) -> RationalVector {
    let mut c = vec![0; n];
    c[i] = 1;
    RationalVector::from_ints(&c)
}

fn dn_basis(n: usize) -> Vec<RationalVector> {
    if n == 1 {
        return vec![RationalVector::from_ints(&[2])];
    }
    let mut rows = Vec::with_capacity(n);
    let mut first = vec![0; n];
    first[0] = 1;
    first[1] = 1;
    rows.push(RationalVector::from_ints(&first));
    first[1] = -1;
    rows.push(RationalVector::from_ints(&first));
    for i in 1..n - 1 {
        let mut r = vec![0; n];
        r[i] = 1;
        r[i + 1] = 1;
        rows.push(RationalVector::from_ints(&r));
    }
    rows
}

fn glue(n: usize) -> RationalVector {
    RationalVector::new(vec![rat(1, 2); n])
}

fn dn_lattice(n: usize) -> Result<Lattice> {
    Lattice::from_basis(dn_basis(n))
}

/// Whether `D_n ∪ (D_n + (½,…,½))` is closed under addition. Twice the glue
/// vector is `(1,…,1)`, which lies in `D_n` iff `n` is even.
pub fn dn_plus_closure_check(n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let doubled = &glue(n) + &glue(n);
    dn_lattice(n)?.member(&doubled)
}

struct Zn;

impl LatticeEntry for Zn {
    fn key(&self) -> &'static str {
        "zn"
    }
    fn description(&self) -> &'static str {
        "integer lattice Z^n"
    }
    fn fixed_dim(&self) -> Option<usize> {
        None
    }
    fn build(&self, n: usize) -> Result<Lattice> {
        Lattice::from_basis((0..n).map(|i| unit(n, i)).collect())
    }
}

struct Dn;

impl LatticeEntry for Dn {
    fn key(&self) -> &'static str {
        "dn"
    }
    fn description(&self) -> &'static str {
        "checkerboard lattice D_n: integer vectors with even coordinate sum"
    }
    fn fixed_dim(&self) -> Option<usize> {
        None
    }
    fn build(&self, n: usize) -> Result<Lattice> {
        dn_lattice(n)
    }
}

struct DnPlus;

impl LatticeEntry for DnPlus {
    fn key(&self) -> &'static str {
        "dn_plus"
    }
    fn description(&self) -> &'static str {
        "D_n together with D_n + (1/2,...,1/2); a lattice only for even n"
    }
    fn fixed_dim(&self) -> Option<usize> {
        None
    }
    fn build(&self, n: usize) -> Result<Lattice> {
        if !dn_plus_closure_check(n)? {
            let x = glue(n);
            let sum = &x + &x;
            return Err(Error::NotALattice {
                n,
                y: x.clone(),
                x,
                sum,
            });
        }
        let mut gens = dn_basis(n);
        gens.push(glue(n));
        Lattice::from_generators(&gens)
    }
}

struct Fixed {
    key: &'static str,
    description: &'static str,
    make: fn() -> Result<Lattice>,
}

impl LatticeEntry for Fixed {
    fn key(&self) -> &'static str {
        self.key
    }
    fn description(&self) -> &'static str {
        self.description
    }
    fn fixed_dim(&self) -> Option<usize> {
        Some(if self.key == "h2" { 2 } else { 4 })
    }
    fn build(&self, _n: usize) -> Result<Lattice> {
        (self.make)()
    }
}

fn l_prime_generators() -> Vec<RationalVector> {
    let mut g: Vec<RationalVector> = (0..4).map(|i| unit(4, i)).collect();
    g.push(RationalVector::from_fracs(&[(1, 2), (1, 2), (0, 1), (0, 1)]));
    g.push(RationalVector::from_fracs(&[(0, 1), (0, 1), (1, 2), (1, 2)]));
    g.push(RationalVector::from_fracs(&[(1, 4); 4]));
    g
}

fn l_prime_plus(extra: &[(i64, i64)]) -> Result<Lattice> {
    let mut g = l_prime_generators();
    g.push(RationalVector::from_fracs(extra));
    Lattice::from_generators(&g)
}

fn fixed_entries() -> Vec<Fixed> {
    vec![
        Fixed {
            key: "half_d4_plus",
            description: "(1/2) D_4^+",
            make: || DnPlus.build(4)?.scaled(&rat(1, 2)),
        },
        Fixed {
            key: "h2",
            description: "planar lattice spanned by (1,0) and (1/2,1/2)",
            make: || Ok(h2()),
        },
        Fixed {
            key: "h2_sum_h2",
            description: "H_2 (+) H_2",
            make: || Ok(h2_sum_h2()),
        },
        Fixed {
            key: "l_prime",
            description: "Z^4 with (1/2,1/2,0,0), (0,0,1/2,1/2), (1/4,1/4,1/4,1/4)",
            make: || Lattice::from_generators(&l_prime_generators()),
        },
        Fixed {
            key: "l0",
            description: "L' with (1/4,-1/4,0,1/2)",
            make: || l_prime_plus(&[(1, 4), (-1, 4), (0, 1), (1, 2)]),
        },
        Fixed {
            key: "l1",
            description: "L' with (1/8,-3/8,1/8,-3/8)",
            make: || l_prime_plus(&[(1, 8), (-3, 8), (1, 8), (-3, 8)]),
        },
        Fixed {
            key: "l1_prime",
            description: "L' with (1/8,-3/8,3/8,-1/8)",
            make: || l_prime_plus(&[(1, 8), (-3, 8), (3, 8), (-1, 8)]),
        },
    ]
}
