//! Configurations on the lattice `{-L+1, ..., L}`, the occupation/position
//! dictionary, sectors of fixed particle numbers and the counting functions.
//!
//! Sites are always addressed by their physical label `k`; the array offset
//! `k + L - 1` stays private.

pub mod lemmas;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use lemmas::{check_counting_lemmas, check_permutation_identities, weyl_alcove};

pub type Site = i64;

/// Occupation of a single site. The discriminant is the local ternary digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Occ {
    A = 0,
    V = 1,
    B = 2,
}

impl Occ {
    pub const ALL: [Occ; 3] = [Occ::A, Occ::V, Occ::B];

    pub fn digit(self) -> usize {
        self as usize
    }

    pub fn from_digit(d: usize) -> Option<Occ> {
        Occ::ALL.get(d).copied()
    }

    pub fn symbol(self) -> char {
        match self {
            Occ::A => 'A',
            Occ::V => '0',
            Occ::B => 'B',
        }
    }
}

/// Particle species.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Species {
    A,
    B,
}

impl Species {
    pub fn occ(self) -> Occ {
        match self {
            Species::A => Occ::A,
            Species::B => Occ::B,
        }
    }
}

impl FromStr for Species {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Species::A),
            "B" | "b" => Ok(Species::B),
            _ => Err(Error::Parse(format!("unknown species `{s}`"))),
        }
    }
}

pub fn first_site(l: usize) -> Site {
    1 - l as Site
}

pub fn last_site(l: usize) -> Site {
    l as Site
}

pub fn sites(l: usize) -> RangeInclusive<Site> {
    first_site(l)..=last_site(l)
}

/// Bonds `(k, k+1)` are labelled by their left site.
pub fn bonds(l: usize) -> RangeInclusive<Site> {
    first_site(l)..=last_site(l) - 1
}

fn check_l(l: usize) -> Result<()> {
    if l == 0 {
        Err(Error::InvalidLattice("L must be positive".into()))
    } else {
        Ok(())
    }
}

/// Heaviside step `Theta(k, l) = 1` iff `k < l`.
pub fn theta(k: Site, l: Site) -> i64 {
    i64::from(k < l)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    occ: Vec<Occ>,
}

impl Config {
    pub fn new(occ: Vec<Occ>) -> Result<Self> {
        if occ.is_empty() || !occ.len().is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!(
                "site count must be even and positive, got {}",
                occ.len()
            )));
        }
        Ok(Self { occ })
    }

    pub fn vacant(l: usize) -> Self {
        Self {
            occ: vec![Occ::V; 2 * l],
        }
    }

    /// Half the number of sites.
    pub fn l(&self) -> usize {
        self.occ.len() / 2
    }

    pub fn sites(&self) -> RangeInclusive<Site> {
        sites(self.l())
    }

    pub fn contains(&self, k: Site) -> bool {
        self.sites().contains(&k)
    }

    fn offset(&self, k: Site) -> usize {
        (k + self.l() as Site - 1) as usize
    }

    pub fn occupations(&self) -> &[Occ] {
        &self.occ
    }

    /// Occupation at site `k`. Panics when `k` is off the lattice.
    pub fn get(&self, k: Site) -> Occ {
        assert!(self.contains(k), "site {k} outside lattice of L = {}", self.l());
        self.occ[self.offset(k)]
    }

    pub fn try_get(&self, k: Site) -> Result<Occ> {
        if self.contains(k) {
            Ok(self.occ[self.offset(k)])
        } else {
            Err(Error::SiteOutOfRange(k))
        }
    }

    pub fn set(&mut self, k: Site, o: Occ) {
        let i = self.offset(k);
        self.occ[i] = o;
    }

    pub fn a(&self, k: Site) -> i64 {
        i64::from(self.get(k) == Occ::A)
    }

    pub fn v(&self, k: Site) -> i64 {
        i64::from(self.get(k) == Occ::V)
    }

    pub fn b(&self, k: Site) -> i64 {
        i64::from(self.get(k) == Occ::B)
    }

    pub fn count(&self, o: Occ) -> usize {
        self.occ.iter().filter(|&&x| x == o).count()
    }

    /// Number of A particles.
    pub fn n(&self) -> usize {
        self.count(Occ::A)
    }

    /// Number of B particles.
    pub fn m(&self) -> usize {
        self.count(Occ::B)
    }

    pub fn sector(&self) -> Sector {
        Sector {
            l: self.l(),
            n: self.n(),
            m: self.m(),
        }
    }

    /// Number of sites `l < k` with occupation `o`.
    pub fn count_left_of(&self, k: Site, o: Occ) -> i64 {
        let end = self.offset(k).min(self.occ.len());
        self.occ[..end].iter().filter(|&&x| x == o).count() as i64
    }

    /// Number of sites `l > k` with occupation `o`.
    pub fn count_right_of(&self, k: Site, o: Occ) -> i64 {
        let start = self.offset(k) + 1;
        self.occ[start.min(self.occ.len())..]
            .iter()
            .filter(|&&x| x == o)
            .count() as i64
    }

    /// 1-based ternary position `1 + sum_j eta(j-L) 3^{j-1}`.
    pub fn ternary_index(&self) -> usize {
        self.basis_index() + 1
    }

    /// 0-based position in the full basis.
    pub fn basis_index(&self) -> usize {
        self.occ.iter().rev().fold(0, |acc, o| acc * 3 + o.digit())
    }

    pub fn from_basis_index(l: usize, mut idx: usize) -> Self {
        let mut occ = Vec::with_capacity(2 * l);
        for _ in 0..2 * l {
            occ.push(Occ::from_digit(idx % 3).unwrap());
            idx /= 3;
        }
        Self { occ }
    }

    pub fn to_positions(&self) -> Positions {
        let pick = |o: Occ| self.sites().filter(|&k| self.get(k) == o).collect();
        Positions {
            l: self.l(),
            x: pick(Occ::A),
            y: pick(Occ::B),
        }
    }

    pub fn from_positions(p: &Positions) -> Result<Self> {
        let p = Positions::new(p.l, p.x.clone(), p.y.clone())?;
        let mut c = Self::vacant(p.l);
        for &x in &p.x {
            c.set(x, Occ::A);
        }
        for &y in &p.y {
            c.set(y, Occ::B);
        }
        Ok(c)
    }

    /// Exchange of the occupations on bond `(k, k+1)`.
    pub fn swap(&self, k: Site) -> Result<Self> {
        if !bonds(self.l()).contains(&k) {
            return Err(Error::BondOutOfRange(k));
        }
        let mut c = self.clone();
        let i = self.offset(k);
        c.occ.swap(i, i + 1);
        Ok(c)
    }
}

/// All `3^{2L}` configurations in basis order.
pub fn all_configs(l: usize) -> impl Iterator<Item = Config> {
    (0..3usize.pow(2 * l as u32)).map(move |i| Config::from_basis_index(l, i))
}

pub fn full_dim(l: usize) -> usize {
    3usize.pow(2 * l as u32)
}

/// Text form over `{A, 0, B}` from site `-L+1` to `L`, e.g. `A0B0`.
impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.occ.iter().map(|o| o.symbol()).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Config({self})")
    }
}

impl FromStr for Config {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let occ = s
            .trim()
            .chars()
            .map(|ch| match ch {
                'A' | 'a' => Ok(Occ::A),
                '0' | '.' => Ok(Occ::V),
                'B' | 'b' => Ok(Occ::B),
                _ => Err(Error::Parse(format!("bad occupation `{ch}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Config::new(occ)
    }
}

/// Position representation `z = {x, y}`: sorted A and B coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Positions {
    pub l: usize,
    pub x: Vec<Site>,
    pub y: Vec<Site>,
}

impl Positions {
    /// Canonicalizes (sorts) the coordinates and validates them.
    pub fn new(l: usize, mut x: Vec<Site>, mut y: Vec<Site>) -> Result<Self> {
        check_l(l)?;
        x.sort_unstable();
        y.sort_unstable();
        for &s in x.iter().chain(&y) {
            if !sites(l).contains(&s) {
                return Err(Error::SiteOutOfRange(s));
            }
        }
        let repeats = |v: &[Site]| v.windows(2).any(|w| w[0] == w[1]);
        if repeats(&x) || repeats(&y) || x.iter().any(|s| y.contains(s)) {
            return Err(Error::OverlappingCoordinates(format!("x={x:?} y={y:?}")));
        }
        Ok(Self { l, x, y })
    }

    pub fn empty(l: usize) -> Self {
        Self {
            l,
            x: vec![],
            y: vec![],
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn m(&self) -> usize {
        self.y.len()
    }

    pub fn coords(&self, species: Species) -> &[Site] {
        match species {
            Species::A => &self.x,
            Species::B => &self.y,
        }
    }

    pub fn to_config(&self) -> Result<Config> {
        Config::from_positions(self)
    }
}

/// `N_k(z)` / `M_k(z)`: particles of `species` strictly left of site `k`.
pub fn count_left(z: &Positions, k: Site, species: Species) -> i64 {
    z.coords(species).iter().filter(|&&c| c < k).count() as i64
}

/// `A_k(z) = 2 N_k(z) - N(z)` and `B_k(z) = 2 M_k(z) - M(z)`.
pub fn centered_count(z: &Positions, k: Site, species: Species) -> i64 {
    2 * count_left(z, k, species) - z.coords(species).len() as i64
}

/// Configurations with exactly `n` A particles and `m` B particles on `2L` sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sector {
    pub l: usize,
    pub n: usize,
    pub m: usize,
}

impl Sector {
    pub fn new(l: usize, n: usize, m: usize) -> Result<Self> {
        check_l(l)?;
        if n + m > 2 * l {
            return Err(Error::InvalidArgument(format!(
                "sector (N={n}, M={m}) does not fit on {} sites",
                2 * l
            )));
        }
        Ok(Self { l, n, m })
    }

    /// Every sector of the lattice, ordered by `(N, M)`.
    pub fn all(l: usize) -> Vec<Sector> {
        let mut v = Vec::new();
        for n in 0..=2 * l {
            for m in 0..=2 * l - n {
                v.push(Sector { l, n, m });
            }
        }
        v
    }

    /// `binom(2L, N) * binom(2L - N, M)`.
    pub fn size(&self) -> usize {
        binomial(2 * self.l, self.n) * binomial(2 * self.l - self.n, self.m)
    }

    pub fn contains(&self, c: &Config) -> bool {
        c.l() == self.l && c.n() == self.n && c.m() == self.m
    }

    /// All configurations of the sector sorted by ternary index.
    pub fn enumerate(&self) -> Vec<Config> {
        let two_l = 2 * self.l;
        let mut out = Vec::with_capacity(self.size());
        for xs in combinations(two_l, self.n) {
            let rest: Vec<usize> = (0..two_l).filter(|i| !xs.contains(i)).collect();
            for ys in combinations(rest.len(), self.m) {
                let mut occ = vec![Occ::V; two_l];
                for &i in &xs {
                    occ[i] = Occ::A;
                }
                for &j in &ys {
                    occ[rest[j]] = Occ::B;
                }
                out.push(Config { occ });
            }
        }
        out.sort_by_key(Config::basis_index);
        out
    }
}

pub fn enumerate_sector(s: Sector) -> Vec<Config> {
    s.enumerate()
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Strictly increasing `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}
