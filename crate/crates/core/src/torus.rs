//! The discrete torus `Z_m^n` and its three implicit graphs:
//! `L` (half-period jumps `eps + (m/2) e_j`), `R` (the l-infinity torus, all
//! offsets in `{-1,0,1}^n \ {0}`) and `T` (the l-1 torus, offsets `±e_j`).
//!
//! Points are addressed by a linear index `sum_j coords[j] * m^j`. Edges are
//! unordered; neighbour lists collapse duplicates, which only occur for `m = 2`.

use thiserror::Error;

/// Largest torus the enumeration helpers accept by default.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 16;

/// Hard cap on `m^n` for any torus.
pub const MAX_TORUS_POINTS: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("m must be a positive even integer, got {0}")]
    OddSide(usize),
    #[error("dimension n must be positive")]
    ZeroDimension,
    #[error("torus Z_{m}^{n} has too many points")]
    TooManyPoints { n: usize, m: usize },
    #[error("exhaustive enumeration over {points} points exceeds the limit {limit}")]
    TooLarge { points: usize, limit: usize },
    #[error("subset size {size} exceeds the {points} torus points")]
    SizeOutOfRange { size: usize, points: usize },
    #[error("coordinates {0:?} do not lie on the torus")]
    BadCoordinates(Vec<usize>),
    #[error("subset index {index} out of range for {points} torus points")]
    IndexOutOfRange { index: usize, points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    L,
    R,
    T,
}

/// Shape of `Z_m^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Torus {
    n: usize,
    m: usize,
    size: usize,
}

impl Torus {
    pub fn new(n: usize, m: usize) -> Result<Self, TorusError> {
        if m == 0 || m % 2 == 1 {
            return Err(TorusError::OddSide(m));
        }
        if n == 0 {
            return Err(TorusError::ZeroDimension);
        }
        let mut size = 1usize;
        for _ in 0..n {
            size = size
                .checked_mul(m)
                .filter(|&s| s <= MAX_TORUS_POINTS)
                .ok_or(TorusError::TooManyPoints { n, m })?;
        }
        Ok(Torus { n, m, size })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of points `m^n`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut c = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            c.push(index % self.m);
            index /= self.m;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> Result<usize, TorusError> {
        if coords.len() != self.n || coords.iter().any(|&c| c >= self.m) {
            return Err(TorusError::BadCoordinates(coords.to_vec()));
        }
        Ok(coords.iter().rev().fold(0, |acc, &c| acc * self.m + c))
    }

    /// `index + offset` with componentwise arithmetic mod `m`.
    pub fn shift(&self, index: usize, offset: &[i64]) -> usize {
        let m = self.m as i64;
        let mut rest = index;
        let mut out = 0usize;
        let mut stride = 1usize;
        for &o in offset.iter().take(self.n) {
            let c = (rest % self.m) as i64;
            rest /= self.m;
            out += ((c + o).rem_euclid(m) as usize) * stride;
            stride *= self.m;
        }
        out
    }

    /// Offsets generating the graph, before duplicate collapsing.
    pub fn offsets(&self, kind: GraphKind) -> Vec<Vec<i64>> {
        let n = self.n;
        match kind {
            GraphKind::L => (0..n)
                .map(|j| {
                    let mut v = vec![0; n];
                    v[j] = (self.m / 2) as i64;
                    v
                })
                .collect(),
            GraphKind::T => (0..n)
                .flat_map(|j| {
                    [1i64, -1].map(|s| {
                        let mut v = vec![0; n];
                        v[j] = s;
                        v
                    })
                })
                .collect(),
            GraphKind::R => cube_offsets(n)
                .into_iter()
                .filter(|d| d.iter().any(|&x| x != 0))
                .collect(),
        }
    }

    /// Distinct neighbours of `index`, sorted.
    pub fn neighbors(&self, index: usize, kind: GraphKind) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .offsets(kind)
            .iter()
            .map(|d| self.shift(index, d))
            .filter(|&j| j != index)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Neighbour lists for every point, indexed by point.
    pub fn adjacency(&self, kind: GraphKind) -> Vec<Vec<usize>> {
        let offsets = self.offsets(kind);
        (0..self.size)
            .map(|i| {
                let mut out: Vec<usize> = offsets
                    .iter()
                    .map(|d| self.shift(i, d))
                    .filter(|&j| j != i)
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect()
    }

    /// Every unordered edge `{u, v}` with `u < v`.
    pub fn edges(&self, kind: GraphKind) -> Vec<(usize, usize)> {
        self.adjacency(kind)
            .into_iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.into_iter().filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }
}

/// All of `{-1, 0, 1}^n`, in lexicographic order.
pub fn cube_offsets(n: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                [-1i64, 0, 1].map(|s| {
                    let mut w = v.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

/// A point of `Z_m^n` by coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusIndex {
    pub coords: Vec<usize>,
    pub torus: Torus,
}

impl TorusIndex {
    pub fn new(torus: Torus, coords: Vec<usize>) -> Result<Self, TorusError> {
        torus.index(&coords)?;
        Ok(TorusIndex { coords, torus })
    }

    pub fn linear(&self) -> usize {
        self.torus
            .index(&self.coords)
            .expect("validated on construction")
    }

    pub fn neighbors(&self, kind: GraphKind) -> Vec<TorusIndex> {
        self.torus
            .neighbors(self.linear(), kind)
            .into_iter()
            .map(|j| TorusIndex {
                coords: self.torus.coords(j),
                torus: self.torus,
            })
            .collect()
    }
}

/// A subset of `Z_m^n` as a membership bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusSubset {
    torus: Torus,
    words: Vec<u64>,
}

impl TorusSubset {
    pub fn empty(torus: Torus) -> Self {
        TorusSubset {
            torus,
            words: vec![0; torus.size().div_ceil(64)],
        }
    }

    pub fn from_indices(torus: Torus, indices: &[usize]) -> Result<Self, TorusError> {
        let mut s = Self::empty(torus);
        for &i in indices {
            if i >= torus.size() {
                return Err(TorusError::IndexOutOfRange {
                    index: i,
                    points: torus.size(),
                });
            }
            s.insert(i);
        }
        Ok(s)
    }

    /// Low `m^n` bits of `mask` as a subset; requires `m^n <= 64`.
    pub fn from_mask(torus: Torus, mask: u64) -> Self {
        debug_assert!(torus.size() <= 64);
        let keep = if torus.size() == 64 {
            u64::MAX
        } else {
            (1u64 << torus.size()) - 1
        };
        TorusSubset {
            torus,
            words: vec![mask & keep],
        }
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Member indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        (0..self.torus.size())
            .filter(|&i| self.contains(i))
            .collect()
    }

    pub fn complement(&self) -> Self {
        let mut c = Self::empty(self.torus);
        for i in 0..self.torus.size() {
            if !self.contains(i) {
                c.insert(i);
            }
        }
        c
    }

    /// `A + v`.
    pub fn translate(&self, offset: &[i64]) -> Self {
        let mut t = Self::empty(self.torus);
        for i in self.indices() {
            t.insert(self.torus.shift(i, offset));
        }
        t
    }

    /// Number of unordered edges of `kind` with exactly one endpoint in the subset.
    pub fn edge_boundary(&self, kind: GraphKind) -> usize {
        let offsets = self.torus.offsets(kind);
        let mut count = 0;
        let mut nb = Vec::with_capacity(offsets.len());
        for i in self.indices() {
            nb.clear();
            nb.extend(
                offsets
                    .iter()
                    .map(|d| self.torus.shift(i, d))
                    .filter(|&j| j != i),
            );
            nb.sort_unstable();
            nb.dedup();
            count += nb.iter().filter(|&&j| !self.contains(j)).count();
        }
        count
    }

    /// The boundary edges themselves as `(inside, outside)` pairs.
    pub fn edge_boundary_edges(&self, kind: GraphKind) -> Vec<(usize, usize)> {
        self.indices()
            .into_iter()
            .flat_map(|i| {
                self.torus
                    .neighbors(i, kind)
                    .into_iter()
                    .filter(|&j| !self.contains(j))
                    .map(move |j| (i, j))
            })
            .collect()
    }
}

/// Lower bounds on the edge boundary of a set of `a` points in `Z_m^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoperimetricBounds {
    /// `2 a^{(n-1)/n}`, the l-infinity torus bound.
    pub linfty: f64,
    /// `min_r 2 a^{1-1/r} r m^{n/r-1}` over `r = 1..=n`, the l-1 torus bound.
    pub bl: f64,
    /// The minimizing `r` (smallest on ties).
    pub bl_r: usize,
    /// `a > m^n / 2`: the bounds are evaluated but not guaranteed.
    pub beyond_half: bool,
}

/// Both bounds for `|A| = a`. The empty set has empty boundary, so both bounds are
/// zero at `a = 0` (where `0^0` would otherwise read as one).
pub fn isoperimetric_bounds(a: usize, n: usize, m: usize) -> IsoperimetricBounds {
    let size = (m as f64).powi(n as i32);
    let beyond_half = (a as f64) > size / 2.0;
    if a == 0 {
        return IsoperimetricBounds {
            linfty: 0.0,
            bl: 0.0,
            bl_r: 1,
            beyond_half,
        };
    }
    let af = a as f64;
    let nf = n as f64;
    let linfty = 2.0 * af.powf((nf - 1.0) / nf);
    let mut bl = f64::INFINITY;
    let mut bl_r = 1;
    for r in 1..=n {
        let rf = r as f64;
        let term = 2.0 * af.powf(1.0 - 1.0 / rf) * rf * (m as f64).powf(nf / rf - 1.0);
        if term < bl {
            bl = term;
            bl_r = r;
        }
    }
    IsoperimetricBounds {
        linfty,
        bl,
        bl_r,
        beyond_half,
    }
}

/// Exhaustive minimum of the edge boundary over all subsets of the given size.
#[derive(Debug, Clone, PartialEq)]
pub struct MinBoundary {
    pub min: usize,
    /// Minimizer with the lowest bitset value.
    pub minimizer: TorusSubset,
}

pub fn brute_force_min_boundary(
    n: usize,
    m: usize,
    size: usize,
    kind: GraphKind,
) -> Result<MinBoundary, TorusError> {
    brute_force_min_boundary_with_limit(n, m, size, kind, DEFAULT_ENUMERATION_LIMIT)
}

pub fn brute_force_min_boundary_with_limit(
    n: usize,
    m: usize,
    size: usize,
    kind: GraphKind,
    limit: usize,
) -> Result<MinBoundary, TorusError> {
    let torus = Torus::new(n, m)?;
    let points = torus.size();
    if points > limit.min(30) {
        return Err(TorusError::TooLarge {
            points,
            limit: limit.min(30),
        });
    }
    if size > points {
        return Err(TorusError::SizeOutOfRange { size, points });
    }
    let masks = BoundaryMasks::new(&torus, kind);
    let mut best = (usize::MAX, 0u64);
    for mask in SameWeightMasks::new(points as u32, size as u32) {
        let b = masks.boundary(mask);
        if b < best.0 {
            best = (b, mask);
        }
    }
    Ok(MinBoundary {
        min: best.0,
        minimizer: TorusSubset::from_mask(torus, best.1),
    })
}

/// Smallest boundary among `samples` seeded uniform subsets of the given size.
///
/// An upper bound on the true minimum; sample `i` uses stream `i` of `seed`.
pub fn sampled_min_boundary(
    n: usize,
    m: usize,
    size: usize,
    kind: GraphKind,
    samples: u64,
    seed: u64,
) -> Result<MinBoundary, TorusError> {
    use rand::seq::index::sample;
    use rayon::prelude::*;

    let torus = Torus::new(n, m)?;
    let points = torus.size();
    if size > points {
        return Err(TorusError::SizeOutOfRange { size, points });
    }
    let draw = |i: u64| {
        let mut rng = crate::cotype::stream_rng(seed, i);
        let picks = sample(&mut rng, points, size).into_vec();
        TorusSubset::from_indices(torus, &picks).expect("indices in range")
    };
    let (min, i) = (0..samples.max(1))
        .into_par_iter()
        .map(|i| (draw(i).edge_boundary(kind), i))
        .min()
        .expect("at least one sample");
    Ok(MinBoundary {
        min,
        minimizer: draw(i),
    })
}

/// Neighbour bitmasks for tori with at most 64 points.
#[derive(Debug, Clone)]
pub struct BoundaryMasks {
    neighbors: Vec<u64>,
}

impl BoundaryMasks {
    pub fn new(torus: &Torus, kind: GraphKind) -> Self {
        assert!(torus.size() <= 64, "bitmask boundary needs m^n <= 64");
        let neighbors = torus
            .adjacency(kind)
            .into_iter()
            .map(|nb| nb.into_iter().fold(0u64, |acc, j| acc | 1 << j))
            .collect();
        BoundaryMasks { neighbors }
    }

    #[inline]
    pub fn boundary(&self, mask: u64) -> usize {
        let mut rest = mask;
        let mut count = 0;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            count += (self.neighbors[i] & !mask).count_ones() as usize;
        }
        count
    }
}

/// Masks over `bits` bits with exactly `weight` ones, in increasing numeric order
/// (Gosper's hack).
#[derive(Debug, Clone)]
pub struct SameWeightMasks {
    next: Option<u64>,
    limit: u64,
}

impl SameWeightMasks {
    pub fn new(bits: u32, weight: u32) -> Self {
        assert!(bits < 64);
        let limit = 1u64 << bits;
        let first = if weight == 0 { 0 } else { (1u64 << weight) - 1 };
        SameWeightMasks {
            next: (weight <= bits).then_some(first),
            limit,
        }
    }
}

impl Iterator for SameWeightMasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let n = (((r ^ cur) >> 2) / c) | r;
            (n < self.limit).then_some(n)
        };
        Some(cur)
    }
}
