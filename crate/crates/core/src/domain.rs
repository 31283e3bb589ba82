//! Partitions of the compactified real line `ℝ ∪ {∞}`.
//!
//! Finite domains are intervals `[a_n, b_n]` in `y`. Near infinity the local
//! coordinate is `s = 1/y`: either one wrapped domain `s ∈ [1/a_1, 1/b_last]`
//! that contains `s = 0` in its interior, or two one-sided domains
//! `[1/a_1, 0]` and `[0, 1/b_last]`. The point `y = ∞` is `s = 0`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::ChebGrid;

/// Default continuation margin, in reference units (a quarter of the width).
pub const DEFAULT_MARGIN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `y → -∞`, i.e. `s ∈ [1/a_1, 0]`.
    Negative,
    /// `y → +∞`, i.e. `s ∈ [0, 1/b_last]`.
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Finite,
    InfiniteWrapped,
    InfiniteOneSided(Side),
}

/// One segment of the partition with its affine map to `[-1, 1]`.
///
/// `lo`/`hi` are local coordinates: `y` for finite domains, `s` otherwise.
/// `margin` is the continuation margin in reference units, so the enlarged
/// domain is `l ∈ [-1 - margin, 1 + margin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub kind: DomainKind,
    pub lo: f64,
    pub hi: f64,
    pub grid: ChebGrid,
    pub margin: f64,
    /// Endpoints as points of `ℝ ∪ {∞}`, matching `lo` and `hi`.
    pub y_ends: (f64, f64),
}

impl Domain {
    pub fn is_infinite(&self) -> bool {
        self.kind != DomainKind::Finite
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn map_from_ref(&self, l: f64) -> f64 {
        if l == 1.0 {
            return self.hi;
        }
        if l == -1.0 {
            return self.lo;
        }
        0.5 * (self.hi * (1.0 + l) + self.lo * (1.0 - l))
    }

    pub fn map_to_ref(&self, u: f64) -> f64 {
        if u == self.hi {
            return 1.0;
        }
        if u == self.lo {
            return -1.0;
        }
        (2.0 * u - self.lo - self.hi) / (self.hi - self.lo)
    }

    /// Local coordinate of the extended real `x`.
    pub fn local_coord(&self, x: f64) -> f64 {
        match self.kind {
            DomainKind::Finite => x,
            _ => {
                if x.is_infinite() {
                    0.0
                } else if x == self.y_ends.0 {
                    self.lo
                } else if x == self.y_ends.1 {
                    self.hi
                } else {
                    1.0 / x
                }
            }
        }
    }

    /// Extended real corresponding to a local coordinate.
    pub fn point_of(&self, u: f64) -> f64 {
        match self.kind {
            DomainKind::Finite => u,
            _ => {
                // endpoints map back to the breakpoints exactly
                if u == 0.0 {
                    f64::INFINITY
                } else if u == self.lo {
                    self.y_ends.0
                } else if u == self.hi {
                    self.y_ends.1
                } else {
                    1.0 / u
                }
            }
        }
    }

    /// Local coordinates of the grid nodes.
    pub fn local_nodes(&self) -> Vec<f64> {
        self.grid.nodes().iter().map(|&l| self.map_from_ref(l)).collect()
    }

    /// Nodes as points of `ℝ ∪ {∞}`.
    pub fn points(&self) -> Vec<f64> {
        self.local_nodes().into_iter().map(|u| self.point_of(u)).collect()
    }

    /// Whether the local coordinate lies in the domain enlarged by `margin`
    /// reference units.
    pub fn within_margin(&self, u: f64, margin: f64) -> bool {
        u.is_finite() && self.map_to_ref(u).abs() <= 1.0 + margin
    }
}

/// A point where two domains meet. `point` is `∞` for the junction of the
/// two one-sided domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Junction {
    pub point: f64,
    pub left: usize,
    pub right: usize,
}

/// Ordered finite domains followed by the infinite domain(s).
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    domains: Vec<Domain>,
    breakpoints: Vec<f64>,
    wrap: bool,
    delta: f64,
}

impl Partition {
    /// Builds the partition from `a_1 < … < b_last`. `degrees` holds one
    /// degree per domain (or a single degree for all); `delta` is the
    /// continuation margin in reference units.
    pub fn new(breakpoints: &[f64], wrap: bool, degrees: &[usize], delta: f64) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidPartition("need at least one finite interval".into()));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidPartition("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition("breakpoints must be strictly increasing".into()));
        }
        let first = breakpoints[0];
        let last = *breakpoints.last().unwrap();
        if !(first < 0.0 && last > 0.0) {
            return Err(Error::InvalidPartition(format!(
                "outer breakpoints must satisfy a_1 < 0 < b_last, got {first} and {last}"
            )));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidPartition(format!("invalid margin {delta}")));
        }
        let n_finite = breakpoints.len() - 1;
        let n_domains = n_finite + if wrap { 1 } else { 2 };
        let degrees: Vec<usize> = match degrees.len() {
            1 => vec![degrees[0]; n_domains],
            k if k == n_domains => degrees.to_vec(),
            k => return Err(Error::InvalidPartition(format!("expected {n_domains} degrees, got {k}"))),
        };
        let mut domains = Vec::with_capacity(n_domains);
        for k in 0..n_finite {
            domains.push(Domain {
                kind: DomainKind::Finite,
                lo: breakpoints[k],
                hi: breakpoints[k + 1],
                grid: ChebGrid::new(degrees[k])?,
                margin: delta,
                y_ends: (breakpoints[k], breakpoints[k + 1]),
            });
        }
        let (s_lo, s_hi) = (1.0 / first, 1.0 / last);
        if wrap {
            domains.push(Domain {
                kind: DomainKind::InfiniteWrapped,
                lo: s_lo,
                hi: s_hi,
                grid: ChebGrid::new(degrees[n_finite])?,
                margin: delta,
                y_ends: (first, last),
            });
        } else {
            domains.push(Domain {
                kind: DomainKind::InfiniteOneSided(Side::Negative),
                lo: s_lo,
                hi: 0.0,
                grid: ChebGrid::new(degrees[n_finite])?,
                margin: delta,
                y_ends: (first, f64::INFINITY),
            });
            domains.push(Domain {
                kind: DomainKind::InfiniteOneSided(Side::Positive),
                lo: 0.0,
                hi: s_hi,
                grid: ChebGrid::new(degrees[n_finite + 1])?,
                margin: delta,
                y_ends: (f64::INFINITY, last),
            });
        }
        Ok(Self { domains, breakpoints: breakpoints.to_vec(), wrap, delta })
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn wraps_infinity(&self) -> bool {
        self.wrap
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.domains.iter().map(|d| d.grid.degree()).collect()
    }

    pub fn finite_count(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Start of each domain's block in stacked node vectors.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.domains
            .iter()
            .map(|d| {
                let o = acc;
                acc += d.grid.len();
                o
            })
            .collect()
    }

    pub fn total_nodes(&self) -> usize {
        self.domains.iter().map(|d| d.grid.len()).sum()
    }

    /// Stacked node points of all domains (with `∞` where `s = 0`).
    pub fn node_points(&self) -> Vec<f64> {
        self.domains.iter().flat_map(|d| d.points()).collect()
    }

    pub fn junctions(&self) -> Vec<Junction> {
        let nf = self.finite_count();
        let mut out = Vec::new();
        for k in 0..nf - 1 {
            out.push(Junction { point: self.breakpoints[k + 1], left: k, right: k + 1 });
        }
        if self.wrap {
            out.push(Junction { point: self.breakpoints[0], left: nf, right: 0 });
            out.push(Junction { point: self.breakpoints[nf], left: nf - 1, right: nf });
        } else {
            out.push(Junction { point: self.breakpoints[0], left: nf, right: 0 });
            out.push(Junction { point: self.breakpoints[nf], left: nf - 1, right: nf + 1 });
            out.push(Junction { point: f64::INFINITY, left: nf + 1, right: nf });
        }
        out
    }

    /// Owning domain of `x ∈ ℝ ∪ {∞}` and the reference coordinate of `x` in it.
    ///
    /// Shared finite endpoints belong to the left domain, the outer
    /// breakpoints to the finite domains, and `∞` to the wrapped domain or to
    /// the negative one-sided domain.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let nf = self.finite_count();
        let first = self.breakpoints[0];
        let last = self.breakpoints[nf];
        if x.is_finite() && x >= first && x <= last {
            let k = if x == first {
                0
            } else {
                // first k with lo < x <= hi
                self.breakpoints[1..].iter().position(|&b| x <= b).unwrap()
            };
            return (k, self.domains[k].map_to_ref(x));
        }
        let idx = if self.wrap || x.is_infinite() || x < first { nf } else { nf + 1 };
        let d = &self.domains[idx];
        (idx, d.map_to_ref(d.local_coord(x)).clamp(-1.0, 1.0))
    }

    /// Samples each piece of `f` at its domain's nodes.
    pub fn sample(&self, f: &PiecewiseAnalyticFn) -> Result<MultiDomainField> {
        f.check_partition(self)?;
        let mut values = Vec::with_capacity(self.domains.len());
        for (k, d) in self.domains.iter().enumerate() {
            let piece = &f.pieces[k];
            let mut v = Vec::with_capacity(d.grid.len());
            for u in d.local_nodes() {
                let val = piece(u);
                if !val.is_finite() {
                    return Err(Error::Evaluator { domain: k, at: u });
                }
                v.push(val);
            }
            values.push(v);
        }
        Ok(MultiDomainField { values })
    }

    /// Plain-text descriptor: breakpoints, wrap flag, degrees and margin.
    pub fn to_descriptor(&self) -> String {
        let join = |v: Vec<String>| v.join(" ");
        format!(
            "breakpoints = {}\nwrap = {}\ndegrees = {}\ndelta = {}\n",
            join(self.breakpoints.iter().map(|b| format!("{b:?}")).collect()),
            self.wrap,
            join(self.degrees().iter().map(|d| d.to_string()).collect()),
            self.delta
        )
    }

    pub fn from_descriptor(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidPartition(format!("descriptor: {m}"));
        let mut breakpoints = None;
        let mut wrap = None;
        let mut degrees = None;
        let mut delta = DEFAULT_MARGIN;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, value) = line.split_once('=').ok_or_else(|| bad(line))?;
            let value = value.trim();
            match key.trim() {
                "breakpoints" => {
                    breakpoints = Some(
                        value
                            .split_whitespace()
                            .map(|t| t.parse::<f64>().map_err(|_| bad(t)))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "wrap" => wrap = Some(value.parse::<bool>().map_err(|_| bad(value))?),
                "degrees" => {
                    degrees = Some(
                        value
                            .split_whitespace()
                            .map(|t| t.parse::<usize>().map_err(|_| bad(t)))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "delta" => delta = value.parse().map_err(|_| bad(value))?,
                other => return Err(bad(other)),
            }
        }
        Self::new(
            &breakpoints.ok_or_else(|| bad("missing breakpoints"))?,
            wrap.ok_or_else(|| bad("missing wrap"))?,
            &degrees.ok_or_else(|| bad("missing degrees"))?,
            delta,
        )
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_descriptor())
    }
}

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Per-domain analytic pieces of a function on `ℝ ∪ {∞}`.
///
/// Finite pieces take `y`; infinite pieces take `s` and return
/// `g(s) = f(1/s)`, with `g(0)` the limit of `f` at infinity. Each piece must
/// be evaluable on its domain enlarged by the continuation margin.
#[derive(Clone)]
pub struct PiecewiseAnalyticFn {
    pieces: Vec<Evaluator>,
    jumps: Vec<f64>,
    decays: bool,
    continuation_limit: Vec<Option<f64>>,
}

impl fmt::Debug for PiecewiseAnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseAnalyticFn")
            .field("pieces", &self.pieces.len())
            .field("jumps", &self.jumps)
            .field("decays", &self.decays)
            .field("continuation_limit", &self.continuation_limit)
            .finish()
    }
}

impl PiecewiseAnalyticFn {
    /// Pieces given in partition order; continuous everywhere and decaying.
    pub fn new(pieces: Vec<Evaluator>) -> Self {
        let n = pieces.len();
        Self { pieces, jumps: Vec::new(), decays: true, continuation_limit: vec![None; n] }
    }

    /// One analytic function used on every domain of `partition`.
    pub fn global<F>(partition: &Partition, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f: Evaluator = Arc::new(f);
        let pieces = partition
            .domains()
            .iter()
            .map(|d| -> Evaluator {
                let f = f.clone();
                if d.is_infinite() {
                    Arc::new(move |s: f64| if s == 0.0 { f(f64::INFINITY) } else { f(1.0 / s) })
                } else {
                    f
                }
            })
            .collect();
        Self::new(pieces)
    }

    /// Marks a jump at the junction located at `y` (`∞` allowed).
    pub fn with_jump(mut self, y: f64) -> Self {
        self.jumps.push(y);
        self
    }

    pub fn with_decay(mut self, decays: bool) -> Self {
        self.decays = decays;
        self
    }

    /// Restricts the continuation of piece `k` to `limit` local units beyond
    /// its endpoints (used where the continuation grows quickly).
    pub fn with_continuation_limit(mut self, k: usize, limit: f64) -> Self {
        self.continuation_limit[k] = Some(limit);
        self
    }

    pub fn pieces(&self) -> &[Evaluator] {
        &self.pieces
    }

    pub fn piece(&self, k: usize) -> &Evaluator {
        &self.pieces[k]
    }

    pub fn decays(&self) -> bool {
        self.decays
    }

    pub fn continuation_limit(&self, k: usize) -> Option<f64> {
        self.continuation_limit[k]
    }

    pub fn is_continuous_at(&self, y: f64) -> bool {
        !self.jumps.contains(&y)
    }

    pub fn is_continuous(&self) -> bool {
        self.jumps.is_empty()
    }

    pub(crate) fn check_partition(&self, partition: &Partition) -> Result<()> {
        if self.pieces.len() != partition.domains().len() {
            return Err(Error::LengthMismatch { expected: partition.domains().len(), got: self.pieces.len() });
        }
        Ok(())
    }
}

/// Node samples, one vector per domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiDomainField {
    pub values: Vec<Vec<f64>>,
}

impl MultiDomainField {
    pub fn from_stacked(partition: &Partition, stacked: &[f64]) -> Result<Self> {
        if stacked.len() != partition.total_nodes() {
            return Err(Error::LengthMismatch { expected: partition.total_nodes(), got: stacked.len() });
        }
        let mut values = Vec::new();
        let mut at = 0;
        for d in partition.domains() {
            values.push(stacked[at..at + d.grid.len()].to_vec());
            at += d.grid.len();
        }
        Ok(Self { values })
    }

    pub fn stacked(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn check(&self, partition: &Partition) -> Result<()> {
        if self.values.len() != partition.domains().len() {
            return Err(Error::LengthMismatch { expected: partition.domains().len(), got: self.values.len() });
        }
        for (v, d) in self.values.iter().zip(partition.domains()) {
            d.grid.check_len(v.len())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_domain(n: usize) -> Partition {
        Partition::new(&[-1.0, 1.0], true, &[n], DEFAULT_MARGIN).unwrap()
    }

    #[test]
    fn wrapped_two_domain_layout() {
        let p = two_domain(8);
        assert_eq!(p.domains().len(), 2);
        let (f, i) = (&p.domains()[0], &p.domains()[1]);
        assert_eq!((f.kind, f.lo, f.hi), (DomainKind::Finite, -1.0, 1.0));
        assert_eq!((i.kind, i.lo, i.hi), (DomainKind::InfiniteWrapped, -1.0, 1.0));
    }

    #[test]
    fn one_sided_layout() {
        let p = Partition::new(&[-40.0, 0.0, 40.0], false, &[10], 0.5).unwrap();
        let d = p.domains();
        assert_eq!(d.len(), 4);
        assert_eq!((d[0].lo, d[0].hi), (-40.0, 0.0));
        assert_eq!((d[1].lo, d[1].hi), (0.0, 40.0));
        assert_eq!(d[2].kind, DomainKind::InfiniteOneSided(Side::Negative));
        assert_eq!((d[2].lo, d[2].hi), (-1.0 / 40.0, 0.0));
        assert_eq!((d[3].lo, d[3].hi), (0.0, 1.0 / 40.0));
        assert_eq!(p.junctions().len(), 4);
    }

    #[test]
    fn invalid_partitions() {
        assert!(Partition::new(&[1.0, -1.0], true, &[4], 0.5).is_err());
        assert!(Partition::new(&[0.0, 1.0], true, &[4], 0.5).is_err());
        assert!(Partition::new(&[-1.0, 0.0], false, &[4], 0.5).is_err());
        assert!(Partition::new(&[-1.0], true, &[4], 0.5).is_err());
        assert!(Partition::new(&[-1.0, 1.0], true, &[4, 4, 4], 0.5).is_err());
        assert_eq!(Partition::new(&[-1.0, 1.0], true, &[0], 0.5).unwrap_err(), Error::DegenerateGrid);
    }

    #[test]
    fn margin_semantics() {
        let p = Partition::new(&[-1.0, 1.0], true, &[4], 0.1).unwrap();
        let d = &p.domains()[0];
        assert!(d.within_margin(1.1, d.margin));
        assert!(d.within_margin(-1.1, d.margin));
        assert!(!d.within_margin(1.11, d.margin));
    }

    #[test]
    fn map_examples() {
        let p = Partition::new(&[-40.0, 0.0, 40.0], true, &[4], 0.5).unwrap();
        assert_eq!(p.domains()[1].map_from_ref(0.0), 20.0);
        assert_eq!(p.domains()[1].map_from_ref(1.0), 40.0);
        let w = two_domain(4);
        assert_eq!(w.domains()[1].map_from_ref(0.0), 0.0);
    }

    #[test]
    fn locate_examples() {
        let p = two_domain(4);
        assert_eq!(p.locate(0.5), (0, 0.5));
        assert_eq!(p.locate(2.0), (1, 0.5));
        assert_eq!(p.locate(1.0), (0, 1.0));
        assert_eq!(p.locate(-1.0), (0, -1.0));
        assert_eq!(p.locate(f64::INFINITY), (1, 0.0));
        let q = Partition::new(&[-40.0, 0.0, 40.0], false, &[4], 0.5).unwrap();
        assert_eq!(q.locate(0.0).0, 0);
        assert_eq!(q.locate(40.0).0, 1);
        assert_eq!(q.locate(-50.0).0, 2);
        assert_eq!(q.locate(50.0).0, 3);
        assert_eq!(q.locate(f64::INFINITY).0, 2);
    }

    #[test]
    fn sample_examples() {
        let p = two_domain(2);
        let one = PiecewiseAnalyticFn::global(&p, |_| 1.0);
        let s = p.sample(&one).unwrap();
        assert!(s.values.iter().flatten().all(|&v| v == 1.0));
        let id = PiecewiseAnalyticFn::new(vec![Arc::new(|y| y), Arc::new(|_| 0.0)]);
        assert_eq!(p.sample(&id).unwrap().values[0], vec![1.0, 0.0, -1.0]);

        let q = two_domain(12);
        let lor = PiecewiseAnalyticFn::global(&q, |y| 1.0 / (1.0 + y * y));
        let s = q.sample(&lor).unwrap();
        for (v, sn) in s.values[1].iter().zip(q.domains()[1].local_nodes()) {
            assert!((v - sn * sn / (1.0 + sn * sn)).abs() < 1e-15);
        }
    }

    #[test]
    fn sample_reports_domain() {
        let p = two_domain(4);
        let bad = PiecewiseAnalyticFn::new(vec![Arc::new(|y| y), Arc::new(|s| 1.0 / s)]);
        assert!(matches!(p.sample(&bad), Err(Error::Evaluator { domain: 1, .. })));
    }

    #[test]
    fn descriptor_round_trip() {
        let p = Partition::new(&[-40.0, 0.0, 40.0], false, &[80, 80, 8, 8], 0.25).unwrap();
        let q = Partition::from_descriptor(&p.to_descriptor()).unwrap();
        assert_eq!(p, q);
    }
}
