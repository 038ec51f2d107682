//! The reflection group of a polygon: generators, balls in the Cayley graph
//! and minimal expressions.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{point_distance, HPoint, Isometry, LorentzVector};
use crate::polygon::Polygon;
use crate::tolerance::TOL;

#[cfg(test)]
mod tests;

/// Longest word length accepted by [`GroupBall::by_length`].
pub const MAX_BALL_LENGTH: usize = 14;

/// Reflections in the sides of `p`; generator `i` fixes the side from
/// vertex `i` to vertex `i + 1`.
pub fn side_reflections(p: &Polygon) -> Vec<Isometry> {
    p.edges().iter().map(Isometry::reflection).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub matrix: Isometry,
    pub word: Vec<usize>,
    pub length: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BallBound {
    Length(usize),
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallConfig {
    /// Maximum number of stored elements.
    pub cap: usize,
    /// Relative max-entry distance under which two matrices are merged.
    pub dedup: f64,
}

impl Default for BallConfig {
    fn default() -> Self {
        BallConfig {
            cap: 1_000_000,
            dedup: TOL.dedup,
        }
    }
}

/// Elements of the reflection group up to a word length or displacement
/// bound, with every minimal predecessor recorded.
#[derive(Debug, Clone)]
pub struct GroupBall {
    generators: Vec<Isometry>,
    basepoint: HPoint,
    bound: BallBound,
    elements: Vec<GroupElement>,
    /// `(parent index, letter)` pairs with `parent * s_letter = element`
    /// and `len(parent) = len(element) - 1`.
    parents: Vec<Vec<(usize, usize)>>,
    /// `d(o, g o)` per element.
    displacement: Vec<f64>,
    min_pairwise: f64,
    dedup: f64,
}

type Cell = (i64, i64, i64);

struct OrbitIndex {
    cells: HashMap<Cell, Vec<usize>>,
    h: f64,
}

impl OrbitIndex {
    fn new() -> Self {
        OrbitIndex {
            cells: HashMap::new(),
            h: 1e-6,
        }
    }

    fn cell(&self, v: LorentzVector) -> Cell {
        (
            (v.x0 / self.h).floor() as i64,
            (v.x1 / self.h).floor() as i64,
            (v.x2 / self.h).floor() as i64,
        )
    }

    fn insert(&mut self, v: LorentzVector, idx: usize) {
        let c = self.cell(v);
        self.cells.entry(c).or_default().push(idx);
    }

    fn candidates(&self, v: LorentzVector) -> impl Iterator<Item = usize> + '_ {
        let (a, b, c) = self.cell(v);
        (-1..=1).flat_map(move |i| {
            (-1..=1).flat_map(move |j| {
                (-1..=1).flat_map(move |k| {
                    self.cells
                        .get(&(a + i, b + j, c + k))
                        .into_iter()
                        .flatten()
                        .copied()
                })
            })
        })
    }
}

impl GroupBall {
    /// All elements of word length at most `l`.
    pub fn by_length(p: &Polygon, l: usize, o: &HPoint, cfg: &BallConfig) -> Result<Self> {
        if l > MAX_BALL_LENGTH {
            return Err(Error::Precondition(format!(
                "word length {l} exceeds the limit {MAX_BALL_LENGTH}"
            )));
        }
        Self::build(p, o, BallBound::Length(l), cfg, |len, _| len <= l)
    }

    /// All elements with `d(o, g o) <= r`, possibly with some more.
    ///
    /// The geodesic from `o` to `g o` crosses a gallery of tiles realizing a
    /// minimal word for `g`, and each of those tiles contains a point of the
    /// geodesic, so its translate of `o` lies within `r + rho` of `o`, where
    /// `rho` bounds the distance from `o` to the polygon's vertices. The
    /// search is therefore pruned at `r + rho` without losing lengths.
    pub fn by_radius(p: &Polygon, r: f64, o: &HPoint, cfg: &BallConfig) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::domain(format!(
                "ball radius {r} must be finite and >= 0"
            )));
        }
        if !p.is_compact() {
            return Err(Error::Precondition(
                "radius balls need a compact polygon".into(),
            ));
        }
        let rho = p
            .vertices()
            .iter()
            .filter_map(|v| v.finite())
            .map(|q| point_distance(o.vector(), q.vector()))
            .fold(0.0, f64::max);
        let limit = r + rho + TOL.constructed;
        Self::build(p, o, BallBound::Radius(r), cfg, |_, d| d <= limit)
    }

    fn build(
        p: &Polygon,
        o: &HPoint,
        bound: BallBound,
        cfg: &BallConfig,
        keep: impl Fn(usize, f64) -> bool,
    ) -> Result<Self> {
        let generators = side_reflections(p);
        let ov = o.vector();
        let mut ball = GroupBall {
            generators,
            basepoint: *o,
            bound,
            elements: vec![GroupElement {
                matrix: Isometry::IDENTITY,
                word: Vec::new(),
                length: 0,
            }],
            parents: vec![Vec::new()],
            displacement: vec![0.0],
            min_pairwise: f64::INFINITY,
            dedup: cfg.dedup,
        };
        let mut index = OrbitIndex::new();
        index.insert(ov, 0);
        let mut layer = vec![0usize];
        let mut len = 0;
        while !layer.is_empty() {
            len += 1;
            let mut next = Vec::new();
            for &pi in &layer {
                for s in 0..ball.generators.len() {
                    if ball.elements[pi].word.last() == Some(&s) {
                        continue;
                    }
                    let m = ball.elements[pi].matrix.compose(&ball.generators[s]);
                    let image = m.apply(ov);
                    let found = index.candidates(image).find(|&j| {
                        let e = &ball.elements[j].matrix;
                        e.max_entry_distance(&m) < cfg.dedup * e.max_abs().max(1.0)
                    });
                    match found {
                        Some(j) => {
                            if ball.elements[j].length == len {
                                ball.parents[j].push((pi, s));
                            }
                        }
                        None => {
                            let d = point_distance(ov, image);
                            if !keep(len, d) {
                                continue;
                            }
                            if ball.elements.len() >= cfg.cap {
                                return Err(Error::SizeLimit { cap: cfg.cap });
                            }
                            let mut word = ball.elements[pi].word.clone();
                            word.push(s);
                            let idx = ball.elements.len();
                            ball.elements.push(GroupElement {
                                matrix: m,
                                word,
                                length: len,
                            });
                            ball.parents.push(vec![(pi, s)]);
                            ball.displacement.push(d);
                            index.insert(image, idx);
                            next.push(idx);
                        }
                    }
                }
            }
            layer = next;
        }
        ball.min_pairwise = collision_audit(&ball.elements);
        Ok(ball)
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    pub fn basepoint(&self) -> HPoint {
        self.basepoint
    }

    pub fn bound(&self) -> BallBound {
        self.bound
    }

    /// Displacement radius the ball is guaranteed to cover at its basepoint.
    pub fn radius(&self) -> Option<f64> {
        match self.bound {
            BallBound::Radius(r) => Some(r),
            BallBound::Length(_) => None,
        }
    }

    /// Elements in BFS order; the identity comes first.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn parents(&self, idx: usize) -> &[(usize, usize)] {
        &self.parents[idx]
    }

    pub fn displacement(&self, idx: usize) -> f64 {
        self.displacement[idx]
    }

    /// Smallest max-entry distance between two stored matrices.
    pub fn min_pairwise_distance(&self) -> f64 {
        self.min_pairwise
    }

    pub fn max_length(&self) -> usize {
        self.elements.last().map_or(0, |e| e.length)
    }

    /// Index of the stored element matching `m`.
    pub fn find(&self, m: &Isometry) -> Option<usize> {
        let image = m.apply(self.basepoint.vector());
        self.elements.iter().position(|e| {
            e.matrix.max_entry_distance(m) < self.dedup * e.matrix.max_abs().max(1.0)
                && point_distance(e.matrix.apply(self.basepoint.vector()), image) < 1e-6
        })
    }

    /// Product of the generators along `word`.
    pub fn evaluate(&self, word: &[usize]) -> Result<Isometry> {
        word.iter().try_fold(Isometry::IDENTITY, |acc, &s| {
            self.generators
                .get(s)
                .map(|g| acc.compose(g))
                .ok_or_else(|| Error::domain(format!("generator index {s} out of range")))
        })
    }

    /// Indices of elements reachable backwards through the parent DAG.
    fn ancestors(&self, idx: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.elements.len()];
        seen[idx] = true;
        let mut stack = vec![idx];
        while let Some(i) = stack.pop() {
            for &(p, s) in &self.parents[i] {
                if allowed(s) && !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Letters used by some minimal expression of element `idx`.
    pub fn minimal_support_of(&self, idx: usize) -> Vec<usize> {
        let seen = self.ancestors(idx, |_| true);
        let mut letters: Vec<usize> = seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .flat_map(|(i, _)| self.parents[i].iter().map(|&(_, s)| s))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        letters.sort_unstable();
        letters
    }

    /// Every minimal expression of element `idx` (exponential; for tests).
    pub fn minimal_words(&self, idx: usize) -> Vec<Vec<usize>> {
        if idx == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for &(p, s) in &self.parents[idx] {
            for mut w in self.minimal_words(p) {
                w.push(s);
                out.push(w);
            }
        }
        out
    }
}

/// Smallest max-entry distance between two matrices, by a sweep over the
/// matrices sorted by their `(0, 0)` entry.
pub fn collision_audit(elements: &[GroupElement]) -> f64 {
    let mut order: Vec<&Isometry> = elements.iter().map(|e| &e.matrix).collect();
    order.sort_by(|a, b| a.rows()[0][0].total_cmp(&b.rows()[0][0]));
    let mut best = f64::INFINITY;
    for i in 0..order.len() {
        let a = order[i];
        for b in &order[i + 1..] {
            if b.rows()[0][0] - a.rows()[0][0] >= best {
                break;
            }
            best = best.min(a.max_entry_distance(b));
        }
    }
    best
}

/// Letters used by some minimal expression of `g`.
pub fn minimal_support(g: &GroupElement, ball: &GroupBall) -> Result<Vec<usize>> {
    let idx = ball.find(&g.matrix).ok_or(Error::NotInBall)?;
    Ok(ball.minimal_support_of(idx))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub word: Vec<usize>,
    pub generator: usize,
    pub element_displacement: f64,
    pub generator_displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinLengthReport {
    pub max_length: usize,
    pub elements: usize,
    pub pairs_checked: usize,
    /// Smallest `d(o, w o) - d(o, s o)` over the checked pairs.
    pub min_slack: f64,
    pub min_pairwise_distance: f64,
    pub violations: Vec<Violation>,
}

impl MinLengthReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every `w` in the ball of length `l` and every generator `s` in the
/// minimal support of `w`, checks `d(o, w o) + 1e-9 >= d(o, s o)`.
pub fn check_gens_minlength(p: &Polygon, o: &HPoint, l: usize) -> Result<MinLengthReport> {
    let ball = GroupBall::by_length(p, l, o, &BallConfig::default())?;
    Ok(check_gens_minlength_in(&ball))
}

pub fn check_gens_minlength_in(ball: &GroupBall) -> MinLengthReport {
    let ov = ball.basepoint().vector();
    let gen_disp: Vec<f64> = ball
        .generators()
        .iter()
        .map(|s| point_distance(ov, s.apply(ov)))
        .collect();
    let mut report = MinLengthReport {
        max_length: ball.max_length(),
        elements: ball.len(),
        pairs_checked: 0,
        min_slack: f64::INFINITY,
        min_pairwise_distance: ball.min_pairwise_distance(),
        violations: Vec::new(),
    };
    for idx in 1..ball.len() {
        let d = ball.displacement(idx);
        for s in ball.minimal_support_of(idx) {
            report.pairs_checked += 1;
            report.min_slack = report.min_slack.min(d - gen_disp[s]);
            if d + TOL.constructed < gen_disp[s] {
                report.violations.push(Violation {
                    word: ball.elements()[idx].word.clone(),
                    generator: s,
                    element_displacement: d,
                    generator_displacement: gen_disp[s],
                });
            }
        }
    }
    report
}

/// A minimal word for `g` using only generators that move `o` by at most `r`.
pub fn bounded_factorization(g: &GroupElement, ball: &GroupBall, r: f64) -> Result<Vec<usize>> {
    let idx = ball.find(&g.matrix).ok_or(Error::NotInBall)?;
    bounded_factorization_at(ball, idx, r)
}

pub fn bounded_factorization_at(ball: &GroupBall, idx: usize, r: f64) -> Result<Vec<usize>> {
    let ov = ball.basepoint().vector();
    let d = ball.displacement(idx);
    if d > r + TOL.constructed {
        return Err(Error::Precondition(format!(
            "element moves the basepoint by {d} > {r}"
        )));
    }
    let allowed: Vec<bool> = ball
        .generators()
        .iter()
        .map(|s| point_distance(ov, s.apply(ov)) <= r + TOL.constructed)
        .collect();
    // Parents precede children in BFS order, so one forward pass finds the
    // elements reachable from the identity through allowed letters.
    let mut good = vec![false; idx + 1];
    good[0] = true;
    for i in 1..=idx {
        good[i] = ball.parents[i].iter().any(|&(p, s)| allowed[s] && good[p]);
    }
    if !good[idx] {
        return Err(Error::Counterexample(format!(
            "no minimal word for {:?} uses only generators moving o by <= {r}",
            ball.elements()[idx].word
        )));
    }
    let mut word = Vec::new();
    let mut cur = idx;
    while cur != 0 {
        let &(p, s) = ball.parents[cur]
            .iter()
            .find(|&&(p, s)| allowed[s] && good[p])
            .expect("a good element has a good parent");
        word.push(s);
        cur = p;
    }
    word.reverse();
    Ok(word)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDisplacement {
    /// Ball indices of non-trivial elements with `d(x, g x) <= r`.
    pub elements: Vec<usize>,
    pub displacements: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Non-trivial elements of the ball moving `x` by at most `r`.
pub fn local_small_displacement(x: &HPoint, r: f64, ball: &GroupBall) -> LocalDisplacement {
    let xv = x.vector();
    let mut warnings = Vec::new();
    let need = r + 2.0 * point_distance(ball.basepoint().vector(), xv);
    match ball.radius() {
        Some(radius) if radius >= need => {}
        Some(radius) => warnings.push(format!(
            "ball radius {radius} is below r + 2 d(o, x) = {need}"
        )),
        None => warnings.push("ball is bounded by word length; radius margin unknown".into()),
    }
    let mut out = LocalDisplacement {
        elements: Vec::new(),
        displacements: Vec::new(),
        warnings,
    };
    for (i, e) in ball.elements().iter().enumerate().skip(1) {
        let d = point_distance(xv, e.matrix.apply(xv));
        if d <= r + TOL.constructed {
            out.elements.push(i);
            out.displacements.push(d);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    #[serde(rename = "R")]
    pub r: f64,
    pub rho: f64,
    pub count: usize,
    /// `2 pi (cosh(R + rho) - 1) / area(P)`.
    pub bound: f64,
    pub slack: f64,
    pub passed: bool,
}

/// Counts orbit points within `r` of the basepoint against the number of
/// disjoint tiles fitting in the disc of radius `r + rho`.
pub fn packing_check(p: &Polygon, ball: &GroupBall, r: f64, slack: f64) -> PackingReport {
    let o = ball.basepoint().vector();
    let rho = p
        .vertices()
        .iter()
        .map(|v| {
            v.finite()
                .map_or(f64::INFINITY, |q| point_distance(o, q.vector()))
        })
        .fold(0.0, f64::max);
    let count = (0..ball.len())
        .filter(|&i| ball.displacement(i) <= r)
        .count();
    let bound = 2.0 * std::f64::consts::PI * ((r + rho).cosh() - 1.0) / p.area();
    PackingReport {
        r,
        rho,
        count,
        bound,
        slack,
        passed: count as f64 <= bound * slack,
    }
}

/// One row of the ball-size table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSizeRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub size: usize,
    pub min_pairwise_distance: f64,
}

/// Ball sizes and collision audits for each length up to `l`.
pub fn ball_size_table(
    p: &Polygon,
    o: &HPoint,
    l: usize,
    cfg: &BallConfig,
) -> Result<Vec<BallSizeRow>> {
    (0..=l)
        .map(|k| {
            let ball = GroupBall::by_length(p, k, o, cfg)?;
            Ok(BallSizeRow {
                l: k,
                size: ball.len(),
                min_pairwise_distance: ball.min_pairwise_distance(),
            })
        })
        .collect()
}
