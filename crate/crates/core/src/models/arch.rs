//! Arch systems, meandric systems, irreducibility and block decomposition.
//!
//! Points are 0-based internally; the constructors taking pairs use the
//! 1-based labels 1..2n.

use super::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Above,
    Below,
}

/// Position of a point on the boundary circle obtained by unfolding the line:
/// upper points left to right, then lower points right to left.
fn circle_position(x: usize, side: Side, points: usize) -> usize {
    match side {
        Side::Above => x,
        Side::Below => 2 * points - 1 - x,
    }
}

fn check_matching(partner: &[usize]) -> Result<(), ModelError> {
    if partner.len() % 2 != 0 {
        return Err(ModelError::InvalidSystem("odd number of points".into()));
    }
    for (x, &p) in partner.iter().enumerate() {
        if p >= partner.len() || p == x || partner[p] != x {
            return Err(ModelError::InvalidSystem(format!("point {} is not properly paired", x + 1)));
        }
    }
    Ok(())
}

/// True when the chords `(a,b)` and `(c,d)` of a circle interleave.
fn interleaved(a: usize, b: usize, c: usize, d: usize) -> bool {
    let (a, b) = (a.min(b), a.max(b));
    let (c, d) = (c.min(d), c.max(d));
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

fn is_noncrossing(partner: &[usize]) -> bool {
    let mut stack = Vec::new();
    for (x, &p) in partner.iter().enumerate() {
        if p > x {
            stack.push(x);
        } else if stack.pop() != Some(p) {
            return false;
        }
    }
    true
}

fn pairs_to_partner(points: usize, pairs: impl Iterator<Item = (usize, usize)>) -> Result<Vec<usize>, ModelError> {
    let mut partner = vec![usize::MAX; points];
    for (a, b) in pairs {
        if a == 0 || b == 0 || a > points || b > points {
            return Err(ModelError::InvalidSystem(format!("label out of range in ({a},{b})")));
        }
        for (x, y) in [(a - 1, b - 1), (b - 1, a - 1)] {
            if partner[x] != usize::MAX {
                return Err(ModelError::InvalidSystem(format!("point {} used twice", x + 1)));
            }
            partner[x] = y;
        }
    }
    if partner.contains(&usize::MAX) {
        return Err(ModelError::InvalidSystem("some point carries no arch".into()));
    }
    check_matching(&partner)?;
    Ok(partner)
}

/// Non-crossing arches on 2n points, each end labelled by the side it leaves from.
///
/// In a closed system both ends of an arch are on the same side. In an open
/// system an arch may leave above and return below after winding around the
/// right end of the line.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArchSystem {
    partner: Vec<usize>,
    side: Vec<Side>,
    bicolored: bool,
    open: bool,
}

impl ArchSystem {
    pub fn from_parts(
        partner: Vec<usize>,
        side: Vec<Side>,
        bicolored: bool,
        open: bool,
    ) -> Result<Self, ModelError> {
        let sys = ArchSystem { partner, side, bicolored, open };
        sys.validate()?;
        Ok(sys)
    }

    pub(crate) fn from_parts_unchecked(partner: Vec<usize>, side: Vec<Side>, bicolored: bool, open: bool) -> Self {
        ArchSystem { partner, side, bicolored, open }
    }

    /// Closed system from 1-based `(a, b, side)` arches.
    pub fn closed(arches: &[(usize, usize, Side)], bicolored: bool) -> Result<Self, ModelError> {
        let points = 2 * arches.len();
        let partner = pairs_to_partner(points, arches.iter().map(|&(a, b, _)| (a, b)))?;
        let mut side = vec![Side::Above; points];
        for &(a, b, s) in arches {
            side[a - 1] = s;
            side[b - 1] = s;
        }
        ArchSystem::from_parts(partner, side, bicolored, false)
    }

    /// Open system from 1-based `(a, side at a, b, side at b)` arches.
    pub fn open(arches: &[(usize, Side, usize, Side)]) -> Result<Self, ModelError> {
        let points = 2 * arches.len();
        let partner = pairs_to_partner(points, arches.iter().map(|&(a, _, b, _)| (a, b)))?;
        let mut side = vec![Side::Above; points];
        for &(a, sa, b, sb) in arches {
            side[a - 1] = sa;
            side[b - 1] = sb;
        }
        ArchSystem::from_parts(partner, side, false, true)
    }

    fn validate(&self) -> Result<(), ModelError> {
        check_matching(&self.partner)?;
        let points = self.partner.len();
        if self.side.len() != points {
            return Err(ModelError::InvalidSystem("side labels do not cover all points".into()));
        }
        for x in 0..points {
            let p = self.partner[x];
            if !self.open && self.side[x] != self.side[p] {
                return Err(ModelError::InvalidSystem(format!("arch at {} changes side", x + 1)));
            }
            if self.bicolored && (x + p) % 2 == 0 {
                return Err(ModelError::InvalidSystem(format!("arch at {} joins equal colors", x + 1)));
            }
        }
        let chords: Vec<(usize, usize)> = (0..points)
            .filter(|&x| x < self.partner[x])
            .map(|x| {
                let p = self.partner[x];
                (circle_position(x, self.side[x], points), circle_position(p, self.side[p], points))
            })
            .collect();
        for (i, &(a, b)) in chords.iter().enumerate() {
            for &(c, d) in &chords[i + 1..] {
                if interleaved(a, b, c, d) {
                    return Err(ModelError::InvalidSystem("arches cross".into()));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, x: usize) -> usize {
        self.partner[x]
    }

    pub fn side(&self, x: usize) -> Side {
        self.side[x]
    }

    pub fn is_bicolored(&self) -> bool {
        self.bicolored
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn is_winding(&self, x: usize) -> bool {
        self.side[x] != self.side[self.partner[x]]
    }

    /// 1-based pairs `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.partner.len())
            .filter(|&x| x < self.partner[x])
            .map(|x| (x + 1, self.partner[x] + 1))
            .collect()
    }

    /// The unweighted core of an open system: points outside every maximal
    /// regular self-matched segment.
    pub fn open_core(&self) -> Option<ArchSystem> {
        if !self.open {
            return None;
        }
        let (_, core) = top_level_segments(self, 0, self.points());
        Some(self.restrict(&core))
    }
}

/// Two non-crossing perfect matchings on the same 2n points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MeanderSystem {
    upper: Vec<usize>,
    lower: Vec<usize>,
}

impl MeanderSystem {
    pub fn from_partners(upper: Vec<usize>, lower: Vec<usize>) -> Result<Self, ModelError> {
        check_matching(&upper)?;
        check_matching(&lower)?;
        if upper.len() != lower.len() {
            return Err(ModelError::InvalidSystem("upper and lower sizes differ".into()));
        }
        if !is_noncrossing(&upper) || !is_noncrossing(&lower) {
            return Err(ModelError::InvalidSystem("arches cross".into()));
        }
        Ok(MeanderSystem { upper, lower })
    }

    pub(crate) fn from_partners_unchecked(upper: Vec<usize>, lower: Vec<usize>) -> Self {
        MeanderSystem { upper, lower }
    }

    /// From 1-based upper and lower pairs.
    pub fn new(upper: &[(usize, usize)], lower: &[(usize, usize)]) -> Result<Self, ModelError> {
        let points = 2 * upper.len();
        MeanderSystem::from_partners(
            pairs_to_partner(points, upper.iter().copied())?,
            pairs_to_partner(points, lower.iter().copied())?,
        )
    }

    pub fn n(&self) -> usize {
        self.upper.len() / 2
    }

    pub fn upper(&self) -> &[usize] {
        &self.upper
    }

    pub fn lower(&self) -> &[usize] {
        &self.lower
    }

    /// Number of closed loops, by union-find over the points.
    pub fn connected_components(&self) -> usize {
        let mut dsu = DisjointSets::new(self.upper.len());
        for x in 0..self.upper.len() {
            dsu.union(x, self.upper[x]);
            dsu.union(x, self.lower[x]);
        }
        dsu.count()
    }
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    sets: usize,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), sets: n }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.sets -= 1;
        }
    }

    pub(crate) fn count(&self) -> usize {
        self.sets
    }
}

/// Anything whose points can be cut into self-matched segments.
pub trait BlockStructure: Sized {
    fn points(&self) -> usize;

    /// Smallest and largest point tied to `x` by an arch (including `x`), or
    /// `None` when `x` can never lie in a self-matched segment.
    fn reach(&self, x: usize) -> Option<(usize, usize)>;

    /// Whether the whole system is itself a weighted block.
    fn whole_is_block(&self) -> bool {
        true
    }

    /// Sub-system on the given increasing points, re-indexed.
    fn restrict(&self, points: &[usize]) -> Self;

    fn size(&self) -> usize {
        self.points() / 2
    }

    /// True when `[a, b]` is matched entirely within itself.
    fn self_matched(&self, a: usize, b: usize) -> bool {
        (a..=b).all(|x| self.reach(x).is_some_and(|(lo, hi)| lo >= a && hi <= b))
    }

    fn is_irreducible(&self) -> bool {
        let points = self.points();
        for start in 0..points {
            let (mut lo, mut hi) = (usize::MAX, 0);
            for end in start..points {
                let Some((a, b)) = self.reach(end) else { break };
                lo = lo.min(a);
                hi = hi.max(b);
                if lo < start {
                    break;
                }
                let whole = start == 0 && end == points - 1;
                if hi <= end && !(whole && self.whole_is_block()) {
                    return false;
                }
            }
        }
        true
    }

    /// Number of weighted blocks.
    fn block_count(&self) -> usize {
        if self.whole_is_block() {
            count_blocks_in(self, 0, self.points() - 1)
        } else {
            let (segments, _) = top_level_segments(self, 0, self.points());
            segments.iter().map(|&(a, b)| count_blocks_in(self, a, b)).sum()
        }
    }

    /// The irreducible weighted blocks, outermost first.
    fn block_decomposition(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.whole_is_block() {
            collect_blocks(self, 0, self.points() - 1, &mut out);
        } else {
            let (segments, _) = top_level_segments(self, 0, self.points());
            for (a, b) in segments {
                collect_blocks(self, a, b, &mut out);
            }
        }
        out
    }
}

/// Largest `e <= limit` with `[start, e]` self-matched.
fn largest_closed_end<S: BlockStructure>(s: &S, start: usize, limit: usize) -> Option<usize> {
    let (mut lo, mut hi) = (usize::MAX, 0);
    let mut best = None;
    for e in start..=limit {
        let Some((a, b)) = s.reach(e) else { break };
        lo = lo.min(a);
        hi = hi.max(b);
        if lo < start {
            break;
        }
        if hi <= e {
            best = Some(e);
        }
    }
    best
}

/// Maximal self-matched segments in `[from, to)`, and the points outside them.
fn top_level_segments<S: BlockStructure>(s: &S, from: usize, to: usize) -> (Vec<(usize, usize)>, Vec<usize>) {
    let mut segments = Vec::new();
    let mut rest = Vec::new();
    let mut x = from;
    while x < to {
        match largest_closed_end(s, x, to - 1) {
            Some(e) => {
                segments.push((x, e));
                x = e + 1;
            }
            None => {
                rest.push(x);
                x += 1;
            }
        }
    }
    (segments, rest)
}

/// Blocks inside a self-matched segment; the block holding `a` is kept.
fn count_blocks_in<S: BlockStructure>(s: &S, a: usize, b: usize) -> usize {
    let mut count = 1;
    let mut x = a + 1;
    while x <= b {
        match largest_closed_end(s, x, b) {
            Some(e) => {
                count += count_blocks_in(s, x, e);
                x = e + 1;
            }
            None => x += 1,
        }
    }
    count
}

fn collect_blocks<S: BlockStructure>(s: &S, a: usize, b: usize, out: &mut Vec<S>) {
    let (segments, rest) = top_level_segments(s, a + 1, b + 1);
    let mut core = vec![a];
    core.extend(rest);
    out.push(s.restrict(&core));
    for (x, e) in segments {
        collect_blocks(s, x, e, out);
    }
}

fn reindex(points: &[usize], total: usize) -> Vec<usize> {
    let mut index = vec![usize::MAX; total];
    for (i, &p) in points.iter().enumerate() {
        index[p] = i;
    }
    index
}

impl BlockStructure for ArchSystem {
    fn points(&self) -> usize {
        self.partner.len()
    }

    fn reach(&self, x: usize) -> Option<(usize, usize)> {
        if self.open && self.is_winding(x) {
            return None;
        }
        let p = self.partner[x];
        Some((x.min(p), x.max(p)))
    }

    fn whole_is_block(&self) -> bool {
        !self.open
    }

    fn restrict(&self, points: &[usize]) -> Self {
        let index = reindex(points, self.partner.len());
        let partner = points.iter().map(|&p| index[self.partner[p]]).collect();
        let side = points.iter().map(|&p| self.side[p]).collect();
        let open = self.open && points.iter().any(|&p| self.is_winding(p));
        ArchSystem { partner, side, bicolored: self.bicolored, open }
    }
}

impl BlockStructure for MeanderSystem {
    fn points(&self) -> usize {
        self.upper.len()
    }

    fn reach(&self, x: usize) -> Option<(usize, usize)> {
        let (u, l) = (self.upper[x], self.lower[x]);
        Some((x.min(u).min(l), x.max(u).max(l)))
    }

    fn restrict(&self, points: &[usize]) -> Self {
        let index = reindex(points, self.upper.len());
        MeanderSystem {
            upper: points.iter().map(|&p| index[self.upper[p]]).collect(),
            lower: points.iter().map(|&p| index[self.lower[p]]).collect(),
        }
    }
}
