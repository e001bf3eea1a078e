//! Brute-force enumeration of arch and meandric systems.

use super::arch::{ArchSystem, BlockStructure, MeanderSystem, Side};
use super::{Family, ModelError};
use crate::ring::{IntPoly, IntPoly2, Poly};
use rug::Integer;
use std::collections::HashMap;

pub const ARCH_CAP: usize = 12;
pub const MEANDER_CAP: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArchConstraints {
    pub bicolored: bool,
    pub open: bool,
    pub cap: usize,
}

impl Default for ArchConstraints {
    fn default() -> Self {
        ArchConstraints { bicolored: false, open: false, cap: ARCH_CAP }
    }
}

impl ArchConstraints {
    pub fn for_family(family: Family) -> Result<Self, ModelError> {
        let base = ArchConstraints::default();
        match family {
            Family::Cubic => Ok(base),
            Family::Bicubic => Ok(ArchConstraints { bicolored: true, ..base }),
            Family::OpenPath => Ok(ArchConstraints { open: true, ..base }),
            _ => Err(ModelError::NoEnumerator { family }),
        }
    }
}

/// All non-crossing perfect matchings on `points` points as partner arrays.
///
/// Order: point 0 pairs with 1, 3, 5, ...; inside before outside.
pub fn noncrossing_matchings(points: usize) -> Vec<Vec<usize>> {
    fn build(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
        if lo >= hi {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in (lo + 1..hi).step_by(2) {
            let inner = build(lo + 1, p);
            let outer = build(p + 1, hi);
            for i in &inner {
                for o in &outer {
                    let mut m = Vec::with_capacity(i.len() + o.len() + 1);
                    m.push((lo, p));
                    m.extend_from_slice(i);
                    m.extend_from_slice(o);
                    out.push(m);
                }
            }
        }
        out
    }
    if points % 2 != 0 {
        return Vec::new();
    }
    build(0, points)
        .into_iter()
        .map(|pairs| {
            let mut partner = vec![0; points];
            for (a, b) in pairs {
                partner[a] = b;
                partner[b] = a;
            }
            partner
        })
        .collect()
}

/// Restartable stream of arch systems with `n` arches.
///
/// Closed systems are scanned point by point with one stack per side. Open
/// systems are scanned along the boundary circle (upper side left to right,
/// then lower side right to left) with a single stack.
pub struct ArchSystems {
    open: bool,
    bicolored: bool,
    points: usize,
    len: usize,
    choice: Vec<u8>,
    depth: usize,
    stacks: [Vec<usize>; 2],
    partner: Vec<usize>,
    side: Vec<Side>,
    started: bool,
}

pub fn enumerate_arch_systems(n: usize, constraints: ArchConstraints) -> Result<ArchSystems, ModelError> {
    if n > constraints.cap {
        return Err(ModelError::CapExceeded { n, cap: constraints.cap });
    }
    if constraints.open && constraints.bicolored {
        return Err(ModelError::InvalidSystem("bicolored open systems are not modelled".into()));
    }
    let points = 2 * n;
    let len = if constraints.open { 2 * points } else { points };
    Ok(ArchSystems {
        open: constraints.open,
        bicolored: constraints.bicolored,
        points,
        len,
        choice: vec![0; len],
        depth: 0,
        stacks: [Vec::new(), Vec::new()],
        partner: vec![0; points],
        side: vec![Side::Above; points],
        started: false,
    })
}

const SIDES: [Side; 2] = [Side::Above, Side::Below];

impl ArchSystems {
    fn apply(&mut self, c: u8) -> bool {
        let q = self.depth;
        if !self.open {
            let x = q;
            let s = (c % 2) as usize;
            if c < 2 {
                let pending = self.stacks[0].len() + self.stacks[1].len();
                if pending + 1 > self.points - x - 1 {
                    return false;
                }
                self.stacks[s].push(x);
            } else {
                let Some(&t) = self.stacks[s].last() else { return false };
                if self.bicolored && (x - t) % 2 == 0 {
                    return false;
                }
                self.stacks[s].pop();
                self.partner[x] = t;
                self.partner[t] = x;
            }
            self.side[x] = SIDES[s];
            return true;
        }
        let upper = q < self.points;
        let x = if upper { q } else { 2 * self.points - 1 - q };
        if !upper && self.side[x] == Side::Above {
            return c == 0;
        }
        match c {
            0 => {
                if !upper {
                    return false;
                }
                self.side[x] = Side::Below;
            }
            1 => {
                if self.stacks[0].len() >= self.len - q - 1 {
                    return false;
                }
                self.stacks[0].push(x);
            }
            _ => {
                let Some(t) = self.stacks[0].pop() else { return false };
                self.partner[x] = t;
                self.partner[t] = x;
            }
        }
        if upper && c != 0 {
            self.side[x] = Side::Above;
        }
        true
    }

    fn undo(&mut self, c: u8) {
        let q = self.depth;
        let (x, s) = if self.open {
            let x = if q < self.points { q } else { 2 * self.points - 1 - q };
            (x, 0)
        } else {
            (q, (c % 2) as usize)
        };
        let is_open = if self.open { c == 1 } else { c < 2 };
        let is_close = if self.open { c == 2 } else { c >= 2 };
        if is_open {
            self.stacks[s].pop();
        } else if is_close {
            self.stacks[s].push(self.partner[x]);
        }
    }

    fn pop(&mut self) -> Option<u8> {
        if self.depth == 0 {
            return None;
        }
        self.depth -= 1;
        let c = self.choice[self.depth];
        self.undo(c);
        Some(c)
    }

    /// Moves to the next system; false when the stream is exhausted.
    pub fn advance(&mut self) -> bool {
        let choices = if self.open { 3 } else { 4 };
        let mut c = if self.started {
            match self.pop() {
                Some(p) => p + 1,
                None => return false,
            }
        } else {
            self.started = true;
            0
        };
        loop {
            if self.depth == self.len {
                if self.stacks[0].is_empty() && self.stacks[1].is_empty() {
                    return true;
                }
                match self.pop() {
                    Some(p) => c = p + 1,
                    None => return false,
                }
                continue;
            }
            if c >= choices {
                match self.pop() {
                    Some(p) => c = p + 1,
                    None => return false,
                }
                continue;
            }
            if self.apply(c) {
                self.choice[self.depth] = c;
                self.depth += 1;
                c = 0;
            } else {
                c += 1;
            }
        }
    }

    /// The system reached by the last successful `advance`.
    pub fn current(&self) -> ArchSystem {
        ArchSystem::from_parts_unchecked(self.partner.clone(), self.side.clone(), self.bicolored, self.open)
    }
}

impl Iterator for ArchSystems {
    type Item = ArchSystem;
    fn next(&mut self) -> Option<ArchSystem> {
        self.advance().then(|| self.current())
    }
}

/// Stream of meandric systems with `n` arches per side, upper matching outermost.
pub fn enumerate_meander_systems(
    n: usize,
    cap: usize,
) -> Result<impl Iterator<Item = MeanderSystem>, ModelError> {
    if n > cap {
        return Err(ModelError::CapExceeded { n, cap });
    }
    let matchings = noncrossing_matchings(2 * n);
    let count = matchings.len();
    Ok((0..count * count).map(move |i| {
        MeanderSystem::from_partners_unchecked(matchings[i / count].clone(), matchings[i % count].clone())
    }))
}

fn check_cap(family: Family, n_max: usize) -> Result<(), ModelError> {
    match family.enumeration_cap() {
        Some(cap) if n_max <= cap => Ok(()),
        Some(cap) => Err(ModelError::CapExceeded { n: n_max, cap }),
        None => Err(ModelError::NoEnumerator { family }),
    }
}

fn histogram_to_poly(h: &[u64]) -> IntPoly {
    Poly::new(h.iter().map(|&c| Integer::from(c)).collect())
}

/// m_n^{(u)} for n = 0..=n_max, summing u^{#blocks} over all systems.
pub fn brute_force_weighted_counts(family: Family, n_max: usize) -> Result<Vec<IntPoly>, ModelError> {
    check_cap(family, n_max)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(Poly::constant(Integer::from(1)));
    for n in 1..=n_max {
        let mut hist = vec![0u64; n + 1];
        match family {
            Family::Meander | Family::MeanderQ => {
                for m in enumerate_meander_systems(n, MEANDER_CAP)? {
                    hist[m.block_count()] += 1;
                }
            }
            _ => {
                let mut it = enumerate_arch_systems(n, ArchConstraints::for_family(family)?)?;
                while it.advance() {
                    hist[it.current().block_count()] += 1;
                }
            }
        }
        out.push(histogram_to_poly(&hist));
    }
    Ok(out)
}

/// m_n^{(u)}(q) for meandric systems: outer variable u, inner variable q.
pub fn brute_force_meander_q(n_max: usize) -> Result<Vec<IntPoly2>, ModelError> {
    check_cap(Family::MeanderQ, n_max)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(Poly::constant(Poly::constant(Integer::from(1))));
    for n in 1..=n_max {
        let mut hist = vec![vec![0u64; n + 1]; n + 1];
        for m in enumerate_meander_systems(n, MEANDER_CAP)? {
            hist[m.block_count()][m.connected_components()] += 1;
        }
        out.push(Poly::new(hist.iter().map(|row| histogram_to_poly(row)).collect()));
    }
    Ok(out)
}

/// Number of closed systems on `points` points, memoised on the stack parities.
fn count_closed(points: usize, bicolored: bool) -> Integer {
    type Key = (usize, u8, u32, u8, u32);
    fn go(
        x: usize,
        points: usize,
        bicolored: bool,
        st: [(u8, u32); 2],
        memo: &mut HashMap<Key, u128>,
    ) -> u128 {
        let pending = (st[0].0 + st[1].0) as usize;
        if x == points {
            return u128::from(pending == 0);
        }
        let key = (x, st[0].0, st[0].1, st[1].0, st[1].1);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let parity = if bicolored { (x % 2) as u32 } else { 0 };
        let mut total = 0;
        for s in 0..2 {
            if pending + 1 <= points - x - 1 {
                let mut next = st;
                next[s] = (st[s].0 + 1, (st[s].1 << 1) | parity);
                total += go(x + 1, points, bicolored, next, memo);
            }
            if st[s].0 > 0 && (!bicolored || st[s].1 & 1 != parity) {
                let mut next = st;
                next[s] = (st[s].0 - 1, st[s].1 >> 1);
                total += go(x + 1, points, bicolored, next, memo);
            }
        }
        memo.insert(key, total);
        total
    }
    Integer::from(go(0, points, bicolored, [(0, 0); 2], &mut HashMap::new()))
}

/// u = 1 counts for n = 0..=n_max.
pub fn brute_force_counts(family: Family, n_max: usize) -> Result<Vec<Integer>, ModelError> {
    check_cap(family, n_max)?;
    match family {
        Family::Cubic | Family::Bicubic => {
            let bicolored = family == Family::Bicubic;
            Ok((0..=n_max).map(|n| count_closed(2 * n, bicolored)).collect())
        }
        Family::OpenPath => (0..=n_max)
            .map(|n| {
                let mut it = enumerate_arch_systems(n, ArchConstraints::for_family(family)?)?;
                let mut count = 0u64;
                while it.advance() {
                    count += 1;
                }
                Ok(Integer::from(count))
            })
            .collect(),
        Family::Meander | Family::MeanderQ => Ok(meander_component_counts(n_max)?
            .into_iter()
            .map(|row| row.into_iter().sum())
            .collect()),
        Family::Quad => Err(ModelError::NoEnumerator { family }),
    }
}

/// Component-resolved meander counts: row n holds m_{n,k} for k = 0..=n.
///
/// For each upper matching the lower arches are added one at a time, merging
/// the open paths they join and counting the loops they close.
pub fn meander_component_counts(n_max: usize) -> Result<Vec<Vec<Integer>>, ModelError> {
    check_cap(Family::Meander, n_max)?;
    struct Walk {
        points: usize,
        end: Vec<usize>,
        stack: Vec<usize>,
        hist: Vec<u64>,
    }
    impl Walk {
        fn go(&mut self, x: usize, loops: usize) {
            if x == self.points {
                self.hist[loops] += 1;
                return;
            }
            if self.stack.len() < self.points - x - 1 {
                self.stack.push(x);
                self.go(x + 1, loops);
                self.stack.pop();
            }
            if let Some(t) = self.stack.pop() {
                let (ex, et) = (self.end[x], self.end[t]);
                if ex == t {
                    self.go(x + 1, loops + 1);
                } else {
                    self.end[ex] = et;
                    self.end[et] = ex;
                    self.go(x + 1, loops);
                    self.end[ex] = x;
                    self.end[et] = t;
                }
                self.stack.push(t);
            }
        }
    }
    let mut out = vec![vec![Integer::from(1)]];
    for n in 1..=n_max {
        let mut walk = Walk { points: 2 * n, end: Vec::new(), stack: Vec::new(), hist: vec![0; n + 1] };
        for upper in noncrossing_matchings(2 * n) {
            walk.end = upper;
            walk.go(0, 0);
        }
        out.push(walk.hist.into_iter().map(Integer::from).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{catalan, closed_form_count};

    fn count(n: usize, c: ArchConstraints) -> usize {
        enumerate_arch_systems(n, c).unwrap().count()
    }

    #[test]
    fn small_stream_sizes() {
        let plain = ArchConstraints::default();
        assert_eq!(count(0, plain), 1);
        assert_eq!(count(1, plain), 2);
        assert_eq!(count(2, plain), 10);
        assert_eq!(count(2, ArchConstraints { open: true, ..plain }), 32);
        assert_eq!(count(1, ArchConstraints { bicolored: true, ..plain }), 2);
    }

    #[test]
    fn streams_match_closed_forms_and_are_valid() {
        for (family, n_max) in [(Family::Cubic, 5), (Family::OpenPath, 4)] {
            for n in 0..=n_max {
                let c = ArchConstraints::for_family(family).unwrap();
                let systems: Vec<_> = enumerate_arch_systems(n, c).unwrap().collect();
                assert_eq!(Integer::from(systems.len()), closed_form_count(family, n).unwrap());
                let distinct: std::collections::HashSet<_> = systems.iter().collect();
                assert_eq!(distinct.len(), systems.len());
                for s in &systems {
                    ArchSystem::from_parts(
                        (0..2 * n).map(|x| s.partner(x)).collect(),
                        (0..2 * n).map(|x| s.side(x)).collect(),
                        false,
                        s.is_open(),
                    )
                    .unwrap();
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let c = ArchConstraints { cap: 3, ..Default::default() };
        assert!(matches!(enumerate_arch_systems(4, c), Err(ModelError::CapExceeded { n: 4, cap: 3 })));
        assert!(enumerate_meander_systems(11, MEANDER_CAP).is_err());
        assert!(brute_force_counts(Family::Quad, 3).is_err());
    }

    #[test]
    fn matching_order_and_count() {
        let m = noncrossing_matchings(4);
        assert_eq!(m, vec![vec![1, 0, 3, 2], vec![3, 2, 1, 0]]);
        for n in 0..7 {
            assert_eq!(Integer::from(noncrossing_matchings(2 * n).len()), catalan(n));
        }
    }

    #[test]
    fn memoised_counts_agree_with_streams() {
        let cubic = brute_force_counts(Family::Cubic, 6).unwrap();
        let bicubic = brute_force_counts(Family::Bicubic, 6).unwrap();
        for n in 0..=6 {
            assert_eq!(cubic[n], closed_form_count(Family::Cubic, n).unwrap());
            let c = ArchConstraints::for_family(Family::Bicubic).unwrap();
            assert_eq!(bicubic[n], count(n, c));
        }
        assert_eq!(bicubic, [1, 2, 8, 40, 228, 1424, 9520]);
    }

    #[test]
    fn meander_components_small() {
        let rows = meander_component_counts(3).unwrap();
        assert_eq!(rows[1], [0, 1]);
        assert_eq!(rows[2], [0, 2, 2]);
        assert_eq!(rows[3], [0, 8, 12, 5]);
    }

    #[test]
    fn weighted_counts_at_u1() {
        for family in [Family::Cubic, Family::OpenPath, Family::Meander] {
            let w = brute_force_weighted_counts(family, 4).unwrap();
            for (n, p) in w.iter().enumerate() {
                assert_eq!(p.coeff_sum(), closed_form_count(family, n).unwrap());
            }
        }
        let w = brute_force_weighted_counts(Family::Cubic, 2).unwrap();
        // n = 2: only the two crossing-sides systems are irreducible
        assert_eq!(w[2], Poly::from_i64s(&[0, 2, 8]));
    }

    #[test]
    fn meander_q_specialises_to_plain() {
        let q = brute_force_meander_q(4).unwrap();
        let plain = brute_force_weighted_counts(Family::Meander, 4).unwrap();
        for (a, b) in q.iter().zip(&plain) {
            assert_eq!(&a.map(|c| c.coeff_sum()), b);
        }
    }
}
