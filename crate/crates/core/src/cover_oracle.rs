use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::blocks::SegmentKind;
use crate::error::Error;
use crate::folding_engine::{FoldingEngine, PreComplex};
use crate::presentation::{free_reduce, invert, Presentation, Word};
use crate::tiled_surface::{block_decomposition, SlotTable, Step, TiledSurface, VertexId};

pub const DEFAULT_SBR_BUDGET: usize = 1000;

/// A neighbourhood of a vertex in a cover, saturated strictly inside `radius`.
#[derive(Clone, Debug)]
pub struct CoverBall {
    pub surface: TiledSurface,
    pub basepoint: VertexId,
    pub radius: usize,
}

pub fn distances(y: &TiledSurface, table: &SlotTable, from: VertexId) -> Vec<usize> {
    let d = y.presentation().degree();
    let mut dist = vec![usize::MAX; y.vertex_count()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for slot in 0..d {
            if let Some(s) = table.get(v, slot) {
                let w = y.head(s);
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    dist
}

/// `covered[v * d + s]` is true when a face fills the corner between slots `s` and `s + 1` at `v`.
fn covered_corners(y: &TiledSurface) -> Vec<bool> {
    let pres = y.presentation();
    let d = pres.degree();
    let mut covered = vec![false; y.vertex_count() * d];
    for f in y.faces() {
        for &s in f {
            covered[y.head(s) * d + pres.arrival_slot(y.step_letter(s))] = true;
        }
    }
    covered
}

/// Grows `seed` until every vertex closer than `radius` to `basepoint` is saturated.
pub fn cover_ball(seed: &TiledSurface, basepoint: VertexId, radius: usize) -> Result<CoverBall, Error> {
    saturate(seed, basepoint, radius, |dist| dist < radius)
}

fn saturate<F>(seed: &TiledSurface, basepoint: VertexId, radius: usize, inside: F) -> Result<CoverBall, Error>
where
    F: Fn(usize) -> bool,
{
    if basepoint >= seed.vertex_count() {
        return Err(Error::Precondition(format!("basepoint {basepoint} not in seed")));
    }
    let mut engine = FoldingEngine::new();
    let first = engine.boundary_reduce(seed.clone())?;
    let mut y = first.surface;
    let mut base = first.vertex_map[basepoint];
    loop {
        let d = y.presentation().degree();
        let table = y.slot_table();
        let dist = distances(&y, &table, base);
        let covered = covered_corners(&y);
        let mut pre = PreComplex::from_surface(&y);
        let mut added = false;
        for v in 0..y.vertex_count() {
            if dist[v] == usize::MAX || !inside(dist[v]) {
                continue;
            }
            for s in 0..d {
                if !covered[v * d + s] {
                    pre.add_corner_face(v, s);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
        let folded = engine.fold(pre);
        base = folded.vertex_map[base];
        let br = engine.boundary_reduce(folded.surface)?;
        base = br.vertex_map[base];
        y = br.surface;
    }
    Ok(CoverBall { surface: y, basepoint: base, radius })
}

/// Equality and length oracle backed by one universal-cover ball.
#[derive(Clone, Debug)]
pub struct CoverOracle {
    ball: CoverBall,
    table: SlotTable,
    depth: Vec<usize>,
    scratch: RefCell<SearchScratch>,
}

impl CoverOracle {
    /// Equality handles words up to length `2 * reach`; lengths up to `reach + 1`.
    pub fn new(pres: &Presentation, reach: usize) -> Result<CoverOracle, Error> {
        let ball = cover_ball(&TiledSurface::single_vertex(pres.clone()), 0, reach)?;
        let table = ball.surface.slot_table();
        let depth = distances(&ball.surface, &table, ball.basepoint);
        Ok(CoverOracle { ball, table, depth, scratch: RefCell::default() })
    }

    pub fn ball(&self) -> &CoverBall {
        &self.ball
    }

    pub fn reach(&self) -> usize {
        self.ball.radius
    }

    fn trace(&self, w: &[crate::presentation::Letter]) -> Result<VertexId, Error> {
        self.ball
            .surface
            .trace_with(&self.table, self.ball.basepoint, w)
            .map_err(|_| Error::Invariant("trace left the saturated ball".into()))
    }

    fn check_len(&self, n: usize) -> Result<(), Error> {
        if n.div_ceil(2) > self.ball.radius {
            return Err(Error::Precondition(format!("word of length {n} exceeds oracle reach {}", self.ball.radius)));
        }
        Ok(())
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool, Error> {
        let x = free_reduce(w.letters());
        self.check_len(x.len())?;
        let h = x.len().div_ceil(2);
        Ok(self.trace(&invert(&x[..h]))? == self.trace(&x[h..])?)
    }

    pub fn words_equal(&self, u: &Word, v: &Word) -> Result<bool, Error> {
        self.is_trivial(&u.concat(&v.inverse()))
    }

    /// Distance from 1 to `w` in the Cayley graph.
    ///
    /// The halves of `w` locate `w1⁻¹` and `w2` in the ball; their distance in the ball is
    /// exact when any path leaving the saturated region is at least as long.
    pub fn element_length(&self, w: &Word) -> Result<usize, Error> {
        let x = free_reduce(w.letters());
        self.check_len(x.len())?;
        if x.is_empty() {
            return Ok(0);
        }
        let h = x.len().div_ceil(2);
        let a = self.trace(&invert(&x[..h]))?;
        let b = self.trace(&x[h..])?;
        let y = &self.ball.surface;
        let found = bidirectional_distance(y, &self.table, a, b, x.len(), &mut self.scratch.borrow_mut())
            .ok_or_else(|| Error::Invariant("no path between the halves".into()))?;
        let limit = 2 * (self.ball.radius + 1) - self.depth[a] - self.depth[b];
        if found > limit {
            return Err(Error::Precondition(format!("ball of radius {} cannot certify length {found}", self.ball.radius)));
        }
        Ok(found)
    }
}

/// Visit marks reused across searches.
#[derive(Clone, Debug, Default)]
pub struct SearchScratch {
    epoch: u32,
    mark: [Vec<u32>; 2],
    dist: [Vec<u8>; 2],
}

impl SearchScratch {
    fn reset(&mut self, n: usize) {
        for side in 0..2 {
            if self.mark[side].len() != n {
                self.mark[side] = vec![0; n];
                self.dist[side] = vec![0; n];
                self.epoch = 0;
            }
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| m.fill(0));
            self.epoch = 1;
        }
    }
}

/// Shortest path length between `a` and `b`, if at most `limit`.
pub fn bidirectional_distance(
    y: &TiledSurface,
    table: &SlotTable,
    a: VertexId,
    b: VertexId,
    limit: usize,
    scratch: &mut SearchScratch,
) -> Option<usize> {
    if a == b {
        return Some(0);
    }
    let d = y.presentation().degree();
    scratch.reset(y.vertex_count());
    let ep = scratch.epoch;
    for (side, v) in [(0, a), (1, b)] {
        scratch.mark[side][v] = ep;
        scratch.dist[side][v] = 0;
    }
    let mut frontier = [vec![a], vec![b]];
    let mut radius = [0usize, 0usize];
    while radius[0] + radius[1] < limit {
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        let mut next = Vec::new();
        let mut best = None::<usize>;
        for &v in &frontier[side] {
            for slot in 0..d {
                let Some(s) = table.get(v, slot) else { continue };
                let w = y.head(s);
                if scratch.mark[side][w] == ep {
                    continue;
                }
                scratch.mark[side][w] = ep;
                scratch.dist[side][w] = (radius[side] + 1) as u8;
                if scratch.mark[1 - side][w] == ep {
                    let t = radius[side] + 1 + scratch.dist[1 - side][w] as usize;
                    best = Some(best.map_or(t, |x| x.min(t)));
                }
                next.push(w);
            }
        }
        if let Some(t) = best {
            return Some(t);
        }
        if next.is_empty() {
            return None;
        }
        radius[side] += 1;
        frontier[side] = next;
    }
    None
}

pub fn words_equal_oracle(u: &Word, v: &Word, pres: &Presentation) -> bool {
    let n = free_reduce(u.concat(&v.inverse()).letters()).len();
    let oracle = CoverOracle::new(pres, n.div_ceil(2)).expect("cover ball");
    oracle.words_equal(u, v).expect("within reach")
}

pub fn element_length_oracle(w: &Word, pres: &Presentation) -> usize {
    let n = free_reduce(w.letters()).len();
    let mut reach = n.div_ceil(2);
    loop {
        let oracle = CoverOracle::new(pres, reach).expect("cover ball");
        match oracle.element_length(w) {
            Ok(k) => return k,
            Err(Error::Precondition(_)) if reach + 1 < n.max(2) => reach += 1,
            Err(e) => panic!("{e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureMode {
    BoundaryReduced,
    StronglyBoundaryReduced,
}

/// Cells of an ambient complex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subcomplex {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<usize>,
    pub faces: BTreeSet<usize>,
}

impl Subcomplex {
    pub fn whole(z: &TiledSurface) -> Subcomplex {
        Subcomplex {
            vertices: (0..z.vertex_count()).collect(),
            edges: (0..z.edge_count()).collect(),
            faces: (0..z.face_count()).collect(),
        }
    }

    /// Adds a face with its edges and vertices.
    pub fn add_face(&mut self, z: &TiledSurface, f: usize) {
        self.faces.insert(f);
        for s in &z.faces()[f] {
            self.add_edge(z, s.edge);
        }
    }

    pub fn add_edge(&mut self, z: &TiledSurface, e: usize) {
        self.edges.insert(e);
        self.vertices.insert(z.edge(e).src);
        self.vertices.insert(z.edge(e).dst);
    }

    pub fn is_subcomplex_of(&self, z: &TiledSurface) -> bool {
        self.vertices.iter().all(|&v| v < z.vertex_count())
            && self.edges.iter().all(|&e| {
                e < z.edge_count() && self.vertices.contains(&z.edge(e).src) && self.vertices.contains(&z.edge(e).dst)
            })
            && self.faces.iter().all(|&f| f < z.face_count() && z.faces()[f].iter().all(|s| self.edges.contains(&s.edge)))
    }

    pub fn surface(&self, z: &TiledSurface) -> TiledSurface {
        let v: Vec<_> = self.vertices.iter().copied().collect();
        let e: Vec<_> = self.edges.iter().copied().collect();
        let f: Vec<_> = self.faces.iter().copied().collect();
        z.subcomplex(&v, &e, &f).0
    }

    /// Image under a morphism defined on all of the ambient complex.
    pub fn image(&self, m: &crate::tiled_surface::Morphism) -> Subcomplex {
        Subcomplex {
            vertices: self.vertices.iter().map(|&v| m.vertex_map[v]).collect(),
            edges: self.edges.iter().map(|&e| m.edge_map[e]).collect(),
            faces: self.faces.iter().map(|&f| m.face_map[f]).collect(),
        }
    }

    pub fn is_subset(&self, other: &Subcomplex) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges) && self.faces.is_subset(&other.faces)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureStep {
    pub kind: SegmentKind,
    pub faces_added: usize,
    pub boundary_before: usize,
    pub boundary_after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureRun {
    pub closure: Subcomplex,
    pub initial_boundary: usize,
    pub steps: Vec<ClosureStep>,
    /// False when the step budget ran out first.
    pub completed: bool,
}

/// Annexes faces of `z` along long (and, in SBR mode, half) segments of the boundary of `y`.
pub fn closure_within(y: &Subcomplex, z: &TiledSurface, mode: ClosureMode, step_budget: usize) -> Result<ClosureRun, Error> {
    if !y.is_subcomplex_of(z) {
        return Err(Error::Precondition("not a subcomplex of the ambient complex".into()));
    }
    let pres = z.presentation().clone();
    let mut by_step: HashMap<Step, (usize, usize)> = HashMap::new();
    for (fi, f) in z.faces().iter().enumerate() {
        for (k, &s) in f.iter().enumerate() {
            by_step.insert(s, (fi, k));
        }
    }
    let mut cur = y.clone();
    let v: Vec<_> = cur.vertices.iter().copied().collect();
    let e: Vec<_> = cur.edges.iter().copied().collect();
    let f: Vec<_> = cur.faces.iter().copied().collect();
    let initial_boundary = z.subcomplex(&v, &e, &f).0.boundary_length();
    let mut steps = Vec::new();
    loop {
        let v: Vec<_> = cur.vertices.iter().copied().collect();
        let e: Vec<_> = cur.edges.iter().copied().collect();
        let f: Vec<_> = cur.faces.iter().copied().collect();
        let (sub, _, eids, _) = z.subcomplex(&v, &e, &f);
        let cycles = sub.boundary_cycles()?;
        let decs: Vec<_> = cycles.iter().map(|c| block_decomposition(c, &pres)).collect();
        let mut choice = decs.iter().enumerate().find_map(|(i, d)| d.first_long().map(|s| (i, s.clone())));
        if choice.is_none() && mode == ClosureMode::StronglyBoundaryReduced {
            choice = decs
                .iter()
                .enumerate()
                .find_map(|(i, d)| d.half_blocks().first().map(|s| (i, s.clone())))
                .or_else(|| decs.iter().enumerate().find_map(|(i, d)| d.half_chain(&pres).map(|s| (i, s))));
        }
        let Some((ci, seg)) = choice else {
            return Ok(ClosureRun { closure: cur, initial_boundary, steps, completed: true });
        };
        if steps.len() >= step_budget {
            return Ok(ClosureRun { closure: cur, initial_boundary, steps, completed: false });
        }
        let cycle = &cycles[ci];
        let n = cycle.len();
        let before = sub.boundary_length();
        let mut added = 0;
        let mut offset = 0;
        for &b in &seg.blocks {
            let zsteps: Vec<Step> = (0..b)
                .map(|k| {
                    let s = cycle.steps[(seg.start + offset + k) % n];
                    Step::new(eids[s.edge], s.forward)
                })
                .collect();
            let &(fi, k0) = by_step
                .get(&zsteps[0])
                .ok_or_else(|| Error::Precondition(format!("ambient complex has no face along a {:?}", seg.kind)))?;
            let face = &z.faces()[fi];
            let d = face.len();
            if (0..b).any(|k| face[(k0 + k) % d] != zsteps[k]) {
                return Err(Error::Precondition("ambient face does not follow the segment".into()));
            }
            if cur.faces.contains(&fi) {
                return Err(Error::Invariant("boundary segment already bounds a face of the subcomplex".into()));
            }
            cur.add_face(z, fi);
            added += 1;
            offset += b;
        }
        let after = cur.surface(z).boundary_length();
        steps.push(ClosureStep { kind: seg.kind, faces_added: added, boundary_before: before, boundary_after: after });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Presentation {
        Presentation::new(2).unwrap()
    }

    #[test]
    fn small_balls() {
        let p = p2();
        let b0 = cover_ball(&TiledSurface::single_vertex(p.clone()), 0, 0).unwrap();
        assert_eq!(b0.surface.vertex_count(), 1);
        let b = cover_ball(&TiledSurface::single_vertex(p.clone()), 0, 2).unwrap();
        let y = &b.surface;
        assert!(y.validate().p2_certified());
        assert_eq!(y.trace_word(b.basepoint, &p.relator_word()), Ok(b.basepoint));
    }

    #[test]
    fn oracle_examples() {
        let p = p2();
        let w = |s: &str| p.parse_word(s).unwrap();
        assert!(words_equal_oracle(&p.relator_word(), &Word::empty(), &p));
        assert!(!words_equal_oracle(&w("ac"), &w("ca"), &p));
        assert!(words_equal_oracle(&w("abABc"), &w("dcD"), &p));
        assert_eq!(element_length_oracle(&Word::empty(), &p), 0);
        assert_eq!(element_length_oracle(&p.relator_word(), &p), 0);
        assert_eq!(element_length_oracle(&w("abABc"), &p), 3);
    }
}
