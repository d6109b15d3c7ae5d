use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocks::{Segment, SegmentKind};
use crate::error::Error;
use crate::group_words::{cyclic_shorten, dehn_reduce, is_trivial};
use crate::presentation::{Letter, Presentation, Word};
use crate::tiled_surface::{block_decomposition, BoundaryCycle, Edge, Step, TiledSurface, VertexId};

const NONE: u32 = u32::MAX;

/// A complex that may violate P1 and contain duplicate faces.
#[derive(Clone, Debug)]
pub struct PreComplex {
    pres: Presentation,
    vertex_count: usize,
    edges: Vec<Edge>,
    faces: Vec<Vec<Step>>,
    merges: Vec<(usize, usize)>,
}

/// Fold output together with the image of every input vertex.
#[derive(Clone, Debug)]
pub struct Folded {
    pub surface: TiledSurface,
    pub vertex_map: Vec<VertexId>,
}

fn find(p: &mut [u32], mut x: usize) -> usize {
    while p[x] as usize != x {
        let up = p[p[x] as usize];
        p[x] = up;
        x = up as usize;
    }
    x
}

impl PreComplex {
    pub fn new(pres: Presentation) -> PreComplex {
        PreComplex { pres, vertex_count: 0, edges: Vec::new(), faces: Vec::new(), merges: Vec::new() }
    }

    pub fn from_surface(y: &TiledSurface) -> PreComplex {
        PreComplex {
            pres: y.presentation().clone(),
            vertex_count: y.vertex_count(),
            edges: y.edges().to_vec(),
            faces: y.faces().to_vec(),
            merges: Vec::new(),
        }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, src: VertexId, dst: VertexId, generator: usize) -> usize {
        self.edges.push(Edge { src, dst, generator });
        self.edges.len() - 1
    }

    pub fn add_face(&mut self, steps: Vec<Step>) {
        self.faces.push(steps);
    }

    pub fn identify(&mut self, u: VertexId, v: VertexId) {
        self.merges.push((u, v));
    }

    fn head(&self, s: Step) -> VertexId {
        let e = self.edges[s.edge];
        if s.forward {
            e.dst
        } else {
            e.src
        }
    }

    /// New edge reading `l` from `from` to `to`.
    pub fn add_letter(&mut self, from: VertexId, to: VertexId, l: Letter) -> Step {
        if l.is_inverse() {
            Step::new(self.add_edge(to, from, l.generator()), false)
        } else {
            Step::new(self.add_edge(from, to, l.generator()), true)
        }
    }

    /// Path of fresh edges reading `w` from `start`; ends at `end` if given. Returns the end.
    pub fn add_path(&mut self, start: VertexId, w: &[Letter], end: Option<VertexId>) -> VertexId {
        let mut cur = start;
        for (i, &l) in w.iter().enumerate() {
            let next = match end {
                Some(e) if i + 1 == w.len() => e,
                _ => self.add_vertex(),
            };
            self.add_letter(cur, next, l);
            cur = next;
        }
        if w.is_empty() {
            if let Some(e) = end {
                self.identify(start, e);
            }
        }
        cur
    }

    /// Face reading the relator from position `pos`, starting at `start`;
    /// its first sides are the given existing steps, the rest are fresh.
    pub fn add_relator_face(&mut self, start: VertexId, pos: usize, existing: &[Step]) {
        let n = self.pres.degree();
        let mut steps = existing.to_vec();
        let mut cur = existing.last().map_or(start, |&s| self.head(s));
        if existing.len() == n {
            self.identify(cur, start);
        }
        for k in existing.len()..n {
            let next = if k + 1 == n { start } else { self.add_vertex() };
            let l = self.pres.relator_letter(pos + k);
            steps.push(self.add_letter(cur, next, l));
            cur = next;
        }
        self.faces.push(steps);
    }

    /// Face at the corner of `v` between slots `slot` and `slot + 1`, all other cells fresh.
    pub fn add_corner_face(&mut self, v: VertexId, slot: usize) {
        let n = self.pres.degree();
        let l = self.pres.departing_letter((slot + 1) % n);
        let pos = self.pres.relator_position(l);
        self.add_relator_face(v, pos, &[]);
    }

    /// Stallings folding plus face deduplication.
    pub fn fold(self, rng: Option<&mut ChaCha8Rng>) -> Folded {
        fold_impl(self, rng)
    }
}

fn fold_impl(pre: PreComplex, mut rng: Option<&mut ChaCha8Rng>) -> Folded {
    let pres = pre.pres;
    let d = pres.degree();
    let nv = pre.vertex_count;
    let ne = pre.edges.len();
    let mut vp: Vec<u32> = (0..nv as u32).collect();
    let mut ep: Vec<u32> = (0..ne as u32).collect();
    let mut slots = vec![NONE; nv * d];
    // Pending work: edge merges are tagged with the high bit.
    const EDGE: usize = 1 << 62;
    let mut queue: Vec<(usize, usize)> = pre.merges.clone();
    let mut order: Vec<usize> = (0..ne).collect();
    if let Some(r) = rng.as_deref_mut() {
        order.shuffle(r);
    }
    for &i in &order {
        let e = pre.edges[i];
        for (v, s) in [(e.src, pres.outgoing_slot(e.generator)), (e.dst, pres.incoming_slot(e.generator))] {
            let cell = &mut slots[v * d + s];
            if *cell == NONE {
                *cell = i as u32;
            } else {
                queue.push((EDGE | *cell as usize, i));
            }
        }
    }
    let edges = &pre.edges;
    while !queue.is_empty() {
        let k = match rng.as_deref_mut() {
            Some(r) => r.gen_range(0..queue.len()),
            None => queue.len() - 1,
        };
        let (a, b) = queue.swap_remove(k);
        if a & EDGE != 0 {
            let (x, y) = (find(&mut ep, a & !EDGE), find(&mut ep, b));
            if x == y {
                continue;
            }
            let (keep, gone) = (x.min(y), x.max(y));
            ep[gone] = keep as u32;
            queue.push((edges[keep].src, edges[gone].src));
            queue.push((edges[keep].dst, edges[gone].dst));
        } else {
            let (x, y) = (find(&mut vp, a), find(&mut vp, b));
            if x == y {
                continue;
            }
            let (keep, gone) = (x.min(y), x.max(y));
            vp[gone] = keep as u32;
            for s in 0..d {
                let g = slots[gone * d + s];
                if g == NONE {
                    continue;
                }
                let kcell = slots[keep * d + s];
                if kcell == NONE {
                    slots[keep * d + s] = g;
                } else if find(&mut ep, kcell as usize) != find(&mut ep, g as usize) {
                    queue.push((EDGE | kcell as usize, g as usize));
                }
            }
        }
    }
    let mut vnew = vec![usize::MAX; nv];
    let mut vcount = 0;
    for v in 0..nv {
        let r = find(&mut vp, v);
        if vnew[r] == usize::MAX {
            vnew[r] = vcount;
            vcount += 1;
        }
        vnew[v] = vnew[r];
    }
    let mut enew = vec![usize::MAX; ne];
    let mut out_edges = Vec::new();
    for e in 0..ne {
        let r = find(&mut ep, e);
        if enew[r] == usize::MAX {
            enew[r] = out_edges.len();
            let x = edges[r];
            out_edges.push(Edge { src: vnew[x.src], dst: vnew[x.dst], generator: x.generator });
        }
        enew[e] = enew[r];
    }
    let skeleton = TiledSurface::from_parts(pres, vcount, out_edges, Vec::new());
    let mut seen = HashSet::new();
    let mut faces = Vec::new();
    for f in pre.faces {
        let mapped: Vec<Step> = f.iter().map(|s| Step::new(enew[s.edge], s.forward)).collect();
        let canon = skeleton.rotate_face(mapped);
        if seen.insert(canon.clone()) {
            faces.push(canon);
        }
    }
    let (p, e) = (skeleton.presentation().clone(), skeleton.edges().to_vec());
    Folded { surface: TiledSurface::from_parts(p, vcount, e, faces), vertex_map: vnew }
}

pub fn fold(pre: PreComplex) -> Folded {
    pre.fold(None)
}

/// Record of one face attachment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachEvent {
    pub kind: SegmentKind,
    pub blocks: usize,
    pub boundary_before: usize,
    pub boundary_after: usize,
    pub hanging_before: usize,
    pub hanging_after: usize,
}

/// Runs folding and reduction passes; optionally randomizes fold order and segment choice.
#[derive(Debug, Default)]
pub struct FoldingEngine {
    rng: Option<ChaCha8Rng>,
    pub events: Vec<AttachEvent>,
}

fn compose(first: &[VertexId], second: &[VertexId]) -> Vec<VertexId> {
    first.iter().map(|&v| second[v]).collect()
}

fn identity(n: usize) -> Vec<VertexId> {
    (0..n).collect()
}

fn has_leaf(y: &TiledSurface) -> bool {
    let t = y.slot_table();
    (0..y.vertex_count()).any(|v| t.occupied(v) == 1)
}

/// Checks that `seg` is a segment of the claimed kind in `cycle`.
pub fn verify_segment(pres: &Presentation, cycle: &BoundaryCycle, seg: &Segment) -> bool {
    let dec = block_decomposition(cycle, pres);
    match seg.kind {
        SegmentKind::LongBlock => {
            let n = pres.degree();
            let two_g = 2 * pres.genus();
            seg.blocks.len() == 1
                && seg.blocks[0] > two_g
                && seg.blocks[0] <= n
                && dec.runs.iter().any(|r| {
                    let off = (seg.start + cycle.len() - r.start) % cycle.len();
                    off + seg.blocks[0] <= r.len
                })
        }
        SegmentKind::LongChain => dec.long_chains().contains(seg),
        SegmentKind::HalfBlock => dec.half_blocks().contains(seg),
        SegmentKind::HalfChain => dec.half_chain(pres).as_ref() == Some(seg),
    }
}

impl FoldingEngine {
    pub fn new() -> FoldingEngine {
        FoldingEngine::default()
    }

    pub fn with_seed(seed: u64) -> FoldingEngine {
        FoldingEngine { rng: Some(ChaCha8Rng::seed_from_u64(seed)), events: Vec::new() }
    }

    pub fn fold(&mut self, pre: PreComplex) -> Folded {
        pre.fold(self.rng.as_mut())
    }

    /// Glues one fresh relator face along each block of `seg`, then folds.
    pub fn attach_along(&mut self, y: &TiledSurface, cycle: &BoundaryCycle, seg: &Segment) -> Result<Folded, Error> {
        let pres = y.presentation();
        if !verify_segment(pres, cycle, seg) {
            return Err(Error::Precondition(format!("segment {seg:?} is not a {:?} of the cycle", seg.kind)));
        }
        let n = cycle.len();
        let mut pre = PreComplex::from_surface(y);
        let mut offset = 0;
        for &b in &seg.blocks {
            let steps: Vec<Step> = (0..b).map(|k| cycle.steps[(seg.start + offset + k) % n]).collect();
            let start = y.tail(steps[0]);
            let pos = pres.relator_position(y.step_letter(steps[0]));
            pre.add_relator_face(start, pos, &steps);
            offset += b;
        }
        let before = (y.boundary_length(), y.hanging_half_edges());
        let out = self.fold(pre);
        self.events.push(AttachEvent {
            kind: seg.kind,
            blocks: seg.blocks.len(),
            boundary_before: before.0,
            boundary_after: out.surface.boundary_length(),
            hanging_before: before.1,
            hanging_after: out.surface.hanging_half_edges(),
        });
        Ok(out)
    }

    fn pick(&mut self, found: Vec<(usize, Segment)>) -> Option<(usize, Segment)> {
        if found.is_empty() {
            return None;
        }
        let i = match self.rng.as_mut() {
            Some(r) => r.gen_range(0..found.len()),
            None => 0,
        };
        found.into_iter().nth(i)
    }

    fn next_long(&mut self, cycles: &[BoundaryCycle], pres: &Presentation) -> Option<(usize, Segment)> {
        let decs: Vec<_> = cycles.iter().map(|c| block_decomposition(c, pres)).collect();
        let all = self.rng.is_some();
        let mut found = Vec::new();
        for (i, d) in decs.iter().enumerate() {
            for s in d.long_blocks() {
                found.push((i, s.clone()));
                if !all {
                    return Some((i, s.clone()));
                }
            }
        }
        if found.is_empty() {
            for (i, d) in decs.iter().enumerate() {
                for s in d.long_chains() {
                    found.push((i, s.clone()));
                    if !all {
                        return Some((i, s.clone()));
                    }
                }
            }
        }
        self.pick(found)
    }

    fn next_half(&mut self, cycles: &[BoundaryCycle], pres: &Presentation) -> Option<(usize, Segment)> {
        let decs: Vec<_> = cycles.iter().map(|c| block_decomposition(c, pres)).collect();
        let all = self.rng.is_some();
        let mut found = Vec::new();
        for (i, d) in decs.iter().enumerate() {
            for s in d.half_blocks() {
                found.push((i, s.clone()));
                if !all {
                    return Some((i, s.clone()));
                }
            }
        }
        if found.is_empty() {
            for (i, d) in decs.iter().enumerate() {
                if let Some(s) = d.half_chain(pres) {
                    found.push((i, s));
                    if !all {
                        break;
                    }
                }
            }
        }
        self.pick(found)
    }

    /// Attaches along long blocks, then long chains, until none remain.
    pub fn boundary_reduce(&mut self, y: TiledSurface) -> Result<Folded, Error> {
        let pres = y.presentation().clone();
        let mut map = identity(y.vertex_count());
        let mut cur = y;
        loop {
            let cycles = cur.boundary_cycles()?;
            let Some((ci, seg)) = self.next_long(&cycles, &pres) else { break };
            let before = cur.boundary_length();
            let out = self.attach_along(&cur, &cycles[ci], &seg)?;
            if out.surface.boundary_length() + 2 > before {
                return Err(Error::Invariant(format!(
                    "boundary length {before} -> {} after reducing {:?}",
                    out.surface.boundary_length(),
                    seg.kind
                )));
            }
            map = compose(&map, &out.vertex_map);
            cur = out.surface;
        }
        Ok(Folded { surface: cur, vertex_map: map })
    }

    /// Attaches along half-blocks and half-chains until none remain.
    pub fn strong_boundary_reduce(&mut self, y: TiledSurface) -> Result<Folded, Error> {
        let pres = y.presentation().clone();
        let g = pres.genus();
        let mut map = identity(y.vertex_count());
        let mut cur = y;
        loop {
            let cycles = cur.boundary_cycles()?;
            let Some((ci, seg)) = self.next_half(&cycles, &pres) else { break };
            let (b0, h0) = (cur.boundary_length(), cur.hanging_half_edges());
            let out = self.attach_along(&cur, &cycles[ci], &seg)?;
            let (b1, h1) = (out.surface.boundary_length(), out.surface.hanging_half_edges());
            if b1 != b0 {
                return Err(Error::Invariant(format!("half switch changed boundary length {b0} -> {b1}")));
            }
            if h1 <= h0 {
                return Err(Error::Invariant(format!("hanging half-edges did not increase: {h0} -> {h1}")));
            }
            let cap = if has_leaf(&out.surface) { 4 * g - 1 } else { 4 * g - 2 };
            if h1 > cap * b1 {
                return Err(Error::Invariant(format!("hanging half-edges {h1} exceed {cap} * {b1}")));
            }
            map = compose(&map, &out.vertex_map);
            let guard = self.boundary_reduce(out.surface)?;
            map = compose(&map, &guard.vertex_map);
            cur = guard.surface;
        }
        Ok(Folded { surface: cur, vertex_map: map })
    }

    pub fn core_surface_from_generators(&mut self, words: &[Word], pres: &Presentation) -> Result<PointedCoreSurface, Error> {
        let live: Vec<&Word> = words.iter().filter(|w| !is_trivial(w, pres)).collect();
        let Some((first, rest)) = live.split_first() else {
            return Ok(PointedCoreSurface {
                surface: TiledSurface::single_vertex(pres.clone()),
                basepoint: 0,
                conjugator: Word::empty(),
            });
        };
        let (c, s) = cyclic_shorten(first, pres)?;
        let mut gens = vec![c.to_word()];
        for w in rest {
            gens.push(dehn_reduce(&w.conjugate_by(&s), pres));
        }
        let mut pre = PreComplex::new(pres.clone());
        let base = pre.add_vertex();
        for w in &gens {
            pre.add_path(base, w.letters(), Some(base));
        }
        let wedge = self.fold(pre);
        let mut map = wedge.vertex_map;
        let br = self.boundary_reduce(wedge.surface)?;
        map = compose(&map, &br.vertex_map);
        let sbr = self.strong_boundary_reduce(br.surface)?;
        map = compose(&map, &sbr.vertex_map);
        Ok(PointedCoreSurface { surface: sbr.surface, basepoint: map[base], conjugator: s })
    }
}

pub fn attach_along(y: &TiledSurface, cycle: &BoundaryCycle, seg: &Segment) -> Result<TiledSurface, Error> {
    Ok(FoldingEngine::new().attach_along(y, cycle, seg)?.surface)
}

pub fn boundary_reduce(y: &TiledSurface) -> Result<TiledSurface, Error> {
    let y = fold(PreComplex::from_surface(y)).surface;
    Ok(FoldingEngine::new().boundary_reduce(y)?.surface)
}

pub fn strong_boundary_reduce(y: &TiledSurface) -> Result<TiledSurface, Error> {
    Ok(FoldingEngine::new().strong_boundary_reduce(y.clone())?.surface)
}

/// A core surface with a tracked basepoint and the conjugator `s` applied to the subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedCoreSurface {
    pub surface: TiledSurface,
    pub basepoint: VertexId,
    pub conjugator: Word,
}

impl PointedCoreSurface {
    /// Loops at the basepoint generating the image of the 1-skeleton, one per non-tree edge.
    /// They generate the conjugated subgroup `s J s⁻¹`.
    pub fn loop_generators(&self) -> Vec<Word> {
        let y = &self.surface;
        let table = y.slot_table();
        let d = y.presentation().degree();
        let mut path: Vec<Option<Vec<Letter>>> = vec![None; y.vertex_count()];
        let mut tree = vec![false; y.edge_count()];
        path[self.basepoint] = Some(Vec::new());
        let mut queue = std::collections::VecDeque::from([self.basepoint]);
        while let Some(v) = queue.pop_front() {
            for slot in 0..d {
                let Some(s) = table.get(v, slot) else { continue };
                let w = y.head(s);
                if path[w].is_none() {
                    let mut p = path[v].clone().unwrap();
                    p.push(y.step_letter(s));
                    path[w] = Some(p);
                    tree[s.edge] = true;
                    queue.push_back(w);
                }
            }
        }
        let mut out = Vec::new();
        for (i, e) in y.edges().iter().enumerate() {
            if tree[i] {
                continue;
            }
            let (Some(ps), Some(pd)) = (&path[e.src], &path[e.dst]) else { continue };
            let mut w = ps.clone();
            w.push(Letter::new(e.generator, false));
            w.extend(crate::presentation::invert(pd));
            out.push(Word(w));
        }
        out
    }
}

pub fn core_surface_from_generators(words: &[Word], pres: &Presentation) -> Result<PointedCoreSurface, Error> {
    FoldingEngine::new().core_surface_from_generators(words, pres)
}

/// Convenience: the segment-finding helpers used by other modules.
pub fn first_long_segment(y: &TiledSurface) -> Result<Option<(BoundaryCycle, Segment)>, Error> {
    let pres = y.presentation();
    let cycles = y.boundary_cycles()?;
    for c in &cycles {
        if let Some(s) = block_decomposition(c, pres).first_long() {
            return Ok(Some((c.clone(), s.clone())));
        }
    }
    Ok(None)
}
