use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::blocks::{self, Run, Segment};
use crate::error::Error;
use crate::presentation::{CyclicWord, Letter, Presentation, Word};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

/// An edge traversed forwards (src to dst) or backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub edge: EdgeId,
    pub forward: bool,
}

impl Step {
    pub fn new(edge: EdgeId, forward: bool) -> Step {
        Step { edge, forward }
    }

    pub fn reverse(self) -> Step {
        Step { edge: self.edge, forward: !self.forward }
    }

    /// Dense index `2 * edge + backward`.
    pub fn index(self) -> usize {
        2 * self.edge + (!self.forward) as usize
    }

    pub fn from_index(i: usize) -> Step {
        Step { edge: i / 2, forward: i % 2 == 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub generator: usize,
}

/// A 2-complex with labelled directed edges and relator-reading faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TiledSurface {
    pres: Presentation,
    vertex_count: usize,
    edges: Vec<Edge>,
    faces: Vec<Vec<Step>>,
}

const EMPTY: usize = usize::MAX;

/// Occupancy of the slots around each vertex.
#[derive(Clone, Debug)]
pub struct SlotTable {
    degree: usize,
    slots: Vec<u32>,
}

const FREE: u32 = u32::MAX;

impl SlotTable {
    pub fn get(&self, v: VertexId, slot: usize) -> Option<Step> {
        let x = self.slots[v * self.degree + slot];
        (x != FREE).then(|| Step::from_index(x as usize))
    }

    pub fn occupied(&self, v: VertexId) -> usize {
        self.slots[v * self.degree..(v + 1) * self.degree]
            .iter()
            .filter(|&&x| x != FREE)
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DanglingEdge { edge: EdgeId },
    DanglingFaceStep { face: FaceId },
    SlotConflict { vertex: VertexId, slot: usize, edges: (EdgeId, EdgeId) },
    FaceLength { face: FaceId, len: usize },
    FaceNotClosed { face: FaceId, position: usize },
    FaceWord { face: FaceId },
    DuplicateFace { first: FaceId, second: FaceId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingEdge { edge } => write!(f, "edge {edge} references a missing vertex"),
            Violation::DanglingFaceStep { face } => write!(f, "face {face} references a missing edge"),
            Violation::SlotConflict { vertex, slot, edges } => write!(
                f,
                "P1: vertex {vertex} slot {slot} holds edges {} and {}",
                edges.0, edges.1
            ),
            Violation::FaceLength { face, len } => write!(f, "face {face} has {len} sides"),
            Violation::FaceNotClosed { face, position } => {
                write!(f, "face {face} is not a closed path at position {position}")
            }
            Violation::FaceWord { face } => write!(f, "P3: face {face} does not read the relator"),
            Violation::DuplicateFace { first, second } => {
                write!(f, "P3: faces {first} and {second} coincide")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
    /// `None` when structural violations prevent the check.
    pub boundary_reduced: Option<bool>,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Boundary reduced complexes with P1 and P3 embed in a cover.
    pub fn p2_certified(&self) -> bool {
        self.boundary_reduced == Some(true)
    }
}

/// A boundary component of the thickened complex, free side on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryCycle {
    pub anchor: VertexId,
    pub steps: Vec<Step>,
    pub letters: Vec<Letter>,
    /// `gaps[i]` sits between step `i` and step `i + 1`.
    pub gaps: Vec<usize>,
}

impl BoundaryCycle {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn word(&self) -> CyclicWord {
        CyclicWord::new(&self.letters)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub runs: Vec<Run>,
    pub has_long_block: bool,
    pub has_long_chain: bool,
    pub has_half_block: bool,
    pub is_half_chain: bool,
    pub parity_holds: bool,
    long_blocks: Vec<Segment>,
    long_chains: Vec<Segment>,
    half_blocks: Vec<Segment>,
}

impl BlockDecomposition {
    pub fn is_boundary_reduced(&self) -> bool {
        !self.has_long_block && !self.has_long_chain
    }

    pub fn is_strongly_reduced(&self) -> bool {
        self.is_boundary_reduced() && !self.has_half_block && !self.is_half_chain
    }

    pub fn long_blocks(&self) -> &[Segment] {
        &self.long_blocks
    }

    pub fn long_chains(&self) -> &[Segment] {
        &self.long_chains
    }

    pub fn half_blocks(&self) -> &[Segment] {
        &self.half_blocks
    }

    pub fn half_chain(&self, pres: &Presentation) -> Option<Segment> {
        blocks::half_chain(pres, &self.runs)
    }

    /// First segment for boundary reduction: a long block, else a long chain.
    pub fn first_long(&self) -> Option<&Segment> {
        self.long_blocks.first().or(self.long_chains.first())
    }
}

pub fn block_decomposition(cycle: &BoundaryCycle, pres: &Presentation) -> BlockDecomposition {
    let runs = blocks::cyclic_runs_from_gaps(&cycle.gaps);
    let long_blocks = blocks::long_blocks(pres, &runs);
    let long_chains = blocks::long_chains(pres, &runs, true);
    let half_blocks = blocks::half_blocks(pres, &runs);
    BlockDecomposition {
        has_long_block: !long_blocks.is_empty(),
        has_long_chain: !long_chains.is_empty(),
        has_half_block: !half_blocks.is_empty(),
        is_half_chain: blocks::is_half_chain(pres, &runs),
        parity_holds: blocks::chain_parity_holds(&runs),
        runs,
        long_blocks,
        long_chains,
        half_blocks,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentStats {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    pub boundary_lengths: Vec<usize>,
    pub genus: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stats {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    pub boundary_length: usize,
    pub components: Vec<ComponentStats>,
}

impl Stats {
    /// Sorted lengths of all boundary cycles.
    pub fn boundary_lengths(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .components
            .iter()
            .flat_map(|c| c.boundary_lengths.iter().copied())
            .collect();
        v.sort_unstable();
        v
    }

    pub fn summary(&self) -> String {
        let b: Vec<String> = self.boundary_lengths().iter().map(|x| x.to_string()).collect();
        format!(
            "v={} e={} f={} chi={} boundary=[{}]",
            self.vertices,
            self.edges,
            self.faces,
            self.euler,
            b.join(",")
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotTraceable {
    /// 1-based index of the letter with no matching edge.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<EdgeId>,
    pub face_map: Vec<FaceId>,
}

impl TiledSurface {
    pub fn new(pres: Presentation) -> TiledSurface {
        TiledSurface {
            pres,
            vertex_count: 0,
            edges: Vec::new(),
            faces: Vec::new(),
        }
    }

    pub fn single_vertex(pres: Presentation) -> TiledSurface {
        let mut y = TiledSurface::new(pres);
        y.add_vertex();
        y
    }

    pub fn from_parts(pres: Presentation, vertex_count: usize, edges: Vec<Edge>, faces: Vec<Vec<Step>>) -> TiledSurface {
        let mut y = TiledSurface {
            pres,
            vertex_count,
            edges,
            faces: Vec::new(),
        };
        for f in faces {
            y.add_face(f);
        }
        y
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, src: VertexId, dst: VertexId, generator: usize) -> EdgeId {
        self.edges.push(Edge { src, dst, generator });
        self.edges.len() - 1
    }

    /// Adds a face, rotated to start at its `a1`-forward step when it has one.
    pub fn add_face(&mut self, steps: Vec<Step>) -> FaceId {
        let f = self.rotate_face(steps);
        self.faces.push(f);
        self.faces.len() - 1
    }

    /// Rotation of a face starting at its `a1`-forward step, if it has one.
    pub fn rotate_face(&self, mut steps: Vec<Step>) -> Vec<Step> {
        let a1 = Letter::new(0, false);
        let start = steps
            .iter()
            .position(|&s| s.edge < self.edges.len() && self.step_letter(s) == a1)
            .unwrap_or(0);
        steps.rotate_left(start);
        steps
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn faces(&self) -> &[Vec<Step>] {
        &self.faces
    }

    pub fn step_letter(&self, s: Step) -> Letter {
        Letter::new(self.edges[s.edge].generator, !s.forward)
    }

    pub fn tail(&self, s: Step) -> VertexId {
        let e = self.edges[s.edge];
        if s.forward {
            e.src
        } else {
            e.dst
        }
    }

    pub fn head(&self, s: Step) -> VertexId {
        let e = self.edges[s.edge];
        if s.forward {
            e.dst
        } else {
            e.src
        }
    }

    /// Slot table; on P1 conflicts the later edge wins (see `validate`).
    pub fn slot_table(&self) -> SlotTable {
        let d = self.pres.degree();
        let mut slots = vec![FREE; self.vertex_count * d];
        for (i, e) in self.edges.iter().enumerate() {
            slots[e.src * d + self.pres.outgoing_slot(e.generator)] = Step::new(i, true).index() as u32;
            slots[e.dst * d + self.pres.incoming_slot(e.generator)] = Step::new(i, false).index() as u32;
        }
        SlotTable { degree: d, slots }
    }

    pub fn validate(&self) -> Diagnostics {
        let mut violations = Vec::new();
        let d = self.pres.degree();
        for (i, e) in self.edges.iter().enumerate() {
            if e.src >= self.vertex_count || e.dst >= self.vertex_count || e.generator >= self.pres.rank() {
                violations.push(Violation::DanglingEdge { edge: i });
            }
        }
        if !violations.is_empty() {
            return Diagnostics { violations, boundary_reduced: None };
        }
        let mut slots = vec![EMPTY; self.vertex_count * d];
        for (i, e) in self.edges.iter().enumerate() {
            for (v, s) in [
                (e.src, self.pres.outgoing_slot(e.generator)),
                (e.dst, self.pres.incoming_slot(e.generator)),
            ] {
                let cell = &mut slots[v * d + s];
                if *cell != EMPTY && *cell != i {
                    violations.push(Violation::SlotConflict { vertex: v, slot: s, edges: (*cell, i) });
                } else {
                    *cell = i;
                }
            }
        }
        let mut seen: HashMap<&[Step], FaceId> = HashMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            if f.iter().any(|s| s.edge >= self.edges.len()) {
                violations.push(Violation::DanglingFaceStep { face: fi });
                continue;
            }
            if f.len() != d {
                violations.push(Violation::FaceLength { face: fi, len: f.len() });
                continue;
            }
            if let Some(k) = (0..d).find(|&k| self.head(f[k]) != self.tail(f[(k + 1) % d])) {
                violations.push(Violation::FaceNotClosed { face: fi, position: k });
            }
            if f.iter().zip(self.pres.relator()).any(|(&s, &l)| self.step_letter(s) != l) {
                violations.push(Violation::FaceWord { face: fi });
            }
            if let Some(&first) = seen.get(f.as_slice()) {
                violations.push(Violation::DuplicateFace { first, second: fi });
            } else {
                seen.insert(f, fi);
            }
        }
        let boundary_reduced = if violations.is_empty() {
            self.boundary_cycles()
                .ok()
                .map(|cs| cs.iter().all(|c| block_decomposition(c, &self.pres).is_boundary_reduced()))
        } else {
            None
        };
        Diagnostics { violations, boundary_reduced }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    /// Directed steps used by faces.
    fn face_steps(&self) -> Vec<bool> {
        let mut covered = vec![false; 2 * self.edges.len()];
        for f in &self.faces {
            for s in f {
                covered[s.index()] = true;
            }
        }
        covered
    }

    /// Boundary cycles ordered by least step; each starts at its least step.
    /// Isolated vertices contribute empty cycles at the end.
    pub fn boundary_cycles(&self) -> Result<Vec<BoundaryCycle>, Error> {
        let table = self.slot_table();
        let d = self.pres.degree();
        let covered = self.face_steps();
        let mut visited = vec![false; 2 * self.edges.len()];
        let mut cycles = Vec::new();
        for i in 0..2 * self.edges.len() {
            if covered[i] || visited[i] {
                continue;
            }
            let first = Step::from_index(i);
            let mut cur = first;
            let mut c = BoundaryCycle {
                anchor: self.tail(first),
                steps: Vec::new(),
                letters: Vec::new(),
                gaps: Vec::new(),
            };
            loop {
                if visited[cur.index()] {
                    return Err(Error::Invariant(format!("boundary walk re-entered step {cur:?}")));
                }
                visited[cur.index()] = true;
                let letter = self.step_letter(cur);
                let v = self.head(cur);
                let a = self.pres.arrival_slot(letter);
                let mut next = None;
                for k in 1..=d {
                    if let Some(s) = table.get(v, (a + k) % d) {
                        next = Some((s, k - 1));
                        break;
                    }
                }
                let (s, gap) = next.ok_or_else(|| Error::Invariant("arrival slot is empty".into()))?;
                if covered[s.index()] {
                    return Err(Error::Invariant(format!("boundary walk entered face step {s:?}")));
                }
                c.steps.push(cur);
                c.letters.push(letter);
                c.gaps.push(gap);
                cur = s;
                if cur == first {
                    break;
                }
            }
            cycles.push(c);
        }
        let mut touched = vec![false; self.vertex_count];
        for e in &self.edges {
            touched[e.src] = true;
            touched[e.dst] = true;
        }
        for (v, t) in touched.iter().enumerate() {
            if !t {
                cycles.push(BoundaryCycle { anchor: v, steps: Vec::new(), letters: Vec::new(), gaps: Vec::new() });
            }
        }
        Ok(cycles)
    }

    pub fn boundary_length(&self) -> usize {
        2 * self.edges.len() - self.pres.degree() * self.faces.len()
    }

    /// Unoccupied slots summed over all vertices.
    pub fn hanging_half_edges(&self) -> usize {
        self.vertex_count * self.pres.degree() - 2 * self.edges.len()
    }

    pub fn is_boundary_reduced(&self) -> bool {
        match self.boundary_cycles() {
            Ok(cs) => cs.iter().all(|c| block_decomposition(c, &self.pres).is_boundary_reduced()),
            Err(_) => false,
        }
    }

    pub fn is_strongly_boundary_reduced(&self) -> bool {
        match self.boundary_cycles() {
            Ok(cs) => cs.iter().all(|c| block_decomposition(c, &self.pres).is_strongly_reduced()),
            Err(_) => false,
        }
    }

    /// Component index of each vertex, numbered by least vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut comp = vec![0; self.vertex_count];
        let mut next = 0;
        for v in 0..self.vertex_count {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            comp[v] = label[r];
        }
        comp
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn stats(&self) -> Result<Stats, Error> {
        let comp = self.components();
        let k = comp.iter().max().map_or(0, |m| m + 1);
        let mut cs = vec![
            ComponentStats { vertices: 0, edges: 0, faces: 0, euler: 0, boundary_lengths: Vec::new(), genus: 0 };
            k
        ];
        for v in 0..self.vertex_count {
            cs[comp[v]].vertices += 1;
        }
        for e in &self.edges {
            cs[comp[e.src]].edges += 1;
        }
        for f in &self.faces {
            cs[comp[self.tail(f[0])]].faces += 1;
        }
        for c in self.boundary_cycles()? {
            cs[comp[c.anchor]].boundary_lengths.push(c.len());
        }
        for c in cs.iter_mut() {
            c.euler = c.vertices as i64 - c.edges as i64 + c.faces as i64;
            let twice = 2 - c.euler - c.boundary_lengths.len() as i64;
            if twice < 0 || twice % 2 != 0 {
                return Err(Error::Invariant(format!("component has non-integral genus: chi={} b={}", c.euler, c.boundary_lengths.len())));
            }
            c.genus = twice / 2;
        }
        let boundary_length: usize = cs.iter().flat_map(|c| c.boundary_lengths.iter()).sum();
        if boundary_length != self.boundary_length() {
            return Err(Error::Invariant("boundary length identity fails".into()));
        }
        Ok(Stats {
            vertices: self.vertex_count,
            edges: self.edges.len(),
            faces: self.faces.len(),
            euler: self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64,
            boundary_length,
            components: cs,
        })
    }

    pub fn trace_word(&self, v0: VertexId, w: &Word) -> Result<VertexId, NotTraceable> {
        self.trace_with(&self.slot_table(), v0, w.letters())
    }

    pub fn trace_with(&self, table: &SlotTable, v0: VertexId, w: &[Letter]) -> Result<VertexId, NotTraceable> {
        let mut v = v0;
        for (i, &l) in w.iter().enumerate() {
            match table.get(v, self.pres.departure_slot(l)) {
                Some(s) => v = self.head(s),
                None => return Err(NotTraceable { position: i + 1 }),
            }
        }
        Ok(v)
    }

    pub(crate) fn face_index(&self) -> HashMap<Vec<Step>, FaceId> {
        self.faces.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect()
    }

    /// Extends `root -> image` over the component of `root`; `None` on any clash.
    fn propagate(
        &self,
        dst: &TiledSurface,
        src_table: &SlotTable,
        dst_table: &SlotTable,
        root: VertexId,
        image: VertexId,
        vmap: &mut [usize],
        emap: &mut [usize],
    ) -> Option<Vec<VertexId>> {
        let d = self.pres.degree();
        let mut visited = vec![root];
        let mut queue = VecDeque::from([root]);
        vmap[root] = image;
        while let Some(v) = queue.pop_front() {
            let v2 = vmap[v];
            for slot in 0..d {
                let Some(s) = src_table.get(v, slot) else { continue };
                let s2 = dst_table.get(v2, slot)?;
                if emap[s.edge] == EMPTY {
                    emap[s.edge] = s2.edge;
                } else if emap[s.edge] != s2.edge {
                    return None;
                }
                let (w, w2) = (self.head(s), dst.head(s2));
                if vmap[w] == EMPTY {
                    vmap[w] = w2;
                    visited.push(w);
                    queue.push_back(w);
                } else if vmap[w] != w2 {
                    return None;
                }
            }
        }
        Some(visited)
    }

    fn map_faces(&self, emap: &[usize], index: &HashMap<Vec<Step>, FaceId>, faces: &[FaceId], fmap: &mut [usize]) -> bool {
        for &fi in faces {
            let img: Vec<Step> = self.faces[fi]
                .iter()
                .map(|s| Step::new(emap[s.edge], s.forward))
                .collect();
            match index.get(&img) {
                Some(&g) => fmap[fi] = g,
                None => return false,
            }
        }
        true
    }

    fn faces_by_component(&self, comp: &[usize], k: usize) -> Vec<Vec<FaceId>> {
        let mut out = vec![Vec::new(); k];
        for (i, f) in self.faces.iter().enumerate() {
            out[comp[self.tail(f[0])]].push(i);
        }
        out
    }

    /// Morphism sending `root` to `image`, defined on the component of `root` only;
    /// unmapped cells are `usize::MAX`.
    pub fn morphism_from(&self, dst: &TiledSurface, root: VertexId, image: VertexId) -> Option<Morphism> {
        let (st, dt) = (self.slot_table(), dst.slot_table());
        let mut vmap = vec![EMPTY; self.vertex_count];
        let mut emap = vec![EMPTY; self.edges.len()];
        let verts = self.propagate(dst, &st, &dt, root, image, &mut vmap, &mut emap)?;
        let comp = self.components();
        let c = comp[root];
        let faces: Vec<FaceId> = (0..self.faces.len())
            .filter(|&f| comp[self.tail(self.faces[f][0])] == c)
            .collect();
        let mut fmap = vec![EMPTY; self.faces.len()];
        let _ = verts;
        self.map_faces(&emap, &dst.face_index(), &faces, &mut fmap)
            .then_some(Morphism { vertex_map: vmap, edge_map: emap, face_map: fmap })
    }

    /// First morphism to `dst`, trying images in vertex-id order per component.
    pub fn morphism_to(&self, dst: &TiledSurface) -> Option<Morphism> {
        self.match_components(dst, false)
    }

    /// A label-preserving isomorphism, if one exists.
    pub fn isomorphic(&self, dst: &TiledSurface) -> Option<Morphism> {
        if self.pres != dst.pres
            || self.vertex_count != dst.vertex_count
            || self.edges.len() != dst.edges.len()
            || self.faces.len() != dst.faces.len()
        {
            return None;
        }
        self.match_components(dst, true)
    }

    fn match_components(&self, dst: &TiledSurface, bijective: bool) -> Option<Morphism> {
        if self.pres != dst.pres {
            return None;
        }
        let (st, dt) = (self.slot_table(), dst.slot_table());
        let comp = self.components();
        let k = comp.iter().max().map_or(0, |m| m + 1);
        let dcomp = dst.components();
        let dk = dcomp.iter().max().map_or(0, |m| m + 1);
        let mut dsize = vec![(0usize, 0usize); dk];
        for v in 0..dst.vertex_count {
            dsize[dcomp[v]].0 += 1;
        }
        for e in &dst.edges {
            dsize[dcomp[e.src]].1 += 1;
        }
        let mut size = vec![(0usize, 0usize); k];
        for v in 0..self.vertex_count {
            size[comp[v]].0 += 1;
        }
        for e in &self.edges {
            size[comp[e.src]].1 += 1;
        }
        let faces = self.faces_by_component(&comp, k);
        let index = dst.face_index();
        let mut roots = vec![EMPTY; k];
        for v in (0..self.vertex_count).rev() {
            roots[comp[v]] = v;
        }
        let mut vmap = vec![EMPTY; self.vertex_count];
        let mut emap = vec![EMPTY; self.edges.len()];
        let mut fmap = vec![EMPTY; self.faces.len()];
        let mut used = vec![false; dk];
        for c in 0..k {
            let root = roots[c];
            let mut found = false;
            for image in 0..dst.vertex_count {
                if bijective && (used[dcomp[image]] || dsize[dcomp[image]] != size[c]) {
                    continue;
                }
                let mut vm = vmap.clone();
                let mut em = emap.clone();
                let Some(verts) = self.propagate(dst, &st, &dt, root, image, &mut vm, &mut em) else {
                    continue;
                };
                if bijective {
                    let mut hit = std::collections::HashSet::new();
                    if !verts.iter().all(|&v| hit.insert(vm[v])) {
                        continue;
                    }
                    let mut ehit = std::collections::HashSet::new();
                    let edges_ok = (0..self.edges.len())
                        .filter(|&e| comp[self.edges[e].src] == c)
                        .all(|e| ehit.insert(em[e]));
                    if !edges_ok {
                        continue;
                    }
                }
                let mut fm = fmap.clone();
                if !self.map_faces(&em, &index, &faces[c], &mut fm) {
                    continue;
                }
                debug_assert!(self.rigidity_holds(dst, &st, &dt, &verts, &vm, &em));
                vmap = vm;
                emap = em;
                fmap = fm;
                used[dcomp[image]] = true;
                found = true;
                break;
            }
            if !found {
                return None;
            }
        }
        Some(Morphism { vertex_map: vmap, edge_map: emap, face_map: fmap })
    }

    /// Re-propagating from another vertex of the component reproduces the same map.
    fn rigidity_holds(
        &self,
        dst: &TiledSurface,
        st: &SlotTable,
        dt: &SlotTable,
        verts: &[VertexId],
        vm: &[usize],
        em: &[usize],
    ) -> bool {
        let Some(&other) = verts.last() else { return true };
        let mut vm2 = vec![EMPTY; self.vertex_count];
        let mut em2 = vec![EMPTY; self.edges.len()];
        if self.propagate(dst, st, dt, other, vm[other], &mut vm2, &mut em2).is_none() {
            return false;
        }
        verts.iter().all(|&v| vm2[v] == vm[v])
            && em2.iter().zip(em).all(|(a, b)| *a == EMPTY || a == b)
    }

    /// Subcomplex spanned by the given cells plus their boundaries, renumbered.
    /// Returns the subcomplex and, per new vertex/edge, the original id.
    pub fn subcomplex(&self, vertices: &[VertexId], edges: &[EdgeId], faces: &[FaceId]) -> (TiledSurface, Vec<VertexId>, Vec<EdgeId>, Vec<FaceId>) {
        let mut vset = vec![false; self.vertex_count];
        let mut eset = vec![false; self.edges.len()];
        for &f in faces {
            for s in &self.faces[f] {
                eset[s.edge] = true;
            }
        }
        for &e in edges {
            eset[e] = true;
        }
        for (e, &inside) in eset.iter().enumerate() {
            if inside {
                vset[self.edges[e].src] = true;
                vset[self.edges[e].dst] = true;
            }
        }
        for &v in vertices {
            vset[v] = true;
        }
        let vids: Vec<VertexId> = (0..self.vertex_count).filter(|&v| vset[v]).collect();
        let eids: Vec<EdgeId> = (0..self.edges.len()).filter(|&e| eset[e]).collect();
        let mut vnew = vec![EMPTY; self.vertex_count];
        for (i, &v) in vids.iter().enumerate() {
            vnew[v] = i;
        }
        let mut enew = vec![EMPTY; self.edges.len()];
        for (i, &e) in eids.iter().enumerate() {
            enew[e] = i;
        }
        let mut fids: Vec<FaceId> = faces.to_vec();
        fids.sort_unstable();
        fids.dedup();
        let sub = TiledSurface {
            pres: self.pres.clone(),
            vertex_count: vids.len(),
            edges: eids
                .iter()
                .map(|&e| {
                    let x = self.edges[e];
                    Edge { src: vnew[x.src], dst: vnew[x.dst], generator: x.generator }
                })
                .collect(),
            faces: fids
                .iter()
                .map(|&f| self.faces[f].iter().map(|s| Step::new(enew[s.edge], s.forward)).collect())
                .collect(),
        };
        (sub, vids, eids, fids)
    }

    /// Disjoint union, with `other`'s ids shifted after `self`'s.
    pub fn disjoint_union(&self, other: &TiledSurface) -> TiledSurface {
        let (nv, ne) = (self.vertex_count, self.edges.len());
        let mut y = self.clone();
        y.vertex_count += other.vertex_count;
        y.edges.extend(other.edges.iter().map(|e| Edge { src: e.src + nv, dst: e.dst + nv, generator: e.generator }));
        y.faces.extend(
            other
                .faces
                .iter()
                .map(|f| f.iter().map(|s| Step::new(s.edge + ne, s.forward)).collect()),
        );
        y
    }
}
