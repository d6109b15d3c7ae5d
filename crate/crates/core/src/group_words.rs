use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::blocks::{self, Segment};
use crate::error::Error;
use crate::presentation::{free_reduce, invert, least_rotation, rotate, CyclicWord, Letter, Presentation, Word};

pub const DEFAULT_BUDGET: usize = 1_000_000;

pub fn slot_gap(arrival: Letter, departure: Letter, pres: &Presentation) -> usize {
    pres.slot_gap(arrival, departure)
}

fn first_shortening(pres: &Presentation, w: &[Letter], cyclic: bool) -> Option<Segment> {
    let runs = if cyclic {
        blocks::cyclic_runs(pres, w)
    } else {
        blocks::linear_runs(pres, w)
    };
    blocks::long_blocks(pres, &runs)
        .into_iter()
        .next()
        .or_else(|| blocks::long_chains(pres, &runs, cyclic).into_iter().next())
}

fn has_long_segment(pres: &Presentation, w: &[Letter], cyclic: bool) -> bool {
    first_shortening(pres, w, cyclic).is_some()
}

fn splice(w: &[Letter], seg: &Segment, pres: &Presentation) -> Vec<Letter> {
    let len = seg.len();
    let repl = blocks::complement(pres, &w[seg.start..seg.start + len], &seg.blocks);
    let mut out = Vec::with_capacity(w.len() + repl.len());
    out.extend_from_slice(&w[..seg.start]);
    out.extend_from_slice(&repl);
    out.extend_from_slice(&w[seg.start + len..]);
    out
}

/// Leftmost long block in `w`, then in `w⁻¹`, then leftmost long chain likewise.
fn linear_step(pres: &Presentation, w: &[Letter]) -> Option<Vec<Letter>> {
    let runs = blocks::linear_runs(pres, w);
    if let Some(seg) = blocks::long_blocks(pres, &runs).into_iter().next() {
        return Some(splice(w, &seg, pres));
    }
    let inv = invert(w);
    let inv_runs = blocks::linear_runs(pres, &inv);
    if let Some(seg) = blocks::long_blocks(pres, &inv_runs).into_iter().next() {
        return Some(invert(&splice(&inv, &seg, pres)));
    }
    if let Some(seg) = blocks::long_chains(pres, &runs, false).into_iter().next() {
        return Some(splice(w, &seg, pres));
    }
    if let Some(seg) = blocks::long_chains(pres, &inv_runs, false).into_iter().next() {
        return Some(invert(&splice(&inv, &seg, pres)));
    }
    None
}

pub fn dehn_reduce(w: &Word, pres: &Presentation) -> Word {
    let mut cur = free_reduce(w.letters());
    while let Some(next) = linear_step(pres, &cur) {
        debug_assert!(next.len() < cur.len() + 1);
        cur = free_reduce(&next);
    }
    Word(cur)
}

pub fn is_trivial(w: &Word, pres: &Presentation) -> bool {
    dehn_reduce(w, pres).is_empty()
}

/// True if the word has no free cancellation and neither it nor its inverse has a long block or chain.
pub fn is_dehn_reduced(w: &[Letter], pres: &Presentation) -> bool {
    free_reduce(w).len() == w.len()
        && !has_long_segment(pres, w, false)
        && !has_long_segment(pres, &invert(w), false)
}

/// True if the cyclic word is cyclically reduced and neither it nor its inverse has a long block or chain.
pub fn is_cyclically_shortest_form(w: &[Letter], pres: &Presentation) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    let reduced = (0..n).all(|i| w[(i + 1) % n] != w[i].inverse()) || n == 1;
    reduced && !has_long_segment(pres, w, true) && !has_long_segment(pres, &invert(w), true)
}

/// Shortens cyclically; returns `(c, s)` with `c` equal to `s w s⁻¹` read from its canonical rotation.
pub fn cyclic_shorten(w: &Word, pres: &Presentation) -> Result<(CyclicWord, Word), Error> {
    let mut u = free_reduce(w.letters());
    let mut s: Vec<Letter> = Vec::new();
    loop {
        while u.len() >= 2 && u[0] == u[u.len() - 1].inverse() {
            let x = u[0];
            u = u[1..u.len() - 1].to_vec();
            s.insert(0, x.inverse());
        }
        if u.is_empty() {
            return Err(Error::TrivialElement);
        }
        if let Some(seg) = first_shortening(pres, &u, true) {
            let k = seg.start;
            let a = u[..k].to_vec();
            let rot = rotate(&u, k);
            let moved = Segment { start: 0, ..seg };
            u = free_reduce(&splice(&rot, &moved, pres));
            s = [invert(&a), s].concat();
            continue;
        }
        let v = invert(&u);
        if let Some(seg) = first_shortening(pres, &v, true) {
            let k = seg.start;
            let a = v[..k].to_vec();
            let rot = rotate(&v, k);
            let moved = Segment { start: 0, ..seg };
            u = free_reduce(&invert(&splice(&rot, &moved, pres)));
            s = [invert(&a), s].concat();
            continue;
        }
        break;
    }
    let k = least_rotation(&u);
    let a = u[..k].to_vec();
    let c = CyclicWord::new(&u);
    s = [invert(&a), s].concat();
    Ok((c, dehn_reduce(&Word(s), pres)))
}

fn cyclic_switches(pres: &Presentation, c: &[Letter]) -> Vec<CyclicWord> {
    let mut out = Vec::new();
    for inverted in [false, true] {
        let w = if inverted { invert(c) } else { c.to_vec() };
        let runs = blocks::cyclic_runs(pres, &w);
        for seg in blocks::half_blocks(pres, &runs) {
            let rot = rotate(&w, seg.start);
            let moved = Segment { start: 0, ..seg };
            let next = splice(&rot, &moved, pres);
            let next = if inverted { invert(&next) } else { next };
            out.push(CyclicWord::new(&next));
        }
        if let Some(seg) = blocks::half_chain(pres, &runs) {
            let letters = blocks::cyclic_slice(&w, seg.start, seg.len());
            let next = blocks::half_chain_complement(pres, &letters, &seg.blocks);
            let next = if inverted { invert(&next) } else { next };
            out.push(CyclicWord::new(&next));
        }
    }
    out
}

fn closure<T, F>(start: T, budget: Option<usize>, what: &'static str, mut next: F) -> Result<BTreeSet<T>, Error>
where
    T: Clone + Ord + std::hash::Hash,
    F: FnMut(&T) -> Vec<T>,
{
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(x) = queue.pop_front() {
        for y in next(&x) {
            if seen.insert(y.clone()) {
                if let Some(b) = budget {
                    if seen.len() > b {
                        return Err(Error::BudgetExceeded { what, budget: b });
                    }
                }
                queue.push_back(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

pub fn shortest_cyclic_reps(w: &Word, pres: &Presentation, budget: usize) -> Result<BTreeSet<CyclicWord>, Error> {
    let (c, _) = cyclic_shorten(w, pres)?;
    closure(c, Some(budget), "shortest representative enumeration", |x| {
        cyclic_switches(pres, x.letters())
    })
}

fn linear_switches(pres: &Presentation, w: &[Letter]) -> Vec<Word> {
    let mut out = Vec::new();
    for inverted in [false, true] {
        let x = if inverted { invert(w) } else { w.to_vec() };
        let runs = blocks::linear_runs(pres, &x);
        for seg in blocks::half_blocks(pres, &runs) {
            let next = splice(&x, &seg, pres);
            out.push(Word(if inverted { invert(&next) } else { next }));
        }
    }
    out
}

pub fn geodesic_class(w: &Word, pres: &Presentation, budget: usize) -> Result<BTreeSet<Word>, Error> {
    let start = dehn_reduce(w, pres);
    closure(start, Some(budget), "geodesic enumeration", |x| linear_switches(pres, x.letters()))
}

pub fn are_conjugate(u: &Word, v: &Word, pres: &Presentation) -> bool {
    let (cu, cv) = match (cyclic_shorten(u, pres), cyclic_shorten(v, pres)) {
        (Err(_), Err(_)) => return true,
        (Ok(a), Ok(b)) => (a.0, b.0),
        _ => return false,
    };
    if cu.len() != cv.len() {
        return false;
    }
    if cu == cv {
        return true;
    }
    match closure(cu, None, "", |x| cyclic_switches(pres, x.letters())) {
        Ok(set) => set.contains(&cv),
        Err(_) => unreachable!("unbudgeted closure"),
    }
}
