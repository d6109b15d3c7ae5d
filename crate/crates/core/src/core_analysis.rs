use crate::blocks::{self, SegmentKind};
use crate::error::Error;
use crate::folding_engine::PointedCoreSurface;
use crate::group_words::{cyclic_shorten, geodesic_class, shortest_cyclic_reps};
use crate::presentation::{invert, Word};
use crate::tiled_surface::{block_decomposition, Morphism, TiledSurface, Violation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreViolation {
    Invalid(Vec<Violation>),
    Disconnected { components: usize },
    LongSegment { cycle: usize, kind: SegmentKind, start: usize },
    HalfBlock { cycle: usize, start: usize },
    HalfChain { cycle: usize },
    InverseLongSegment { cycle: usize, kind: SegmentKind, start: usize },
    Inessential { cycle: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreCertificate {
    pub is_core: bool,
    pub violation: Option<CoreViolation>,
}

fn fail(v: CoreViolation) -> CoreCertificate {
    CoreCertificate { is_core: false, violation: Some(v) }
}

pub fn is_core_surface(y: &TiledSurface) -> CoreCertificate {
    let diag = y.validate();
    if !diag.is_valid() {
        return fail(CoreViolation::Invalid(diag.violations));
    }
    let k = y.component_count();
    if k != 1 {
        return fail(CoreViolation::Disconnected { components: k });
    }
    let pres = y.presentation();
    let cycles = match y.boundary_cycles() {
        Ok(c) => c,
        Err(_) => return fail(CoreViolation::Invalid(Vec::new())),
    };
    for (i, c) in cycles.iter().enumerate() {
        let dec = block_decomposition(c, pres);
        if let Some(s) = dec.first_long() {
            return fail(CoreViolation::LongSegment { cycle: i, kind: s.kind, start: s.start });
        }
        if let Some(s) = dec.half_blocks().first() {
            return fail(CoreViolation::HalfBlock { cycle: i, start: s.start });
        }
        if dec.is_half_chain {
            return fail(CoreViolation::HalfChain { cycle: i });
        }
    }
    for (i, c) in cycles.iter().enumerate() {
        if c.is_empty() {
            continue;
        }
        let inv = invert(&c.letters);
        let runs = blocks::cyclic_runs(pres, &inv);
        let seg = blocks::long_blocks(pres, &runs)
            .into_iter()
            .next()
            .or_else(|| blocks::long_chains(pres, &runs, true).into_iter().next());
        if let Some(s) = seg {
            return fail(CoreViolation::InverseLongSegment { cycle: i, kind: s.kind, start: s.start });
        }
        if cyclic_shorten(&Word(c.letters.clone()), pres).is_err() {
            return fail(CoreViolation::Inessential { cycle: i });
        }
    }
    CoreCertificate { is_core: true, violation: None }
}

/// Decides `w ∈ J` for the subgroup `J` the core was built from.
pub fn is_member(w: &Word, core: &PointedCoreSurface, budget: usize) -> Result<bool, Error> {
    let y = &core.surface;
    let pres = y.presentation();
    let x = w.conjugate_by(&core.conjugator);
    let table = y.slot_table();
    for g in geodesic_class(&x, pres, budget)? {
        if y.trace_with(&table, core.basepoint, g.letters()) == Ok(core.basepoint) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Decides whether some conjugate of `w` lies in `J`.
pub fn is_conjugate_into(w: &Word, core: &PointedCoreSurface, budget: usize) -> Result<bool, Error> {
    let y = &core.surface;
    let pres = y.presentation();
    let table = y.slot_table();
    for c in shortest_cyclic_reps(w, pres, budget)? {
        for v in 0..y.vertex_count() {
            if y.trace_with(&table, v, c.letters()) == Ok(v) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn morphism_between_cores(src: &PointedCoreSurface, dst: &PointedCoreSurface) -> Option<Morphism> {
    src.surface.morphism_to(&dst.surface)
}
