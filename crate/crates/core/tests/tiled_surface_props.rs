mod common;

use std::collections::HashMap;

use common::*;
use corefold::cover_oracle::{CoverOracle, Subcomplex};
use corefold::folding_engine::fold;
use corefold::{core_surface_from_generators, PreComplex, Step, TiledSurface};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

thread_local! {
    static BALL: CoverOracle = CoverOracle::new(&p2(), 3).unwrap();
}

/// A core, a folded wedge with loose octagons, or a piece of a cover ball.
fn random_complex(kind: u8, seed: u64) -> TiledSurface {
    let p = p2();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind % 3 {
        0 => {
            let k = rng.gen_range(1..=3);
            let gens: Vec<_> = (0..k).map(|_| word_upto(&mut rng, &p, 7)).collect();
            core_surface_from_generators(&gens, &p).unwrap().surface
        }
        1 => {
            let mut pre = PreComplex::new(p.clone());
            let base = pre.add_vertex();
            for _ in 0..rng.gen_range(1..=3) {
                let x = word_upto(&mut rng, &p, 6);
                pre.add_path(base, x.letters(), Some(base));
            }
            for _ in 0..rng.gen_range(0..=3) {
                let v = rng.gen_range(0..pre.vertex_count());
                pre.add_relator_face(v, rng.gen_range(0..8), &[]);
            }
            fold(pre).surface
        }
        _ => BALL.with(|b| {
            let z = &b.ball().surface;
            let mut y = Subcomplex::default();
            for _ in 0..rng.gen_range(1..=6) {
                y.add_face(z, rng.gen_range(0..z.face_count().min(40)));
            }
            for _ in 0..rng.gen_range(0..=6) {
                y.add_edge(z, rng.gen_range(0..z.edge_count().min(80)));
            }
            y.surface(z)
        }),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn boundary_identities(kind in 0u8..3, seed in any::<u64>()) {
        let y = random_complex(kind, seed);
        prop_assert!(y.is_valid());
        let mut audit = Audit::default();
        audit.check(&y, "random");
        prop_assert!(audit.violations.is_empty(), "{:?}", audit.violations);
        prop_assert_eq!(
            y.boundary_cycles().unwrap().iter().map(|c| c.len()).sum::<usize>(),
            y.boundary_length()
        );
    }

    #[test]
    fn every_side_is_used_once(kind in 0u8..3, seed in any::<u64>()) {
        let y = random_complex(kind, seed);
        let mut uses: HashMap<Step, usize> = HashMap::new();
        for f in y.faces() {
            for &s in f {
                *uses.entry(s).or_default() += 1;
            }
        }
        for c in y.boundary_cycles().unwrap() {
            for &s in &c.steps {
                *uses.entry(s).or_default() += 1;
            }
        }
        for e in 0..y.edge_count() {
            for forward in [true, false] {
                prop_assert_eq!(uses.get(&Step::new(e, forward)).copied(), Some(1));
            }
        }
    }

    #[test]
    fn genus_is_a_non_negative_integer(kind in 0u8..3, seed in any::<u64>()) {
        let y = random_complex(kind, seed);
        let st = y.stats().unwrap();
        for c in &st.components {
            prop_assert!(c.genus >= 0);
            prop_assert_eq!(c.euler, 2 - 2 * c.genus - c.boundary_lengths.len() as i64);
        }
    }

    #[test]
    fn serialization_round_trips(kind in 0u8..3, seed in any::<u64>()) {
        let y = random_complex(kind, seed);
        let text = y.to_json();
        let z = TiledSurface::from_json(&text).unwrap();
        prop_assert_eq!(z.to_json(), text.clone());
        prop_assert!(z.isomorphic(&y).is_some());
        let raw = TiledSurface::from_json(&y.to_json_raw()).unwrap();
        prop_assert_eq!(&raw, &y);
    }

    #[test]
    fn morphisms_are_rigid(kind in 0u8..3, seed in any::<u64>()) {
        let y = random_complex(kind, seed);
        let (z, map) = y.canonical();
        let comps = y.components();
        for v in 0..y.vertex_count() {
            if comps[v] != comps[0] {
                continue;
            }
            let m = y.morphism_from(&z, v, map[v]).unwrap();
            for u in 0..y.vertex_count() {
                if comps[u] == comps[v] {
                    prop_assert_eq!(m.vertex_map[u], map[u]);
                }
            }
            break;
        }
    }
}

#[test]
fn standalone_octagon_reads_the_inverse_relator() {
    let p = p2();
    let mut pre = PreComplex::new(p.clone());
    let v = pre.add_vertex();
    pre.add_relator_face(v, 0, &[]);
    let y = fold(pre).surface;
    let cycles = y.boundary_cycles().unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0].word(), corefold::CyclicWord::new(&corefold::presentation::invert(p.relator())));
    let mut audit = Audit::default();
    audit.check(&y, "octagon");
    assert!(audit.violations.is_empty());
}
