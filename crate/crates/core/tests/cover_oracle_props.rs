mod common;

use common::*;
use corefold::cover_oracle::*;
use corefold::group_words::{dehn_reduce, is_trivial};
use corefold::{core_surface_from_generators, TiledSurface, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

thread_local! {
    static BALL: CoverOracle = CoverOracle::new(&p2(), 5).unwrap();
}

fn random_subcomplex(z: &TiledSurface, seed: u64) -> Subcomplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = Subcomplex::default();
    if z.face_count() > 0 {
        for _ in 0..rng.gen_range(0..=2) {
            y.add_face(z, rng.gen_range(0..z.face_count()));
        }
    }
    if z.edge_count() > 0 {
        for _ in 0..rng.gen_range(1..=8) {
            y.add_edge(z, rng.gen_range(0..z.edge_count()));
        }
    }
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn triviality_up_to_ten(x in prop_oneof![words(10), words_with_arc(1, 8..=8), words_with_arc(2, 5..=6)]) {
        let p = p2();
        prop_assert_eq!(is_trivial(&x, &p), BALL.with(|b| b.is_trivial(&x).unwrap()));
    }

    #[test]
    fn lengths_up_to_six(x in prop_oneof![words(6), words_with_arc(1, 4..=4)].prop_filter("reach", |x| x.len() <= 6)) {
        let p = p2();
        prop_assert_eq!(dehn_reduce(&x, &p).len(), BALL.with(|b| b.element_length(&x).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cover_balls_are_reproducible(gens in proptest::collection::vec(words(5), 1..=2)) {
        let p = p2();
        let core = core_surface_from_generators(&gens, &p).unwrap();
        let a = cover_ball(&core.surface, core.basepoint, 2).unwrap();
        let b = cover_ball(&core.surface, core.basepoint, 2).unwrap();
        prop_assert!(a.surface.isomorphic(&b.surface).is_some());
        let (shuffled, map) = core.surface.canonical();
        let c = cover_ball(&shuffled, map[core.basepoint], 2).unwrap();
        prop_assert!(c.surface.isomorphic(&a.surface).is_some());
        prop_assert!(a.surface.validate().p2_certified());
        prop_assert!(a.surface.is_boundary_reduced());
        let m = core.surface.morphism_from(&a.surface, core.basepoint, a.basepoint);
        prop_assert!(m.is_some());
    }

    #[test]
    fn br_closures_shrink_the_boundary(gens in proptest::collection::vec(words(6), 1..=3), seed in any::<u64>()) {
        let p = p2();
        let z = core_surface_from_generators(&gens, &p).unwrap().surface;
        let y = random_subcomplex(&z, seed);
        let run = closure_within(&y, &z, ClosureMode::BoundaryReduced, usize::MAX).unwrap();
        prop_assert!(run.completed);
        prop_assert!(2 * run.steps.len() <= run.initial_boundary);
        for s in &run.steps {
            prop_assert!(s.boundary_after + 2 <= s.boundary_before);
        }
        prop_assert!(run.closure.surface(&z).is_boundary_reduced());
    }

    #[test]
    fn sbr_closure_commutes_with_morphisms(
        gens in proptest::collection::vec(words(6), 1..=2),
        extra in proptest::collection::vec(words(6), 1..=2),
        seed in any::<u64>(),
    ) {
        let p = p2();
        let z1 = core_surface_from_generators(&gens, &p).unwrap().surface;
        let z2 = core_surface_from_generators(&[gens.clone(), extra].concat(), &p).unwrap().surface;
        let f = z1.morphism_to(&z2).expect("cores of nested subgroups");
        let y = random_subcomplex(&z1, seed);
        let c1 = closure_within(&y, &z1, ClosureMode::StronglyBoundaryReduced, 200).unwrap();
        let c2 = closure_within(&y.image(&f), &z2, ClosureMode::StronglyBoundaryReduced, 200).unwrap();
        if c1.completed && c2.completed {
            prop_assert!(c1.closure.image(&f).is_subset(&c2.closure));
        }
    }
}

#[test]
fn relator_closes_at_saturated_vertices() {
    let p = p2();
    let ball = cover_ball(&TiledSurface::single_vertex(p.clone()), 0, 3).unwrap();
    let y = &ball.surface;
    let table = y.slot_table();
    let dist = distances(y, &table, ball.basepoint);
    let r = p.relator_word();
    for v in (0..y.vertex_count()).filter(|&v| dist[v] < 3) {
        assert_eq!(table.occupied(v), 8);
        for k in 0..8 {
            let rot = Word(corefold::presentation::rotate(r.letters(), k));
            assert_eq!(y.trace_with(&table, v, rot.letters()), Ok(v));
        }
    }
}

#[test]
fn neighbourhood_of_a_torus_core() {
    let p = p2();
    let core = core_surface_from_generators(&[w(&p, "a"), w(&p, "b")], &p).unwrap();
    let ball = cover_ball(&core.surface, core.basepoint, 2).unwrap();
    let m = core.surface.morphism_from(&ball.surface, core.basepoint, ball.basepoint).unwrap();
    let image: std::collections::BTreeSet<_> = m.vertex_map.iter().copied().collect();
    assert_eq!(image.len(), core.surface.vertex_count());
    let table = ball.surface.slot_table();
    let dist = distances(&ball.surface, &table, ball.basepoint);
    assert!(image.iter().any(|&v| dist[v] == 2));
    for &v in &image {
        assert_eq!(table.occupied(v) == 8, dist[v] < 2, "vertex at distance {}", dist[v]);
    }
}
