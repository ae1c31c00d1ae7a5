use std::collections::BTreeSet;

use covcat::confcat::determinacy::{check_determinacy, check_determinacy_materialized};
use covcat::confcat::local::check_config_loc;
use covcat::confcat::squares::{config_fin_square, reference_square};
use covcat::confcat::strata::{object_recount, strata_census, tower_census};
use covcat::confcat::tower::{build_config_pi_tower, check_tower_determinacy, find_excluded_triple, tower_reference_object};
use covcat::confcat::{plain_fin, Bounds, ConfigCategory, CoveringStack, FinCategory};
use covcat::epicat::EpiFinObject;
use covcat::finset::{falling_factorial, is_selfic};
use covcat::graphcov::{build_cyclic_tower, CoveringSpace, Graph, Tower};
use covcat::FinMap;

fn corpus() -> Vec<(&'static str, CoveringSpace)> {
    vec![
        ("C6->C3", CoveringSpace::cyclic(6, 3).unwrap()),
        ("C4->C2", CoveringSpace::cyclic(4, 2).unwrap()),
        ("C12->C3", CoveringSpace::cyclic(12, 3).unwrap()),
        ("C3 x 2", CoveringSpace::trivial(&Graph::cycle(3), 2)),
    ]
}

#[test]
fn objects_are_the_coproduct_of_the_strata() {
    for (name, pi) in corpus() {
        let r = object_recount(&pi, 3);
        let n = pi.total().vertex_count() as u64;
        let injections: u64 = (0..=3).map(|k| falling_factorial(n as usize, k)).sum();
        assert_eq!(r.by_stratum, r.cover_objects, "{name}");
        assert_eq!(r.cover_objects as u64, injections, "{name}");
        let c = ConfigCategory::build(&CoveringStack::covering(&pi), Bounds::new(3, 0, 1)).unwrap();
        assert_eq!(c.category().num_objects(), r.cover_objects, "{name}");
    }
}

#[test]
fn stratum_labels_are_selfic_and_only_discrete_for_the_identity() {
    for (name, pi) in corpus() {
        for k in 0..=3 {
            for e in strata_census(&pi, k).entries {
                assert!(is_selfic(e.label.map()), "{name}: {}", e.label);
                assert_eq!(e.label.source_card(), k);
            }
        }
    }
    let id = CoveringSpace::identity(&Graph::cycle(4));
    for k in 0..=3 {
        let labels = strata_census(&id, k).realized();
        assert_eq!(labels, [EpiFinObject::identity(k)]);
    }
    let c6 = CoveringSpace::cyclic(6, 3).unwrap();
    let k3 = strata_census(&c6, 3);
    assert_eq!(k3.count(&EpiFinObject::to_one(3).unwrap()), 0);
    assert!(k3.unrealized.contains(&EpiFinObject::to_one(3).unwrap()));
}

#[test]
fn realized_labels_grow_with_covering_fineness() {
    let fine: Vec<CoveringSpace> = [6, 9, 12].iter().map(|&m| CoveringSpace::cyclic(m, 3).unwrap()).collect();
    for k in 1..=4 {
        let realized: Vec<BTreeSet<EpiFinObject>> =
            fine.iter().map(|pi| strata_census(pi, k).realized().into_iter().collect()).collect();
        assert!(realized[0].is_subset(&realized[1]), "k = {k}");
        assert!(realized[1].is_subset(&realized[2]), "k = {k}");
    }
    // three points over one base vertex need a fiber of size three
    let three = EpiFinObject::to_one(3).unwrap();
    assert!(!strata_census(&fine[0], 3).realized().contains(&three));
    assert!(strata_census(&fine[1], 3).realized().contains(&three));
}

#[test]
fn tower_labels_compose_and_match_a_direct_count() {
    let t = build_cyclic_tower(3).unwrap();
    for k in 0..=3 {
        let census = tower_census(&t, k).unwrap();
        for e in &census.entries {
            assert!(is_selfic(e.label.p10.map()) && is_selfic(e.label.p21.map()));
            assert!(is_selfic(e.label.composite().map()));
            assert_eq!(e.label.cards()[2], k);
        }
        assert_eq!(census.total() as u64, falling_factorial(12, k));
    }
    // pairs in C12 by where they first separate: same C3 vertex and same C6
    // vertex (3 partners each), same C3 vertex only (2), elsewhere (6)
    let k2 = tower_census(&t, 2).unwrap();
    let counts: Vec<usize> = k2.entries.iter().map(|e| e.count).collect();
    assert_eq!(counts.iter().sum::<usize>(), 132);
    let mut sorted = counts.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, [12, 24, 96]);
}

#[test]
fn single_vertex_and_edge_examples() {
    let point = Graph::discrete(1);
    let c = ConfigCategory::build(&CoveringStack::single(&point), Bounds::new(1, 0, 1)).unwrap();
    assert_eq!(c.category().num_objects(), 2);
    // identities, plus the inclusion of the empty configuration
    let non_identities: Vec<usize> = (0..c.category().num_morphisms())
        .filter(|&m| !c.category().is_identity(m))
        .collect();
    assert_eq!(non_identities.len(), 1);
    let a = c.arrow(non_identities[0]);
    assert!(c.object(a.src).is_empty() && c.object(a.tgt) == [0]);

    // one point on an edge, one tick: stay at either end or cross either way
    let p2 = Graph::path(2);
    let c = ConfigCategory::build(&CoveringStack::single(&p2), Bounds::new(1, 1, 1)).unwrap();
    let singles: Vec<usize> = (0..c.category().num_objects()).filter(|&o| c.object(o).len() == 1).collect();
    assert_eq!(singles.len(), 2);
    let one_tick = (0..c.category().num_morphisms())
        .filter(|&m| c.category().length(m) == 1 && singles.contains(&c.category().source(m)))
        .count();
    assert_eq!(one_tick, 4);

    let c3 = ConfigCategory::build(&CoveringStack::single(&Graph::cycle(3)), Bounds::new(2, 1, 1)).unwrap();
    let nonempty = (0..c3.category().num_objects()).filter(|&o| !c3.object(o).is_empty()).count();
    assert_eq!(nonempty, 3 + 6);
    assert_eq!(c3.category().num_objects(), 10);
}

#[test]
fn fin_of_a_point_agrees_with_fin_in_length_zero() {
    let k_max = 3;
    let fin_point = FinCategory::build(&CoveringStack::single(&Graph::discrete(1)), Bounds::new(k_max, 1, 1)).unwrap();
    let plain = plain_fin(k_max);
    let cards: Vec<usize> = fin_point.materialized().objects().iter().map(|o| o.card()).collect();
    assert_eq!(cards, (0..=k_max).collect::<Vec<_>>());
    let zero: BTreeSet<(usize, usize, FinMap)> = fin_point
        .materialized()
        .arrows()
        .iter()
        .filter(|a| a.ticks == 0)
        .map(|a| (cards[a.src], cards[a.tgt], a.u.clone()))
        .collect();
    let expected: BTreeSet<(usize, usize, FinMap)> =
        plain.arrows().iter().map(|a| (a.src, a.tgt, a.map.clone())).collect();
    assert_eq!(zero, expected);
    // positive lengths only add the stay ticks
    let one_tick = fin_point.materialized().arrows().iter().filter(|a| a.ticks == 1).count();
    assert_eq!(one_tick, expected.len());
}

#[test]
fn fin_pi_objects_follow_the_joint_injectivity_rule() {
    let pi = CoveringSpace::cyclic(6, 3).unwrap();
    let f = FinCategory::build(&CoveringStack::covering(&pi), Bounds::new(2, 0, 1)).unwrap();
    let conf = ConfigCategory::build(&CoveringStack::covering(&pi), Bounds::new(2, 0, 1)).unwrap();
    let objects = f.materialized().objects();
    for o in objects {
        assert!(is_selfic(&o.labels));
        for i in 0..o.card() {
            for j in 0..i {
                if o.labels.apply(i + 1) == o.labels.apply(j + 1) {
                    assert_ne!(o.points[i], o.points[j], "{o:?}");
                    assert_eq!(pi.project(o.points[i]), pi.project(o.points[j]), "{o:?}");
                }
            }
        }
    }
    // every configuration appears with its own stratum label
    for id in 0..conf.category().num_objects() {
        let points = conf.object(id).to_vec();
        let label = conf.reference_object(id).map().clone();
        assert!(objects.iter().any(|o| o.points == points && o.labels == label));
    }
    // and some objects of Fin(π) repeat a vertex, so they are no configuration
    let witness = objects.iter().find(|o| o.card() == 2 && o.points[0] == o.points[1]).unwrap();
    assert_eq!(witness.labels, FinMap::identity(2));
    assert!(conf.object_id(&witness.points).is_none());
}

#[test]
fn configuration_categories_are_categories() {
    let pi = CoveringSpace::cyclic(6, 3).unwrap();
    for stack in [CoveringStack::covering(&pi), CoveringStack::single(pi.total()), CoveringStack::single(pi.base())] {
        let c = ConfigCategory::build(&stack, Bounds::new(2, 2, 1)).unwrap();
        c.category().validate().unwrap();
    }
    let t = build_cyclic_tower(3).unwrap();
    let c = build_config_pi_tower(&t, Bounds::new(2, 1, 1)).unwrap();
    c.category().validate().unwrap();
    let f = FinCategory::build(&CoveringStack::covering(&CoveringSpace::cyclic(4, 2).unwrap()), Bounds::new(2, 1, 1)).unwrap();
    f.category().validate().unwrap();
}

#[test]
fn streaming_determinacy_matches_the_materialized_count() {
    for (name, pi) in corpus() {
        let b = Bounds::new(2, 2, 1);
        let streamed = check_determinacy(&pi, b.k_max, b.tick_max);
        let built = check_determinacy_materialized(&pi, b).unwrap();
        assert!(streamed.holds(), "{name}: {:?}", streamed.witness);
        assert_eq!(built.distinct_triples, built.morphisms, "{name}");
        assert_eq!(streamed.morphisms, built.morphisms as u64, "{name}");
    }
}

#[test]
fn tower_morphisms_are_determined_by_the_bottom_level() {
    let t = build_cyclic_tower(3).unwrap();
    let c = build_config_pi_tower(&t, Bounds::new(2, 2, 1)).unwrap();
    let r = check_tower_determinacy(&c);
    assert!(r.holds(), "{r:?}");
    let excluded = find_excluded_triple(&c).unwrap().expect("a base homotopy that lifts to the wrong target");
    assert_ne!(excluded.lifted_end, excluded.target_level1);

    // identity tower: the labels are all discrete
    let g = Graph::cycle(3);
    let id = Tower::new(vec![CoveringSpace::identity(&g), CoveringSpace::identity(&g)]).unwrap();
    let c = build_config_pi_tower(&id, Bounds::new(2, 1, 1)).unwrap();
    let plain = ConfigCategory::build(&CoveringStack::single(&g), Bounds::new(2, 1, 1)).unwrap();
    assert_eq!(c.category().num_objects(), plain.category().num_objects());
    assert_eq!(c.category().num_morphisms(), plain.category().num_morphisms());
    for o in 0..c.category().num_objects() {
        let label = tower_reference_object(&c, o);
        assert!(label.p10.is_identity() && label.p21.is_identity());
    }
}

#[test]
fn squares_on_small_instances() {
    let point = Graph::discrete(1);
    let b = Bounds::new(2, 1, 2);
    for pi in [CoveringSpace::trivial(&point, 2), CoveringSpace::identity(&point), CoveringSpace::cyclic(4, 2).unwrap()] {
        assert!(config_fin_square(&pi, b).unwrap().check().unwrap().holds);
        let levels = reference_square(&pi, b).unwrap().ultimate_target_squares().unwrap();
        assert!(levels.iter().all(|l| l.bijective));
    }
}

#[test]
fn local_lift_on_a_small_cover() {
    let r = check_config_loc(&CoveringSpace::cyclic(4, 2).unwrap(), Bounds::new(2, 1, 2)).unwrap();
    assert!(r.holds(), "{r:?}");
    assert_eq!(r.counts, r.base_counts);
    // level 0: a point of the cover and a morphism into its image
    let pi = CoveringSpace::cyclic(4, 2).unwrap();
    let base = ConfigCategory::build(&CoveringStack::single(pi.base()), Bounds::new(2, 1, 2)).unwrap();
    let into_points: usize = (0..pi.total().vertex_count())
        .map(|x| base.category().incoming(base.object_id(&[pi.project(x)]).unwrap()).len())
        .sum();
    assert_eq!(r.counts[0], into_points);
}
