use std::collections::BTreeSet;

use covcat::confcat::{plain_fin, Bounds, ConfigCategory, CoveringStack};
use covcat::epicat::{enumerate_epifin_objects, epifin_category, EpiFinObject};
use covcat::graphcov::Graph;
use covcat::scomb::category::{poset_category, slice_category, terminal_category};
use covcat::scomb::{
    comma, fiber_product, latching_agrees, nerve, segal_check, segal_check_graded, to_terminal, FiniteCategory,
    Nerve, TruncatedSSet,
};
use proptest::prelude::*;

fn corpus() -> Vec<(&'static str, FiniteCategory)> {
    let config = ConfigCategory::build(&CoveringStack::single(&Graph::cycle(3)), Bounds::new(1, 2, 2)).unwrap();
    vec![
        ("terminal", terminal_category()),
        ("0<1<2", poset_category(3, |a, b| a <= b)),
        ("diamond", poset_category(4, |a, b| a == b || a == 0 || b == 3)),
        ("Fin(2)", plain_fin(2).category().clone()),
        ("EpiFin(2)", epifin_category(enumerate_epifin_objects(2)).unwrap().category().clone()),
        ("config(C3)", config.category().clone()),
    ]
}

/// Reflexive-transitive closure of an arbitrary relation on `0..n`.
fn preorder(n: usize, bits: &[bool]) -> Vec<Vec<bool>> {
    let mut le: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a == b || bits[a * n + b]).collect()).collect();
    for m in 0..n {
        for a in 0..n {
            for b in 0..n {
                if le[a][m] && le[m][b] {
                    le[a][b] = true;
                }
            }
        }
    }
    le
}

/// Checks that slice-nerve simplices land on comma simplices bijectively
/// and compatibly with faces: an `r`-string `[b_1..b_r]` over objects
/// `a_0..a_r` is the string `[a_0, b_1, .., b_r]` of `C`.
fn comma_is_nerve_of_slice(c: &FiniteCategory, n: &Nerve, y: usize) {
    let depth = n.max_dim() - 1;
    let cm = comma(n.sset(), y).unwrap();
    let (slice, objects, under) = slice_category(c, y).unwrap();
    let sn = nerve(&slice, depth).unwrap();
    let mut to_comma: Vec<Vec<usize>> = Vec::new();
    for r in 0..=depth {
        let mut level = Vec::with_capacity(sn.count(r));
        for s in 0..sn.count(r) {
            let string = sn.string(r, s);
            let head = if r == 0 { objects[string[0]] } else { objects[slice.target(string[0])] };
            let mut ambient = vec![head];
            if r > 0 {
                ambient.extend(string.iter().map(|&m| under[m]));
            }
            let x = n.find(r + 1, &ambient).expect("slice string is a string of C");
            let z = cm.ambient[r].binary_search(&x).expect("string ends at y");
            level.push(z);
        }
        let mut sorted = level.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), level.len(), "not injective at level {r}");
        assert_eq!(level.len(), cm.sset.count(r), "not surjective at level {r}");
        to_comma.push(level);
    }
    for r in 1..=depth {
        for s in 0..sn.count(r) {
            for i in 0..=r {
                assert_eq!(
                    cm.sset.face(r, i, to_comma[r][s]),
                    to_comma[r - 1][sn.sset().face(r, i, s)],
                    "face d_{i} at level {r}"
                );
            }
        }
    }
}

fn check_nerve(c: &FiniteCategory, depth: usize) -> Nerve {
    c.validate().unwrap();
    let n = nerve(c, depth).unwrap();
    n.sset().validate().unwrap();
    for level in 1..=depth {
        assert!(latching_agrees(n.sset(), level).unwrap(), "latching at {level}");
    }
    n
}

#[test]
fn corpus_nerves_satisfy_the_simplicial_laws() {
    for (name, c) in corpus() {
        let depth = 3;
        let n = check_nerve(&c, depth);
        if c.max_length().is_none() {
            for level in 2..=depth {
                assert!(segal_check(n.sset(), level).unwrap().bijective, "{name} level {level}");
            }
        }
        for y in 0..c.num_objects() {
            comma_is_nerve_of_slice(&c, &n, y);
        }
    }
}

#[test]
fn bounded_config_nerve_is_graded_segal() {
    let g = Graph::cycle(3);
    let b = Bounds::new(2, 2, 3);
    let c = ConfigCategory::build(&CoveringStack::single(&g), b).unwrap();
    let n = nerve(c.category(), b.depth).unwrap();
    let weights: Vec<usize> = (0..n.count(1)).map(|x| c.category().length(n.string(1, x)[0])).collect();
    for level in 2..=b.depth {
        let r = segal_check_graded(n.sset(), level, &weights, b.tick_max).unwrap();
        assert!(r.bijective, "{r:?}");
        // the ungraded comparison sees composable pairs that overflow
        assert!(!segal_check(n.sset(), level).unwrap().bijective);
    }
}

#[test]
fn removing_a_triangle_breaks_segal() {
    let c = poset_category(3, |a, b| a <= b);
    let n = nerve(&c, 2).unwrap();
    // pick the non-degenerate triangle 0 <= 1 <= 2
    let flags = n.sset().degenerate_flags(2).unwrap();
    let t = (0..n.count(2)).find(|&s| !flags[s]).unwrap();
    let (smaller, _) = n.sset().remove_simplex(2, t).unwrap();
    let r = segal_check(&smaller, 2).unwrap();
    assert!(!r.bijective);
}

#[test]
fn comma_over_the_point_object_of_epifin() {
    let objects = enumerate_epifin_objects(3);
    let cat = epifin_category(objects).unwrap();
    let n = nerve(cat.category(), 1).unwrap();
    let y = cat.object_id(&EpiFinObject::identity(1)).unwrap();
    let level0: Vec<usize> = comma(n.sset(), y).unwrap().ambient[0].iter().map(|&x| n.string(1, x)[0]).collect();
    let sources: BTreeSet<&EpiFinObject> = level0.iter().map(|&m| cat.object(cat.category().source(m))).collect();
    let identities: BTreeSet<&EpiFinObject> = cat.objects().iter().filter(|x| x.is_identity()).collect();
    // id_0 up to id_3
    assert_eq!(identities.len(), 4);
    assert_eq!(sources, identities);
}

#[test]
fn fiber_product_over_the_terminal_category_is_the_product() {
    let a = poset_category(2, |x, y| x <= y);
    let b = plain_fin(1).category().clone();
    let p = fiber_product(&a, &to_terminal(&a), &b, &to_terminal(&b)).unwrap();
    p.category.validate().unwrap();
    assert_eq!(p.category.num_objects(), a.num_objects() * b.num_objects());
    assert_eq!(p.category.num_morphisms(), a.num_morphisms() * b.num_morphisms());
    let pn = nerve(&p.category, 2).unwrap();
    let product: TruncatedSSet = nerve(&a, 2).unwrap().sset().product(nerve(&b, 2).unwrap().sset());
    assert_eq!(pn.sset().counts(), product.counts());
}

proptest! {
    #[test]
    fn random_preorders((n, bits) in (1usize..5).prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), n * n)))) {
        let le = preorder(n, &bits);
        let c = poset_category(n, |a, b| le[a][b]);
        let nv = check_nerve(&c, 3);
        for level in 2..=3 {
            prop_assert!(segal_check(nv.sset(), level).unwrap().bijective);
        }
        for y in 0..n {
            comma_is_nerve_of_slice(&c, &nv, y);
        }
        // level 1 counts related pairs
        prop_assert_eq!(nv.count(1), le.iter().flatten().filter(|&&x| x).count());
    }
}
