mod common;

use std::collections::BTreeSet;

use common::{brute_isomorphisms, group, reference_groups};
use liptrop::group::{enumerate_automorphisms, enumerate_isomorphisms, GroupIso, OrderCap};
use liptrop::sample::Sampler;

#[test]
fn automorphisms_match_brute_force() {
    for g in reference_groups() {
        let fast: Vec<Vec<usize>> = enumerate_automorphisms(&g, OrderCap::DEFAULT)
            .unwrap()
            .into_iter()
            .map(|t| t.map().to_vec())
            .collect();
        let mut slow = brute_isomorphisms(&g, &g);
        slow.sort();
        assert_eq!(fast, slow, "{}", g.name());
    }
}

#[test]
fn brute_force_counts() {
    let count = |s: &str| brute_isomorphisms(&group(s), &group(s)).len();
    assert_eq!(count("z4"), 2);
    assert_eq!(count("klein4"), 6);
    assert_eq!(count("s3"), 6);
    assert_eq!(count("q8"), 24);
    assert_eq!(count("d4"), 8);
    assert_eq!(count("z6"), 2);
}

#[test]
fn isomorphisms_between_pairs_match_brute_force() {
    let groups = reference_groups();
    let mut s = Sampler::new(17);
    for g in &groups {
        let relabeled = std::sync::Arc::new(g.relabel(&s.permutation(g.order())).unwrap());
        for h in groups.iter().chain(std::iter::once(&relabeled)) {
            let fast: Vec<Vec<usize>> = enumerate_isomorphisms(g, h, OrderCap::DEFAULT)
                .unwrap()
                .into_iter()
                .map(|t| t.map().to_vec())
                .collect();
            let mut slow = brute_isomorphisms(g, h);
            slow.sort();
            assert_eq!(fast, slow, "{} -> {}", g.name(), h.name());
        }
    }
}

#[test]
fn automorphisms_form_a_group() {
    for g in reference_groups() {
        let autos = enumerate_automorphisms(&g, OrderCap::DEFAULT).unwrap();
        let maps: BTreeSet<Vec<usize>> = autos.iter().map(|t| t.map().to_vec()).collect();
        assert!(autos.iter().any(GroupIso::is_identity));
        for a in &autos {
            assert!(maps.contains(a.inverse().map()));
            for b in &autos {
                assert!(maps.contains(a.then(b).unwrap().map()));
            }
        }
    }
}

#[test]
fn larger_groups_stay_within_the_cap() {
    // S4 and Z2×Z2×Z2 at orders 24 and 8, beyond the brute-force range for S4.
    let s4 = group("s4");
    assert_eq!(
        enumerate_automorphisms(&s4, OrderCap::DEFAULT)
            .unwrap()
            .len(),
        24
    );
    let z2cubed = group("direct_product(z2, klein4)");
    assert_eq!(
        enumerate_automorphisms(&z2cubed, OrderCap::DEFAULT)
            .unwrap()
            .len(),
        168
    );
    let z8 = group("z8");
    assert!(enumerate_isomorphisms(&z8, &z2cubed, OrderCap::DEFAULT)
        .unwrap()
        .is_empty());
}
