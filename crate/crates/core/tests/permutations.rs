use std::collections::HashSet;

use proptest::prelude::*;
use sinf::permutations::{all_permutations, random_prefix, BisymmetricElement, Permutation, VirtualPermutationPrefix};
use sinf::rng::from_seed;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::from_images(&v).unwrap())
}

fn images(p: &Permutation) -> Vec<usize> {
    (1..=p.degree()).map(|i| p.apply(i)).collect()
}

/// Cycle count by following orbits.
fn orbits(p: &Permutation) -> usize {
    let n = p.degree();
    let mut seen = vec![false; n + 1];
    let mut count = 0;
    for s in 1..=n {
        if !seen[s] {
            count += 1;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = p.apply(i);
            }
        }
    }
    count
}

#[test]
fn projection_removes_the_top_element_from_its_cycle() {
    for n in 2..=6 {
        for s in all_permutations(n) {
            let img = images(&s);
            let expected: Vec<usize> = (1..n).map(|i| if img[i - 1] == n { img[n - 1] } else { img[i - 1] }).collect();
            assert_eq!(images(&s.canonical_projection().unwrap()), expected);
        }
    }
}

#[test]
fn coordinates_biject_with_the_group() {
    for n in 1..=7 {
        let all = all_permutations(n);
        let coords: HashSet<VirtualPermutationPrefix> = all.iter().map(VirtualPermutationPrefix::from_permutation).collect();
        assert_eq!(coords.len(), all.len());
        assert_eq!(all.len(), (1..=n).product::<usize>());
        for s in &all {
            assert_eq!(&VirtualPermutationPrefix::from_permutation(s).to_permutation(), s);
        }
    }
}

#[test]
fn projection_truncates_coordinates() {
    for s in all_permutations(6) {
        let x = VirtualPermutationPrefix::from_permutation(&s);
        let y = VirtualPermutationPrefix::from_permutation(&s.canonical_projection().unwrap());
        assert_eq!(x.truncated(5), y);
    }
}

#[test]
fn cocycle_is_additive_exhaustively() {
    for (degree, level) in [(2, 6), (3, 5)] {
        let group: Vec<BisymmetricElement> = all_permutations(degree)
            .into_iter()
            .flat_map(|a| all_permutations(degree).into_iter().map(move |b| BisymmetricElement::new(a.clone(), b)))
            .collect();
        for s in all_permutations(level) {
            let x = VirtualPermutationPrefix::from_permutation(&s);
            for g in &group {
                let xg = x.act(g).unwrap();
                let cg = x.cocycle(g).unwrap();
                for h in &group {
                    assert_eq!(x.cocycle(&g.compose(h)).unwrap(), xg.cocycle(h).unwrap() + cg);
                }
            }
        }
    }
}

#[test]
fn cocycle_stabilizes_past_the_degree() {
    let mut rng = from_seed(5);
    for m in 1..=4 {
        for _ in 0..200 {
            let x = random_prefix(12, &mut rng);
            let g = BisymmetricElement::random(m, &mut rng);
            let diffs: Vec<i64> = (m + 1..=12)
                .map(|n| {
                    let xn = x.truncated(n).to_permutation();
                    orbits(&g.act_on(&xn)) as i64 - orbits(&xn) as i64
                })
                .collect();
            assert!(diffs.windows(2).all(|w| w[0] == w[1]), "m = {m}: {diffs:?}");
            assert_eq!(x.cocycle(&g).unwrap(), diffs[0]);
        }
    }
}

#[test]
fn diagonal_elements_preserve_cycle_counts() {
    let mut rng = from_seed(9);
    for _ in 0..500 {
        let x = random_prefix(10, &mut rng);
        let k = BisymmetricElement::diagonal(Permutation::random(4, &mut rng));
        assert_eq!(x.cocycle(&k).unwrap(), 0);
    }
}

proptest! {
    #[test]
    fn composition_is_associative(a in perm(7), b in perm(7), c in perm(7)) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn inverse_undoes(a in perm(9)) {
        prop_assert!(a.compose(&a.inverse()).is_identity());
        prop_assert!(a.inverse().compose(&a).is_identity());
    }

    #[test]
    fn sign_is_multiplicative(a in perm(8), b in perm(8)) {
        prop_assert_eq!(a.compose(&b).sign(), a.sign() * b.sign());
        prop_assert_eq!(a.sign(), if (8 - orbits(&a)) % 2 == 0 { 1 } else { -1 });
    }

    #[test]
    fn cycle_counts_agree(a in perm(10)) {
        prop_assert_eq!(a.num_cycles(), orbits(&a));
        prop_assert_eq!(a.cycles().len(), orbits(&a));
        prop_assert_eq!(VirtualPermutationPrefix::from_permutation(&a).num_cycles(), orbits(&a));
    }

    #[test]
    fn coordinates_round_trip(coords in (1usize..12).prop_flat_map(|n| (1..=n as u32).map(|m| 0..m).collect::<Vec<_>>())) {
        let x = VirtualPermutationPrefix::new(coords).unwrap();
        prop_assert_eq!(VirtualPermutationPrefix::from_permutation(&x.to_permutation()), x);
    }

    #[test]
    fn action_is_a_right_action(seed in any::<u64>()) {
        let mut rng = from_seed(seed);
        let x = random_prefix(9, &mut rng);
        let g = BisymmetricElement::random(5, &mut rng);
        let h = BisymmetricElement::random(5, &mut rng);
        prop_assert_eq!(x.act(&g).unwrap().act(&h).unwrap(), x.act(&g.compose(&h)).unwrap());
    }
}
