use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ribbon::hypergraph::{hsum_normalize, random_graph, simple_graph, Corner, HSum, Hypergraph};
use ribbon::permcore::{compose, cycles, Perm};
use ribbon::prop::{gluing_count, hcompose, unit, unit_power, vcompose};
use ribbon::words::{canonical_rotation, rotation_sign, sym_canon, CycWord, Letter};

fn gamma3() -> Hypergraph {
    simple_graph(vec![1, 2, 0], vec![1, 0, 2], 1).unwrap()
}

fn perm(k: usize) -> impl Strategy<Value = Perm> {
    Just((0..k).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Perm::new(v).unwrap())
}

fn graph(seed: u64, d: i32) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=k);
    let units = rng.gen_range(0..2);
    random_graph(&mut rng, k, n, units, d)
}

#[test]
fn boundary_permutation_of_gamma3() {
    let s0 = Perm::from_cycles(3, &[vec![0, 1, 2]]).unwrap();
    let s1 = Perm::from_cycles(3, &[vec![0, 1]]).unwrap();
    let sinf = compose(&s0.inverse(), &s1).unwrap();
    assert_eq!(cycles(&sinf), vec![vec![0], vec![1, 2]]);
    assert_eq!(gamma3().boundaries(), vec![vec![0], vec![1, 2]]);
}

#[test]
fn corners_of_the_displayed_graphs() {
    assert_eq!(gamma3().boundary_corners(0).unwrap().len(), 1);
    let g2 = simple_graph(vec![1, 2, 0], vec![1, 2, 0], 1).unwrap();
    assert_eq!(g2.boundaries().len(), 3);
    for b in 0..3 {
        let c = g2.boundary_corners(b).unwrap();
        assert!(matches!(c.as_slice(), [Corner::Gap { vertex: 0, .. }]));
    }
}

#[test]
fn relabelled_gamma3_cancels() {
    let g = gamma3();
    let (key, s) = g.canonicalize().unwrap();
    // relabel the edges by (0 1) but keep the orientation list
    let t = Perm::new(vec![1, 0, 2]).unwrap();
    let h = g.permute_edges(&t);
    let h = Hypergraph::build(
        3,
        h.sigma0().clone(),
        h.sigma1().clone(),
        h.vertex_labels().clone(),
        h.boundary_labels().clone(),
        1,
        vec![0, 1, 2],
        h.coeff().clone(),
    )
    .unwrap();
    let (hk, hs) = h.canonicalize().unwrap();
    assert_eq!((hk, hs), (key, -s));
    assert!(hsum_normalize(&[g, h]).unwrap().is_zero());
}

#[test]
fn rotation_of_three_odd_letters_is_even() {
    assert_eq!(rotation_sign(&[1, 1, 1], 1), 1);
    assert_eq!(rotation_sign(&[1, 1], 1), -1);
    // (x x) with x odd vanishes
    let x = Letter::Free { id: 0, deg: 1 };
    assert!(CycWord::canonical(&[x, x]).is_none());
    assert!(CycWord::canonical(&[x, x, x]).is_some());
}

#[test]
fn unit_laws_and_corner_gluings() {
    let g = gamma3();
    let left = vcompose(&unit_power(g.n_boundaries(), 1), &g).unwrap();
    assert_eq!(left, HSum::from_graph(&g));
    let right = vcompose(&g, &unit(1)).unwrap();
    assert_eq!(right, HSum::from_graph(&g));
    // a univalent vertex glued into a boundary with c corners: c gluings
    let g1 = simple_graph(vec![1, 2, 0], vec![0, 1, 2], 1).unwrap();
    assert_eq!(g1.n_boundaries(), 1);
    let corners = g1.boundary_corners(0).unwrap().len();
    let uni = simple_graph(vec![0], vec![0], 1).unwrap();
    assert_eq!(gluing_count(&uni, &g1), corners);
}

proptest! {
    #[test]
    fn inverse_and_parity(p in perm(6), q in perm(6)) {
        prop_assert_eq!(p.compose(&p.inverse()).unwrap(), Perm::identity(6));
        prop_assert_eq!(p.compose(&q).unwrap().parity(), p.parity() * q.parity());
        let cs = p.cycles();
        let mut all: Vec<usize> = cs.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..6).collect::<Vec<_>>());
        prop_assert!(cs.windows(2).all(|w| w[0][0] < w[1][0]));
        prop_assert!(cs.iter().all(|c| c[0] == *c.iter().min().unwrap()));
    }

    #[test]
    fn canonical_rotation_tracks_sign(degs in prop::collection::vec(-1i64..=2, 1..7), ids in prop::collection::vec(0u8..3, 7), r in 0usize..7) {
        let items: Vec<(u8, i64)> = degs.iter().zip(&ids).map(|(&g, &i)| (i, g)).collect();
        let r = r % items.len();
        let rotated: Vec<(u8, i64)> = items[r..].iter().chain(&items[..r]).copied().collect();
        let rdeg: Vec<i64> = rotated.iter().map(|x| x.1).collect();
        match (canonical_rotation(&items, &degs), canonical_rotation(&rotated, &rdeg)) {
            (Some((w, s)), Some((w2, s2))) => {
                prop_assert_eq!(&w, &w2);
                prop_assert_eq!(s2, s * rotation_sign(&degs, r));
                let wdeg: Vec<i64> = w.iter().map(|x| x.1).collect();
                prop_assert_eq!(canonical_rotation(&w, &wdeg), Some((w.clone(), 1)));
            }
            (None, None) => {}
            _ => prop_assert!(false, "vanishing must be rotation invariant"),
        }
    }

    #[test]
    fn sym_canon_is_idempotent(lens in prop::collection::vec(0usize..3, 1..5), d in -1i32..=2) {
        let x = Letter::Free { id: 0, deg: 0 };
        let y = Letter::Free { id: 1, deg: 1 };
        let ws: Vec<CycWord> = lens
            .iter()
            .enumerate()
            .filter_map(|(i, &n)| {
                let ls: Vec<Letter> = (0..n).map(|j| if (i + j) % 2 == 0 { x } else { y }).collect();
                CycWord::canonical(&ls).map(|c| c.0)
            })
            .collect();
        if let Some((m, _)) = sym_canon(ws.clone(), d) {
            prop_assert_eq!(sym_canon(m.clone(), d), Some((m.clone(), 1)));
            let mut rev = ws.clone();
            rev.reverse();
            prop_assert_eq!(sym_canon(rev, d).map(|x| x.0), Some(m));
        }
    }

    #[test]
    fn canonical_form_ignores_edge_names(seed in any::<u64>(), d in -1i32..=2) {
        let g = graph(seed, d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut img: Vec<usize> = (0..g.edge_count()).collect();
        rand::seq::SliceRandom::shuffle(img.as_mut_slice(), &mut rng);
        let h = g.permute_edges(&Perm::new(img).unwrap());
        prop_assert_eq!(g.canonicalize(), h.canonicalize());
        if let Some((key, s)) = g.canonicalize() {
            prop_assert_eq!(key.to_graph(g.coeff().clone()).canonicalize(), Some((key, 1)));
            let _ = s;
        }
        prop_assert!(hsum_normalize(&[g.clone(), g.opposite()]).unwrap().is_zero());
    }

    #[test]
    fn boundaries_and_corners_partition(seed in any::<u64>()) {
        let g = graph(seed, 1);
        let mut all: Vec<usize> = g.boundaries().into_iter().flatten().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..g.edge_count()).collect::<Vec<_>>());
        let gaps: usize = (0..g.n_boundaries())
            .map(|b| g.boundary_corners(b).unwrap().iter().filter(|c| matches!(c, Corner::Gap { .. })).count())
            .sum();
        prop_assert_eq!(gaps, g.edge_count());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), d in -1i32..=2) {
        let g = graph(seed, d);
        prop_assert_eq!(Hypergraph::from_json(&g.to_json()).unwrap(), g.clone());
        let s = HSum::from_graph(&g);
        prop_assert_eq!(HSum::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn horizontal_degrees_add(a in any::<u64>(), b in any::<u64>(), d in -1i32..=2) {
        let (g, h) = (graph(a, d), graph(b, d));
        let gh = hcompose(&g, &h).unwrap();
        prop_assert_eq!(gh.degree(), g.degree() + h.degree());
        prop_assert_eq!(gh.n_boundaries(), g.n_boundaries() + h.n_boundaries());
        prop_assert_eq!(gh.n_vertices(), g.n_vertices() + h.n_vertices());
    }
}
