use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ribbon::holieb::*;
use ribbon::hypergraph::{random_graph, simple_graph, HSum, Hypergraph};
use ribbon::prop::vcompose;
use ribbon::rep::{compose_operators, eval_graph, eval_sum};
use ribbon::scalar::q;
use ribbon::theta::{check_cyclic_invariance, darboux_alphabet, graded_alphabet, ThetaFamily};
use ribbon::verify::{basis_words, graded_words};
use ribbon::words::{sym_canon, CycWord, Letter};

fn free_alphabet() -> Vec<Letter> {
    [0, 1, -1].iter().enumerate().map(|(i, &g)| Letter::Free { id: i as u32, deg: g }).collect()
}

fn rand_word(rng: &mut ChaCha8Rng, al: &[Letter], lo: usize, hi: usize) -> Option<CycWord> {
    let len = rng.gen_range(lo..=hi);
    let ls: Vec<Letter> = (0..len).map(|_| al[rng.gen_range(0..al.len())]).collect();
    CycWord::canonical(&ls).map(|x| x.0)
}

fn plain_words(n: u32, max_len: usize) -> Vec<CycWord> {
    basis_words(&(1..=n).map(Letter::plain).collect::<Vec<_>>(), max_len)
}

fn no_fixed_points(g: &Hypergraph) -> bool {
    g.sigma1().images().iter().enumerate().all(|(i, &x)| i != x)
}

#[test]
fn theta_examples() {
    let th = ThetaFamily::darboux();
    let (a1, a2, b1) = (
        Letter::Doubled { alpha: 1, copy: 1 },
        Letter::Doubled { alpha: 1, copy: 2 },
        Letter::Doubled { alpha: 2, copy: 1 },
    );
    assert_eq!(th.eval(&[a1, a2]), q(1));
    assert_eq!(th.eval(&[a2, a1]), q(-1));
    assert_eq!(th.eval(&[a1, b1]), q(0));
    let g = ThetaFamily::graded();
    let e = |l, p| Letter::Expanded { alpha: 1, l, p };
    assert_eq!(g.eval(&[e(0, 0), e(1, 0)]), q(1));
    assert_eq!(g.eval(&[e(1, 0), e(0, 0)]), q(-1));
    // tags increase cyclically along the argument list
    assert_eq!(g.eval(&[e(1, 1), e(2, 1), e(0, 1)]), q(1));
    assert_eq!(g.eval(&[e(2, 1), e(0, 1), e(1, 1)]), q(-1));
    assert_eq!(g.eval(&[e(1, 1), e(0, 1), e(2, 1)]), q(0));
    assert!(check_cyclic_invariance(&th, 2, &darboux_alphabet(2)).ok());
    assert!(check_cyclic_invariance(&g, 4, &graded_alphabet(2, 2)).ok());
    let r = g.rescale(&[(2, q(2)), (3, q(-3))]);
    assert!(check_cyclic_invariance(&r, 4, &graded_alphabet(1, 2)).ok());
    assert_eq!(r.eval(&[e(1, 1), e(2, 1), e(0, 1)]), q(-3));
}

#[test]
fn generator_images() {
    let r = rho_generator(GenKey::new(1, 2, 0).unwrap(), 1).unwrap();
    let gs = r.graphs();
    assert_eq!(gs.len(), 1);
    assert_eq!((gs[0].n_vertices(), gs[0].n_hyperedges(), gs[0].n_boundaries()), (2, 1, 1));
    let r = rho_generator(GenKey::new(2, 1, 0).unwrap(), 1).unwrap();
    // the two boundary labelings are identified by the symmetric corolla
    assert!(!r.is_zero());
    for g in r.graphs() {
        assert_eq!((g.n_vertices(), g.n_boundaries(), g.edge_count()), (1, 2, 2));
        assert!(g.sigma_inf().images().iter().enumerate().all(|(i, &x)| i == x));
    }
    let r = rho_generator(GenKey::new(1, 1, 1).unwrap(), 1).unwrap();
    let gs = r.graphs();
    assert_eq!(gs.len(), 1);
    // one trivalent vertex turning against the hyperedge cycle
    assert_eq!(gs[0].sigma0(), &gs[0].sigma1().inverse());
    assert_eq!((gs[0].n_vertices(), gs[0].n_boundaries()), (1, 1));
}

#[test]
fn valency_exceeding_word_length_gives_zero() {
    let g = simple_graph(vec![1, 2, 0], vec![1, 2, 0], 1).unwrap();
    let al = darboux_alphabet(1);
    let w = CycWord::canonical(&[al[0], al[1]]).unwrap().0;
    assert!(eval_graph(&g, &ThetaFamily::darboux(), &[w]).unwrap().is_zero());
}

#[test]
fn functoriality_for_several_degrees() {
    let mut all = 0;
    for d in [1, 0, 2, -1] {
        let al = free_alphabet();
        let th = ThetaFamily::random_table(d, &al, 4, 7, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64((d + 100) as u64);
        let mut nonzero = 0;
        for _ in 0..300 {
            let k1 = rng.gen_range(2..=4);
            let n1 = rng.gen_range(1..=k1);
            let units = rng.gen_range(0..2);
            let g1 = random_graph(&mut rng, k1, n1, units, d);
            if !no_fixed_points(&g1) {
                continue;
            }
            let m = g1.n_boundaries();
            let k2 = rng.gen_range(m.min(3)..=3).max(2);
            let nv = m.min(k2);
            let g2 = random_graph(&mut rng, k2, nv, m - nv, d);
            let inputs: Vec<CycWord> =
                (0..g1.n_vertices()).map(|_| rand_word(&mut rng, &al, 2, 5).unwrap_or_else(CycWord::empty)).collect();
            let lhs = eval_sum(&vcompose(&g2, &g1).unwrap(), &th, &inputs).unwrap();
            let rhs = compose_operators(&g2, &g1, &th, &inputs).unwrap();
            assert_eq!(lhs, rhs, "d={d}\n{g1}\n{g2}");
            nonzero += usize::from(!rhs.is_zero());
        }
        assert!(nonzero >= 3, "d={d}: only {nonzero} nonzero samples");
        all += nonzero;
    }
    assert!(all >= 20, "{all}");
}

#[test]
fn induced_operations_match_direct_formula() {
    for d in [1, 0, 2] {
        let al = free_alphabet();
        let th = ThetaFamily::random_table(d, &al, 5, 3, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut nonzero = 0;
        for _ in 0..40 {
            let n = rng.gen_range(1..=2);
            let Some(ws) = (0..n).map(|_| rand_word(&mut rng, &al, 1, 3)).collect::<Option<Vec<_>>>() else { continue };
            let len: usize = ws.iter().map(|w| w.len()).sum();
            for key in keys_for(n, len) {
                let a = symmetrize(&induced_op(&th, key, &ws).unwrap(), d);
                let b = direct_op_key(&th, key, &ws);
                assert_eq!(a, b, "d={d} key={key} words={ws:?}");
                nonzero += usize::from(!b.is_zero());
            }
        }
        assert!(nonzero > 10);
    }
}

#[test]
fn composites_vanish_for_random_families() {
    for d in [1, 0] {
        let al = free_alphabet();
        let th = ThetaFamily::random_table(d, &al, 5, 11, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let n = rng.gen_range(1..=2);
            let Some(ws) = (0..n).map(|_| rand_word(&mut rng, &al, 1, 5 - n)).collect::<Option<Vec<_>>>() else { continue };
            let Some((mono, _)) = sym_canon(ws, d) else { continue };
            let parts = d_squared_by_key(&th, &mono, &|_| true, false).unwrap();
            assert!(parts.keys().all(|k| k.is_none()), "d={d} {mono:?}: {parts:?}");
            // disconnected pieces cancel in pairs
            assert!(total(&parts).is_zero());
        }
    }
}

#[test]
fn necklace_structure() {
    let x = |a| Letter::plain(a);
    let single = CycWord::canonical(&[x(1)]).unwrap().0;
    assert!(necklace_cobracket(1, &single).unwrap().is_zero());
    assert!(necklace_cobracket_direct(1, &single).unwrap().is_zero());
    let ws = plain_words(2, 4);
    for w in &ws {
        assert_eq!(necklace_cobracket(2, w).unwrap(), necklace_cobracket_direct(2, w).unwrap(), "{w}");
        let dw = double_word(2, w).unwrap();
        assert_eq!(dw.len(), 2 * w.len());
        assert_eq!(undouble_word(&dw).as_ref(), Some(w));
    }
    for (w1, w2) in ws.iter().tuple_combinations() {
        if w1.len() + w2.len() <= 4 {
            assert_eq!(necklace_bracket(2, w1, w2).unwrap(), necklace_bracket_direct(2, w1, w2).unwrap());
        }
    }
}

#[test]
fn embedding_examples() {
    let (e, s) = embed_u(&CycWord::canonical(&[Letter::plain(1)]).unwrap().0).unwrap();
    assert_eq!(s, 1);
    assert_eq!(e.letters(), &[Letter::Expanded { alpha: 1, l: 0, p: 0 }, Letter::Expanded { alpha: 1, l: 1, p: 0 }]);
    for w in graded_words(1, 2, 3) {
        let (e, s) = embed_u(&w).unwrap();
        assert_eq!(e.len(), embedded_length(&w));
        assert_eq!(project_u(&e), Some((w.clone(), s)));
    }
}

#[test]
fn graded_operations_reduce_and_shift() {
    for w in plain_words(1, 4) {
        let key = GenKey::new(2, 1, 0).unwrap();
        assert_eq!(graded_necklace_op(1, key, std::slice::from_ref(&w)).unwrap(), necklace_cobracket(1, &w).unwrap());
    }
    let ws = graded_words(1, 2, 3);
    let mut nonzero = 0;
    for key in GenKey::all_up_to(5) {
        for tuple in (0..key.n).map(|_| ws.iter()).multi_cartesian_product() {
            let len: usize = tuple.iter().map(|w| w.len()).sum();
            if len > 4 {
                continue;
            }
            let ins: Vec<CycWord> = tuple.into_iter().cloned().collect();
            let out = graded_necklace_op(1, key, &ins).unwrap();
            let din: i64 = ins.iter().map(|w| w.degree()).sum();
            for (mono, _) in out.iter() {
                nonzero += 1;
                assert_eq!(mono.iter().map(|w| w.len()).sum::<usize>() + 1, len, "weight, {key}");
                let dout: i64 = mono.iter().map(|w| w.degree()).sum();
                assert_eq!(din - dout, key.weight() as i64 - 3, "degree shift, {key}");
            }
        }
    }
    assert!(nonzero > 50);
}

#[test]
fn differential_records() {
    let recs = ibl_differential(GenKey::new(1, 1, 1).unwrap()).unwrap();
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert_eq!((r.lower(), r.upper()), (GenKey::new(2, 1, 0).unwrap(), GenKey::new(1, 2, 0).unwrap()));
    let recs = ibl_differential(GenKey::new(1, 2, 1).unwrap()).unwrap();
    assert!(!recs.is_empty());
    assert!(recs.iter().all(|s| s.l == 1 || s.l == 2));
}

#[test]
fn graph_relations_vanish_and_detect_a_dropped_term() {
    for d in [0, 1, 2, 3] {
        for key in GenKey::all_up_to(5) {
            assert!(graph_relation(key, d).unwrap().is_zero(), "d={d} {key}");
        }
    }
    let key = GenKey::new(2, 2, 0).unwrap();
    let recs = ibl_differential(key).unwrap();
    for skip in 0..recs.len() {
        let mut out = HSum::zero(key.m, key.n, 1);
        for (i, s) in recs.iter().enumerate() {
            if i != skip {
                out.add_scaled(&splitting_image(key, s, 1).unwrap(), &q(1)).unwrap();
            }
        }
        assert!(!out.is_zero(), "dropping record {skip} went unnoticed");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_outputs_are_symmetric(seed in any::<u64>(), d in 0i32..=1) {
        let al = free_alphabet();
        let th = ThetaFamily::random_table(d, &al, 4, seed, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(w) = rand_word(&mut rng, &al, 2, 5) else { return Ok(()) };
        for key in keys_for(1, w.len()) {
            let raw = induced_op(&th, key, std::slice::from_ref(&w)).unwrap();
            // swapping two outputs costs the Koszul sign of the shifted word degrees
            for (t, c) in raw.iter() {
                if t.len() < 2 {
                    continue;
                }
                let mut s = t.clone();
                s.swap(0, 1);
                let odd = |x: &CycWord| x.shifted_degree(d).rem_euclid(2) == 1;
                let sign = if odd(&t[0]) && odd(&t[1]) { q(-1) } else { q(1) };
                prop_assert_eq!(raw.get(&s), c * &sign);
            }
        }
    }

    #[test]
    fn operator_weight_drop(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ws = graded_words(1, 1, 3);
        let n = rng.gen_range(1..=2);
        let ins: Vec<CycWord> = (0..n).map(|_| ws[rng.gen_range(0..ws.len())].clone()).collect();
        let len: usize = ins.iter().map(|w| w.len()).sum();
        for key in GenKey::all_up_to(6).into_iter().filter(|k| k.n == n) {
            for (mono, _) in graded_necklace_op(1, key, &ins).unwrap().iter() {
                prop_assert_eq!(mono.iter().map(|w| w.len()).sum::<usize>() + 1, len);
            }
        }
    }
}
