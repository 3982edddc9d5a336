mod common;

use common::{instance, permutations, random_dataset, respects};
use proptest::prelude::*;
use qbnsl::bn::{build_score_table, exhaustive_best_dag, markov_equivalent, Dag, NodeSet, ScoreKind};
use qbnsl::qubo::{build_hamiltonian_parts, to_ising, PseudoBooleanPolynomial, QubitLayout};
use qbnsl::seed;
use qbnsl::Bitstring;
use rand::Rng;

/// Arcs and pairwise order bits read straight off the raw bitstring.
fn read(layout: &QubitLayout, x: u64) -> (Vec<(usize, usize)>, Vec<(usize, usize, bool)>) {
    let n = layout.num_nodes();
    let mut arcs = Vec::new();
    let mut order = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && x >> layout.a_index(i, j) & 1 == 1 {
                arcs.push((i, j));
            }
            if i < j {
                order.push((i, j, x >> layout.r_index(i, j) & 1 == 1));
            }
        }
    }
    (arcs, order)
}

/// Some permutation realises every order bit and puts parents first.
fn feasible(layout: &QubitLayout, x: u64, perms: &[Vec<usize>]) -> bool {
    let (arcs, order) = read(layout, x);
    perms.iter().any(|perm| {
        let pos = |v: usize| perm.iter().position(|&p| p == v).unwrap();
        order.iter().all(|&(i, j, before)| (pos(i) < pos(j)) == before) && respects(perm, &arcs)
    })
}

fn all_dags(n: usize, m: usize) -> Vec<Dag> {
    let choices: Vec<Vec<NodeSet>> = (0..n).map(|i| NodeSet::all_up_to(n, i, m)).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let parents: Vec<NodeSet> = (0..n).map(|i| choices[i][idx[i]]).collect();
        if let Ok(d) = Dag::from_parent_sets(parents) {
            out.push(d);
        }
        let mut k = 0;
        while k < n {
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            return out;
        }
    }
}

#[test]
fn penalty_soundness_exhaustive_three_nodes() {
    let inst = instance(3, 300, 1);
    let layout = inst.parts.layout;
    let penalty = inst.parts.penalty();
    let perms = permutations(3);
    let mut zero = 0;
    for x in 0..1u64 << 9 {
        let p = penalty.value(x);
        let ok = feasible(&layout, x, &perms);
        assert_eq!(p.abs() < 1e-9, ok, "bits {x:09b}: penalty {p}");
        if ok {
            zero += 1;
            let bits = Bitstring::new(9, x).unwrap();
            assert!(layout.decode(bits).unwrap().is_acyclic());
        }
    }
    // 6 orders, each admitting 2^3 arc subsets
    assert_eq!(zero, 48);
}

#[test]
fn penalty_soundness_sampled_four_nodes() {
    let inst = instance(4, 300, 2);
    let layout = inst.parts.layout;
    let penalty = inst.parts.penalty().compile();
    let perms = permutations(4);
    let mut rng = seed::rng(77);
    let dags = all_dags(4, 3);
    let mut accepted = 0;
    for k in 0..100_000u64 {
        let x = if k % 2 == 0 {
            rng.gen::<u64>() & ((1 << 18) - 1)
        } else {
            // a feasible encoding with a few random flips
            let d = &dags[rng.gen_range(0..dags.len())];
            let order = d.topological_order();
            let mut x = layout.encode(d.parent_sets(), &order).unwrap().index();
            for _ in 0..rng.gen_range(0..3) {
                x ^= 1 << rng.gen_range(0..18);
            }
            x
        };
        let ok = feasible(&layout, x, &perms);
        assert_eq!(penalty.value(x).abs() < 1e-9, ok, "bits {x:018b}");
        if ok {
            accepted += 1;
            assert!(layout.decode(Bitstring::new(18, x).unwrap()).unwrap().is_acyclic());
        }
    }
    assert!(accepted > 10_000);
}

#[test]
fn score_fidelity_four_nodes_every_order() {
    let inst = instance(4, 500, 3);
    let layout = inst.parts.layout;
    let h = inst.parts.total().compile();
    let perms = permutations(4);
    let dags = all_dags(4, 2);
    let mut checked = 0;
    for d in &dags {
        let score = inst.table.score_dag(d).unwrap();
        for perm in perms.iter().filter(|p| respects(p, &d.arcs())) {
            let x = layout.encode(d.parent_sets(), perm).unwrap().index();
            let e = h.value(x);
            assert!((e + score).abs() < 1e-9, "{d:?}: {e} vs {}", -score);
            checked += 1;
        }
    }
    // 543 DAGs on four nodes, minus 4 · 25 with a three-parent node
    assert_eq!(dags.len(), 443);
    assert!(checked >= dags.len());
}

#[test]
fn single_arc_flip_never_lowers_penalty_below_threshold() {
    let data = random_dataset(3, 300, 4);
    let table = build_score_table(&data, ScoreKind::Bic, 2).unwrap();
    let (dt, dc) = (3.0, 5.0);
    let parts = build_hamiltonian_parts(&table, dt, dc).unwrap();
    let layout = parts.layout;
    let penalty = parts.penalty();
    let threshold = dt.min(dc);
    for d in all_dags(3, 2) {
        for perm in permutations(3).iter().filter(|p| respects(p, &d.arcs())) {
            let x = layout.encode(d.parent_sets(), perm).unwrap().index();
            assert_eq!(penalty.value(x), 0.0);
            for k in 0..layout.num_adjacency_qubits() {
                let p = penalty.value(x ^ 1 << k);
                assert!(p == 0.0 || p >= threshold - 1e-12, "flip {k}: {p}");
            }
        }
    }
}

#[test]
fn brute_force_minimum_agrees_with_exhaustive_search() {
    for s in 0..6 {
        let inst = instance(3, 500, 100 + s);
        let (bits, _) = inst.parts.total().brute_force_minimum().unwrap();
        let found = inst.parts.layout.decode(bits).unwrap().to_dag().unwrap();
        let (best, best_score) = exhaustive_best_dag(&inst.table).unwrap();
        assert!(found == best || markov_equivalent(&found, &best), "seed {s}");
        assert!((inst.table.score_dag(&found).unwrap() - best_score).abs() < 1e-9);
    }
}

fn polynomial_strategy() -> impl Strategy<Value = PseudoBooleanPolynomial> {
    (1usize..=12).prop_flat_map(|v| {
        proptest::collection::vec((0..v, 0..v, -50.0f64..50.0), 0..30).prop_map(move |terms| {
            let mut p = PseudoBooleanPolynomial::new(v);
            for (i, j, c) in terms {
                p.add_term(&[i, j], c).unwrap();
            }
            p.add_constant(1.25);
            p
        })
    })
}

proptest! {
    #[test]
    fn ising_round_trip(p in polynomial_strategy()) {
        let ising = to_ising(&p).unwrap();
        let v = p.num_vars();
        for x in 0..1u64 << v {
            let z: Vec<i8> = (0..v).map(|k| if x >> k & 1 == 1 { -1 } else { 1 }).collect();
            let e = ising.evaluate_spins(&z).unwrap();
            prop_assert!((p.value(x) - e).abs() < 1e-9);
        }
    }

    #[test]
    fn bit_text_round_trip(v in 1usize..=40, raw in any::<u64>()) {
        let bits = Bitstring::new(v, raw & ((1u64 << v) - 1)).unwrap();
        let text = bits.to_string();
        prop_assert_eq!(text.len(), v);
        prop_assert_eq!(text.parse::<Bitstring>().unwrap(), bits);
        let layout_ok = text.chars().next() == Some(if bits.get(0) { '1' } else { '0' });
        prop_assert!(layout_ok);
    }
}
