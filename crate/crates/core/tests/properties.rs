use maltsev_core::csp::{is_path_consistent, PairSystem};
use maltsev_core::digraph::parse_digraph;
use maltsev_core::oracle::{find_homomorphism_bruteforce, is_homomorphism};
use maltsev_core::structure::decompose;
use maltsev_core::*;
use proptest::prelude::*;

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (0..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n.max(1), 0..n.max(1)), 0..=n * n)
            .prop_map(move |edges| Digraph::new(n, if n == 0 { vec![] } else { edges }).unwrap())
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn maltsev_digraph() -> impl Strategy<Value = Digraph> {
    // Uniform codes on four vertices are rarely Maltsev, so the sample mixes
    // in disjoint unions of known Maltsev pieces.
    let pieces = prop_oneof![
        Just(Digraph::cycle(1)),
        Just(Digraph::cycle(2)),
        Just(Digraph::cycle(3)),
        Just(Digraph::path(2)),
        Just(Digraph::path(3)),
        Just(Digraph::edgeless(1)),
        Just(Digraph::new(3, [(0, 2), (1, 2)]).unwrap()),
        Just(Digraph::new(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()),
    ];
    proptest::collection::vec(pieces, 1..=3).prop_map(|ps| {
        ps.iter()
            .skip(1)
            .fold(ps[0].clone(), |acc, p| acc.disjoint_union(p))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn neighbourhoods_are_dual(g in digraph(6)) {
        let mut out_total = 0;
        let mut in_total = 0;
        for u in 0..g.n() {
            out_total += g.out_neighbors(u).unwrap().len();
            in_total += g.in_neighbors(u).unwrap().len();
            for v in 0..g.n() {
                prop_assert_eq!(
                    g.out_neighbors(u).unwrap().contains(&v),
                    g.in_neighbors(v).unwrap().contains(&u)
                );
            }
        }
        prop_assert_eq!(out_total, g.edge_count());
        prop_assert_eq!(in_total, g.edge_count());
    }

    #[test]
    fn text_round_trip(g in digraph(6)) {
        let text = g.to_text();
        let back = parse_digraph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn classification_is_exclusive(g in digraph(6)) {
        let c = g.classify_vertices();
        for v in 0..g.n() {
            let tag = c.tags[v];
            let src = c.sources.contains(&v);
            let snk = c.sinks.contains(&v);
            prop_assert_eq!(src, g.in_neighbors(v).unwrap().is_empty());
            prop_assert_eq!(snk, g.out_neighbors(v).unwrap().is_empty());
            prop_assert_eq!(tag == VertexClass::Isolated, src && snk);
            prop_assert_eq!(tag == VertexClass::Smooth, !src && !snk);
        }
    }

    /// Classes computed by grouping on `v⁺` coincide with the witness
    /// definition "some z with (x,z), (y,z) ∈ E", and the class structure
    /// behaves as on any rectangular digraph.
    #[test]
    fn partitions_of_rectangular_digraphs(g in digraph(5)) {
        prop_assume!(is_rectangular(&g));
        let d = decompose(&g).unwrap();
        let n = g.n();
        let shares_out = |x: usize, y: usize| (0..n).any(|z| g.has_edge(x, z) && g.has_edge(y, z));
        let shares_in = |x: usize, y: usize| (0..n).any(|z| g.has_edge(z, x) && g.has_edge(z, y));
        for x in 0..n {
            prop_assert_eq!(d.plus.partition.block(x).is_none(), g.is_sink(x));
            prop_assert_eq!(d.minus.partition.block(x).is_none(), g.is_source(x));
            for y in 0..n {
                let same_plus = d.plus.partition.block(x).is_some()
                    && d.plus.partition.block(x) == d.plus.partition.block(y);
                prop_assert_eq!(same_plus, shares_out(x, y));
                let same_minus = d.minus.partition.block(x).is_some()
                    && d.minus.partition.block(x) == d.minus.partition.block(y);
                prop_assert_eq!(same_minus, shares_in(x, y));
            }
        }
        // Blocks are numbered by their smallest vertex.
        let firsts: Vec<usize> = d.plus.partition.blocks.iter().map(|b| b[0]).collect();
        let mut sorted = firsts.clone();
        sorted.sort_unstable();
        prop_assert_eq!(firsts, sorted);
        // The class bijection is invertible and realises the edge rule.
        let phi = &d.phi;
        for (x, &y) in phi.forward.iter().enumerate() {
            prop_assert_eq!(phi.backward[y], x);
            let image = &d.minus.partition.blocks[y];
            for &v in &d.plus.partition.blocks[x] {
                prop_assert_eq!(g.out_neighbors(v).unwrap(), image.as_slice());
            }
            for y2 in 0..d.plus.partition.len() {
                let meets = image.iter().any(|v| d.plus.partition.block(*v) == Some(y2));
                prop_assert_eq!(d.plus.quotient.has_edge(x, y2), meets);
            }
        }
        prop_assert_eq!(verify_phi_isomorphism(&g).unwrap(), None);
    }

    #[test]
    fn certificates_replay_and_shrink(g in digraph(6)) {
        let cert = decide_maltsev(&g);
        prop_assert!(cert.replay(&g));
        if let Some(chain) = cert.chain() {
            for w in chain.windows(2) {
                prop_assert!(w[1].n() < w[0].n());
            }
            prop_assert!(chain.iter().all(is_rectangular));
        } else {
            let refuted = matches!(cert, MaltsevCertificate::Refuted { .. });
            prop_assert!(refuted);
        }
        prop_assert_eq!(MaltsevCertificate::from_json(&cert.to_json()).unwrap(), cert);
    }

    #[test]
    fn maltsev_implies_rectangular(g in digraph(6)) {
        if decide_maltsev(&g).is_maltsev() {
            prop_assert!(is_rectangular(&g));
        }
    }

    #[test]
    fn maltsev_is_invariant_under_relabeling(
        (g, p) in digraph(6).prop_flat_map(|g| { let n = g.n(); (Just(g), permutation(n)) })
    ) {
        let h = g.relabel(&p).unwrap();
        prop_assert_eq!(decide_maltsev(&g).is_maltsev(), decide_maltsev(&h).is_maltsev());
    }

    #[test]
    fn synthesised_tables_respect_the_factor(g in maltsev_digraph()) {
        prop_assert!(decide_maltsev(&g).is_maltsev());
        let d = decompose(&g).unwrap();
        let plus = &d.plus.partition;
        let n = g.n();
        for kind in [OpKind::Majority, OpKind::Maltsev] {
            let op = maltsev_core::synth::synthesize(&g, kind).unwrap();
            prop_assert_eq!(verify_identities(&op, kind), None);
            prop_assert_eq!(verify_polymorphism(&g, &op).unwrap(), None);
            prop_assert_eq!(&maltsev_core::synth::synthesize(&g, kind).unwrap(), &op);
            // The table is compatible with R⁺: it induces a well-defined
            // operation on the classes.
            let mut induced = std::collections::HashMap::new();
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let (Some(a), Some(b), Some(c)) = (plus.block(x), plus.block(y), plus.block(z)) else {
                            continue;
                        };
                        let image = plus.block(op.get(x, y, z));
                        prop_assert!(image.is_some());
                        let prev = induced.insert((a, b, c), image);
                        prop_assert!(prev.is_none() || prev == Some(image));
                    }
                }
            }
        }
    }

    #[test]
    fn consistency_no_is_sound(g in digraph(4), vars in 1usize..=5, seed in any::<u64>()) {
        prop_assume!(g.n() > 0);
        let inst = random_instance(&g, vars, 0.3, vars.min(2), seed).unwrap();
        let hom = find_homomorphism_bruteforce(&inst.h, &g, &inst.pins).unwrap();
        if let Some(map) = &hom {
            prop_assert!(is_homomorphism(&inst.h, &g, &inst.pins, map));
        }
        if !is_path_consistent(&inst, &g).unwrap() {
            prop_assert!(hom.is_none());
        }
    }

    #[test]
    fn adding_a_pin_never_turns_no_into_yes(
        g in maltsev_digraph(), vars in 2usize..=6, seed in any::<u64>(), extra in any::<(usize, usize)>()
    ) {
        let inst = random_instance(&g, vars, 0.3, 1, seed).unwrap();
        let before = solve_csp_consistency(&inst, &g).unwrap();
        let var = extra.0 % vars;
        prop_assume!(!inst.pins.contains_key(&var));
        let pinned = inst.with_pin(var, extra.1 % g.n());
        let after = solve_csp_consistency(&pinned, &g).unwrap();
        if before == CspVerdict::No {
            prop_assert_eq!(after, CspVerdict::No);
        }
    }

    #[test]
    fn propagation_reaches_a_fixpoint(g in digraph(4), vars in 1usize..=5, seed in any::<u64>()) {
        prop_assume!(g.n() > 0);
        let inst = random_instance(&g, vars, 0.35, 1, seed).unwrap();
        let mut sys = PairSystem::initial(&inst, &g).unwrap();
        if sys.propagate() {
            let once = sys.clone();
            prop_assert!(sys.propagate());
            prop_assert_eq!(sys, once);
        }
    }
}

#[test]
fn solver_and_oracle_agree_on_maltsev_targets_with_pins() {
    let targets = [
        Digraph::cycle(3),
        Digraph::path(3),
        Digraph::cycle(2).disjoint_union(&Digraph::cycle(3)),
        Digraph::new(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap(),
    ];
    for g in &targets {
        for seed in 0..150 {
            let inst = random_instance(g, 6, 0.25, 2, seed).unwrap();
            let verdict = solve_csp_consistency(&inst, g).unwrap();
            let truth = find_homomorphism_bruteforce(&inst.h, g, &inst.pins)
                .unwrap()
                .is_some();
            assert_eq!(verdict == CspVerdict::Yes, truth, "{g:?} seed {seed}");
            assert_ne!(verdict, CspVerdict::Maybe);
        }
    }
}
