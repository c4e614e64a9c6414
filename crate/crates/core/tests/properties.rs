// SPDX-License-Identifier: Apache-2.0

mod common;

use gatehide::generate::random_circuit_with;
use gatehide::netlist::{read_json, write_json};
use gatehide::sat::{Encoder, Session, SolverKind};
use gatehide::simplify::{classify_gates, rewrite_r_wave, validate_domains_sat, GateClass, SimplifyMode};
use gatehide::{search_space_size, Assignment, BitVector, GateType, HiddenPartition, NodeRef, Topology, TypeSet};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn circuit(seed: u64, max_n: usize, max_k: usize) -> (Topology, Assignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let k = rng.gen_range(1..=max_k);
    let m = rng.gen_range(1..=3);
    random_circuit_with(&mut rng, n, k, m)
}

fn gate_type() -> impl Strategy<Value = GateType> {
    (0u8..16).prop_map(GateType::from_tt)
}

fn type_set() -> impl Strategy<Value = TypeSet> {
    any::<u16>().prop_map(TypeSet::from_bits)
}

fn rows_of(topo: &Topology, asg: &Assignment, vs: &[u64]) -> Vec<(BitVector, BitVector)> {
    vs.iter()
        .map(|&v| {
            let x = bits_of(v, topo.n());
            let z = ref_eval(topo, asg, &x);
            (BitVector::new(x), BitVector::new(z))
        })
        .collect()
}

fn pred_is_input(topo: &Topology, j: usize) -> bool {
    let g = topo.gate(j);
    matches!(g.left, NodeRef::Input(_)) || matches!(g.right, NodeRef::Input(_))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn polarity_operators_commute(t in gate_type(), l in any::<bool>(), r in any::<bool>(), o in any::<bool>()) {
        let composed = {
            let mut u = t;
            if l { u = u.neg_left(); }
            if r { u = u.neg_right(); }
            if o { u = u.neg_out(); }
            u
        };
        prop_assert_eq!(t.with_polarity(l, r, o), composed);
        prop_assert_eq!(t.neg_left().neg_right(), t.neg_right().neg_left());
        prop_assert_eq!(t.neg_out().neg_left(), t.neg_left().neg_out());
        for a in [false, true] {
            for b in [false, true] {
                prop_assert_eq!(ref_gate(composed, a, b), o ^ ref_gate(t, a ^ l, b ^ r));
            }
        }
    }

    #[test]
    fn fixing_an_input_ignores_it(t in gate_type(), a in any::<bool>(), b in any::<bool>()) {
        prop_assert_eq!(t.fix_left_true().apply(a, b), t.fix_left_true().apply(!a, b));
        prop_assert_eq!(t.fix_right_true().apply(a, b), t.fix_right_true().apply(a, !b));
    }

    #[test]
    fn apply_words_matches_scalar(t in gate_type(), a in any::<u64>(), b in any::<u64>()) {
        let w = t.apply_words(a, b);
        for i in 0..64 {
            prop_assert_eq!(w >> i & 1 == 1, ref_gate(t, a >> i & 1 == 1, b >> i & 1 == 1));
        }
    }

    #[test]
    fn type_set_algebra(p in type_set(), q in type_set(), t in gate_type()) {
        prop_assert_eq!(p.union(q).contains(t), p.contains(t) || q.contains(t));
        prop_assert_eq!(p.intersection(q).contains(t), p.contains(t) && q.contains(t));
        prop_assert_eq!(p.len(), GateType::all().filter(|&u| p.contains(u)).count());
        prop_assert!(p.intersection(q).is_subset(p));
        prop_assert_eq!(p.negated().negated(), p);
        prop_assert_eq!(p.negated().contains(t.neg_out()), p.contains(t));
    }

    #[test]
    fn search_space_is_product(sets in prop::collection::vec(type_set(), 0..12)) {
        let want: BigUint = sets.iter().map(|s| BigUint::from(s.len())).product();
        prop_assert_eq!(search_space_size(&sets).unwrap(), want);
    }

    #[test]
    fn evaluators_agree(seed in any::<u64>(), words in prop::collection::vec(any::<u64>(), 12)) {
        let (topo, asg) = circuit(seed, 12, 30);
        let n = topo.n();
        let out = topo.eval_words(&asg, &words[..n]);
        for lane in [0, 17, 63] {
            let x: Vec<bool> = (0..n).map(|i| words[i] >> lane & 1 == 1).collect();
            let want = ref_eval(&topo, &asg, &x);
            let scalar = topo.eval(&asg, &BitVector::new(x)).unwrap();
            prop_assert_eq!(scalar.bits(), want.as_slice());
            let lanes: Vec<bool> = out.iter().map(|w| w >> lane & 1 == 1).collect();
            prop_assert_eq!(lanes, want);
        }
    }

    #[test]
    fn bit_vector_round_trips(v in any::<u64>(), width in 0usize..=64) {
        let masked = if width == 64 { v } else { v & ((1u64 << width) - 1) };
        let b = BitVector::from_u64(v, width);
        prop_assert_eq!(b.len(), width);
        prop_assert_eq!(b.to_u64(), masked);
        prop_assert_eq!(BitVector::parse_bits(&b.to_string()).unwrap(), b);
    }

    #[test]
    fn merge_then_split(n in 1usize..12, mask in any::<u16>(), v in any::<u64>()) {
        let hidden: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let part = HiddenPartition::new(n, hidden).unwrap();
        let full = BitVector::from_u64(v, n);
        let (x, y) = part.split(&full);
        prop_assert_eq!(x.len(), part.visible_width());
        prop_assert_eq!(y.len(), part.hidden_width());
        prop_assert_eq!(ref_merge(&part, x.bits(), y.bits()), full.bits().to_vec());
        prop_assert_eq!(part.merge(&x, &y).unwrap(), full);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let (topo, asg) = circuit(seed, 8, 20);
        let (t2, a2) = read_json(&write_json(&topo, Some(&asg))).unwrap();
        prop_assert_eq!(t2, topo.clone());
        prop_assert_eq!(a2, Some(asg));
        let (t3, a3) = read_json(&write_json(&topo, None)).unwrap();
        prop_assert_eq!(t3, topo);
        prop_assert!(a3.is_none());
    }

    #[test]
    fn classification_invariants(seed in any::<u64>()) {
        let (topo, _) = circuit(seed, 8, 24);
        let zsr = classify_gates(&topo, SimplifyMode::Zsr);
        let zs = classify_gates(&topo, SimplifyMode::Zs);
        let r = classify_gates(&topo, SimplifyMode::R);
        let none = classify_gates(&topo, SimplifyMode::None);
        let outputs = topo.output_layer();
        for j in 0..topo.k() {
            let c = zsr.classes[j];
            prop_assert_eq!(zsr.domains[j], c.domain());
            prop_assert_eq!(none.domains[j], TypeSet::L);
            if c.is_sz() {
                prop_assert!(!pred_is_input(&topo, j));
            }
            if outputs[j] {
                prop_assert!(c != GateClass::R);
                prop_assert_eq!(r.domains[j], TypeSet::L);
            } else {
                prop_assert_eq!(r.domains[j], TypeSet::R);
            }
            // each mode only ever narrows the one below it
            prop_assert!(zsr.domains[j].is_subset(zs.domains[j]));
            prop_assert!(zs.domains[j].is_subset(TypeSet::L));
            prop_assert_eq!(zs.classes[j].is_sz(), c.is_sz());
            if zs.classes[j].is_sz() {
                prop_assert_eq!(zs.domains[j], zsr.domains[j]);
            }
        }
        let size = |m: &gatehide::simplify::DomainMap| search_space_size(&m.domains).unwrap();
        prop_assert!(size(&zsr) <= size(&zs));
        prop_assert!(size(&zs) <= size(&none));
        prop_assert!(size(&r) <= size(&none));
    }

    #[test]
    fn narrowed_domains_keep_a_witness(seed in any::<u64>()) {
        let (topo, asg) = circuit(seed, 6, 12);
        for mode in SimplifyMode::ALL {
            let map = classify_gates(&topo, mode);
            prop_assert!(validate_domains_sat(&topo, &asg, &map.domains).unwrap(), "{mode}");
        }
    }

    #[test]
    fn r_wave_preserves_function(seed in any::<u64>()) {
        let (topo, asg) = circuit(seed, 8, 16);
        let rw = rewrite_r_wave(&topo, &asg).unwrap();
        prop_assert!(ref_equiv_plain(&topo, &asg, &rw));
        for j in non_output_gates(&topo) {
            prop_assert!(TypeSet::R.contains(rw.get(j)));
        }
        // the rewrite of a circuit already in R form changes nothing observable
        let again = rewrite_r_wave(&topo, &rw).unwrap();
        prop_assert!(ref_equiv_plain(&topo, &rw, &again));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decoded_models_explain_the_samples(seed in any::<u64>(), pick in any::<u64>()) {
        let (topo, target) = circuit(seed, 6, 10);
        let vs: Vec<u64> = (0..1u64 << topo.n()).filter(|v| pick >> (v % 64) & 1 == 1).collect();
        let rows = rows_of(&topo, &target, &vs);
        let mut enc = Encoder::visible(&topo, Session::with_backend(SolverKind::Cadical));
        let c = enc.add_copy(&vec![TypeSet::L; topo.k()]).unwrap();
        for (x, z) in &rows {
            enc.encode_sample(c, x, z).unwrap();
        }
        // the target itself is a model, so the formula must be satisfiable
        prop_assert!(enc.session_mut().solve().unwrap());
        let got = enc.decode_assignment(c).unwrap();
        for (x, z) in &rows {
            prop_assert_eq!(ref_eval(&topo, &got, x.bits()), z.bits().to_vec());
        }
    }

    #[test]
    fn copies_do_not_share_constraints(seed in any::<u64>(), v in any::<u64>()) {
        let (topo, target) = circuit(seed, 6, 8);
        let n = topo.n();
        let x = bits_of(v % (1 << n), n);
        let z = ref_eval(&topo, &target, &x);
        let flipped: Vec<bool> = z.iter().map(|b| !b).collect();
        let mut enc = Encoder::visible(&topo, Session::with_backend(SolverKind::Batsat));
        let c1 = enc.add_copy(&vec![TypeSet::L; topo.k()]).unwrap();
        let c2 = enc.add_copy(&vec![TypeSet::L; topo.k()]).unwrap();
        enc.encode_sample(c1, &BitVector::new(x.clone()), &BitVector::new(z.clone())).unwrap();
        enc.encode_sample(c2, &BitVector::new(x.clone()), &BitVector::new(flipped.clone())).unwrap();
        // complementing every output is always realisable when each output is a gate
        let all_gates = topo.outputs().iter().all(|o| matches!(o, NodeRef::Gate(_)));
        let sat = enc.session_mut().solve().unwrap();
        if all_gates {
            prop_assert!(sat);
        }
        if sat {
            prop_assert_eq!(ref_eval(&topo, &enc.decode_assignment(c1).unwrap(), &x), z);
            prop_assert_eq!(ref_eval(&topo, &enc.decode_assignment(c2).unwrap(), &x), flipped);
        }
    }

    #[test]
    fn incremental_matches_scratch(seed in any::<u64>(), script in prop::collection::vec((any::<u64>(), any::<bool>()), 1..12)) {
        let (topo, target) = circuit(seed, 4, 4);
        let n = topo.n();
        let domains = vec![TypeSet::L; topo.k()];
        let mut inc = Encoder::visible(&topo, Session::with_backend(SolverKind::Cadical));
        let c = inc.add_copy(&domains).unwrap();
        let mut rows = Vec::new();
        let mut blocked: Vec<Assignment> = Vec::new();
        for (v, block) in script {
            let x = bits_of(v % (1 << n), n);
            let mut z = ref_eval(&topo, &target, &x);
            if v % 7 == 0 {
                z[0] = !z[0];
            }
            let row = (BitVector::new(x), BitVector::new(z));
            inc.encode_sample(c, &row.0, &row.1).unwrap();
            rows.push(row);
            let sat = inc.session_mut().solve().unwrap();
            let mut fresh = Encoder::visible(&topo, Session::with_backend(SolverKind::Batsat));
            let f = fresh.add_copy(&domains).unwrap();
            for (x, z) in &rows {
                fresh.encode_sample(f, x, z).unwrap();
            }
            for a in &blocked {
                fresh.block(f, a, None, None).unwrap();
            }
            prop_assert_eq!(sat, fresh.session_mut().solve().unwrap());
            let expected = ref_consistent(&topo, &domains, &rows).into_iter().filter(|a| !blocked.contains(a)).count();
            prop_assert_eq!(sat, expected > 0);
            if sat && block {
                let a = inc.decode_assignment(c).unwrap();
                prop_assert!(!blocked.contains(&a));
                inc.block(c, &a, None, None).unwrap();
                blocked.push(a);
            }
        }
    }
}
