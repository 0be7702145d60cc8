mod common;

use common::{random_expr, EntailInstance, Expr};
use entail_core::evidence::{ingest_record, EvidenceAssignment, ReportRecord};
use entail_core::kb::{parse_kb, AtomKind, Ontology};
use entail_core::logic::{AtomId, Formula};
use entail_core::metrics::{aggregate, bleu, report_completeness, report_soundness, rouge_l};
use entail_core::verifier::{entailed_set, entails, TaxonomyClass, Verifier};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn smart(expr: &Expr) -> Formula {
    match expr {
        Expr::Const(true) => Formula::True,
        Expr::Const(false) => Formula::False,
        Expr::Var(i) => Formula::atom(AtomId(*i)),
        Expr::Not(e) => Formula::not(smart(e)),
        Expr::And(es) => Formula::and(es.iter().map(smart)),
        Expr::Or(es) => Formula::or(es.iter().map(smart)),
        Expr::Imp(a, b) => Formula::implies(smart(a), smart(b)),
        Expr::Iff(a, b) => Formula::iff(smart(a), smart(b)),
    }
}

fn random_ontology(seed: u64) -> Ontology {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=8);
    let mut ont = Ontology::default();
    for i in 0..n {
        let kind = if rng.gen_bool(0.5) {
            AtomKind::Finding
        } else {
            AtomKind::Diagnosis
        };
        ont.declare(&format!("a{i}_x"), kind).unwrap();
    }
    for r in 0..rng.gen_range(0..5) {
        let depth = rng.gen_range(1..=4);
        ont.add_rule(&format!("rule_{r}"), smart(&random_expr(&mut rng, n, depth)))
            .unwrap();
    }
    ont
}

/// Definite-clause knowledge base: every rule is `f & f' -> d`.
fn horn_instance(seed: u64) -> EntailInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = EntailInstance::random(&mut rng);
    inst.rules = (0..rng.gen_range(1..=5))
        .map(|_| {
            let body = (0..rng.gen_range(1..=3))
                .map(|_| Expr::Var(rng.gen_range(0..inst.n_findings)))
                .collect();
            let head = Expr::Var(inst.n_findings + rng.gen_range(0..inst.n_diagnoses));
            Expr::Imp(Box::new(Expr::And(body)), Box::new(head))
        })
        .collect();
    inst
}

fn report_for(ont: &Ontology, evidence: &[bool], claimed_mask: u32) -> ReportRecord {
    let findings = ont
        .findings()
        .iter()
        .zip(evidence)
        .map(|(f, v)| (ont.name(*f).to_string(), *v))
        .collect();
    let claimed = ont
        .diagnoses()
        .iter()
        .enumerate()
        .filter(|(i, _)| claimed_mask >> i & 1 == 1)
        .map(|(_, d)| ont.name(*d).to_string())
        .collect();
    ReportRecord {
        id: "p".into(),
        findings: Some(findings),
        impression_diagnoses: Some(claimed),
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kb_print_parse_round_trip(seed in any::<u64>()) {
        let ont = random_ontology(seed);
        let text = ont.to_kbl();
        let reparsed = parse_kb(&text).unwrap();
        prop_assert_eq!(&reparsed, &ont, "{}", text);
        prop_assert_eq!(reparsed.to_kbl(), text);
    }

    #[test]
    fn horn_entailment_is_monotone(seed in any::<u64>(), extra in any::<u64>()) {
        let inst = horn_instance(seed);
        let ont = inst.ontology();
        let small = EvidenceAssignment::from_values(&ont, inst.evidence.clone()).unwrap();
        let grown: Vec<bool> = inst
            .evidence
            .iter()
            .enumerate()
            .map(|(i, v)| *v || extra >> i & 1 == 1)
            .collect();
        let large = EvidenceAssignment::from_values(&ont, grown).unwrap();
        prop_assert!(small.le(&large));
        let e_small = entailed_set(&small, &ont).unwrap();
        let e_large = entailed_set(&large, &ont).unwrap();
        prop_assert!(e_small.is_subset(&e_large));
    }

    #[test]
    fn entailed_set_agrees_with_single_queries(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = EntailInstance::random(&mut rng);
        let ont = inst.ontology();
        let ev = EvidenceAssignment::from_values(&ont, inst.evidence.clone()).unwrap();
        match entailed_set(&ev, &ont) {
            Ok(set) => {
                for &d in ont.diagnoses() {
                    prop_assert_eq!(set.contains(&d), entails(&ev, &ont, d).unwrap());
                }
            }
            Err(e) => prop_assert_eq!(Err(e), entails(&ev, &ont, ont.diagnoses()[0])),
        }
    }

    #[test]
    fn taxonomy_partitions_diagnoses(seed in any::<u64>(), mask in any::<u32>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = EntailInstance::random(&mut rng);
        let ont = inst.ontology();
        let report = ingest_record(report_for(&ont, &inst.evidence, mask), &ont, None).unwrap();
        let verdict = Verifier::new(&ont).classify(&report, false);
        if !verdict.is_consistent() {
            prop_assert!(verdict.per_diagnosis.is_empty());
            return Ok(());
        }
        prop_assert_eq!(verdict.per_diagnosis.len(), ont.diagnoses().len());
        for &d in ont.diagnoses() {
            let class = verdict.per_diagnosis[&d];
            let expected = TaxonomyClass::of(verdict.claimed.contains(&d), verdict.entailed.contains(&d));
            prop_assert_eq!(class, expected);
        }
        let total: usize = [
            TaxonomyClass::Supported,
            TaxonomyClass::Unsupported,
            TaxonomyClass::Missed,
            TaxonomyClass::CorrectlyExcluded,
        ]
        .iter()
        .map(|c| verdict.with_class(*c).len())
        .sum();
        prop_assert_eq!(total, ont.diagnoses().len());
    }

    #[test]
    fn filtered_claims_are_entailed(seed in any::<u64>(), mask in any::<u32>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = EntailInstance::random(&mut rng);
        let ont = inst.ontology();
        let report = ingest_record(report_for(&ont, &inst.evidence, mask), &ont, None).unwrap();
        let verifier = Verifier::new(&ont);
        let (kept, _) = verifier.filter_verified(&report);
        prop_assert!(kept.is_subset(&report.claimed));
        let verdict = verifier.classify(&report, false);
        if verdict.is_consistent() {
            prop_assert!(kept.is_subset(&verdict.entailed));
            let filtered = verdict.filtered();
            prop_assert!(filtered.with_class(TaxonomyClass::Unsupported).is_empty());
            let s = report_soundness(&filtered);
            prop_assert!(s.is_none() || s == Some(1.0));
            prop_assert_eq!(report_completeness(&filtered), report_completeness(&verdict));
            let summary = aggregate(&[filtered]);
            prop_assert!(summary.micro_soundness.is_none() || summary.micro_soundness == Some(1.0));
        } else {
            prop_assert!(kept.is_empty());
        }
    }

    #[test]
    fn entailment_ratios_in_unit_interval(seed in any::<u64>(), mask in any::<u32>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = EntailInstance::random(&mut rng);
        let ont = inst.ontology();
        let report = ingest_record(report_for(&ont, &inst.evidence, mask), &ont, None).unwrap();
        let v = Verifier::new(&ont).classify(&report, false);
        if let Some(s) = report_soundness(&v) {
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s == 1.0, v.claimed.is_subset(&v.entailed));
        }
        if let Some(c) = report_completeness(&v) {
            prop_assert!((0.0..=1.0).contains(&c));
            prop_assert_eq!(c == 1.0, v.entailed.is_subset(&v.claimed));
        }
    }

    #[test]
    fn rouge_l_self_similarity(words in prop::collection::vec("[a-z]{1,6}", 1..12)) {
        let text = words.join(" ");
        prop_assert_eq!(rouge_l(&text, &text), 1.0);
    }

    #[test]
    fn bleu_appending_matched_identical_pairs(
        cand in prop::collection::vec("[a-c]( [a-c]){0,7}", 1..4),
        reference in prop::collection::vec("[a-c]( [a-c]){0,7}", 1..4),
        extra in "[a-c]( [a-c]){3,7}",
    ) {
        let n = cand.len().min(reference.len());
        let (cand, reference) = (&cand[..n], &reference[..n]);
        let before = bleu(cand, reference).unwrap();
        let mut cand2 = cand.to_vec();
        let mut ref2 = reference.to_vec();
        cand2.push(extra.clone());
        ref2.push(extra);
        let after = bleu(&cand2, &ref2).unwrap();
        prop_assert!(after >= before - 1e-12, "{before} -> {after}");
        if before == 1.0 {
            prop_assert!((after - 1.0).abs() < 1e-12);
        }
        let same = bleu(cand, cand).unwrap();
        prop_assert!((same - 1.0).abs() < 1e-12);
    }
}
