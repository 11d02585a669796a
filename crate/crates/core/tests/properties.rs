//! Cross-module property tests: random articles against round-trip,
//! rewrite, DNF, and checker-vs-oracle invariants.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use passpar_core::analyzer::{analyze, Inference, TypeCache};
use passpar_core::checker::{
    refute_inference, statement_tree, to_dnf, CAtom, CheckerConfig, FTree,
};
use passpar_core::corpus::{gen_corpus, GenParams};
use passpar_core::language::{
    canon_statement, parse_article, parse_file_bytes, rewrite_skip, tokenize, Article,
};
use passpar_core::oracle;

fn corpus_article(seed: u64, proofs: usize, skew: f64) -> Article {
    let dir = tempfile::tempdir().unwrap();
    let params = GenParams::new(seed, 1, proofs, skew);
    gen_corpus(&params, dir.path()).unwrap();
    let source = std::fs::read_to_string(dir.path().join("a000.mz")).unwrap();
    Article::from_source("a000", source).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parse_file_round_trip_is_identity(seed in 0u64..5000, proofs in 1usize..8, skew in 0.0f64..1.0) {
        let article = corpus_article(seed, proofs, skew);
        let (tree, errs) = parse_article(&article);
        prop_assert!(errs.is_empty());
        let bytes = parse_file_bytes(&tree);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.parse.json");
        std::fs::write(&path, &bytes).unwrap();
        let loaded = passpar_core::language::load_parse_file(&path).unwrap();
        prop_assert_eq!(&loaded, &tree);
        prop_assert_eq!(parse_file_bytes(&loaded), bytes);
    }

    #[test]
    fn token_positions_are_faithful(seed in 0u64..5000, proofs in 1usize..6) {
        let article = corpus_article(seed, proofs, 0.3);
        let lines: Vec<&str> = article.source.lines().collect();
        let (tokens, errs) = tokenize(&article.source);
        prop_assert!(errs.is_empty());
        for t in &tokens {
            let line = lines[(t.line - 1) as usize];
            let from_col: String = line.chars().skip((t.col - 1) as usize).collect();
            prop_assert!(
                from_col.starts_with(&t.lexeme),
                "token {:?} not at {}:{}", t.lexeme, t.line, t.col
            );
        }
    }

    #[test]
    fn rewrite_skip_marks_exactly_the_complement(seed in 0u64..5000, proofs in 2usize..7, keep_mask in 0u32..128) {
        let article = corpus_article(seed, proofs, 0.0);
        let (tree, _) = parse_article(&article);
        let all: Vec<usize> = tree.proof_index.iter().map(|s| s.id).collect();
        let keep: BTreeSet<usize> =
            all.iter().copied().filter(|&i| keep_mask & (1 << i) != 0).collect();
        let rewritten = rewrite_skip(&article.source, &keep).unwrap();
        let rearticle = Article::from_source("a000", rewritten).unwrap();
        let (retree, errs) = parse_article(&rearticle);
        prop_assert!(errs.is_empty());
        for span in &retree.proof_index {
            prop_assert_eq!(span.skipped, !keep.contains(&span.id));
        }
        // Spans keep their lines.
        for (a, b) in tree.proof_index.iter().zip(&retree.proof_index) {
            prop_assert_eq!(a.start_line, b.start_line);
            prop_assert_eq!(a.end_line, b.end_line);
        }
    }

    #[test]
    fn analysis_is_deterministic(seed in 0u64..2000) {
        let article = corpus_article(seed, 3, 0.5);
        let (tree, _) = parse_article(&article);
        let run = || {
            let mut cache = TypeCache::new();
            passpar_core::analyzer::semantic_file_bytes(&analyze(&tree, &[], &mut cache).sem)
        };
        prop_assert_eq!(run(), run());
    }
}

// Random formula trees for the DNF truth-table equivalence check.
fn arb_ftree(atoms: usize) -> impl Strategy<Value = FTree> {
    let leaf = (0..atoms, any::<bool>()).prop_map(|(i, neg)| {
        FTree::Lit(passpar_core::checker::CLit {
            neg,
            atom: CAtom::Opaque(format!("v{i}")),
        })
    });
    leaf.prop_recursive(4, 48, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| FTree::Not(Box::new(t))),
            proptest::collection::vec(inner.clone(), 1..4).prop_map(FTree::And),
            proptest::collection::vec(inner, 1..4).prop_map(FTree::Or),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dnf_preserves_models(tree in arb_ftree(10)) {
        let mut atoms = BTreeSet::new();
        oracle::collect_tree_atoms(&tree, &mut atoms);
        let atoms: Vec<CAtom> = atoms.into_iter().collect();
        prop_assume!(atoms.len() <= 12);
        let dnf = match to_dnf(&tree, 1_000_000) {
            Ok(d) => d,
            Err(_) => return Ok(()),
        };
        for mask in 0u64..(1u64 << atoms.len()) {
            let assign: BTreeMap<CAtom, bool> = atoms
                .iter()
                .enumerate()
                .map(|(i, a)| (a.clone(), mask & (1 << i) != 0))
                .collect();
            prop_assert_eq!(
                oracle::eval_tree(&tree, &assign),
                oracle::eval_dnf(&dnf.disjuncts, &assign)
            );
        }
    }
}

#[test]
fn dnf_equivalence_at_twenty_atoms() {
    // One deliberately wide case at the documented 20-atom ceiling.
    let lit = |i: usize, neg: bool| {
        FTree::Lit(passpar_core::checker::CLit { neg, atom: CAtom::Opaque(format!("v{i}")) })
    };
    let clauses: Vec<FTree> = (0..10)
        .map(|k| FTree::Or(vec![lit(2 * k, false), lit(2 * k + 1, k % 2 == 0)]))
        .collect();
    let tree = FTree::Not(Box::new(FTree::And(clauses)));
    let mut atoms = BTreeSet::new();
    oracle::collect_tree_atoms(&tree, &mut atoms);
    let atoms: Vec<CAtom> = atoms.into_iter().collect();
    assert_eq!(atoms.len(), 20);
    let dnf = to_dnf(&tree, 1_000_000).unwrap();
    assert_eq!(
        oracle::formula_models(&tree, &atoms),
        oracle::formula_models(
            &FTree::Or(
                dnf.disjuncts
                    .iter()
                    .map(|c| FTree::And(c.iter().cloned().map(FTree::Lit).collect()))
                    .collect()
            ),
            &atoms
        )
    );
}

/// Random ground inferences: the checker must agree with the enumeration
/// oracle everywhere on this domain.
fn arb_statement() -> impl Strategy<Value = String> {
    let term = prop_oneof![
        (0..3u8).prop_map(|i| format!("k{i}")),
        (0..3u8, 0..2u8).prop_map(|(i, f)| format!("g{f}(k{i})")),
    ];
    let atom = prop_oneof![
        (0..2u8, term.clone()).prop_map(|(p, t)| format!("r{p}({t})")),
        (term.clone(), term.clone()).prop_map(|(a, b)| format!("{a} = {b}")),
        (term, 0..2u8).prop_map(|(t, a)| format!("{t} is adj{a}")),
    ];
    let lit = (any::<bool>(), atom).prop_map(|(neg, a)| if neg { format!("not {a}") } else { a });
    let conj = proptest::collection::vec(lit, 1..3).prop_map(|ls| ls.join(" and "));
    let formula = proptest::collection::vec(conj, 1..3).prop_map(|cs| cs.join(" or "));
    prop_oneof![
        formula.clone(),
        (formula.clone(), formula).prop_map(|(a, b)| format!("{a} implies {b}")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn checker_agrees_with_enumeration_oracle(
        goal in arb_statement(),
        premises in proptest::collection::vec(arb_statement(), 0..3),
    ) {
        let goal = passpar_core::language::parser::parse_statement_text(&goal).unwrap();
        let premises: Vec<_> = premises
            .iter()
            .map(|p| passpar_core::language::parser::parse_statement_text(p).unwrap())
            .collect();
        let inf = Inference {
            id: 0,
            line: 1,
            col: 1,
            goal: goal.clone(),
            premises: premises.clone(),
            skipped: false,
        };
        let typing = BTreeMap::new();
        let (checker, _) =
            refute_inference(&inf, &typing, &CheckerConfig::default()).unwrap();
        let oracle_verdict = oracle::entails(&goal, &premises, &typing);
        prop_assert_eq!(
            checker,
            oracle_verdict,
            "goal={} premises={:?}",
            canon_statement(&goal),
            premises.iter().map(canon_statement).collect::<Vec<_>>()
        );
        // Sanity: the checker sees the same formula the oracle does.
        let _ = statement_tree(&goal);
    }
}
