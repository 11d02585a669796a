use std::collections::{BTreeMap, BTreeSet};

use super::*;
use crate::analyzer::Inference;
use crate::language::parser::parse_statement_text;
use crate::language::{codes, Statement};

fn stmt(text: &str) -> Statement {
    parse_statement_text(text).unwrap()
}

fn inference(goal: &str, premises: &[&str]) -> Inference {
    Inference {
        id: 0,
        line: 1,
        col: 1,
        goal: stmt(goal),
        premises: premises.iter().map(|p| stmt(p)).collect(),
        skipped: false,
    }
}

fn accepted(goal: &str, premises: &[&str]) -> bool {
    let typing = TypingInfo::new();
    refute_inference(&inference(goal, premises), &typing, &CheckerConfig::default())
        .unwrap()
        .0
}

#[test]
fn identity_inference_accepted() {
    assert!(accepted("p(a)", &["p(a)"]));
}

#[test]
fn non_sequitur_rejected() {
    assert!(!accepted("q(a)", &["p(a)"]));
}

#[test]
fn no_support_rejected() {
    assert!(!accepted("p(a)", &[]));
}

#[test]
fn equality_chain_accepted() {
    assert!(accepted("a = c", &["a = b", "b = c"]));
    let typing = TypingInfo::new();
    let oracle_ok = crate::oracle::entails(&stmt("a = c"), &[stmt("a = b"), stmt("b = c")], &typing);
    assert!(oracle_ok);
}

#[test]
fn congruence_on_predicate_arguments() {
    assert!(accepted("p(b)", &["p(a)", "a = b"]));
    let typing = TypingInfo::new();
    assert!(crate::oracle::entails(&stmt("p(b)"), &[stmt("p(a)"), stmt("a = b")], &typing));
}

#[test]
fn functional_congruence() {
    assert!(accepted("f(a) = f(b)", &["a = b"]));
    assert!(!accepted("f(a) = f(b)", &["a = c"]));
}

#[test]
fn modus_ponens_via_implication_premise() {
    assert!(accepted("q(a)", &["p(a) implies q(a)", "p(a)"]));
    assert!(!accepted("q(a)", &["p(a) implies q(a)"]));
}

#[test]
fn reflexivity_is_free() {
    assert!(accepted("a = a", &["p(b)"]));
}

#[test]
fn quantified_statements_are_opaque() {
    let forall = "for x being real holds p(x)";
    assert!(accepted(forall, &[forall]));
    // Opaque premises do not instantiate.
    assert!(!accepted("p(a)", &[forall]));
}

mod disjunct_level {
    use super::*;
    use crate::checker::formula::{CAtom, CLit, CTerm};

    fn c(name: &str) -> CTerm {
        CTerm { name: name.into(), args: vec![] }
    }

    fn pred(name: &str, arg: &str, neg: bool) -> CLit {
        CLit { neg, atom: CAtom::Pred { name: name.into(), args: vec![c(arg)] } }
    }

    fn eq(l: &str, r: &str, neg: bool) -> CLit {
        CLit { neg, atom: CAtom::Eq(c(l), c(r)) }
    }

    fn is(term: &str, adj: &str, neg: bool) -> CLit {
        CLit { neg, atom: CAtom::Is { term: c(term), adj: adj.into() } }
    }

    #[test]
    fn complementary_pair() {
        let typing = TypingInfo::new();
        assert!(refute_disjunct(&[pred("p", "a", false), pred("p", "a", true)], &typing));
        assert!(!refute_disjunct(&[pred("p", "a", false), pred("q", "a", true)], &typing));
    }

    #[test]
    fn congruence_closure_equality() {
        let typing = TypingInfo::new();
        assert!(refute_disjunct(&[eq("a", "b", false), eq("b", "c", false), eq("a", "c", true)], &typing));
        assert!(!refute_disjunct(&[eq("a", "b", false), eq("a", "c", true)], &typing));
    }

    #[test]
    fn adjective_typing_refutes_negative_is() {
        let mut typing = TypingInfo::new();
        typing.insert("a".into(), ["positive".to_string(), "nonzero".to_string()].into());
        assert!(refute_disjunct(&[is("a", "nonzero", true)], &typing));
        assert!(!refute_disjunct(&[is("a", "negative", true)], &typing));
        assert!(!refute_disjunct(&[is("b", "nonzero", true)], &typing));
    }

    #[test]
    fn adjective_typing_applies_across_congruence_class() {
        let mut typing = TypingInfo::new();
        typing.insert("a".into(), ["positive".to_string()].into());
        assert!(refute_disjunct(&[eq("a", "b", false), is("b", "positive", true)], &typing));
    }

    #[test]
    fn is_atoms_collide_under_congruence() {
        let typing = TypingInfo::new();
        assert!(refute_disjunct(
            &[eq("a", "b", false), is("a", "positive", false), is("b", "positive", true)],
            &typing
        ));
    }
}

mod article_level {
    use super::*;
    use crate::analyzer::{analyze, TypeCache};
    use crate::language::{parse_article, Article};

    fn check_source(src: &str) -> (Vec<crate::language::ErrorRecord>, CheckerCounters) {
        let article = Article::from_source("t1", src).unwrap();
        let (tree, errs) = parse_article(&article);
        assert!(errs.is_empty(), "{errs:?}");
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        assert!(out.sem.nd_errors.is_empty(), "{:?}", out.sem.nd_errors);
        check_article(&out.sem, &BTreeSet::new(), &CheckerConfig::default())
    }

    const GOOD: &str = "\
environ
type real;
func a -> real;
pred p(real);
pred q(real);
begin
theorem t0: p(a) implies p(a)
proof
assume h: p(a);
thus p(a) by h;
end;
";

    #[test]
    fn clean_article_has_no_errors() {
        let (errors, counters) = check_source(GOOD);
        assert!(errors.is_empty());
        assert_eq!(counters.inferences_checked, 1);
        assert!(counters.disjuncts_examined >= 1);
    }

    #[test]
    fn bad_inference_flagged_at_position() {
        let src = GOOD.replace("thus p(a) by h;", "thus p(a) by t9;");
        let article = Article::from_source("t1", &src).unwrap();
        let (tree, _) = parse_article(&article);
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        // t9 unresolvable: label error from analysis, code 4 from checking.
        let (errors, _) = check_article(&out.sem, &BTreeSet::new(), &CheckerConfig::default());
        assert_eq!(errors, vec![crate::language::ErrorRecord::new(10, 11, codes::INFERENCE)]);
    }

    #[test]
    fn skip_set_suppresses_work_and_errors() {
        let src = GOOD.replace("thus p(a) by h;", "thus p(a) by t9;");
        let article = Article::from_source("t1", &src).unwrap();
        let (tree, _) = parse_article(&article);
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        let skip: BTreeSet<usize> = [0].into();
        let (errors, counters) = check_article(&out.sem, &skip, &CheckerConfig::default());
        assert!(errors.is_empty());
        assert_eq!(counters.inferences_checked, 0);
        assert_eq!(counters.disjuncts_examined, 0);
    }

    #[test]
    fn verdict_independent_of_other_skips() {
        let src = "\
environ
type real;
func a -> real;
pred p(real);
pred q(real);
begin
theorem t0: p(a) implies p(a)
proof
assume h: p(a);
s0: p(a) by h;
s1: q(a) by h;
thus p(a) by s0;
end;
";
        let article = Article::from_source("t1", src).unwrap();
        let (tree, errs) = parse_article(&article);
        assert!(errs.is_empty());
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        assert_eq!(out.sem.inferences.len(), 3);
        let full: BTreeMap<usize, bool> = {
            let (errors, _) = check_article(&out.sem, &BTreeSet::new(), &CheckerConfig::default());
            out.sem
                .inferences
                .iter()
                .map(|i| (i.id, !errors.iter().any(|e| e.line == i.line && e.col == i.col)))
                .collect()
        };
        // Check each inference alone: verdict matches the full run.
        for inf in &out.sem.inferences {
            let skip: BTreeSet<usize> =
                out.sem.inferences.iter().map(|i| i.id).filter(|&i| i != inf.id).collect();
            let (errors, counters) = check_article(&out.sem, &skip, &CheckerConfig::default());
            assert_eq!(counters.inferences_checked, 1);
            let ok = !errors.iter().any(|e| e.line == inf.line && e.col == inf.col);
            assert_eq!(ok, full[&inf.id], "inference {}", inf.id);
        }
    }

    #[test]
    fn malformed_semantic_file_is_code_90() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.sem.json");
        std::fs::write(&path, b"{ not json").unwrap();
        let (errors, counters) = check_semantic_path(&path, &BTreeSet::new(), &CheckerConfig::default());
        assert_eq!(errors, vec![crate::language::ErrorRecord::new(1, 1, codes::SEMANTIC_FILE)]);
        assert_eq!(counters.inferences_checked, 0);
    }

    #[test]
    fn dnf_overflow_reports_code_91() {
        // 14 two-way disjunctive premises: 2^14 disjuncts > default cap.
        let mut src = String::from(
            "environ\ntype real;\nfunc a -> real;\npred p(real);\npred q(real);\nbegin\n",
        );
        src.push_str("theorem t0: p(a) implies p(a)\nproof\nassume h: p(a);\n");
        for i in 0..14 {
            src.push_str(&format!("s{i}: a = a or q(a) by h;\n"));
        }
        src.push_str("thus p(a) by h");
        for i in 0..14 {
            src.push_str(&format!(", s{i}"));
        }
        src.push_str(";\nend;\n");
        let article = Article::from_source("t1", &src).unwrap();
        let (tree, errs) = parse_article(&article);
        assert!(errs.is_empty(), "{errs:?}");
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        assert!(out.sem.nd_errors.is_empty());
        let (errors, _) = check_article(&out.sem, &BTreeSet::new(), &CheckerConfig::default());
        assert!(errors.iter().any(|e| e.code == codes::DNF_OVERFLOW), "{errors:?}");
        // A raised cap clears it.
        let cfg = CheckerConfig { dnf_cap: 1 << 15 };
        let (errors, counters) = check_article(&out.sem, &BTreeSet::new(), &cfg);
        assert!(errors.iter().all(|e| e.code != codes::DNF_OVERFLOW));
        assert!(counters.disjuncts_examined >= 1 << 14);
    }

    #[test]
    fn determinism_same_semantics_same_errors() {
        let src = GOOD.replace("thus p(a) by h;", "thus q(a) by h;");
        let article = Article::from_source("t1", &src).unwrap();
        let (tree, _) = parse_article(&article);
        let mut cache = TypeCache::new();
        let out = analyze(&tree, &[], &mut cache);
        let run = || check_article(&out.sem, &BTreeSet::new(), &CheckerConfig::default());
        assert_eq!(run(), run());
    }
}

mod oracle_agreement {
    use super::*;
    use crate::oracle::entails;

    fn agree(goal: &str, premises: &[&str], typing: &TypingInfo) {
        let inf = inference(goal, premises);
        let checker =
            refute_inference(&inf, typing, &CheckerConfig::default()).unwrap().0;
        let oracle = entails(&inf.goal, &inf.premises, typing);
        assert_eq!(checker, oracle, "goal={goal} premises={premises:?}");
    }

    #[test]
    fn fixed_cases_agree_with_oracle() {
        let t = TypingInfo::new();
        agree("p(a)", &["p(a)"], &t);
        agree("q(a)", &["p(a)"], &t);
        agree("a = c", &["a = b", "b = c"], &t);
        agree("p(b)", &["p(a)", "a = b"], &t);
        agree("f(a) = f(b)", &["a = b"], &t);
        agree("f(f(a)) = f(f(b))", &["a = b"], &t);
        agree("q(a)", &["p(a) implies q(a)", "p(a)"], &t);
        agree("q(a)", &["p(a) implies q(a)", "p(b)", "a = b"], &t);
        agree("p(a) or q(a)", &["q(a)"], &t);
        agree("p(a) and q(a)", &["q(a)"], &t);
        agree("p(a) and q(a)", &["q(a)", "p(a)"], &t);
        agree("p(a)", &["p(a) or q(a)"], &t);
        agree("p(a)", &["p(a) or q(a)", "not q(a)"], &t);
        agree("not p(a)", &["not p(b)", "a = b"], &t);
        agree("a = b", &["b = a"], &t);
        agree("p(a) implies p(b)", &["a = b"], &t);
        agree("p(a) implies q(a)", &["not p(a) or q(a)"], &t);
    }

    #[test]
    fn typing_cases_agree_with_oracle() {
        let mut t = TypingInfo::new();
        t.insert("a".into(), ["positive".to_string()].into());
        agree("a is positive", &["p(a)"], &t);
        agree("b is positive", &["a = b"], &t);
        agree("b is positive", &["p(a)"], &t);
        agree("not a is positive implies q(a)", &["p(a)"], &t);
    }
}
