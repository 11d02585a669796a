use std::path::Path;

use super::*;
use crate::language::Article;

fn corpus_article(name: &str, uses: &[&str], cite_import: Option<&str>) -> Article {
    let uses_line = if uses.is_empty() {
        String::new()
    } else {
        format!("uses {};\n", uses.join(", "))
    };
    let extra = match cite_import {
        // Cites an imported theorem: needs accommodation to resolve.
        Some(label) => format!(
            "theorem {name}_t1: q(a) implies q(a)\nproof\nassume h: q(a);\nthus q(a) by h, {label};\nend;\n"
        ),
        None => String::new(),
    };
    Article::from_source(
        name,
        format!(
            "environ\n{uses_line}type real;\nfunc a -> real;\npred p(real);\npred q(real);\nbegin\ntheorem {name}_t0: p(a)\nproof\nthus p(a) by {name}_t0x;\nend;\n{extra}"
        ),
    )
    .unwrap()
}

fn clean_article(name: &str, uses: &[&str], cite_import: Option<&str>) -> Article {
    let uses_line = if uses.is_empty() {
        String::new()
    } else {
        format!("uses {};\n", uses.join(", "))
    };
    let extra = match cite_import {
        Some(label) => format!(
            "theorem {name}_t1: q(a) implies q(a)\nproof\nassume h: q(a);\nthus q(a) by h, {label};\nend;\n"
        ),
        None => String::new(),
    };
    Article::from_source(
        name,
        format!(
            "environ\n{uses_line}type real;\nfunc a -> real;\npred p(real);\npred q(real);\nbegin\ntheorem {name}_t0: p(a) implies p(a)\nproof\nassume h: p(a);\nthus p(a) by h;\nend;\n{extra}"
        ),
    )
    .unwrap()
}

fn write_corpus(dir: &Path, articles: &[Article]) {
    for a in articles {
        std::fs::write(dir.join(format!("{}.mz", a.name)), &a.source).unwrap();
    }
}

#[test]
fn real_run_produces_identical_err_files_for_any_j() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    std::fs::create_dir_all(&corpus_dir).unwrap();
    // b1 and c1 cite imported labels, resolvable only via accommodation.
    let a = clean_article("a1", &[], None);
    let b = clean_article("b1", &["a1"], Some("a1_t0"));
    let c = clean_article("c1", &["a1", "b1"], Some("b1_t1"));
    write_corpus(&corpus_dir, &[a.clone(), b.clone(), c.clone()]);
    let corpus = load_corpus(&corpus_dir).unwrap();
    let graph = build_graph(&corpus).unwrap();

    let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
    for j in [1usize, 2, 4] {
        let out_dir = dir.path().join(format!("out{j}"));
        std::fs::create_dir_all(&out_dir).unwrap();
        let runner = InProcessRunner {
            ctx: PassContext {
                corpus_dir: corpus_dir.clone(),
                out_dir: out_dir.clone(),
                dnf_cap: 10_000,
            },
        };
        let results = run_schedule(&graph, j, &runner).unwrap();
        assert!(results.iter().all(|r| matches!(r, TaskResult::Ok)), "{results:?}");
        let mut errs: Vec<(String, Vec<u8>)> = corpus
            .iter()
            .map(|a| {
                let p = out_dir.join(format!("{}.err", a.name));
                (a.name.clone(), std::fs::read(&p).unwrap())
            })
            .collect();
        errs.sort();
        match &reference {
            None => reference = Some(errs),
            Some(r) => assert_eq!(r, &errs, "j={j} differs from j=1"),
        }
    }
    // All articles clean: b1_t1 resolves a1_t0 only via accommodation.
    for (_, bytes) in reference.unwrap() {
        assert!(bytes.is_empty());
    }
}

#[test]
fn missing_accommodation_surfaces_as_label_error() {
    // Without the scheduler (no accommodation), the cross-article citation
    // cannot resolve: standalone verification reports code 31.
    let dir = tempfile::tempdir().unwrap();
    let b = clean_article("b1", &["a1"], Some("a1_t0"));
    let path = dir.path().join("b1.mz");
    std::fs::write(&path, &b.source).unwrap();
    let out = crate::parallelizer::run_sequential(&path, false, false, 10_000, &dir.path().join("seq")).unwrap();
    assert!(out.errors.iter().any(|e| e.code == crate::language::codes::LABEL));
}

#[test]
fn dirty_article_same_errors_under_scheduling() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    std::fs::create_dir_all(&corpus_dir).unwrap();
    let a = corpus_article("a1", &[], None); // cites unresolvable a1_t0x
    let b = clean_article("b1", &["a1"], None);
    write_corpus(&corpus_dir, &[a, b]);
    let corpus = load_corpus(&corpus_dir).unwrap();
    let graph = build_graph(&corpus).unwrap();
    let mut per_j = Vec::new();
    for j in [1usize, 3] {
        let out_dir = dir.path().join(format!("out{j}"));
        std::fs::create_dir_all(&out_dir).unwrap();
        let runner = InProcessRunner {
            ctx: PassContext {
                corpus_dir: corpus_dir.clone(),
                out_dir: out_dir.clone(),
                dnf_cap: 10_000,
            },
        };
        run_schedule(&graph, j, &runner).unwrap();
        per_j.push(std::fs::read(out_dir.join("a1.err")).unwrap());
    }
    assert_eq!(per_j[0], per_j[1]);
    assert!(!per_j[0].is_empty());
}

#[test]
fn render_pass_writes_full_document() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    std::fs::create_dir_all(&corpus_dir).unwrap();
    write_corpus(&corpus_dir, &[clean_article("a1", &[], None)]);
    let corpus = load_corpus(&corpus_dir).unwrap();
    let graph = build_graph(&corpus).unwrap();
    let out_dir = dir.path().join("out");
    std::fs::create_dir_all(&out_dir).unwrap();
    let runner = InProcessRunner {
        ctx: PassContext { corpus_dir, out_dir: out_dir.clone(), dnf_cap: 10_000 },
    };
    let results = run_schedule(&graph, 2, &runner).unwrap();
    assert!(results.iter().all(|r| matches!(r, TaskResult::Ok)));
    let doc = std::fs::read_to_string(out_dir.join("a1.full.doc")).unwrap();
    assert!(doc.contains("<proof id=\"0\" theorem=\"a1_t0\">"));
    assert!(out_dir.join("a1.acc.json").exists());
}
