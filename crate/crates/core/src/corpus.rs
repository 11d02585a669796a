//! Deterministic synthetic corpus generation: a desk-scale stand-in for a
//! large article library, with controllable proof-size skew and checker
//! hardness.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GenParams {
    pub seed: u64,
    pub articles: usize,
    pub proofs_per_article: usize,
    /// 0.0: equal proof sizes; 1.0: one dominant proof (>= 80% of lines).
    pub skew: f64,
    /// Heavy-step count per proof: the closing inference cites this many
    /// disjunctive premises, giving ~2^hardness DNF disjuncts.
    pub hardness: u32,
    /// How many heavy inferences each proof carries (when hardness > 0).
    pub heavy_repeats: u32,
    /// Chain `uses` edges between consecutive articles.
    pub uses_chain: bool,
    /// Add a theorem citing an imported label (resolvable only with
    /// accommodation, i.e. under corpus scheduling).
    pub cross_refs: bool,
}

impl GenParams {
    pub fn new(seed: u64, articles: usize, proofs_per_article: usize, skew: f64) -> GenParams {
        GenParams {
            seed,
            articles,
            proofs_per_article,
            skew,
            hardness: 0,
            heavy_repeats: 1,
            uses_chain: false,
            cross_refs: false,
        }
    }
}

pub fn article_name(index: usize) -> String {
    format!("a{index:03}")
}

/// Generates the corpus into `dir`, one `.mz` file per article, and
/// returns the article names. Identical parameters produce identical
/// bytes; articles verify cleanly standalone.
pub fn gen_corpus(params: &GenParams, dir: &Path) -> Result<Vec<String>> {
    if params.articles == 0 || params.proofs_per_article == 0 {
        return Err(Error::usage("corpus needs at least one article and one proof"));
    }
    if !(0.0..=1.0).contains(&params.skew) {
        return Err(Error::usage("skew must be within [0, 1]"));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut names = Vec::new();
    for i in 0..params.articles {
        let name = article_name(i);
        let text = gen_article(params, i, &name);
        let path = dir.join(format!("{name}.mz"));
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        names.push(name);
    }
    Ok(names)
}

/// Aux-step counts per proof for the requested skew. At 0 every proof has
/// the base size; at 1 a single proof dominates at least 80% of the
/// article's lines.
fn proof_sizes(params: &GenParams, preamble_lines: usize) -> Vec<usize> {
    let p = params.proofs_per_article;
    let base = 6usize;
    let minimal = 2usize;
    if p == 1 {
        return vec![base + (params.skew * 40.0) as usize];
    }
    let small = minimal + ((1.0 - params.skew) * (base - minimal) as f64).round() as usize;
    // Fixed per-proof overhead: proof/assume/thus/end plus the header line.
    let overhead = 5;
    let rest_lines = (p - 1) * (small + overhead) + preamble_lines;
    let dominant_at_full = 4 * rest_lines + overhead; // >= 80% of the total
    let dominant = base + (params.skew * (dominant_at_full as f64 - base as f64)).round() as usize;
    let mut sizes = vec![small; p];
    sizes[0] = dominant.max(small);
    sizes
}

fn gen_article(params: &GenParams, index: usize, name: &str) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_mul(0x9E37_79B9).wrapping_add(index as u64));
    let mut out = String::new();
    out.push_str("environ\n");
    if params.uses_chain && index > 0 {
        writeln!(out, "uses {};", article_name(index - 1)).unwrap();
    }
    out.push_str("type real;\n");
    for k in 0..4 {
        writeln!(out, "func a{k} -> real;").unwrap();
    }
    for k in 0..2 {
        writeln!(out, "func f{k} -> real;").unwrap();
    }
    for k in 0..3 {
        writeln!(out, "pred p{k}(real);").unwrap();
    }
    out.push_str("pred q0(real);\n");
    out.push_str("cluster positive -> nonzero for real;\n");
    out.push_str("begin\n");

    let preamble_lines = out.lines().count() + 2 * params.proofs_per_article; // headers + separators
    let sizes = proof_sizes(params, preamble_lines);

    for (k, &steps) in sizes.iter().enumerate() {
        let label = format!("{name}_t{k}");
        match rng.gen_range(0..3u32) {
            0 => gen_implication_proof(&mut out, &mut rng, &label, steps, params),
            1 => gen_forall_proof(&mut out, &mut rng, &label, steps, params),
            _ => gen_equality_proof(&mut out, &mut rng, &label, steps, params),
        }
    }
    // A couple of by-justified tautologies citing earlier labels.
    let cite = format!("{name}_t0");
    writeln!(out, "theorem {name}_b0: p0(a0) and q0(a0) implies p0(a0) by {cite};").unwrap();
    writeln!(out, "theorem {name}_b1: a0 = a0 by {cite};").unwrap();
    if params.cross_refs && index > 0 {
        let dep = article_name(index - 1);
        writeln!(out, "theorem {name}_x0: q0(a0) implies q0(a0)").unwrap();
        out.push_str("proof\nassume h: q0(a0);\n");
        writeln!(out, "thus q0(a0) by h, {dep}_t0;").unwrap();
        out.push_str("end;\n");
    }
    out
}

fn pick_term(rng: &mut ChaCha8Rng) -> String {
    let base = format!("a{}", rng.gen_range(0..4u32));
    match rng.gen_range(0..4u32) {
        0 => base,
        1 => format!("f0({base})"),
        2 => format!("f1({base})"),
        _ => format!("f1(f0({base}))"),
    }
}

/// Emits aux steps `s0..s{n}` over `stmt`, then heavy disjunctive steps
/// when hardness > 0, and returns the labels the final `thus` should cite.
///
/// Steps whose statement still entails `stmt` (plain or and-strengthened)
/// become the citation for the next step; or-weakened steps are proved but
/// never cited, since they would not support their successors.
fn gen_steps(
    out: &mut String,
    rng: &mut ChaCha8Rng,
    stmt: &str,
    steps: usize,
    hardness: u32,
    heavy_repeats: u32,
) -> String {
    let mut prev = "h".to_string();
    for s in 0..steps {
        match rng.gen_range(0..3u32) {
            0 => {
                writeln!(out, "s{s}: {stmt} by {prev};").unwrap();
                prev = format!("s{s}");
            }
            1 => {
                writeln!(out, "s{s}: {stmt} and {} by {prev};", reflexive_eq(rng)).unwrap();
                prev = format!("s{s}");
            }
            _ => {
                writeln!(out, "s{s}: {stmt} or p2({}) by {prev};", pick_term(rng)).unwrap();
            }
        }
    }
    let mut refs = prev;
    for hs in 0..hardness {
        let e = reflexive_eq(rng);
        writeln!(out, "w{hs}: {e} or {} by h;", reflexive_eq(rng)).unwrap();
        refs.push_str(&format!(", w{hs}"));
    }
    if hardness > 0 {
        for r in 1..heavy_repeats {
            writeln!(out, "z{r}: {stmt} by {refs};").unwrap();
        }
    }
    refs
}

fn reflexive_eq(rng: &mut ChaCha8Rng) -> String {
    let t = pick_term(rng);
    format!("{t} = {t}")
}

fn gen_implication_proof(
    out: &mut String,
    rng: &mut ChaCha8Rng,
    label: &str,
    steps: usize,
    params: &GenParams,
) {
    let atom = format!("p{}({})", rng.gen_range(0..3u32), pick_term(rng));
    writeln!(out, "theorem {label}: {atom} implies {atom}").unwrap();
    out.push_str("proof\n");
    writeln!(out, "assume h: {atom};").unwrap();
    let refs = gen_steps(out, rng, &atom, steps, params.hardness, params.heavy_repeats);
    writeln!(out, "thus {atom} by {refs};").unwrap();
    out.push_str("end;\n");
}

fn gen_forall_proof(
    out: &mut String,
    rng: &mut ChaCha8Rng,
    label: &str,
    steps: usize,
    params: &GenParams,
) {
    let pred = format!("p{}", rng.gen_range(0..3u32));
    writeln!(out, "theorem {label}: for x being real holds {pred}(x) implies {pred}(x)").unwrap();
    out.push_str("proof\nlet x be real;\n");
    writeln!(out, "assume h: {pred}(x);").unwrap();
    let atom = format!("{pred}(x)");
    // One aux step fewer: the `let` line keeps proof spans equal across
    // templates, so skew 0 really means equal weights.
    let refs = gen_steps(out, rng, &atom, steps.saturating_sub(1), params.hardness, params.heavy_repeats);
    writeln!(out, "thus {pred}(x) by {refs};").unwrap();
    out.push_str("end;\n");
}

fn gen_equality_proof(
    out: &mut String,
    rng: &mut ChaCha8Rng,
    label: &str,
    steps: usize,
    params: &GenParams,
) {
    let lhs = format!("a{}", rng.gen_range(0..2u32));
    let rhs = format!("a{}", rng.gen_range(2..4u32));
    let f = format!("f{}", rng.gen_range(0..2u32));
    let goal = format!("{f}({lhs}) = {f}({rhs})");
    writeln!(out, "theorem {label}: {lhs} = {rhs} implies {goal}").unwrap();
    out.push_str("proof\n");
    writeln!(out, "assume h: {lhs} = {rhs};").unwrap();
    let refs = gen_steps(out, rng, &goal, steps, params.hardness, params.heavy_repeats);
    writeln!(out, "thus {goal} by {refs};").unwrap();
    out.push_str("end;\n");
}
