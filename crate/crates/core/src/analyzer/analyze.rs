use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::cache::TypeCache;
use super::env::{apply_clusters, Environment};
use super::semantic::{Export, Inference, SemanticArticle, TypedTerm};
use crate::language::canon::{canon_formula, canon_statement, term_key};
use crate::language::{codes, ErrorRecord, Item, Justif, LabelRef, ParseTree, ProofBlock, Statement, Step, Term};

/// Deterministic analyzer work tally, the pass's stand-in for wall-clock
/// cost. `type_misses` counts distinct ground-term typings per scope, which
/// equals the miss count of a fresh per-scope cache and does not depend on
/// cache mode or warmth.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzerCounters {
    pub type_misses: u64,
    pub cluster_firings: u64,
    pub nd_steps: u64,
}

impl AnalyzerCounters {
    pub fn units(&self) -> u64 {
        self.type_misses + self.cluster_firings + self.nd_steps
    }
}

pub struct AnalyzeOutcome {
    pub sem: SemanticArticle,
    pub counters: AnalyzerCounters,
    pub cache_hits: u64,
    pub cache_misses: u64,
}

/// Runs the analyzer pass. The caller's `cache` serves the preamble scope
/// (theorem statements, which every worker analyzes); each toplevel proof
/// gets a fresh scope so that per-proof work is independent of which other
/// proofs a run keeps.
pub fn analyze(tree: &ParseTree, imports: &[Export], cache: &mut TypeCache) -> AnalyzeOutcome {
    let (env, env_errors) = Environment::from_items(&tree.items);
    let hits0 = cache.hits;
    let misses0 = cache.misses;
    let mut st = Analyzer {
        env,
        caller_cache: cache,
        preamble_seen: BTreeSet::new(),
        proof_scope: None,
        scope_hits: 0,
        scope_misses: 0,
        let_consts: BTreeMap::new(),
        let_ordinal: 0,
        bindings: Vec::new(),
        labels: vec![BTreeMap::new()],
        counters: AnalyzerCounters::default(),
        typed_terms: Vec::new(),
        typed_keys: BTreeSet::new(),
        errors: env_errors,
        inferences: Vec::new(),
        exports: Vec::new(),
    };
    for imp in imports {
        st.labels[0].insert(imp.label.clone(), imp.statement.clone());
    }

    for item in &tree.items {
        let Item::Theorem { label, statement, justif, .. } = item else { continue };
        let mut bound = BTreeMap::new();
        st.type_statement(statement, &mut bound);
        match justif {
            Justif::By { refs, line, col } => {
                let premises = st.resolve_refs(refs);
                st.emit_inference(*line, *col, statement.clone(), premises);
            }
            Justif::Proof { block } => {
                if !block.skipped {
                    st.check_toplevel_proof(block, statement);
                }
            }
        }
        st.labels[0].insert(label.clone(), statement.clone());
        st.exports.push(Export { label: label.clone(), statement: statement.clone() });
    }

    let mut errors = st.errors;
    errors.sort();
    errors.dedup();
    let sem = SemanticArticle {
        name: tree.name.clone(),
        typed_terms: st.typed_terms,
        inferences: st.inferences,
        exports: st.exports,
        nd_errors: errors,
        counters: st.counters,
    };
    AnalyzeOutcome {
        sem,
        counters: st.counters,
        cache_hits: st.scope_hits + (st.caller_cache.hits - hits0),
        cache_misses: st.scope_misses + (st.caller_cache.misses - misses0),
    }
}

/// Walks a proof block checking natural-deduction structure against a
/// thesis. Exposed for direct use in tests; `analyze` drives it per proof.
pub fn check_nd_structure(
    block: &ProofBlock,
    thesis: &Statement,
    env: &Environment,
    context: &BTreeMap<String, Statement>,
) -> (Vec<Inference>, Vec<ErrorRecord>) {
    let mut cache = TypeCache::new();
    let mut st = Analyzer {
        env: env.clone(),
        caller_cache: &mut cache,
        preamble_seen: BTreeSet::new(),
        proof_scope: None,
        scope_hits: 0,
        scope_misses: 0,
        let_consts: BTreeMap::new(),
        let_ordinal: 0,
        bindings: Vec::new(),
        labels: vec![context.clone()],
        counters: AnalyzerCounters::default(),
        typed_terms: Vec::new(),
        typed_keys: BTreeSet::new(),
        errors: Vec::new(),
        inferences: Vec::new(),
        exports: Vec::new(),
    };
    st.check_toplevel_proof(block, thesis);
    (st.inferences, st.errors)
}

/// Thesis state during natural-deduction tracking.
#[derive(Debug, Clone)]
enum Thesis {
    Stmt(Statement),
    Verum,
}

struct Analyzer<'a> {
    env: Environment,
    caller_cache: &'a mut TypeCache,
    preamble_seen: BTreeSet<String>,
    /// Fresh cache + distinct-term set for the toplevel proof being checked.
    proof_scope: Option<(TypeCache, BTreeSet<String>)>,
    scope_hits: u64,
    scope_misses: u64,
    /// `let`-introduced constants of the current toplevel proof.
    let_consts: BTreeMap<String, String>,
    let_ordinal: u64,
    /// Variable bindings, one frame per open block.
    bindings: Vec<BTreeMap<String, String>>,
    /// Label scopes: frame 0 holds imports and earlier theorem exports.
    labels: Vec<BTreeMap<String, Statement>>,
    counters: AnalyzerCounters,
    typed_terms: Vec<TypedTerm>,
    typed_keys: BTreeSet<String>,
    errors: Vec<ErrorRecord>,
    inferences: Vec<Inference>,
    exports: Vec<Export>,
}

impl Analyzer<'_> {
    fn emit_inference(&mut self, line: u32, col: u32, goal: Statement, premises: Vec<Statement>) {
        let id = self.inferences.len();
        self.inferences.push(Inference { id, line, col, goal, premises, skipped: false });
    }

    fn resolve_refs(&mut self, refs: &[LabelRef]) -> Vec<Statement> {
        let mut out = Vec::new();
        for r in refs {
            match self.lookup_label(&r.name) {
                Some(s) => out.push(s),
                None => self.errors.push(ErrorRecord::new(r.line, r.col, codes::LABEL)),
            }
        }
        out
    }

    fn lookup_label(&self, name: &str) -> Option<Statement> {
        self.labels.iter().rev().find_map(|frame| frame.get(name).cloned())
    }

    fn check_toplevel_proof(&mut self, block: &ProofBlock, statement: &Statement) {
        self.proof_scope = Some((self.caller_cache.fresh_scope(), BTreeSet::new()));
        self.let_consts.clear();
        self.let_ordinal = 0;
        self.check_block(block, Thesis::Stmt(statement.clone()), 1);
        if let Some((cache, _)) = self.proof_scope.take() {
            self.scope_hits += cache.hits;
            self.scope_misses += cache.misses;
        }
    }

    fn check_block(&mut self, block: &ProofBlock, mut thesis: Thesis, depth: u32) {
        self.bindings.push(BTreeMap::new());
        self.labels.push(BTreeMap::new());
        for step in &block.steps {
            self.counters.nd_steps += 1;
            let (sline, scol) = step.pos();
            match step {
                Step::Let { var, ty, .. } => {
                    if !self.env.types.contains(ty) {
                        self.errors.push(ErrorRecord::new(sline, scol, codes::FORMULA));
                    }
                    match thesis {
                        Thesis::Stmt(Statement::Forall {
                            var: ref tvar,
                            ty: ref tty,
                            ref body,
                            ..
                        }) if tvar == var && tty == ty => {
                            let fresh = format!("c_{var}_{depth}_{}", self.let_ordinal);
                            self.let_ordinal += 1;
                            self.let_consts.insert(fresh.clone(), ty.clone());
                            let new_thesis = substitute(body, tvar, &fresh);
                            self.bindings.last_mut().unwrap().insert(var.clone(), fresh);
                            thesis = Thesis::Stmt(new_thesis);
                        }
                        _ => {
                            self.errors.push(ErrorRecord::new(sline, scol, codes::ND));
                        }
                    }
                }
                Step::Assume { label, statement, .. } => {
                    let resolved = self.resolve_statement(statement);
                    let mut bound = BTreeMap::new();
                    self.type_statement(&resolved, &mut bound);
                    match thesis {
                        Thesis::Stmt(Statement::Implies { ref lhs, ref rhs })
                            if canon_statement(&resolved) == canon_formula(lhs) =>
                        {
                            let consequent = Statement::Plain { formula: rhs.clone() };
                            thesis = Thesis::Stmt(consequent);
                        }
                        _ => {
                            self.errors.push(ErrorRecord::new(sline, scol, codes::ND));
                        }
                    }
                    self.labels.last_mut().unwrap().insert(label.clone(), resolved);
                }
                Step::Thus { statement, justif, .. } => {
                    let resolved = self.resolve_statement(statement);
                    let mut bound = BTreeMap::new();
                    self.type_statement(&resolved, &mut bound);
                    let matches = match &thesis {
                        Thesis::Stmt(t) => canon_statement(&resolved) == canon_statement(t),
                        Thesis::Verum => false,
                    };
                    if matches {
                        thesis = Thesis::Verum;
                    } else {
                        self.errors.push(ErrorRecord::new(sline, scol, codes::ND));
                    }
                    self.justify(&resolved, justif, depth);
                }
                Step::Aux { label, statement, justif, .. } => {
                    let resolved = self.resolve_statement(statement);
                    let mut bound = BTreeMap::new();
                    self.type_statement(&resolved, &mut bound);
                    self.justify(&resolved, justif, depth);
                    self.labels.last_mut().unwrap().insert(label.clone(), resolved);
                }
            }
        }
        if !block.skipped && !matches!(thesis, Thesis::Verum) {
            self.errors.push(ErrorRecord::new(block.end_line, block.end_col, codes::THESIS));
        }
        self.labels.pop();
        self.bindings.pop();
    }

    /// Handles the justification of a (resolved) goal statement: a `by`
    /// inference, a nested proof, or a skipped nested proof that asserts the
    /// goal without evidence.
    fn justify(&mut self, goal: &Statement, justif: &Justif, depth: u32) {
        match justif {
            Justif::By { refs, line, col } => {
                let premises = self.resolve_refs(refs);
                self.emit_inference(*line, *col, goal.clone(), premises);
            }
            Justif::Proof { block } => {
                if !block.skipped {
                    self.check_block(block, Thesis::Stmt(goal.clone()), depth + 1);
                }
            }
        }
    }

    /// Substitutes let-bound variables with their fresh constants.
    fn resolve_statement(&self, s: &Statement) -> Statement {
        let mut shadow = BTreeSet::new();
        self.resolve_stmt_inner(s, &mut shadow)
    }

    fn resolve_stmt_inner(&self, s: &Statement, shadow: &mut BTreeSet<String>) -> Statement {
        match s {
            Statement::Forall { var, ty, body, line, col } => {
                let added = shadow.insert(var.clone());
                let body = Box::new(self.resolve_stmt_inner(body, shadow));
                if added {
                    shadow.remove(var);
                }
                Statement::Forall { var: var.clone(), ty: ty.clone(), body, line: *line, col: *col }
            }
            Statement::Implies { lhs, rhs } => Statement::Implies {
                lhs: self.resolve_formula(lhs, shadow),
                rhs: self.resolve_formula(rhs, shadow),
            },
            Statement::Plain { formula } => {
                Statement::Plain { formula: self.resolve_formula(formula, shadow) }
            }
        }
    }

    fn resolve_formula(
        &self,
        f: &crate::language::Formula,
        shadow: &BTreeSet<String>,
    ) -> crate::language::Formula {
        crate::language::Formula {
            disjuncts: f
                .disjuncts
                .iter()
                .map(|c| crate::language::Conj {
                    lits: c
                        .lits
                        .iter()
                        .map(|l| crate::language::Lit {
                            neg: l.neg,
                            atom: self.resolve_atom(&l.atom, shadow),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    fn resolve_atom(
        &self,
        a: &crate::language::Atom,
        shadow: &BTreeSet<String>,
    ) -> crate::language::Atom {
        use crate::language::Atom;
        match a {
            Atom::Pred { name, args, line, col } => Atom::Pred {
                name: name.clone(),
                args: args.iter().map(|t| self.resolve_term(t, shadow)).collect(),
                line: *line,
                col: *col,
            },
            Atom::Eq { lhs, rhs, line, col } => Atom::Eq {
                lhs: self.resolve_term(lhs, shadow),
                rhs: self.resolve_term(rhs, shadow),
                line: *line,
                col: *col,
            },
            Atom::Is { term, adj, line, col } => Atom::Is {
                term: self.resolve_term(term, shadow),
                adj: adj.clone(),
                line: *line,
                col: *col,
            },
        }
    }

    fn resolve_term(&self, t: &Term, shadow: &BTreeSet<String>) -> Term {
        match t {
            Term::Const { name, line, col } => {
                if shadow.contains(name) {
                    return t.clone();
                }
                for frame in self.bindings.iter().rev() {
                    if let Some(fresh) = frame.get(name) {
                        return Term::Const { name: fresh.clone(), line: *line, col: *col };
                    }
                }
                t.clone()
            }
            Term::App { name, args, line, col } => Term::App {
                name: name.clone(),
                args: args.iter().map(|a| self.resolve_term(a, shadow)).collect(),
                line: *line,
                col: *col,
            },
        }
    }

    fn type_statement(&mut self, s: &Statement, bound: &mut BTreeMap<String, String>) {
        match s {
            Statement::Forall { var, ty, body, line, col } => {
                if !self.env.types.contains(ty) {
                    self.errors.push(ErrorRecord::new(*line, *col, codes::FORMULA));
                }
                let prev = bound.insert(var.clone(), ty.clone());
                self.type_statement(body, bound);
                match prev {
                    Some(p) => {
                        bound.insert(var.clone(), p);
                    }
                    None => {
                        bound.remove(var);
                    }
                }
            }
            Statement::Implies { lhs, rhs } => {
                self.type_formula(lhs, bound);
                self.type_formula(rhs, bound);
            }
            Statement::Plain { formula } => self.type_formula(formula, bound),
        }
    }

    fn type_formula(&mut self, f: &crate::language::Formula, bound: &BTreeMap<String, String>) {
        use crate::language::Atom;
        for conj in &f.disjuncts {
            for lit in &conj.lits {
                match &lit.atom {
                    Atom::Pred { name, args, line, col } => {
                        match self.env.preds.get(name) {
                            Some(sig) if sig.len() == args.len() => {}
                            _ => self.errors.push(ErrorRecord::new(*line, *col, codes::FORMULA)),
                        }
                        for t in args {
                            self.type_term(t, bound);
                        }
                    }
                    Atom::Eq { lhs, rhs, .. } => {
                        self.type_term(lhs, bound);
                        self.type_term(rhs, bound);
                    }
                    Atom::Is { term, .. } => {
                        self.type_term(term, bound);
                    }
                }
            }
        }
    }

    /// Recursive term typing with per-scope memoization. Returns
    /// `(base_type, adjectives, is_ground)`; only ground terms are cached
    /// and counted as type work units. The distinct-per-scope counters are
    /// maintained whether or not the cache can serve the result, so a warm
    /// or disabled cache changes its own traffic stats but never the
    /// emitted work counters.
    fn type_term(
        &mut self,
        term: &Term,
        bound: &BTreeMap<String, String>,
    ) -> Option<(String, BTreeSet<String>, bool)> {
        if term_has_var(term, bound) {
            return self.type_open_term(term, bound);
        }
        let key = term_key(term);
        let first_in_scope = {
            let seen = match &mut self.proof_scope {
                Some((_, s)) => s,
                None => &mut self.preamble_seen,
            };
            seen.insert(key.clone())
        };
        if first_in_scope {
            self.counters.type_misses += 1;
        }
        let cached = match &mut self.proof_scope {
            Some((c, _)) => c.get(&key),
            None => self.caller_cache.get(&key),
        };
        let (base, adjs, firings) = match cached {
            Some(v) => v,
            None => {
                let (name, args, line, col) = match term {
                    Term::Const { name, line, col } => (name, &[][..], *line, *col),
                    Term::App { name, args, line, col } => (name, args.as_slice(), *line, *col),
                };
                let mut args_ok = true;
                for a in args {
                    if self.type_term(a, bound).is_none() {
                        args_ok = false;
                    }
                }
                let base = match self.let_consts.get(name).or_else(|| self.env.funcs.get(name)) {
                    Some(ty) => ty.clone(),
                    None => {
                        self.errors.push(ErrorRecord::new(line, col, codes::FORMULA));
                        return None;
                    }
                };
                let (adjs, firings) = apply_clusters(&base, &BTreeSet::new(), &self.env.clusters);
                if !args_ok {
                    return None;
                }
                match &mut self.proof_scope {
                    Some((c, _)) => c.put(key.clone(), base.clone(), adjs.clone(), firings),
                    None => self.caller_cache.put(key.clone(), base.clone(), adjs.clone(), firings),
                }
                (base, adjs, firings)
            }
        };
        if first_in_scope {
            self.counters.cluster_firings += firings;
        }
        if self.typed_keys.insert(key.clone()) {
            self.typed_terms.push(TypedTerm {
                term: key,
                base_type: base.clone(),
                adjectives: adjs.clone(),
            });
        }
        Some((base, adjs, true))
    }

    /// Typing of terms containing quantifier-bound variables: computed
    /// structurally, never cached and never counted as cache work.
    fn type_open_term(
        &mut self,
        term: &Term,
        bound: &BTreeMap<String, String>,
    ) -> Option<(String, BTreeSet<String>, bool)> {
        let (name, args, line, col) = match term {
            Term::Const { name, line, col } => (name, &[][..], *line, *col),
            Term::App { name, args, line, col } => (name, args.as_slice(), *line, *col),
        };
        let mut args_ok = true;
        for a in args {
            if self.type_term(a, bound).is_none() {
                args_ok = false;
            }
        }
        let base = if args.is_empty() {
            match bound.get(name) {
                Some(ty) => ty.clone(),
                None => unreachable!("open constant must be a bound variable"),
            }
        } else {
            match self.env.funcs.get(name) {
                Some(ty) => ty.clone(),
                None => {
                    self.errors.push(ErrorRecord::new(line, col, codes::FORMULA));
                    return None;
                }
            }
        };
        let (adjs, firings) = apply_clusters(&base, &BTreeSet::new(), &self.env.clusters);
        self.counters.cluster_firings += firings;
        if !args_ok {
            return None;
        }
        Some((base, adjs, false))
    }
}

/// Public single-term typing, the memoized recursive operation behind the
/// analyzer. Errors are reported as a code-3 record at the term position.
pub fn infer_type(
    term: &Term,
    env: &Environment,
    cache: &mut TypeCache,
) -> Result<TypedTerm, ErrorRecord> {
    let mut st = Analyzer {
        env: env.clone(),
        caller_cache: cache,
        preamble_seen: BTreeSet::new(),
        proof_scope: None,
        scope_hits: 0,
        scope_misses: 0,
        let_consts: BTreeMap::new(),
        let_ordinal: 0,
        bindings: Vec::new(),
        labels: vec![BTreeMap::new()],
        counters: AnalyzerCounters::default(),
        typed_terms: Vec::new(),
        typed_keys: BTreeSet::new(),
        errors: Vec::new(),
        inferences: Vec::new(),
        exports: Vec::new(),
    };
    let bound = BTreeMap::new();
    match st.type_term(term, &bound) {
        Some((base, adjs, _)) => {
            Ok(TypedTerm { term: term_key(term), base_type: base, adjectives: adjs })
        }
        None => Err(st.errors[0]),
    }
}

fn term_has_var(t: &Term, bound: &BTreeMap<String, String>) -> bool {
    match t {
        Term::Const { name, .. } => bound.contains_key(name),
        Term::App { args, .. } => args.iter().any(|a| term_has_var(a, bound)),
    }
}

fn substitute(s: &Statement, var: &str, fresh: &str) -> Statement {
    match s {
        Statement::Forall { var: v, ty, body, line, col } => {
            if v == var {
                // Inner binder shadows the substituted variable.
                s.clone()
            } else {
                Statement::Forall {
                    var: v.clone(),
                    ty: ty.clone(),
                    body: Box::new(substitute(body, var, fresh)),
                    line: *line,
                    col: *col,
                }
            }
        }
        Statement::Implies { lhs, rhs } => Statement::Implies {
            lhs: subst_formula(lhs, var, fresh),
            rhs: subst_formula(rhs, var, fresh),
        },
        Statement::Plain { formula } => {
            Statement::Plain { formula: subst_formula(formula, var, fresh) }
        }
    }
}

fn subst_formula(f: &crate::language::Formula, var: &str, fresh: &str) -> crate::language::Formula {
    use crate::language::{Atom, Conj, Formula, Lit};
    Formula {
        disjuncts: f
            .disjuncts
            .iter()
            .map(|c| Conj {
                lits: c
                    .lits
                    .iter()
                    .map(|l| Lit {
                        neg: l.neg,
                        atom: match &l.atom {
                            Atom::Pred { name, args, line, col } => Atom::Pred {
                                name: name.clone(),
                                args: args.iter().map(|t| subst_term(t, var, fresh)).collect(),
                                line: *line,
                                col: *col,
                            },
                            Atom::Eq { lhs, rhs, line, col } => Atom::Eq {
                                lhs: subst_term(lhs, var, fresh),
                                rhs: subst_term(rhs, var, fresh),
                                line: *line,
                                col: *col,
                            },
                            Atom::Is { term, adj, line, col } => Atom::Is {
                                term: subst_term(term, var, fresh),
                                adj: adj.clone(),
                                line: *line,
                                col: *col,
                            },
                        },
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn subst_term(t: &Term, var: &str, fresh: &str) -> Term {
    match t {
        Term::Const { name, line, col } if name == var => {
            Term::Const { name: fresh.to_string(), line: *line, col: *col }
        }
        Term::Const { .. } => t.clone(),
        Term::App { name, args, line, col } => Term::App {
            name: name.clone(),
            args: args.iter().map(|a| subst_term(a, var, fresh)).collect(),
            line: *line,
            col: *col,
        },
    }
}
