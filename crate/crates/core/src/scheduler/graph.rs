use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::Article;

/// Per-article pass chain, in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pass {
    Accommodate,
    Parse,
    Analyze,
    Check,
    Render,
}

pub const PASS_CHAIN: [Pass; 5] =
    [Pass::Accommodate, Pass::Parse, Pass::Analyze, Pass::Check, Pass::Render];

impl Pass {
    pub fn label(&self) -> &'static str {
        match self {
            Pass::Accommodate => "accommodate",
            Pass::Parse => "parse",
            Pass::Analyze => "analyze",
            Pass::Check => "check",
            Pass::Render => "render",
        }
    }

    pub fn parse_label(s: &str) -> Option<Pass> {
        PASS_CHAIN.into_iter().find(|p| p.label() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskNode {
    pub article: String,
    pub pass: Pass,
    pub cost: u64,
}

/// Dependency DAG of (article, pass) targets: passes chain within an
/// article, and an article's accommodation depends on the analysis of
/// every article it uses (its exports must exist).
#[derive(Debug, Clone)]
pub struct TaskGraph {
    pub nodes: Vec<TaskNode>,
    pub preds: Vec<Vec<usize>>,
    pub succs: Vec<Vec<usize>>,
}

impl TaskGraph {
    pub fn node_index(&self, article: &str, pass: Pass) -> Option<usize> {
        self.nodes.iter().position(|n| n.article == article && n.pass == pass)
    }

    /// Longest path through the DAG by cost (the j = infinity makespan).
    pub fn critical_path(&self) -> u64 {
        let order = self.topological_order();
        let mut dist = vec![0u64; self.nodes.len()];
        let mut best = 0;
        for &v in &order {
            let base = self.preds[v].iter().map(|&p| dist[p]).max().unwrap_or(0);
            dist[v] = base + self.nodes[v].cost;
            best = best.max(dist[v]);
        }
        best
    }

    pub fn topological_order(&self) -> Vec<usize> {
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> =
            (0..self.nodes.len()).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = ready.pop() {
            order.push(v);
            for &s in &self.succs[v] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.push(s);
                }
            }
        }
        debug_assert_eq!(order.len(), self.nodes.len(), "graph is acyclic");
        order
    }
}

/// Builds the corpus task graph. Missing `uses` targets are code 96,
/// dependency cycles code 97 (reporting the cycle).
pub fn build_graph(corpus: &[Article]) -> Result<TaskGraph> {
    let by_name: BTreeMap<&str, &Article> =
        corpus.iter().map(|a| (a.name.as_str(), a)).collect();
    for article in corpus {
        for dep in &article.uses {
            if !by_name.contains_key(dep.as_str()) {
                return Err(Error::MissingArticle(dep.clone()));
            }
        }
    }
    if let Some(cycle) = find_uses_cycle(corpus) {
        return Err(Error::DependencyCycle { cycle });
    }

    let mut nodes = Vec::new();
    let mut index = BTreeMap::new();
    let mut names: Vec<&str> = by_name.keys().copied().collect();
    names.sort_unstable();
    for name in &names {
        let article = by_name[name];
        let cost = article.source.lines().count() as u64;
        for pass in PASS_CHAIN {
            index.insert((name.to_string(), pass), nodes.len());
            nodes.push(TaskNode { article: name.to_string(), pass, cost });
        }
    }
    let mut preds = vec![Vec::new(); nodes.len()];
    let mut succs = vec![Vec::new(); nodes.len()];
    let add_edge = |from: usize, to: usize, preds: &mut Vec<Vec<usize>>, succs: &mut Vec<Vec<usize>>| {
        preds[to].push(from);
        succs[from].push(to);
    };
    for name in &names {
        for w in PASS_CHAIN.windows(2) {
            let from = index[&(name.to_string(), w[0])];
            let to = index[&(name.to_string(), w[1])];
            add_edge(from, to, &mut preds, &mut succs);
        }
        for dep in &by_name[name].uses {
            let from = index[&(dep.clone(), Pass::Analyze)];
            let to = index[&(name.to_string(), Pass::Accommodate)];
            add_edge(from, to, &mut preds, &mut succs);
        }
    }
    Ok(TaskGraph { nodes, preds, succs })
}

fn find_uses_cycle(corpus: &[Article]) -> Option<Vec<String>> {
    let deps: BTreeMap<&str, &Vec<String>> =
        corpus.iter().map(|a| (a.name.as_str(), &a.uses)).collect();
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut marks: BTreeMap<&str, Mark> = deps.keys().map(|&k| (k, Mark::White)).collect();
    let mut stack: Vec<&str> = Vec::new();

    fn visit<'a>(
        v: &'a str,
        deps: &BTreeMap<&'a str, &'a Vec<String>>,
        marks: &mut BTreeMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        marks.insert(v, Mark::Grey);
        stack.push(v);
        for dep in deps[v].iter() {
            match marks.get(dep.as_str()) {
                Some(Mark::Grey) => {
                    let pos = stack.iter().position(|&s| s == dep.as_str()).unwrap();
                    let mut cycle: Vec<String> =
                        stack[pos..].iter().map(|s| s.to_string()).collect();
                    cycle.push(dep.clone());
                    return Some(cycle);
                }
                Some(Mark::White) => {
                    if let Some(c) = visit(dep.as_str(), deps, marks, stack) {
                        return Some(c);
                    }
                }
                _ => {}
            }
        }
        stack.pop();
        marks.insert(v, Mark::Black);
        None
    }

    let names: Vec<&str> = deps.keys().copied().collect();
    for name in names {
        if marks[name] == Mark::White {
            if let Some(c) = visit(name, &deps, &mut marks, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

/// Loads every `.mz` file of a corpus directory, sorted by name.
pub fn load_corpus(dir: &Path) -> Result<Vec<Article>> {
    let mut articles = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "mz"))
        .collect();
    paths.sort();
    for path in paths {
        let name = crate::parallelizer::article_name_of(&path)?;
        let source = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        articles.push(Article::from_source(name, source)?);
    }
    Ok(articles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn art(name: &str, uses: &[&str]) -> Article {
        let uses_line = if uses.is_empty() {
            String::new()
        } else {
            format!("uses {};\n", uses.join(", "))
        };
        Article::from_source(
            name,
            format!("environ\n{uses_line}type real;\nfunc a -> real;\npred p(real);\nbegin\ntheorem {name}_t0: p(a) implies p(a)\nproof\nassume h: p(a);\nthus p(a) by h;\nend;\n"),
        )
        .unwrap()
    }

    #[test]
    fn single_article_is_a_five_node_chain() {
        let g = build_graph(&[art("a1", &[])]).unwrap();
        assert_eq!(g.nodes.len(), 5);
        for (i, pass) in PASS_CHAIN.iter().enumerate() {
            assert_eq!(g.nodes[i].pass, *pass);
            if i > 0 {
                assert_eq!(g.preds[i], vec![i - 1]);
            }
        }
    }

    #[test]
    fn uses_edge_connects_analyze_to_accommodate() {
        let g = build_graph(&[art("a1", &[]), art("b1", &["a1"])]).unwrap();
        let analyze_a = g.node_index("a1", Pass::Analyze).unwrap();
        let acc_b = g.node_index("b1", Pass::Accommodate).unwrap();
        assert!(g.succs[analyze_a].contains(&acc_b));
    }

    #[test]
    fn missing_article_is_code_96() {
        let err = build_graph(&[art("a1", &["ghost"])]).unwrap_err();
        assert!(matches!(err, Error::MissingArticle(name) if name == "ghost"));
    }

    #[test]
    fn cycle_is_code_97_with_the_cycle() {
        let err = build_graph(&[art("a1", &["b1"]), art("b1", &["a1"])]).unwrap_err();
        let Error::DependencyCycle { cycle } = err else { panic!("expected cycle") };
        assert!(cycle.len() >= 3);
        assert_eq!(cycle.first(), cycle.last());
        assert!(cycle.contains(&"a1".to_string()) && cycle.contains(&"b1".to_string()));
    }

    #[test]
    fn critical_path_of_chain_is_total_cost() {
        let g = build_graph(&[art("a1", &[])]).unwrap();
        let per_node = g.nodes[0].cost;
        assert_eq!(g.critical_path(), 5 * per_node);
    }
}
