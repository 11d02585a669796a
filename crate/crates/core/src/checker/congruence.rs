//! Congruence closure over ground terms: union-find plus propagation of
//! equality through argument-wise equal applications of the same symbol.

use std::collections::BTreeMap;

use super::formula::CTerm;

#[derive(Debug, Clone, Default)]
pub struct CongruenceState {
    terms: Vec<CTerm>,
    index: BTreeMap<CTerm, usize>,
    parent: Vec<usize>,
    disequalities: Vec<(usize, usize)>,
    closed: bool,
}

impl CongruenceState {
    pub fn new() -> CongruenceState {
        CongruenceState::default()
    }

    /// Interns a term and all of its subterms.
    pub fn intern(&mut self, t: &CTerm) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        for a in &t.args {
            self.intern(a);
        }
        let i = self.terms.len();
        self.terms.push(t.clone());
        self.index.insert(t.clone(), i);
        self.parent.push(i);
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Lower intern index wins: keeps representatives deterministic.
            let (keep, merge) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[merge] = keep;
            self.closed = false;
        }
    }

    pub fn assert_equal(&mut self, s: &CTerm, t: &CTerm) {
        let (a, b) = (self.intern(s), self.intern(t));
        self.union(a, b);
    }

    pub fn assert_unequal(&mut self, s: &CTerm, t: &CTerm) {
        let (a, b) = (self.intern(s), self.intern(t));
        self.disequalities.push((a, b));
    }

    /// Propagates congruence to a fixpoint: any two applications of the same
    /// symbol with pairwise-merged arguments are merged.
    pub fn close(&mut self) {
        while !self.closed {
            self.closed = true;
            for i in 0..self.terms.len() {
                if self.terms[i].args.is_empty() {
                    continue;
                }
                for j in (i + 1)..self.terms.len() {
                    if self.terms[i].name != self.terms[j].name
                        || self.terms[i].args.len() != self.terms[j].args.len()
                    {
                        continue;
                    }
                    if self.find(i) == self.find(j) {
                        continue;
                    }
                    let argwise = (0..self.terms[i].args.len()).all(|k| {
                        let a = self.index[&self.terms[i].args[k]];
                        let b = self.index[&self.terms[j].args[k]];
                        self.find(a) == self.find(b)
                    });
                    if argwise {
                        self.union(i, j);
                    }
                }
            }
        }
    }

    pub fn congruent(&mut self, s: &CTerm, t: &CTerm) -> bool {
        let (a, b) = (self.intern(s), self.intern(t));
        self.close();
        self.find(a) == self.find(b)
    }

    /// True when some recorded disequality collapsed into a single class.
    pub fn inconsistent(&mut self) -> bool {
        self.close();
        let pairs = self.disequalities.clone();
        pairs.into_iter().any(|(a, b)| self.find(a) == self.find(b))
    }

    /// All interned terms congruent to `t`, in intern order.
    pub fn class_of(&mut self, t: &CTerm) -> Vec<CTerm> {
        let i = self.intern(t);
        self.close();
        let r = self.find(i);
        let mut members = Vec::new();
        for j in 0..self.terms.len() {
            if self.find(j) == r {
                members.push(self.terms[j].clone());
            }
        }
        members
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(name: &str) -> CTerm {
        CTerm { name: name.into(), args: vec![] }
    }

    fn app(name: &str, args: Vec<CTerm>) -> CTerm {
        CTerm { name: name.into(), args }
    }

    #[test]
    fn transitive_chain() {
        let mut cc = CongruenceState::new();
        cc.assert_equal(&c("a"), &c("b"));
        cc.assert_equal(&c("b"), &c("c"));
        assert!(cc.congruent(&c("a"), &c("c")));
        assert!(!cc.congruent(&c("a"), &c("d")));
    }

    #[test]
    fn congruence_through_application() {
        let mut cc = CongruenceState::new();
        let fa = app("f", vec![c("a")]);
        let fb = app("f", vec![c("b")]);
        cc.intern(&fa);
        cc.intern(&fb);
        cc.assert_equal(&c("a"), &c("b"));
        assert!(cc.congruent(&fa, &fb));
    }

    #[test]
    fn nested_congruence() {
        let mut cc = CongruenceState::new();
        let ffa = app("f", vec![app("f", vec![c("a")])]);
        let ffb = app("f", vec![app("f", vec![c("b")])]);
        cc.intern(&ffa);
        cc.intern(&ffb);
        cc.assert_equal(&c("a"), &c("b"));
        assert!(cc.congruent(&ffa, &ffb));
    }

    #[test]
    fn disequality_contradiction() {
        let mut cc = CongruenceState::new();
        cc.assert_unequal(&c("a"), &c("c"));
        cc.assert_equal(&c("a"), &c("b"));
        assert!(!cc.inconsistent());
        cc.assert_equal(&c("b"), &c("c"));
        assert!(cc.inconsistent());
    }

    #[test]
    fn reflexivity() {
        let mut cc = CongruenceState::new();
        assert!(cc.congruent(&c("a"), &c("a")));
    }
}
