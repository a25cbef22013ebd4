//! First-order unification over an index arena. Concrete formulas are opaque
//! leaves: object variables inside them are constants here.

use smallvec::SmallVec;

use crate::syntax::{Formula, Symbol};

#[derive(Debug, Clone)]
enum Node {
    Var,
    Fixed(Formula),
    /// Symbol, then the position and length of the children in `kids`.
    App(Symbol, u32, u32),
}

#[derive(Debug, Default)]
pub(super) struct Terms {
    nodes: Vec<Node>,
    kids: Vec<u32>,
    /// Binding of each variable node.
    subst: Vec<Option<u32>>,
}

impl Terms {
    pub(super) fn clear(&mut self) {
        self.nodes.clear();
        self.kids.clear();
        self.subst.clear();
    }

    fn push(&mut self, n: Node) -> u32 {
        self.nodes.push(n);
        self.subst.push(None);
        (self.nodes.len() - 1) as u32
    }

    pub(super) fn len(&self) -> usize {
        self.nodes.len()
    }

    pub(super) fn var(&mut self) -> u32 {
        self.push(Node::Var)
    }

    pub(super) fn fixed(&mut self, f: Formula) -> u32 {
        self.push(Node::Fixed(f))
    }

    pub(super) fn app(&mut self, s: Symbol, args: &[u32]) -> u32 {
        let start = self.kids.len() as u32;
        self.kids.extend_from_slice(args);
        self.push(Node::App(s, start, args.len() as u32))
    }

    fn kid(&self, start: u32, i: u32) -> u32 {
        self.kids[(start + i) as usize]
    }

    pub(super) fn walk(&self, mut t: u32) -> u32 {
        while let Some(b) = self.subst[t as usize] {
            t = b;
        }
        t
    }

    fn occurs(&self, v: u32, t: u32) -> bool {
        let t = self.walk(t);
        match &self.nodes[t as usize] {
            Node::Var => t == v,
            Node::Fixed(_) => false,
            Node::App(_, k, n) => (0..*n).any(|i| self.occurs(v, self.kid(*k, i))),
        }
    }

    pub(super) fn unify(&mut self, a: u32, b: u32) -> bool {
        let a = self.walk(a);
        let b = self.walk(b);
        if a == b {
            return true;
        }
        match (&self.nodes[a as usize], &self.nodes[b as usize]) {
            (Node::Var, _) => self.bind(a, b),
            (_, Node::Var) => self.bind(b, a),
            (Node::Fixed(f), Node::Fixed(g)) => f == g,
            (Node::Fixed(f), Node::App(..)) => {
                let f = f.clone();
                self.unify_fixed(b, &f)
            }
            (Node::App(..), Node::Fixed(f)) => {
                let f = f.clone();
                self.unify_fixed(a, &f)
            }
            (Node::App(s, k1, n), Node::App(t, k2, _)) => {
                if s != t {
                    return false;
                }
                let (k1, k2, n) = (*k1, *k2, *n);
                (0..n).all(|i| self.unify(self.kid(k1, i), self.kid(k2, i)))
            }
        }
    }

    fn bind(&mut self, v: u32, t: u32) -> bool {
        if self.occurs(v, t) {
            return false;
        }
        self.subst[v as usize] = Some(t);
        true
    }

    fn unify_fixed(&mut self, t: u32, f: &Formula) -> bool {
        let t = self.walk(t);
        match &self.nodes[t as usize] {
            Node::Var => {
                let g = self.fixed(f.clone());
                self.subst[t as usize] = Some(g);
                true
            }
            Node::Fixed(g) => g == f,
            Node::App(s, k, n) => {
                if f.head() != Some(s) {
                    return false;
                }
                let (k, n) = (*k, *n);
                (0..n).all(|i| self.unify_fixed(self.kid(k, i), &f.args()[i as usize]))
            }
        }
    }

    /// A walked term that is already a concrete formula.
    pub(super) fn as_fixed(&self, t: u32) -> Option<&Formula> {
        match &self.nodes[self.walk(t) as usize] {
            Node::Fixed(f) => Some(f),
            _ => None,
        }
    }

    pub(super) fn is_var(&self, t: u32) -> bool {
        matches!(self.nodes[self.walk(t) as usize], Node::Var)
    }

    /// Ordering key for constraints: concrete formulas first, then larger
    /// patterns, then bare variables.
    pub(super) fn rank(&self, t: u32) -> (u8, std::cmp::Reverse<usize>) {
        match &self.nodes[self.walk(t) as usize] {
            Node::Fixed(_) => (0, std::cmp::Reverse(0)),
            Node::App(..) => (1, std::cmp::Reverse(self.nodes_in(t))),
            Node::Var => (2, std::cmp::Reverse(0)),
        }
    }

    fn nodes_in(&self, t: u32) -> usize {
        match &self.nodes[self.walk(t) as usize] {
            Node::App(_, k, n) => 1 + (0..*n).map(|i| self.nodes_in(self.kid(*k, i))).sum::<usize>(),
            _ => 1,
        }
    }

    /// Matches `t` against `f`, binding free variables in `env`.
    pub(super) fn matches(&self, t: u32, f: &Formula, env: &mut [Option<Formula>], trail: &mut Vec<u32>) -> bool {
        let t = self.walk(t);
        match &self.nodes[t as usize] {
            Node::Var => match &env[t as usize] {
                Some(g) => g == f,
                None => {
                    env[t as usize] = Some(f.clone());
                    trail.push(t);
                    true
                }
            },
            Node::Fixed(g) => g == f,
            Node::App(s, k, n) => {
                f.head() == Some(s) && (0..*n).all(|i| self.matches(self.kid(*k, i), &f.args()[i as usize], env, trail))
            }
        }
    }

    /// `None` if a free variable is unbound in `env`.
    pub(super) fn size(&self, t: u32, env: &[Option<Formula>]) -> Option<u32> {
        let t = self.walk(t);
        match &self.nodes[t as usize] {
            Node::Var => env[t as usize].as_ref().map(Formula::size),
            Node::Fixed(f) => Some(f.size()),
            Node::App(_, k, n) => {
                (0..*n).try_fold(1u32, |acc, i| Some(acc.saturating_add(self.size(self.kid(*k, i), env)?)))
            }
        }
    }

    pub(super) fn build(&self, t: u32, env: &[Option<Formula>]) -> Formula {
        let t = self.walk(t);
        match &self.nodes[t as usize] {
            Node::Var => env[t as usize].clone().expect("bound"),
            Node::Fixed(f) => f.clone(),
            Node::App(s, k, n) => {
                let args: SmallVec<[Formula; 2]> = (0..*n).map(|i| self.build(self.kid(*k, i), env)).collect();
                Formula::app_iter(s.clone(), args)
            }
        }
    }
}
