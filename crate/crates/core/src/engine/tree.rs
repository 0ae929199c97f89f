use alloc::collections::BTreeMap;
use alloc::sync::Arc;

/// Attribute environment of a parsed nonterminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Env {
    pub eoi: i64,
    pub start: i64,
    pub end: i64,
    pub attrs: Arc<BTreeMap<Arc<str>, i64>>,
}

impl Env {
    /// The environment an alternative starts from over an input of `len`
    /// bytes: nothing touched yet.
    pub fn fresh(len: i64) -> Self {
        Env {
            eoi: len,
            start: len,
            end: 0,
            attrs: Arc::default(),
        }
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        match name {
            "EOI" => Some(self.eoi),
            "start" => Some(self.start),
            "end" => Some(self.end),
            _ => self.attrs.get(name).copied(),
        }
    }

    pub fn set(&mut self, name: &str, val: i64) {
        Arc::make_mut(&mut self.attrs).insert(name.into(), val);
    }
}

/// Widens the touched range of `env` to cover `[l, r)` when `touched`.
pub fn upd_start_end(mut env: Env, l: i64, r: i64, touched: bool) -> Env {
    if touched {
        env.start = env.start.min(l);
        env.end = env.end.max(r);
    }
    env
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: Arc<str>,
    pub env: Env,
    /// Children in textual term order.
    pub children: Arc<[ParseTree]>,
}

impl Node {
    /// Shifts `start`/`end` into the coordinates of the parent's input.
    pub fn rebased(mut self, l: i64) -> Node {
        self.env.start += l;
        self.env.end += l;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseTree {
    Node(Node),
    Array(Arc<[ParseTree]>),
    Leaf(Arc<[u8]>),
}

impl ParseTree {
    pub fn as_node(&self) -> Option<&Node> {
        match self {
            ParseTree::Node(n) => Some(n),
            _ => None,
        }
    }

    /// Depth-first, pre-order walk over every node in the tree.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a ParseTree)) {
        f(self);
        match self {
            ParseTree::Node(n) => n.children.iter().for_each(|c| c.walk(f)),
            ParseTree::Array(elems) => elems.iter().for_each(|c| c.walk(f)),
            ParseTree::Leaf(_) => {}
        }
    }

    /// Nodes for nonterminal `name`, in pre-order.
    pub fn find_all<'a>(&'a self, name: &str) -> alloc::vec::Vec<&'a Node> {
        let mut out = alloc::vec::Vec::new();
        self.walk(&mut |t| {
            if let ParseTree::Node(n) = t {
                if &*n.name == name {
                    out.push(n);
                }
            }
        });
        out
    }
}
