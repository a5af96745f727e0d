//! Signed rooted forests: vertex `i` has at most one parent, and the edge to
//! the parent carries a sign. A Fano Bott matrix and its forest determine
//! each other once labels satisfy `parent(i) > i`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::matrix::{FanoBottMatrix, PhiSigma};
use crate::perm::Permutation;
use crate::sign::Sign;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("parent {} of vertex {} is out of range", .parent + 1, .vertex + 1)]
    ParentOutOfRange { vertex: usize, parent: usize },
    #[error("vertex {} lies on a cycle", .vertex + 1)]
    Cycle { vertex: usize },
    #[error("vertex {} has a parent with a smaller label", .vertex + 1)]
    LabelOrderViolated { vertex: usize },
    #[error("vertex {} is not a leaf", .vertex + 1)]
    NotALeaf { vertex: usize },
    #[error("vertex {} does not exist", .vertex + 1)]
    NoSuchVertex { vertex: usize },
    #[error("a broom needs a handle of length at least 1 and at least two leaves")]
    InvalidBroom,
}

/// The edge from a non-root vertex to its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub parent: usize,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedRootedForest {
    edges: Vec<Option<Edge>>,
}

/// Which symmetries a canonical code forgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeMode {
    /// Rooted-forest isomorphism; signs are ignored.
    RootedIso,
    /// Isomorphism plus flipping all child-edge signs of any one vertex.
    Variety,
    /// As `Variety`, and each root-adjacent edge may also flip on its own.
    Diffeo,
}

impl CodeMode {
    pub fn name(self) -> &'static str {
        match self {
            CodeMode::RootedIso => "rooted",
            CodeMode::Variety => "variety",
            CodeMode::Diffeo => "diffeo",
        }
    }

    pub fn parse(s: &str) -> Option<CodeMode> {
        match s {
            "rooted" | "rooted-iso" => Some(CodeMode::RootedIso),
            "variety" => Some(CodeMode::Variety),
            "diffeo" => Some(CodeMode::Diffeo),
            _ => None,
        }
    }
}

/// Canonical code of one subtree: the sorted list of `(child code, edge
/// sign)` tokens. A leaf is the empty list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeNode {
    children: Vec<(CodeNode, Option<Sign>)>,
}

impl CodeNode {
    pub fn leaf() -> Self {
        CodeNode {
            children: Vec::new(),
        }
    }

    pub fn children(&self) -> &[(CodeNode, Option<Sign>)] {
        &self.children
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|(c, _)| c.size()).sum::<usize>()
    }

    fn write_to(&self, out: &mut String) {
        out.push('(');
        for (child, sign) in &self.children {
            if let Some(s) = sign {
                out.push_str(s.symbol());
            }
            child.write_to(out);
        }
        out.push(')');
    }
}

/// Canonical form of a whole forest under a [`CodeMode`]: the sorted
/// multiset of root codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    mode: CodeMode,
    roots: Vec<CodeNode>,
}

impl CanonicalCode {
    pub fn mode(&self) -> CodeMode {
        self.mode
    }

    pub fn roots(&self) -> &[CodeNode] {
        &self.roots
    }

    pub fn size(&self) -> usize {
        self.roots.iter().map(CodeNode::size).sum()
    }
}

impl fmt::Display for CanonicalCode {
    /// Balanced-parenthesis rendering; each child is prefixed by its edge
    /// sign when the mode keeps it.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for r in &self.roots {
            r.write_to(&mut s);
        }
        f.write_str(&s)
    }
}

/// Per-vertex codes together with the orientation decisions that realise
/// them: `flip[v]` is set when flipping every child edge of `v` reaches the
/// smaller token list.
pub(crate) struct Orientation {
    pub codes: Vec<CodeNode>,
    pub flip: Vec<bool>,
}

impl SignedRootedForest {
    /// Builds a forest from per-vertex `(parent, sign)` entries, `None` at
    /// roots. Rejects dangling parents and cycles.
    pub fn new(edges: Vec<Option<(usize, Sign)>>) -> Result<Self, ForestError> {
        let d = edges.len();
        let edges: Vec<Option<Edge>> = edges
            .into_iter()
            .map(|e| e.map(|(parent, sign)| Edge { parent, sign }))
            .collect();
        for (v, e) in edges.iter().enumerate() {
            if let Some(e) = e {
                if e.parent >= d {
                    return Err(ForestError::ParentOutOfRange {
                        vertex: v,
                        parent: e.parent,
                    });
                }
            }
        }
        // 0 = unvisited, 1 = on current walk, 2 = reaches a root
        let mut state = vec![0u8; d];
        for start in 0..d {
            let mut walk = Vec::new();
            let mut v = start;
            loop {
                match state[v] {
                    2 => break,
                    1 => return Err(ForestError::Cycle { vertex: v }),
                    _ => {}
                }
                state[v] = 1;
                walk.push(v);
                match edges[v] {
                    Some(e) => v = e.parent,
                    None => break,
                }
            }
            for w in walk {
                state[w] = 2;
            }
        }
        Ok(Self { edges })
    }

    pub fn empty() -> Self {
        Self { edges: Vec::new() }
    }

    /// `d` isolated roots.
    pub fn isolated(d: usize) -> Self {
        Self {
            edges: vec![None; d],
        }
    }

    /// A broom: a handle path `v_0 - v_1 - ... - v_p` rooted at `v_0`, with
    /// one leaf `w_j` under `v_p` per entry of `leaf_signs`. Handle edges are
    /// `+`. Labels follow the order `w_1, ..., w_q, v_p, ..., v_0`, which is
    /// already label-ordered.
    pub fn broom(handle: usize, leaf_signs: &[Sign]) -> Result<Self, ForestError> {
        if handle == 0 || leaf_signs.len() < 2 {
            return Err(ForestError::InvalidBroom);
        }
        let q = leaf_signs.len();
        let mut edges: Vec<Option<(usize, Sign)>> =
            leaf_signs.iter().map(|&s| Some((q, s))).collect();
        for i in 0..handle {
            edges.push(Some((q + i + 1, Sign::Plus)));
        }
        edges.push(None);
        Self::new(edges)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edge(&self, v: usize) -> Option<Edge> {
        self.edges[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.edges[v].map(|e| e.parent)
    }

    pub fn sign(&self, v: usize) -> Option<Sign> {
        self.edges[v].map(|e| e.sign)
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.edges[v].is_none()
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.size()).filter(|&v| self.is_root(v)).collect()
    }

    /// Children of every vertex, each list in ascending label order.
    pub fn children_lists(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.size()];
        for (v, e) in self.edges.iter().enumerate() {
            if let Some(e) = e {
                ch[e.parent].push(v);
            }
        }
        ch
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.size()).filter(|&c| self.parent(c) == Some(v)).collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut has_child = vec![false; self.size()];
        for e in self.edges.iter().flatten() {
            has_child[e.parent] = true;
        }
        (0..self.size()).filter(|&v| !has_child[v]).collect()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.edges.iter().flatten().all(|e| e.parent != v)
    }

    /// `v` and all of its descendants, ascending.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        (0..self.size())
            .filter(|&start| {
                let mut w = start;
                loop {
                    if w == v {
                        return true;
                    }
                    match self.parent(w) {
                        Some(p) => w = p,
                        None => return false,
                    }
                }
            })
            .collect()
    }

    /// True when every edge points to a larger label.
    pub fn is_label_ordered(&self) -> bool {
        self.edges
            .iter()
            .enumerate()
            .all(|(v, e)| e.is_none_or(|e| e.parent > v))
    }

    /// Vertices ordered so that every child precedes its parent.
    pub fn postorder(&self) -> Vec<usize> {
        let ch = self.children_lists();
        let mut out = Vec::with_capacity(self.size());
        let mut stack: Vec<(usize, bool)> =
            self.roots().into_iter().rev().map(|r| (r, false)).collect();
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                out.push(v);
            } else {
                stack.push((v, true));
                for &c in ch[v].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn from_phi_sigma(ps: &PhiSigma) -> Self {
        Self {
            edges: (0..ps.dim())
                .map(|i| ps.parent(i).map(|(parent, sign)| Edge { parent, sign }))
                .collect(),
        }
    }

    pub fn to_phi_sigma(&self) -> Result<PhiSigma, ForestError> {
        let d = self.size();
        if let Some(v) = (0..d).find(|&v| self.parent(v).is_some_and(|p| p < v)) {
            return Err(ForestError::LabelOrderViolated { vertex: v });
        }
        let phi = (0..d).map(|v| self.parent(v).unwrap_or(d)).collect();
        let sigma = (0..d).map(|v| self.sign(v)).collect();
        Ok(PhiSigma::new(phi, sigma).expect("label-ordered forest gives a valid phi"))
    }

    /// The forest `T_A` of a Fano Bott matrix.
    pub fn from_matrix(a: &FanoBottMatrix) -> Self {
        Self::from_phi_sigma(&a.to_phi_sigma())
    }

    /// The Fano Bott matrix of a label-ordered forest.
    pub fn to_matrix(&self) -> Result<FanoBottMatrix, ForestError> {
        Ok(FanoBottMatrix::from_phi_sigma(&self.to_phi_sigma()?))
    }

    /// Renames vertex `i` to `perm(i)`.
    pub fn relabel(&self, perm: &Permutation) -> Self {
        assert_eq!(perm.len(), self.size(), "permutation size mismatch");
        let mut edges = vec![None; self.size()];
        for (v, e) in self.edges.iter().enumerate() {
            edges[perm.apply(v)] = e.map(|e| Edge {
                parent: perm.apply(e.parent),
                sign: e.sign,
            });
        }
        Self { edges }
    }

    /// Relabels so that `parent(i) > i`, returning the new forest and the
    /// map `old -> new`. New labels are handed out by repeatedly taking the
    /// smallest old label whose children have all been labelled, so an
    /// already ordered forest gets the identity.
    pub fn relabel_topological(&self) -> (Self, Permutation) {
        let d = self.size();
        let mut pending: Vec<usize> = vec![0; d];
        for e in self.edges.iter().flatten() {
            pending[e.parent] += 1;
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..d).filter(|&v| pending[v] == 0).map(Reverse).collect();
        let mut images = vec![0; d];
        let mut next = 0;
        while let Some(Reverse(v)) = ready.pop() {
            images[v] = next;
            next += 1;
            if let Some(p) = self.parent(v) {
                pending[p] -= 1;
                if pending[p] == 0 {
                    ready.push(Reverse(p));
                }
            }
        }
        let perm = Permutation::from_images(images).expect("every vertex is labelled once");
        (self.relabel(&perm), perm)
    }

    /// Removes leaf `v`; labels above `v` shift down by one.
    pub fn leaf_cut(&self, v: usize) -> Result<Self, ForestError> {
        if v >= self.size() {
            return Err(ForestError::NoSuchVertex { vertex: v });
        }
        if !self.is_leaf(v) {
            return Err(ForestError::NotALeaf { vertex: v });
        }
        let shift = |w: usize| if w > v { w - 1 } else { w };
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(w, _)| w != v)
            .map(|(_, e)| {
                e.map(|e| Edge {
                    parent: shift(e.parent),
                    sign: e.sign,
                })
            })
            .collect();
        Ok(Self { edges })
    }

    /// Flips the signs of all edges from `v` to its children.
    pub fn with_children_flipped(&self, v: usize) -> Self {
        let mut out = self.clone();
        for e in out.edges.iter_mut().flatten() {
            if e.parent == v {
                e.sign = e.sign.flip();
            }
        }
        out
    }

    /// Flips the sign of the edge from `child` to its parent.
    pub fn with_edge_flipped(&self, child: usize) -> Self {
        let mut out = self.clone();
        if let Some(e) = out.edges[child].as_mut() {
            e.sign = e.sign.flip();
        }
        out
    }

    pub(crate) fn orientation(&self, mode: CodeMode) -> Orientation {
        let d = self.size();
        let ch = self.children_lists();
        let mut codes: Vec<Option<CodeNode>> = vec![None; d];
        let mut flip = vec![false; d];
        for v in self.postorder() {
            let keep_signs = match mode {
                CodeMode::RootedIso => false,
                CodeMode::Variety => true,
                CodeMode::Diffeo => !self.is_root(v),
            };
            let token = |c: usize, flipped: bool| {
                let code = codes[c].clone().expect("children precede parents");
                let sign = keep_signs.then(|| {
                    let s = self.sign(c).expect("child has an edge");
                    if flipped {
                        s.flip()
                    } else {
                        s
                    }
                });
                (code, sign)
            };
            let mut plain: Vec<_> = ch[v].iter().map(|&c| token(c, false)).collect();
            plain.sort();
            let node = if keep_signs {
                let mut flipped: Vec<_> = ch[v].iter().map(|&c| token(c, true)).collect();
                flipped.sort();
                if flipped < plain {
                    flip[v] = true;
                    flipped
                } else {
                    plain
                }
            } else {
                plain
            };
            codes[v] = Some(CodeNode { children: node });
        }
        Orientation {
            codes: codes
                .into_iter()
                .map(|c| c.expect("postorder covers every vertex"))
                .collect(),
            flip,
        }
    }

    pub fn canonical_code(&self, mode: CodeMode) -> CanonicalCode {
        let orient = self.orientation(mode);
        let mut roots: Vec<CodeNode> = self
            .roots()
            .into_iter()
            .map(|r| orient.codes[r].clone())
            .collect();
        roots.sort();
        CanonicalCode { mode, roots }
    }

    pub fn equivalent(&self, other: &Self, mode: CodeMode) -> bool {
        self.size() == other.size() && self.canonical_code(mode) == other.canonical_code(mode)
    }

    /// Labels derived from the code structure: roots in code order, children
    /// sorted by `(code, current sign)`, labels assigned in postorder.
    ///
    /// Two forests whose signs have been brought to their canonical
    /// orientation land on the same labelled forest.
    pub(crate) fn canonical_labeling(&self, mode: CodeMode) -> Permutation {
        let orient = self.orientation(mode);
        let ch = self.children_lists();
        let key = |v: usize| (orient.codes[v].clone(), self.sign(v));
        let mut roots = self.roots();
        roots.sort_by_cached_key(|&r| key(r));
        let mut images = vec![0; self.size()];
        let mut next = 0;
        let mut stack: Vec<(usize, bool)> = roots.into_iter().rev().map(|r| (r, false)).collect();
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                images[v] = next;
                next += 1;
            } else {
                stack.push((v, true));
                let mut kids = ch[v].clone();
                kids.sort_by_cached_key(|&c| key(c));
                for c in kids.into_iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        Permutation::from_images(images).expect("postorder labels every vertex once")
    }

    /// Graphviz rendering: edges point from parent to child and carry their
    /// sign, roots are drawn as double circles.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph forest {\n  node [shape=circle];\n");
        for v in 0..self.size() {
            let shape = if self.is_root(v) {
                ", shape=doublecircle"
            } else {
                ""
            };
            writeln!(s, "  v{0} [label=\"v{0}\"{1}];", v + 1, shape).unwrap();
        }
        for (v, e) in self.edges.iter().enumerate() {
            if let Some(e) = e {
                writeln!(s, "  v{} -> v{} [label=\"{}\"];", e.parent + 1, v + 1, e.sign).unwrap();
            }
        }
        s.push_str("}\n");
        s
    }
}
