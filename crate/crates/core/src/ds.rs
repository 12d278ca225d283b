//! Dependency structures and head-annotated phrase markers.
//!
//! A [`DependencyStructure`] is a token sequence plus an arbitrary labeled
//! arc set. Deliberately, there is no tree-ness invariant: multiple heads,
//! cycles, and multiple roots are all representable, so that the axiom
//! checks in [`crate::axioms`] can diagnose them instead of the constructor
//! rejecting them. The only structural constraints are valid indices, no
//! self-loops, and no duplicate `(head, dep)` pairs.
//!
//! Three text formats live here: a CoNLL-like column format for tree-shaped
//! structures, a JSON format for general graphs (the only format that can
//! represent multiple heads), and an s-expression format for phrase markers
//! in which the head child of every node carries a `^` prefix.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::grammar::Category;

/// The distinguished label carried by arcs without a function annotation.
pub const UNLABELED: &str = "_";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DsError {
    #[error("token index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("self-loop on token {0}")]
    SelfLoop(usize),
    #[error("duplicate arc ({0},{1})")]
    DuplicateArc(usize, usize),
    #[error("token {0} has an empty form")]
    EmptyForm(usize),
    #[error("token at position {position} has index {index}; indices must be 1..n in order")]
    BadIndexSequence { position: usize, index: usize },
    #[error("structure has a token with multiple heads (token {0})")]
    MultipleHeads(usize),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Malformed(String),
    #[error("structure has multiple heads; the column format cannot represent it (use JSON)")]
    NotATree,
    #[error(transparent)]
    Structure(#[from] DsError),
}

/// One token: 1-based sentence position, word form, and syntactic category.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    pub index: usize,
    pub form: String,
    pub category: Category,
}

impl Token {
    pub fn new(index: usize, form: impl Into<String>, category: Category) -> Result<Self, DsError> {
        let form = form.into();
        if form.is_empty() {
            return Err(DsError::EmptyForm(index));
        }
        if index == 0 {
            return Err(DsError::IndexOutOfRange(0, 0));
        }
        Ok(Token {
            index,
            form,
            category,
        })
    }
}

/// One dependency arc, pointing from the governor to the dependent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub head: usize,
    pub dep: usize,
    pub label: String,
}

impl Arc {
    pub fn new(head: usize, dep: usize, label: impl Into<String>) -> Self {
        Arc {
            head,
            dep,
            label: label.into(),
        }
    }

    pub fn unlabeled(head: usize, dep: usize) -> Self {
        Arc::new(head, dep, UNLABELED)
    }

    /// Sorted endpoints of the arc.
    pub fn span(&self) -> (usize, usize) {
        (self.head.min(self.dep), self.head.max(self.dep))
    }
}

/// A token sequence with a labeled arc set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DependencyStructure {
    tokens: Vec<Token>,
    arcs: Vec<Arc>,
}

impl DependencyStructure {
    /// Build a structure, checking index ranges, self-loops, and duplicate
    /// `(head, dep)` pairs. Arcs are stored sorted by `(head, dep)`.
    pub fn new(tokens: Vec<Token>, arcs: Vec<Arc>) -> Result<Self, DsError> {
        let n = tokens.len();
        for (pos, tok) in tokens.iter().enumerate() {
            if tok.form.is_empty() {
                return Err(DsError::EmptyForm(pos + 1));
            }
            if tok.index != pos + 1 {
                return Err(DsError::BadIndexSequence {
                    position: pos + 1,
                    index: tok.index,
                });
            }
        }
        let mut arcs = arcs;
        arcs.sort();
        let mut seen = BTreeSet::new();
        for arc in &arcs {
            if arc.head == 0 || arc.head > n {
                return Err(DsError::IndexOutOfRange(arc.head, n));
            }
            if arc.dep == 0 || arc.dep > n {
                return Err(DsError::IndexOutOfRange(arc.dep, n));
            }
            if arc.head == arc.dep {
                return Err(DsError::SelfLoop(arc.head));
            }
            if !seen.insert((arc.head, arc.dep)) {
                return Err(DsError::DuplicateArc(arc.head, arc.dep));
            }
        }
        Ok(DependencyStructure { tokens, arcs })
    }

    /// Convenience constructor from `(form, category)` pairs in sentence order.
    pub fn from_parts(parts: Vec<(String, Category)>, arcs: Vec<Arc>) -> Result<Self, DsError> {
        let tokens = parts
            .into_iter()
            .enumerate()
            .map(|(i, (form, category))| Token::new(i + 1, form, category))
            .collect::<Result<Vec<_>, _>>()?;
        DependencyStructure::new(tokens, arcs)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, i: usize) -> &Token {
        &self.tokens[i - 1]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Governors of token `i`: `{ h : (h, i) in arcs }`.
    pub fn heads_of(&self, i: usize) -> BTreeSet<usize> {
        assert!(i >= 1 && i <= self.len(), "token index {i} out of range");
        self.arcs
            .iter()
            .filter(|a| a.dep == i)
            .map(|a| a.head)
            .collect()
    }

    /// Dependents of token `i` in surface order.
    pub fn deps_of(&self, i: usize) -> Vec<usize> {
        assert!(i >= 1 && i <= self.len(), "token index {i} out of range");
        let mut deps: Vec<usize> = self
            .arcs
            .iter()
            .filter(|a| a.head == i)
            .map(|a| a.dep)
            .collect();
        deps.sort_unstable();
        deps
    }

    /// The incoming arc of token `i`, if it has exactly one.
    pub fn incoming(&self, i: usize) -> Option<&Arc> {
        let mut found = None;
        for a in self.arcs.iter().filter(|a| a.dep == i) {
            if found.is_some() {
                return None;
            }
            found = Some(a);
        }
        found
    }

    /// Tokens without a governor.
    pub fn independents(&self) -> Vec<usize> {
        let mut has_head = vec![false; self.len() + 1];
        for a in &self.arcs {
            has_head[a.dep] = true;
        }
        (1..=self.len()).filter(|&i| !has_head[i]).collect()
    }

    fn require_single_heads(&self) -> Result<(), DsError> {
        let mut head_count = vec![0usize; self.len() + 1];
        for a in &self.arcs {
            head_count[a.dep] += 1;
            if head_count[a.dep] > 1 {
                return Err(DsError::MultipleHeads(a.dep));
            }
        }
        Ok(())
    }

    /// Transitive closure of the dependent relation below `i`, excluding `i`.
    ///
    /// Requires unique heads. Traversal keeps a visited set, so it terminates
    /// even on cyclic garbage; the axioms module is the arbiter of
    /// well-formedness.
    pub fn descendants(&self, i: usize) -> Result<BTreeSet<usize>, DsError> {
        assert!(i >= 1 && i <= self.len(), "token index {i} out of range");
        self.require_single_heads()?;
        let mut seen = BTreeSet::new();
        let mut stack = self.deps_of(i);
        while let Some(d) = stack.pop() {
            if seen.insert(d) && d != i {
                stack.extend(self.deps_of(d));
            }
        }
        seen.remove(&i);
        Ok(seen)
    }

    /// Minimum and maximum position over `{i}` and `i`'s descendants.
    pub fn projection_span(&self, i: usize) -> Result<(usize, usize), DsError> {
        let desc = self.descendants(i)?;
        let lo = desc.iter().copied().min().unwrap_or(i).min(i);
        let hi = desc.iter().copied().max().unwrap_or(i).max(i);
        Ok((lo, hi))
    }
}

#[derive(Serialize, Deserialize)]
struct TokenRepr {
    form: String,
    cat: Category,
}

#[derive(Serialize, Deserialize)]
struct ArcRepr {
    head: usize,
    dep: usize,
    label: String,
}

#[derive(Serialize, Deserialize)]
struct DsRepr {
    tokens: Vec<TokenRepr>,
    arcs: Vec<ArcRepr>,
}

impl Serialize for DependencyStructure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = DsRepr {
            tokens: self
                .tokens
                .iter()
                .map(|t| TokenRepr {
                    form: t.form.clone(),
                    cat: t.category.clone(),
                })
                .collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcRepr {
                    head: a.head,
                    dep: a.dep,
                    label: a.label.clone(),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DependencyStructure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = DsRepr::deserialize(deserializer)?;
        let parts = repr
            .tokens
            .into_iter()
            .map(|t| (t.form, t.cat))
            .collect::<Vec<_>>();
        let arcs = repr
            .arcs
            .into_iter()
            .map(|a| Arc::new(a.head, a.dep, a.label))
            .collect();
        DependencyStructure::from_parts(parts, arcs).map_err(D::Error::custom)
    }
}

/// Serialize one structure to the JSON graph format.
pub fn ds_to_json(ds: &DependencyStructure) -> String {
    serde_json::to_string(ds).expect("dependency structure serializes")
}

/// Parse the JSON graph format.
pub fn ds_from_json(text: &str) -> Result<DependencyStructure, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Malformed(e.to_string()))
}

/// Render one tree-shaped structure in the column format: one token per
/// line, tab-separated `ID FORM CAT HEAD LABEL`, `HEAD` 0 for independent
/// elements. Fails on structures with multiple heads.
pub fn ds_to_conll(ds: &DependencyStructure) -> Result<String, FormatError> {
    let mut out = String::new();
    for tok in ds.tokens() {
        let heads = ds.heads_of(tok.index);
        if heads.len() > 1 {
            return Err(FormatError::NotATree);
        }
        let (head, label) = match ds.incoming(tok.index) {
            Some(arc) => (arc.head, arc.label.as_str()),
            None => (0, UNLABELED),
        };
        if tok.form.contains(['\t', '\n']) || tok.category.name().contains(['\t', '\n']) {
            return Err(FormatError::Malformed(format!(
                "token {} contains a tab or newline",
                tok.index
            )));
        }
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            tok.index, tok.form, tok.category, head, label
        ));
    }
    Ok(out)
}

/// Parse the column format; sentences are separated by blank lines.
pub fn ds_from_conll(text: &str) -> Result<Vec<DependencyStructure>, FormatError> {
    let mut sentences = Vec::new();
    let mut parts: Vec<(String, Category)> = Vec::new();
    let mut arcs: Vec<Arc> = Vec::new();

    let mut flush = |parts: &mut Vec<(String, Category)>,
                     arcs: &mut Vec<Arc>|
     -> Result<(), FormatError> {
        if !parts.is_empty() {
            let ds = DependencyStructure::from_parts(std::mem::take(parts), std::mem::take(arcs))?;
            sentences.push(ds);
        }
        Ok(())
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.trim().is_empty() {
            flush(&mut parts, &mut arcs)?;
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() != 5 {
            return Err(FormatError::Line {
                line,
                msg: format!("expected 5 tab-separated columns, found {}", cols.len()),
            });
        }
        let id: usize = cols[0].parse().map_err(|_| FormatError::Line {
            line,
            msg: format!("bad token id `{}`", cols[0]),
        })?;
        if id != parts.len() + 1 {
            return Err(FormatError::Line {
                line,
                msg: format!(
                    "token id {} out of sequence (expected {})",
                    id,
                    parts.len() + 1
                ),
            });
        }
        let cat = Category::new(cols[2]).map_err(|e| FormatError::Line {
            line,
            msg: e.to_string(),
        })?;
        let head: usize = cols[3].parse().map_err(|_| FormatError::Line {
            line,
            msg: format!("bad head index `{}`", cols[3]),
        })?;
        parts.push((cols[1].to_string(), cat));
        if head != 0 {
            arcs.push(Arc::new(head, id, cols[4]));
        }
    }
    flush(&mut parts, &mut arcs)?;
    Ok(sentences)
}

/// An ordered tree over the token sequence in which every internal node
/// marks exactly one child as its head.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhraseMarker {
    Leaf(Token),
    Node {
        children: Vec<PhraseMarker>,
        head_child: usize,
    },
}

impl PhraseMarker {
    /// Build an internal node, checking the head index and that the
    /// children's fringes form one contiguous, strictly increasing token
    /// sequence.
    pub fn node(children: Vec<PhraseMarker>, head_child: usize) -> Result<Self, FormatError> {
        if children.is_empty() {
            return Err(FormatError::Malformed("node with no children".into()));
        }
        if head_child >= children.len() {
            return Err(FormatError::Malformed(format!(
                "head child {} out of range for {} children",
                head_child,
                children.len()
            )));
        }
        let node = PhraseMarker::Node {
            children,
            head_child,
        };
        node.check_fringe()?;
        Ok(node)
    }

    fn check_fringe(&self) -> Result<(), FormatError> {
        let fringe = self.fringe();
        for pair in fringe.windows(2) {
            if pair[1].index != pair[0].index + 1 {
                return Err(FormatError::Malformed(format!(
                    "fringe is not contiguous: token {} follows token {}",
                    pair[1].index, pair[0].index
                )));
            }
        }
        Ok(())
    }

    /// Left-to-right leaves.
    pub fn fringe(&self) -> Vec<&Token> {
        let mut out = Vec::new();
        self.collect_fringe(&mut out);
        out
    }

    fn collect_fringe<'a>(&'a self, out: &mut Vec<&'a Token>) {
        match self {
            PhraseMarker::Leaf(t) => out.push(t),
            PhraseMarker::Node { children, .. } => {
                for c in children {
                    c.collect_fringe(out);
                }
            }
        }
    }

    /// Number of nodes (internal and leaf).
    pub fn size(&self) -> usize {
        match self {
            PhraseMarker::Leaf(_) => 1,
            PhraseMarker::Node { children, .. } => {
                1 + children.iter().map(PhraseMarker::size).sum::<usize>()
            }
        }
    }
}

/// Render a phrase marker as an s-expression: leaves are `form/CAT`, nodes
/// are `( child .. )`, and the head child carries a `^` prefix.
pub fn pm_to_sexp(pm: &PhraseMarker) -> String {
    fn go(pm: &PhraseMarker, out: &mut String) {
        match pm {
            PhraseMarker::Leaf(t) => {
                out.push_str(&t.form);
                out.push('/');
                out.push_str(t.category.name());
            }
            PhraseMarker::Node {
                children,
                head_child,
            } => {
                out.push_str("( ");
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    if i == *head_child {
                        out.push('^');
                    }
                    go(c, out);
                }
                out.push_str(" )");
            }
        }
    }
    let mut out = String::new();
    go(pm, &mut out);
    out
}

#[derive(Debug, PartialEq)]
enum SexpToken {
    Open {
        headed: bool,
    },
    Close,
    Leaf {
        headed: bool,
        form: String,
        cat: String,
    },
}

fn sexp_tokens(text: &str) -> Result<Vec<SexpToken>, FormatError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == ')' {
            chars.next();
            out.push(SexpToken::Close);
            continue;
        }
        let mut headed = false;
        if c == '^' {
            headed = true;
            chars.next();
        }
        match chars.peek() {
            Some('(') => {
                chars.next();
                out.push(SexpToken::Open { headed });
            }
            Some(_) => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                let (form, cat) = word.rsplit_once('/').ok_or_else(|| {
                    FormatError::Malformed(format!("leaf `{word}` is not of the form form/CAT"))
                })?;
                if form.is_empty() {
                    return Err(FormatError::Malformed(format!(
                        "leaf `{word}` has an empty form"
                    )));
                }
                out.push(SexpToken::Leaf {
                    headed,
                    form: form.to_string(),
                    cat: cat.to_string(),
                });
            }
            None => {
                return Err(FormatError::Malformed(
                    "dangling `^` at end of input".into(),
                ))
            }
        }
    }
    Ok(out)
}

/// Parse a stream of phrase-marker s-expressions. Token indices are assigned
/// by leaf position, starting at 1 for each phrase marker.
pub fn pm_from_sexp_stream(text: &str) -> Result<Vec<PhraseMarker>, FormatError> {
    let tokens = sexp_tokens(text)?;
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        let mut next_index = 1;
        let (pm, rest) = parse_sexp_node(&tokens, pos, &mut next_index)?;
        let (pm, headed) = pm;
        if headed {
            return Err(FormatError::Malformed(
                "top-level phrase marker must not carry a `^` prefix".into(),
            ));
        }
        out.push(pm);
        pos = rest;
    }
    Ok(out)
}

/// Parse exactly one phrase-marker s-expression.
pub fn pm_from_sexp(text: &str) -> Result<PhraseMarker, FormatError> {
    let pms = pm_from_sexp_stream(text)?;
    match pms.len() {
        1 => Ok(pms.into_iter().next().unwrap()),
        n => Err(FormatError::Malformed(format!(
            "expected exactly one phrase marker, found {n}"
        ))),
    }
}

type ParsedNode = (PhraseMarker, bool);

fn parse_sexp_node(
    tokens: &[SexpToken],
    pos: usize,
    next_index: &mut usize,
) -> Result<(ParsedNode, usize), FormatError> {
    match tokens.get(pos) {
        Some(SexpToken::Leaf { headed, form, cat }) => {
            let category =
                Category::new(cat.as_str()).map_err(|e| FormatError::Malformed(e.to_string()))?;
            let token =
                Token::new(*next_index, form.clone(), category).map_err(FormatError::Structure)?;
            *next_index += 1;
            Ok(((PhraseMarker::Leaf(token), *headed), pos + 1))
        }
        Some(SexpToken::Open { headed }) => {
            let mut children = Vec::new();
            let mut head_child = None;
            let mut cur = pos + 1;
            loop {
                match tokens.get(cur) {
                    Some(SexpToken::Close) => {
                        cur += 1;
                        break;
                    }
                    Some(_) => {
                        let ((child, child_headed), rest) =
                            parse_sexp_node(tokens, cur, next_index)?;
                        if child_headed {
                            if head_child.is_some() {
                                return Err(FormatError::Malformed(
                                    "node marks more than one head child".into(),
                                ));
                            }
                            head_child = Some(children.len());
                        }
                        children.push(child);
                        cur = rest;
                    }
                    None => {
                        return Err(FormatError::Malformed("unbalanced `(`".into()));
                    }
                }
            }
            let head_child = head_child.ok_or_else(|| {
                FormatError::Malformed("node marks no head child (missing `^`)".into())
            })?;
            Ok(((PhraseMarker::node(children, head_child)?, *headed), cur))
        }
        Some(SexpToken::Close) => Err(FormatError::Malformed("unexpected `)`".into())),
        None => Err(FormatError::Malformed("unexpected end of input".into())),
    }
}

impl fmt::Display for PhraseMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pm_to_sexp(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(name: &str) -> Category {
        Category::new(name).unwrap()
    }

    fn ds(forms: &[(&str, &str)], arcs: &[(usize, usize, &str)]) -> DependencyStructure {
        DependencyStructure::from_parts(
            forms.iter().map(|(f, c)| (f.to_string(), cat(c))).collect(),
            arcs.iter().map(|&(h, d, l)| Arc::new(h, d, l)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn build_single_node() {
        let d = ds(&[("w1", "V")], &[]);
        assert_eq!(d.len(), 1);
        assert!(d.arcs().is_empty());
    }

    #[test]
    fn build_two_nodes_with_arc() {
        let d = ds(&[("w1", "D"), ("w2", "N")], &[(2, 1, "DET")]);
        assert_eq!(d.arcs().len(), 1);
        assert_eq!(d.arcs()[0].label, "DET");
    }

    #[test]
    fn self_loop_rejected() {
        let e = DependencyStructure::from_parts(
            vec![("w".into(), cat("V"))],
            vec![Arc::unlabeled(1, 1)],
        )
        .unwrap_err();
        assert_eq!(e, DsError::SelfLoop(1));
    }

    #[test]
    fn duplicate_pair_rejected() {
        let e = DependencyStructure::from_parts(
            vec![("a".into(), cat("V")), ("b".into(), cat("V"))],
            vec![Arc::new(1, 2, "X"), Arc::new(1, 2, "Y")],
        )
        .unwrap_err();
        assert_eq!(e, DsError::DuplicateArc(1, 2));
    }

    #[test]
    fn out_of_range_rejected() {
        let e = DependencyStructure::from_parts(
            vec![("a".into(), cat("V"))],
            vec![Arc::unlabeled(1, 2)],
        )
        .unwrap_err();
        assert_eq!(e, DsError::IndexOutOfRange(2, 1));
    }

    #[test]
    fn heads_of_reads_the_arc_set() {
        let d = ds(&[("a", "D"), ("b", "N")], &[(2, 1, "DET")]);
        assert_eq!(d.heads_of(1).into_iter().collect::<Vec<_>>(), vec![2]);
        assert!(d.heads_of(2).is_empty());
    }

    #[test]
    fn heads_of_head_sharing_shape() {
        let d = ds(
            &[("a", "X"), ("b", "X"), ("c", "X"), ("d", "X"), ("e", "X")],
            &[(2, 3, "_"), (5, 3, "_")],
        );
        assert_eq!(d.heads_of(3).into_iter().collect::<Vec<_>>(), vec![2, 5]);
    }

    #[test]
    fn descendants_chain() {
        let d = ds(
            &[("a", "X"), ("b", "X"), ("c", "X")],
            &[(1, 2, "_"), (2, 3, "_")],
        );
        assert_eq!(
            d.descendants(1).unwrap().into_iter().collect::<Vec<_>>(),
            vec![2, 3]
        );
        assert!(d.descendants(3).unwrap().is_empty());
    }

    #[test]
    fn descendants_star() {
        let d = ds(
            &[("a", "X"), ("b", "X"), ("c", "X"), ("d", "X")],
            &[(2, 1, "_"), (2, 3, "_"), (2, 4, "_")],
        );
        assert_eq!(
            d.descendants(2).unwrap().into_iter().collect::<Vec<_>>(),
            vec![1, 3, 4]
        );
    }

    #[test]
    fn descendants_rejects_multiple_heads() {
        let d = ds(
            &[("a", "X"), ("b", "X"), ("c", "X")],
            &[(1, 3, "_"), (2, 3, "_")],
        );
        assert_eq!(d.descendants(1).unwrap_err(), DsError::MultipleHeads(3));
    }

    #[test]
    fn descendants_terminates_on_cycles() {
        let d = ds(&[("a", "X"), ("b", "X")], &[(1, 2, "_"), (2, 1, "_")]);
        // Both tokens have a single head; the cycle is traversed once.
        assert_eq!(
            d.descendants(1).unwrap().into_iter().collect::<Vec<_>>(),
            vec![2]
        );
    }

    #[test]
    fn projection_spans() {
        let single = ds(&[("a", "X")], &[]);
        assert_eq!(single.projection_span(1).unwrap(), (1, 1));

        let chain = ds(
            &[("a", "X"), ("b", "X"), ("c", "X")],
            &[(1, 2, "_"), (2, 3, "_")],
        );
        assert_eq!(chain.projection_span(1).unwrap(), (1, 3));

        let star = ds(
            &[("a", "X"), ("b", "X"), ("c", "X")],
            &[(2, 1, "_"), (2, 3, "_")],
        );
        assert_eq!(star.projection_span(2).unwrap(), (1, 3));
    }

    #[test]
    fn conll_round_trip() {
        let d = ds(
            &[("the", "D"), ("dog", "N"), ("barks", "V")],
            &[(2, 1, "DET"), (3, 2, "SUBJ")],
        );
        let text = ds_to_conll(&d).unwrap();
        assert_eq!(
            text,
            "1\tthe\tD\t2\tDET\n2\tdog\tN\t3\tSUBJ\n3\tbarks\tV\t0\t_\n"
        );
        let back = ds_from_conll(&text).unwrap();
        assert_eq!(back, vec![d]);
    }

    #[test]
    fn conll_rejects_multiple_heads() {
        let d = ds(
            &[("a", "X"), ("b", "X"), ("c", "X")],
            &[(1, 3, "_"), (2, 3, "_")],
        );
        assert_eq!(ds_to_conll(&d).unwrap_err(), FormatError::NotATree);
    }

    #[test]
    fn conll_multiple_sentences() {
        let text = "1\ta\tX\t0\t_\n\n1\tb\tX\t0\t_\n1 extra";
        assert!(ds_from_conll(text).is_err());
        let text = "1\ta\tX\t0\t_\n\n1\tb\tX\t0\t_\n";
        assert_eq!(ds_from_conll(text).unwrap().len(), 2);
    }

    #[test]
    fn json_round_trip_represents_multiple_heads() {
        let d = ds(
            &[("a", "X"), ("b", "X"), ("c", "X")],
            &[(1, 3, "_"), (2, 3, "OBJ")],
        );
        let json = ds_to_json(&d);
        let back = ds_from_json(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_rejects_bad_structure() {
        let bad = r#"{"tokens":[{"form":"a","cat":"X"}],"arcs":[{"head":1,"dep":1,"label":"_"}]}"#;
        assert!(ds_from_json(bad).is_err());
    }

    #[test]
    fn sexp_round_trip() {
        let pm = pm_from_sexp("( the/D ^dog/N )").unwrap();
        assert_eq!(pm_to_sexp(&pm), "( the/D ^dog/N )");
        let nested = pm_from_sexp("( ( the/D ^dog/N ) ^barks/V )").unwrap();
        assert_eq!(pm_to_sexp(&nested), "( ( the/D ^dog/N ) ^barks/V )");
    }

    #[test]
    fn sexp_head_marking_required() {
        assert!(pm_from_sexp("( the/D dog/N )").is_err());
        assert!(pm_from_sexp("( ^the/D ^dog/N )").is_err());
    }

    #[test]
    fn node_rejects_bad_head_index() {
        let leaf = PhraseMarker::Leaf(Token::new(1, "a", cat("X")).unwrap());
        assert!(PhraseMarker::node(vec![leaf], 1).is_err());
    }

    #[test]
    fn node_rejects_non_contiguous_fringe() {
        let a = PhraseMarker::Leaf(Token::new(1, "a", cat("X")).unwrap());
        let c = PhraseMarker::Leaf(Token::new(3, "c", cat("X")).unwrap());
        assert!(PhraseMarker::node(vec![a, c], 0).is_err());
    }
}
