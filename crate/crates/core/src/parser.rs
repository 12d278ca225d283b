//! All-parses projective dependency parsing, three ways.
//!
//! [`parse`] is a direct chart parser over the dependency rules: an item is
//! a complete projection of one token over a span, and rule slots are tiled
//! over the sub-spans left and right of the governor. [`parse_via_cfg`] runs
//! CKY over the constructed context-free grammar (binarized internally) and
//! maps every derivation tree back to a dependency structure by head
//! percolation. [`enumerate_oracle`] brute-forces every category assignment
//! and every head vector for short sentences and keeps the candidates that
//! pass the axioms and match the rule set.
//!
//! All three return the same canonical list for every grammar and sentence;
//! the test suites enforce the agreement exhaustively over the fixture
//! lexicons. There is no ranking and no pruning: completeness is the
//! contract, with a configurable cap that reports truncation as an explicit
//! error instead of cutting silently.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use thiserror::Error;

use crate::axioms;
use crate::ds::{Arc, DependencyStructure, Token, UNLABELED};
use crate::grammar::{
    bar_symbol, gaifman_cfg, lex_symbol, validate_grammar, Category, Cfg, Grammar, Rule, Severity,
    Slot, CFG_START,
};

/// Default cap on the number of analyses returned for one sentence.
pub const DEFAULT_MAX_ANALYSES: usize = 10_000;

/// Longest sentence [`enumerate_oracle`] accepts.
pub const MAX_ORACLE_LEN: usize = 7;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unknown word `{form}` at position {position}")]
    UnknownWord { form: String, position: usize },
    #[error("sentence is empty")]
    EmptySentence,
    #[error("more than {cap} analyses; raise the cap to enumerate them all")]
    Truncated { cap: usize, analyses: Vec<Analysis> },
    #[error("oracle enumeration is limited to sentences of length <= {max}, got {len}")]
    TooLong { len: usize, max: usize },
    #[error("grammar has errors: {0}")]
    InvalidGrammar(String),
}

/// A tokenized sentence: a non-empty sequence of word forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    forms: Vec<String>,
}

impl Sentence {
    pub fn new(forms: Vec<String>) -> Result<Self, ParseError> {
        if forms.is_empty() {
            return Err(ParseError::EmptySentence);
        }
        Ok(Sentence { forms })
    }

    /// Split one whitespace-separated line; `None` for a blank line.
    pub fn from_line(line: &str) -> Option<Self> {
        let forms: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if forms.is_empty() {
            None
        } else {
            Some(Sentence { forms })
        }
    }

    pub fn forms(&self) -> &[String] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

/// What licensed a token: a rule application or a leaf declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEntry {
    Rule(Rule),
    Leaf(Category),
}

/// One complete parse: a well-formed dependency structure whose tokens carry
/// the chosen categories and whose arcs carry the slot labels of the rules
/// used, plus the rule (or leaf declaration) applied at every token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    ds: DependencyStructure,
    trace: BTreeMap<usize, TraceEntry>,
}

impl Analysis {
    pub fn ds(&self) -> &DependencyStructure {
        &self.ds
    }

    pub fn trace(&self) -> &BTreeMap<usize, TraceEntry> {
        &self.trace
    }

    /// Governor of each token in sentence order, 0 for the independent one.
    pub fn head_vector(&self) -> Vec<usize> {
        (1..=self.ds.len())
            .map(|i| self.ds.incoming(i).map_or(0, |a| a.head))
            .collect()
    }

    /// The ordering key of the canonical output contract: head vector, then
    /// incoming labels, then token categories.
    fn canonical_key(&self) -> (Vec<usize>, Vec<String>, Vec<String>) {
        let heads = self.head_vector();
        let labels = (1..=self.ds.len())
            .map(|i| {
                self.ds
                    .incoming(i)
                    .map_or_else(|| UNLABELED.to_string(), |a| a.label.clone())
            })
            .collect();
        let cats = self
            .ds
            .tokens()
            .iter()
            .map(|t| t.category.name().to_string())
            .collect();
        (heads, labels, cats)
    }
}

fn canonicalize(mut analyses: Vec<Analysis>) -> Vec<Analysis> {
    analyses.sort_by_cached_key(Analysis::canonical_key);
    analyses.dedup();
    analyses
}

fn require_valid(g: &Grammar) -> Result<(), ParseError> {
    let errors: Vec<String> = validate_grammar(g)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.message)
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(ParseError::InvalidGrammar(errors.join("; ")))
    }
}

fn lexical_categories(g: &Grammar, s: &Sentence) -> Result<Vec<Vec<Category>>, ParseError> {
    s.forms()
        .iter()
        .enumerate()
        .map(|(i, form)| match g.categories_of(form) {
            Some(cats) => Ok(cats.iter().cloned().collect()),
            None => Err(ParseError::UnknownWord {
                form: form.clone(),
                position: i + 1,
            }),
        })
        .collect()
}

/// Partial analysis material for a completed sub-span.
#[derive(Debug, Clone, Default)]
struct Frag {
    arcs: Vec<Arc>,
    cats: BTreeMap<usize, Category>,
    trace: BTreeMap<usize, TraceEntry>,
}

impl Frag {
    fn absorb(&mut self, other: &Frag) {
        self.arcs.extend(other.arcs.iter().cloned());
        self.cats
            .extend(other.cats.iter().map(|(k, v)| (*k, v.clone())));
        self.trace
            .extend(other.trace.iter().map(|(k, v)| (*k, v.clone())));
    }

    fn into_analysis(self, forms: &[String]) -> Analysis {
        let tokens: Vec<Token> = forms
            .iter()
            .enumerate()
            .map(|(i, form)| {
                let cat = self.cats.get(&(i + 1)).expect("fragment covers span");
                Token::new(i + 1, form.clone(), cat.clone()).expect("valid token")
            })
            .collect();
        let ds = DependencyStructure::new(tokens, self.arcs).expect("chart builds valid arcs");
        Analysis {
            ds,
            trace: self.trace,
        }
    }
}

type SpanKey = (usize, usize, usize, Category);

struct Chart<'g> {
    g: &'g Grammar,
    cats: &'g [Vec<Category>],
    memo: HashMap<SpanKey, Rc<Vec<(usize, Frag)>>>,
    cap: usize,
}

impl<'g> Chart<'g> {
    /// Complete projections of the token at `h` (with category `cat`) over
    /// exactly the span `[lo, hi]`, as `(head position, fragment)` pairs.
    fn complete(
        &mut self,
        lo: usize,
        hi: usize,
        h: usize,
        cat: &Category,
    ) -> Result<Rc<Vec<(usize, Frag)>>, ParseError> {
        let key = (lo, hi, h, cat.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(Rc::clone(hit));
        }
        let mut frags: Vec<(usize, Frag)> = Vec::new();
        if self.cats[h - 1].contains(cat) {
            if lo == h && hi == h && self.g.is_leaf(cat) {
                let mut frag = Frag::default();
                frag.cats.insert(h, cat.clone());
                frag.trace.insert(h, TraceEntry::Leaf(cat.clone()));
                frags.push((h, frag));
            }
            let rules: Vec<&Rule> = self.g.rules_with_head(cat).collect();
            for rule in rules {
                if rule.arity() == 0 {
                    // Zero-dependent tokens are licensed by leaf declarations.
                    continue;
                }
                if (rule.left.is_empty() && lo != h) || (rule.right.is_empty() && hi != h) {
                    continue;
                }
                let lefts = self.tile(&rule.left, lo, h)?;
                if lefts.is_empty() {
                    continue;
                }
                let rights = self.tile(&rule.right, h + 1, hi + 1)?;
                if rights.is_empty() {
                    continue;
                }
                for lcombo in &lefts {
                    for rcombo in &rights {
                        let mut frag = Frag::default();
                        frag.cats.insert(h, cat.clone());
                        frag.trace.insert(h, TraceEntry::Rule(rule.clone()));
                        let children = lcombo
                            .iter()
                            .zip(&rule.left)
                            .chain(rcombo.iter().zip(&rule.right));
                        for ((sub_head, sub_frag), slot) in children {
                            let label = slot.label.as_deref().unwrap_or(UNLABELED);
                            frag.arcs.push(Arc::new(h, *sub_head, label));
                            frag.absorb(sub_frag);
                        }
                        frags.push((h, frag));
                        self.guard(frags.len())?;
                    }
                }
            }
        }
        let rc = Rc::new(frags);
        self.memo.insert(key, Rc::clone(&rc));
        Ok(rc)
    }

    /// All ways to cover the half-open position range `[from, end)` with
    /// complete projections matching the slot sequence, in order. The empty
    /// slot list covers only the empty range.
    fn tile(
        &mut self,
        slots: &[Slot],
        from: usize,
        end: usize,
    ) -> Result<Vec<Vec<(usize, Frag)>>, ParseError> {
        let Some((first, rest)) = slots.split_first() else {
            return Ok(if from == end { vec![vec![]] } else { vec![] });
        };
        let mut out = Vec::new();
        // The first slot takes tokens [from, split]; the rest tile onward.
        for split in from..end {
            let mut firsts: Vec<(usize, Frag)> = Vec::new();
            for sub_head in from..=split {
                let completions = self.complete(from, split, sub_head, &first.category)?;
                firsts.extend(completions.iter().cloned());
            }
            if firsts.is_empty() {
                continue;
            }
            let rests = self.tile(rest, split + 1, end)?;
            for f in &firsts {
                for r in &rests {
                    let mut combo = Vec::with_capacity(1 + r.len());
                    combo.push(f.clone());
                    combo.extend(r.iter().cloned());
                    out.push(combo);
                    self.guard(out.len())?;
                }
            }
        }
        Ok(out)
    }

    // Intermediate vectors may hold one fragment beyond the cap so the top
    // level can still hand back `cap` analyses next to the truncation error.
    fn guard(&self, len: usize) -> Result<(), ParseError> {
        if len > self.cap.saturating_add(1) {
            Err(ParseError::Truncated {
                cap: self.cap,
                analyses: Vec::new(),
            })
        } else {
            Ok(())
        }
    }
}

/// Enumerate every analysis of `s` under `g` with the direct chart parser.
/// The result is duplicate-free and canonically ordered.
pub fn parse(g: &Grammar, s: &Sentence) -> Result<Vec<Analysis>, ParseError> {
    parse_with_cap(g, s, DEFAULT_MAX_ANALYSES)
}

/// [`parse`] with an explicit cap on the analysis count.
pub fn parse_with_cap(g: &Grammar, s: &Sentence, cap: usize) -> Result<Vec<Analysis>, ParseError> {
    require_valid(g)?;
    let cats = lexical_categories(g, s)?;
    let n = s.len();
    let mut chart = Chart {
        g,
        cats: &cats,
        memo: HashMap::new(),
        cap,
    };
    let mut analyses = Vec::new();
    let mut truncated = false;
    'outer: for root_cat in g.root_cats() {
        for h in 1..=n {
            let frags = match chart.complete(1, n, h, root_cat) {
                Ok(frags) => frags,
                Err(ParseError::Truncated { .. }) => {
                    truncated = true;
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            for (_, frag) in frags.iter() {
                analyses.push(frag.clone().into_analysis(s.forms()));
                if analyses.len() > cap {
                    truncated = true;
                    break 'outer;
                }
            }
        }
    }
    if truncated {
        analyses.truncate(cap);
        return Err(ParseError::Truncated {
            cap,
            analyses: canonicalize(analyses),
        });
    }
    Ok(canonicalize(analyses))
}

/// What a context-free production stands for in the source grammar.
#[derive(Debug, Clone)]
enum ProdSource<'g> {
    /// `S^ -> X_bar` for a root category.
    Start,
    /// `X_bar -> X_lex` from a leaf declaration.
    Leaf(Category),
    /// `X_bar -> A_bar .. X_lex .. Z_bar` from a rule (several rules may
    /// share the category skeleton and differ only in labels).
    FromRule(&'g Rule),
    /// `X_lex -> w`.
    Lex(Category),
}

fn production_sources<'g>(g: &'g Grammar, cfg: &Cfg) -> Vec<Vec<ProdSource<'g>>> {
    let mut bar_of: HashMap<String, Category> = HashMap::new();
    let mut lex_of: HashMap<String, Category> = HashMap::new();
    for c in g.categories() {
        bar_of.insert(bar_symbol(c), c.clone());
        lex_of.insert(lex_symbol(c), c.clone());
    }

    let mut out = Vec::with_capacity(cfg.productions.len());
    for p in &cfg.productions {
        if p.lhs == CFG_START {
            out.push(vec![ProdSource::Start]);
            continue;
        }
        if let Some(cat) = lex_of.get(&p.lhs) {
            out.push(vec![ProdSource::Lex(cat.clone())]);
            continue;
        }
        let cat = bar_of
            .get(&p.lhs)
            .cloned()
            .expect("production lhs is a known nonterminal");
        let mut sources = Vec::new();
        if p.rhs.len() == 1 && p.rhs[0] == lex_symbol(&cat) {
            if g.is_leaf(&cat) {
                sources.push(ProdSource::Leaf(cat.clone()));
            }
            for rule in g.rules().iter().filter(|r| r.head == cat && r.arity() == 0) {
                sources.push(ProdSource::FromRule(rule));
            }
        } else {
            for rule in g.rules().iter().filter(|r| r.head == cat) {
                if rule.arity() + 1 != p.rhs.len() || rule.left.len() != p.head_index {
                    continue;
                }
                let left_ok = rule
                    .left
                    .iter()
                    .zip(&p.rhs[..p.head_index])
                    .all(|(s, sym)| &bar_symbol(&s.category) == sym);
                let right_ok = rule
                    .right
                    .iter()
                    .zip(&p.rhs[p.head_index + 1..])
                    .all(|(s, sym)| &bar_symbol(&s.category) == sym);
                if left_ok && right_ok {
                    sources.push(ProdSource::FromRule(rule));
                }
            }
        }
        out.push(sources);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinTag {
    /// Apex of a binarization chain: completes the original production.
    Complete(usize),
    /// Inner link of a chain; contributes children to the apex.
    Partial,
}

/// The context-free grammar with every production of arity 3 or more
/// replaced by a right-branching chain of synthetic binary steps.
struct BinGrammar {
    start: usize,
    real_syms: usize,
    lexical: HashMap<String, Vec<(usize, usize)>>,
    unary: Vec<(usize, usize, usize)>,
    binary: HashMap<(usize, usize), Vec<(usize, BinTag)>>,
}

impl BinGrammar {
    fn build(cfg: &Cfg) -> Self {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        for nt in &cfg.nonterminals {
            let next = ids.len();
            ids.entry(nt).or_insert(next);
        }
        let real_syms = ids.len();
        let mut next_sym = real_syms;

        let mut lexical: HashMap<String, Vec<(usize, usize)>> = HashMap::new();
        let mut unary = Vec::new();
        let mut binary: HashMap<(usize, usize), Vec<(usize, BinTag)>> = HashMap::new();

        for (pid, p) in cfg.productions.iter().enumerate() {
            let lhs = ids[p.lhs.as_str()];
            let rhs_ids: Vec<Option<usize>> =
                p.rhs.iter().map(|s| ids.get(s.as_str()).copied()).collect();
            match rhs_ids.len() {
                1 => match rhs_ids[0] {
                    Some(sym) => unary.push((lhs, sym, pid)),
                    // Terminal on the right: a preterminal production.
                    None => lexical
                        .entry(p.rhs[0].clone())
                        .or_default()
                        .push((lhs, pid)),
                },
                _ => {
                    let rhs: Vec<usize> = rhs_ids
                        .into_iter()
                        .map(|s| s.expect("phrasal rhs symbols are nonterminals"))
                        .collect();
                    // lhs -> r0 C1, C1 -> r1 C2, .., C(k-2) -> r(k-2) r(k-1)
                    let k = rhs.len();
                    let mut parents = Vec::with_capacity(k - 1);
                    parents.push((lhs, BinTag::Complete(pid)));
                    for _ in 2..k {
                        let synth = next_sym;
                        next_sym += 1;
                        parents.push((synth, BinTag::Partial));
                    }
                    for i in 0..k - 1 {
                        let left = rhs[i];
                        let right = if i + 2 == k {
                            rhs[k - 1]
                        } else {
                            parents[i + 1].0
                        };
                        binary.entry((left, right)).or_default().push(parents[i]);
                    }
                }
            }
        }

        BinGrammar {
            start: ids[CFG_START],
            real_syms,
            lexical,
            unary,
            binary,
        }
    }
}

/// Backpointer for one way to derive a symbol over a span.
#[derive(Debug, Clone, Copy)]
enum Back {
    Word {
        prod: usize,
    },
    Un {
        prod: usize,
        child: usize,
    },
    Bin {
        tag: BinTag,
        mid: usize,
        left: usize,
        right: usize,
    },
}

/// A derivation tree over the original (un-binarized) productions.
#[derive(Debug, Clone)]
enum OrigTree {
    Lex {
        prod: usize,
        pos: usize,
    },
    Node {
        prod: usize,
        children: Vec<OrigTree>,
    },
}

struct CkyChart {
    n: usize,
    // (start, end exclusive) -> symbol -> derivations
    cells: HashMap<(usize, usize), HashMap<usize, Vec<Back>>>,
}

fn cky(bin: &BinGrammar, forms: &[String]) -> CkyChart {
    let n = forms.len();
    let mut cells: HashMap<(usize, usize), HashMap<usize, Vec<Back>>> = HashMap::new();

    let close_unaries = |cell: &mut HashMap<usize, Vec<Back>>| {
        // No unary cycles: S^ -> X_bar -> X_lex is the only unary shape, so
        // the fixpoint is reached after a bounded number of passes. Each
        // derivable unary backpointer is added exactly once.
        loop {
            let mut added = Vec::new();
            for &(parent, child, prod) in &bin.unary {
                if !cell.contains_key(&child) {
                    continue;
                }
                let present = cell.get(&parent).is_some_and(|backs| {
                    backs
                        .iter()
                        .any(|b| matches!(b, Back::Un { prod: p, child: c } if *p == prod && *c == child))
                });
                if !present {
                    added.push((parent, Back::Un { prod, child }));
                }
            }
            if added.is_empty() {
                break;
            }
            for (parent, back) in added {
                cell.entry(parent).or_default().push(back);
            }
        }
    };

    for (pos, form) in forms.iter().enumerate() {
        let mut cell: HashMap<usize, Vec<Back>> = HashMap::new();
        if let Some(pres) = bin.lexical.get(form) {
            for &(sym, prod) in pres {
                cell.entry(sym).or_default().push(Back::Word { prod });
            }
        }
        close_unaries(&mut cell);
        cells.insert((pos, pos + 1), cell);
    }

    for width in 2..=n {
        for start in 0..=n - width {
            let end = start + width;
            let mut cell: HashMap<usize, Vec<Back>> = HashMap::new();
            for mid in start + 1..end {
                let left_syms: Vec<usize> = cells
                    .get(&(start, mid))
                    .map(|c| c.keys().copied().collect())
                    .unwrap_or_default();
                let right_cell = &cells[&(mid, end)];
                for l in left_syms {
                    for &r in right_cell.keys() {
                        if let Some(parents) = bin.binary.get(&(l, r)) {
                            for &(parent, tag) in parents {
                                cell.entry(parent).or_default().push(Back::Bin {
                                    tag,
                                    mid,
                                    left: l,
                                    right: r,
                                });
                            }
                        }
                    }
                }
            }
            close_unaries(&mut cell);
            cells.insert((start, end), cell);
        }
    }

    CkyChart { n, cells }
}

type SymSpan = (usize, usize, usize);

struct TreeEnum<'a> {
    bin: &'a BinGrammar,
    chart: &'a CkyChart,
    cap: usize,
    memo: HashMap<SymSpan, Rc<Vec<OrigTree>>>,
    partial_memo: HashMap<SymSpan, Rc<Vec<Vec<OrigTree>>>>,
}

impl<'a> TreeEnum<'a> {
    /// Derivations of a real grammar symbol over a span.
    fn trees(&mut self, i: usize, j: usize, sym: usize) -> Result<Rc<Vec<OrigTree>>, ParseError> {
        let key = (i, j, sym);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(Rc::clone(hit));
        }
        let mut out = Vec::new();
        let backs = self
            .chart
            .cells
            .get(&(i, j))
            .and_then(|c| c.get(&sym))
            .cloned()
            .unwrap_or_default();
        for back in backs {
            match back {
                Back::Word { prod } => out.push(OrigTree::Lex { prod, pos: i }),
                Back::Un { prod, child } => {
                    for sub in self.trees(i, j, child)?.iter() {
                        out.push(OrigTree::Node {
                            prod,
                            children: vec![sub.clone()],
                        });
                    }
                }
                Back::Bin {
                    tag,
                    mid,
                    left,
                    right,
                } => {
                    let BinTag::Complete(prod) = tag else {
                        unreachable!("synthetic parent stored under a real symbol");
                    };
                    for lt in self.child_lists(i, mid, left)?.iter() {
                        for rt in self.child_lists(mid, j, right)?.iter() {
                            let mut children = lt.clone();
                            children.extend(rt.iter().cloned());
                            out.push(OrigTree::Node { prod, children });
                        }
                    }
                }
            }
            if out.len() > self.cap.saturating_add(1) {
                return Err(ParseError::Truncated {
                    cap: self.cap,
                    analyses: Vec::new(),
                });
            }
        }
        let rc = Rc::new(out);
        self.memo.insert(key, Rc::clone(&rc));
        Ok(rc)
    }

    /// Child sequences contributed by a symbol: a single subtree for a real
    /// symbol, the flattened remainder of a binarization chain otherwise.
    fn child_lists(
        &mut self,
        i: usize,
        j: usize,
        sym: usize,
    ) -> Result<Rc<Vec<Vec<OrigTree>>>, ParseError> {
        if sym < self.bin.real_syms {
            let trees = self.trees(i, j, sym)?;
            return Ok(Rc::new(trees.iter().map(|t| vec![t.clone()]).collect()));
        }
        let key = (i, j, sym);
        if let Some(hit) = self.partial_memo.get(&key) {
            return Ok(Rc::clone(hit));
        }
        let mut out = Vec::new();
        let backs = self
            .chart
            .cells
            .get(&(i, j))
            .and_then(|c| c.get(&sym))
            .cloned()
            .unwrap_or_default();
        for back in backs {
            let Back::Bin {
                mid, left, right, ..
            } = back
            else {
                unreachable!("synthetic symbols only head binary steps");
            };
            for lt in self.child_lists(i, mid, left)?.iter() {
                for rt in self.child_lists(mid, j, right)?.iter() {
                    let mut seq = lt.clone();
                    seq.extend(rt.iter().cloned());
                    out.push(seq);
                    if out.len() > self.cap.saturating_add(1) {
                        return Err(ParseError::Truncated {
                            cap: self.cap,
                            analyses: Vec::new(),
                        });
                    }
                }
            }
        }
        let rc = Rc::new(out);
        self.partial_memo.insert(key, Rc::clone(&rc));
        Ok(rc)
    }
}

/// Map one derivation tree to analysis fragments. A tree yields several
/// fragments when distinct rules share a production's category skeleton and
/// differ only in labels.
fn tree_frags(
    tree: &OrigTree,
    sources: &[Vec<ProdSource<'_>>],
    cap: usize,
) -> Result<Vec<(usize, Frag)>, ParseError> {
    match tree {
        OrigTree::Lex { prod, pos } => {
            let mut out = Vec::new();
            for src in &sources[*prod] {
                let ProdSource::Lex(cat) = src else {
                    unreachable!("lex production with a phrasal source");
                };
                let mut frag = Frag::default();
                frag.cats.insert(pos + 1, cat.clone());
                out.push((pos + 1, frag));
            }
            Ok(out)
        }
        OrigTree::Node { prod, children } => {
            let child_frags: Vec<Vec<(usize, Frag)>> = children
                .iter()
                .map(|c| tree_frags(c, sources, cap))
                .collect::<Result<_, _>>()?;
            let mut out = Vec::new();
            let mut choice = vec![0usize; child_frags.len()];
            loop {
                let picked: Vec<&(usize, Frag)> = choice
                    .iter()
                    .zip(&child_frags)
                    .map(|(&c, frags)| &frags[c])
                    .collect();
                for src in &sources[*prod] {
                    let frag = match src {
                        ProdSource::Start => {
                            let (h, f) = picked[0];
                            (*h, f.clone())
                        }
                        ProdSource::Leaf(cat) => {
                            let (h, f) = picked[0];
                            let mut f = f.clone();
                            f.trace.insert(*h, TraceEntry::Leaf(cat.clone()));
                            (*h, f)
                        }
                        ProdSource::FromRule(rule) => {
                            let head_pos = rule.left.len();
                            let (h, head_frag) = picked[head_pos];
                            let mut f = head_frag.clone();
                            f.trace.insert(*h, TraceEntry::Rule((*rule).clone()));
                            for (k, (sub_head, sub_frag)) in picked.iter().enumerate() {
                                if k == head_pos {
                                    continue;
                                }
                                let slot = if k < head_pos {
                                    &rule.left[k]
                                } else {
                                    &rule.right[k - head_pos - 1]
                                };
                                let label = slot.label.as_deref().unwrap_or(UNLABELED);
                                f.arcs.push(Arc::new(*h, *sub_head, label));
                                f.absorb(sub_frag);
                            }
                            (*h, f)
                        }
                        ProdSource::Lex(_) => unreachable!("phrasal node with a lexical source"),
                    };
                    out.push(frag);
                    if out.len() > cap.saturating_add(1) {
                        return Err(ParseError::Truncated {
                            cap,
                            analyses: Vec::new(),
                        });
                    }
                }
                // Advance the odometer over child choices.
                let mut k = 0;
                loop {
                    if k == choice.len() {
                        return Ok(out);
                    }
                    choice[k] += 1;
                    if choice[k] < child_frags[k].len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
            }
        }
    }
}

/// Enumerate every analysis by CKY over the constructed context-free
/// grammar, mapping each derivation back through head percolation. Identical
/// output contract to [`parse`].
pub fn parse_via_cfg(g: &Grammar, s: &Sentence) -> Result<Vec<Analysis>, ParseError> {
    parse_via_cfg_with_cap(g, s, DEFAULT_MAX_ANALYSES)
}

/// [`parse_via_cfg`] with an explicit cap on the analysis count.
pub fn parse_via_cfg_with_cap(
    g: &Grammar,
    s: &Sentence,
    cap: usize,
) -> Result<Vec<Analysis>, ParseError> {
    require_valid(g)?;
    lexical_categories(g, s)?;
    let cfg = gaifman_cfg(g);
    let sources = production_sources(g, &cfg);
    let bin = BinGrammar::build(&cfg);
    let chart = cky(&bin, s.forms());

    let mut tenum = TreeEnum {
        bin: &bin,
        chart: &chart,
        cap,
        memo: HashMap::new(),
        partial_memo: HashMap::new(),
    };

    let mut analyses = Vec::new();
    let mut truncated = false;
    'outer: {
        let trees = match tenum.trees(0, chart.n, bin.start) {
            Ok(trees) => trees,
            Err(ParseError::Truncated { .. }) => {
                truncated = true;
                break 'outer;
            }
            Err(e) => return Err(e),
        };
        for tree in trees.iter() {
            let frags = match tree_frags(tree, &sources, cap) {
                Ok(frags) => frags,
                Err(ParseError::Truncated { .. }) => {
                    truncated = true;
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            for (_, frag) in frags {
                analyses.push(frag.into_analysis(s.forms()));
                if analyses.len() > cap {
                    truncated = true;
                    break 'outer;
                }
            }
        }
    }
    if truncated {
        analyses.truncate(cap);
        return Err(ParseError::Truncated {
            cap,
            analyses: canonicalize(analyses),
        });
    }
    Ok(canonicalize(analyses))
}

/// Head vectors over `1..=n` (0 marks the independent element) whose arc
/// sets pass every axiom, i.e. the well-formed projective trees.
fn well_formed_head_vectors(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut heads = vec![0usize; n];
    loop {
        if heads.iter().filter(|&&h| h == 0).count() == 1 {
            let arcs: Vec<Arc> = heads
                .iter()
                .enumerate()
                .filter(|(_, &h)| h != 0)
                .map(|(i, &h)| Arc::unlabeled(h, i + 1))
                .collect();
            let parts = (0..n)
                .map(|i| (format!("w{}", i + 1), Category::new("X").unwrap()))
                .collect();
            if let Ok(ds) = DependencyStructure::from_parts(parts, arcs) {
                if axioms::validate(&ds).is_empty() {
                    out.push(heads.clone());
                }
            }
        }
        // Odometer over {0..n} \ {position} per position.
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            heads[k] += 1;
            if heads[k] == k + 1 {
                heads[k] += 1;
            }
            if heads[k] <= n {
                break;
            }
            heads[k] = 0;
            k += 1;
        }
    }
}

/// Rules (or the leaf declaration) licensing token `i` given a full category
/// assignment and head vector.
fn licensing_entries(g: &Grammar, cats: &[Category], heads: &[usize], i: usize) -> Vec<TraceEntry> {
    let n = heads.len();
    let left_deps: Vec<usize> = (1..i).filter(|&d| heads[d - 1] == i).collect();
    let right_deps: Vec<usize> = (i + 1..=n).filter(|&d| heads[d - 1] == i).collect();
    let cat = &cats[i - 1];
    if left_deps.is_empty() && right_deps.is_empty() {
        return if g.is_leaf(cat) {
            vec![TraceEntry::Leaf(cat.clone())]
        } else {
            vec![]
        };
    }
    g.rules_with_head(cat)
        .filter(|rule| {
            rule.left.len() == left_deps.len()
                && rule.right.len() == right_deps.len()
                && rule
                    .left
                    .iter()
                    .zip(&left_deps)
                    .all(|(slot, &d)| slot.category == cats[d - 1])
                && rule
                    .right
                    .iter()
                    .zip(&right_deps)
                    .all(|(slot, &d)| slot.category == cats[d - 1])
        })
        .map(|rule| TraceEntry::Rule(rule.clone()))
        .collect()
}

/// Brute-force oracle: enumerate every category assignment and every head
/// vector, keep the candidates that pass the axioms and match the rule set.
/// Limited to sentences of length at most [`MAX_ORACLE_LEN`]. Identical
/// output contract to [`parse`].
pub fn enumerate_oracle(g: &Grammar, s: &Sentence) -> Result<Vec<Analysis>, ParseError> {
    require_valid(g)?;
    let n = s.len();
    if n > MAX_ORACLE_LEN {
        return Err(ParseError::TooLong {
            len: n,
            max: MAX_ORACLE_LEN,
        });
    }
    let cat_choices = lexical_categories(g, s)?;
    let head_vectors = well_formed_head_vectors(n);

    let mut analyses = Vec::new();
    let mut cat_pick = vec![0usize; n];
    'cats: loop {
        let cats: Vec<Category> = cat_pick
            .iter()
            .zip(&cat_choices)
            .map(|(&c, choices)| choices[c].clone())
            .collect();

        for heads in &head_vectors {
            let root = heads.iter().position(|&h| h == 0).unwrap() + 1;
            if !g.is_root(&cats[root - 1]) {
                continue;
            }
            let entries_per_token: Vec<Vec<TraceEntry>> = (1..=n)
                .map(|i| licensing_entries(g, &cats, heads, i))
                .collect();
            if entries_per_token.iter().any(Vec::is_empty) {
                continue;
            }
            // One analysis per combination of licensing rules.
            let mut pick = vec![0usize; n];
            loop {
                let mut arcs = Vec::new();
                let mut trace = BTreeMap::new();
                for i in 1..=n {
                    let entry = &entries_per_token[i - 1][pick[i - 1]];
                    trace.insert(i, entry.clone());
                    if let TraceEntry::Rule(rule) = entry {
                        let left_deps: Vec<usize> = (1..i).filter(|&d| heads[d - 1] == i).collect();
                        let right_deps: Vec<usize> =
                            (i + 1..=n).filter(|&d| heads[d - 1] == i).collect();
                        for (slot, &d) in rule.left.iter().zip(&left_deps) {
                            arcs.push(Arc::new(i, d, slot.label.as_deref().unwrap_or(UNLABELED)));
                        }
                        for (slot, &d) in rule.right.iter().zip(&right_deps) {
                            arcs.push(Arc::new(i, d, slot.label.as_deref().unwrap_or(UNLABELED)));
                        }
                    }
                }
                let parts = s
                    .forms()
                    .iter()
                    .zip(&cats)
                    .map(|(f, c)| (f.clone(), c.clone()))
                    .collect();
                let ds = DependencyStructure::from_parts(parts, arcs)
                    .expect("head vector yields a valid arc set");
                analyses.push(Analysis { ds, trace });

                let mut k = 0;
                loop {
                    if k == n {
                        break;
                    }
                    pick[k] += 1;
                    if pick[k] < entries_per_token[k].len() {
                        break;
                    }
                    pick[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        }

        let mut k = 0;
        loop {
            if k == n {
                break 'cats;
            }
            cat_pick[k] += 1;
            if cat_pick[k] < cat_choices[k].len() {
                break;
            }
            cat_pick[k] = 0;
            k += 1;
        }
    }

    Ok(canonicalize(analyses))
}
