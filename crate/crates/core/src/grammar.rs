//! Grammar descriptions: categories, dependency rules with a starred governor
//! position and labeled dependent slots, leaf/root declarations, a lexicon,
//! argument frames, and lexical control specifications.
//!
//! The text format is line-oriented:
//!
//! ```text
//! cat D N V            # declare categories
//! root V               # V may occur without a governor
//! leaf D N             # D and N may occur without dependents
//! rule N : D:DET *     # N governs a preceding D bearing the DET function
//! rule V : N:SUBJ *
//! word the : D
//! word dog : N
//! word barks : V
//! frame barks : SUBJ   # argument order for semantic terms
//! ```
//!
//! `#` starts a comment, blank lines are ignored. A rule body lists the
//! dependent slots in surface order with a single bare `*` marking where the
//! governor itself sits. Slots are `Cat` or `Cat:LABEL`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Characters that may not appear in category names, labels, or word forms.
pub const RESERVED_CHARS: &[char] = &['(', ')', ':', '*', '^', '#'];

/// Start symbol of the constructed context-free grammar.
pub const CFG_START: &str = "S^";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GrammarError {
    /// Error in grammar text, with a 1-based line number.
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    /// Structural error when assembling a grammar programmatically.
    #[error("{0}")]
    Invalid(String),
}

impl GrammarError {
    fn invalid(msg: impl Into<String>) -> Self {
        GrammarError::Invalid(msg.into())
    }

    /// Attach a line number to a builder-level error.
    fn at_line(self, line: usize) -> Self {
        match self {
            GrammarError::Invalid(msg) => GrammarError::Syntax { line, msg },
            e => e,
        }
    }
}

fn check_symbol(what: &str, s: &str) -> Result<(), GrammarError> {
    if s.is_empty() {
        return Err(GrammarError::invalid(format!("empty {what}")));
    }
    if s.chars().any(char::is_whitespace) {
        return Err(GrammarError::invalid(format!(
            "{what} `{s}` contains whitespace"
        )));
    }
    if let Some(c) = s.chars().find(|c| RESERVED_CHARS.contains(c)) {
        return Err(GrammarError::invalid(format!(
            "{what} `{s}` contains reserved character `{c}`"
        )));
    }
    Ok(())
}

fn check_label(s: &str) -> Result<(), GrammarError> {
    check_symbol("label", s)?;
    if s.contains('.') {
        return Err(GrammarError::invalid(format!(
            "label `{s}` contains `.` (reserved for control paths)"
        )));
    }
    if s.starts_with('_') {
        return Err(GrammarError::invalid(format!(
            "label `{s}` starts with `_` (reserved for positional functions)"
        )));
    }
    Ok(())
}

fn check_form(s: &str) -> Result<(), GrammarError> {
    check_symbol("word form", s)?;
    if s.contains('/') {
        return Err(GrammarError::invalid(format!(
            "word form `{s}` contains `/` (reserved for phrase-marker leaves)"
        )));
    }
    Ok(())
}

/// A syntactic category (the auxiliary-alphabet symbols of the rule schema).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Category(String);

impl Category {
    pub fn new(name: impl Into<String>) -> Result<Self, GrammarError> {
        let name = name.into();
        check_symbol("category", &name)?;
        Ok(Category(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Category {
    type Error = GrammarError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Category::new(s)
    }
}

impl From<Category> for String {
    fn from(c: Category) -> String {
        c.0
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One dependent position of a rule: a category plus an optional function
/// label (`D` or `D:DET`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub category: Category,
    pub label: Option<String>,
}

impl Slot {
    pub fn new(category: Category) -> Self {
        Slot {
            category,
            label: None,
        }
    }

    pub fn labeled(category: Category, label: impl Into<String>) -> Result<Self, GrammarError> {
        let label = label.into();
        check_label(&label)?;
        Ok(Slot {
            category,
            label: Some(label),
        })
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{}:{}", self.category, l),
            None => write!(f, "{}", self.category),
        }
    }
}

/// One dependency rule: the governor's category plus the ordered dependent
/// slots to its left and right. The governor position itself sits between
/// `left` and `right` and is not a slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Category,
    pub left: Vec<Slot>,
    pub right: Vec<Slot>,
}

impl Rule {
    /// Build a rule, rejecting duplicate labels among its slots.
    pub fn new(head: Category, left: Vec<Slot>, right: Vec<Slot>) -> Result<Self, GrammarError> {
        let rule = Rule { head, left, right };
        rule.check_labels()?;
        Ok(rule)
    }

    fn check_labels(&self) -> Result<(), GrammarError> {
        let mut seen = BTreeSet::new();
        for slot in self.slots() {
            if let Some(l) = &slot.label {
                if !seen.insert(l.clone()) {
                    return Err(GrammarError::invalid(format!(
                        "duplicate label {} in rule for {}",
                        l, self.head
                    )));
                }
            }
        }
        Ok(())
    }

    /// All slots, left before right.
    pub fn slots(&self) -> impl Iterator<Item = &Slot> {
        self.left.iter().chain(self.right.iter())
    }

    pub fn arity(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :", self.head)?;
        for s in &self.left {
            write!(f, " {s}")?;
        }
        write!(f, " *")?;
        for s in &self.right {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// A lexical control specification: when a node matching `trigger` (by form
/// or category) appears, a gap is installed below it at `gap_path` and
/// co-indexed with the node itself (the controller is always the trigger
/// node, written `SELF` in the text format).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ControlSpec {
    pub trigger: String,
    pub gap_path: Vec<String>,
}

impl ControlSpec {
    pub fn new(trigger: impl Into<String>, gap_path: Vec<String>) -> Result<Self, GrammarError> {
        let trigger = trigger.into();
        check_symbol("control trigger", &trigger)?;
        if gap_path.is_empty() {
            return Err(GrammarError::invalid("control path must not be empty"));
        }
        for l in &gap_path {
            check_label(l)?;
        }
        Ok(ControlSpec { trigger, gap_path })
    }
}

impl fmt::Display for ControlSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} = SELF", self.trigger, self.gap_path.join("."))
    }
}

/// A compiled grammar. Immutable after construction; all categories
/// referenced by rules, declarations, and the lexicon are declared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grammar {
    cats: BTreeSet<Category>,
    rules: Vec<Rule>,
    leaf_cats: BTreeSet<Category>,
    root_cats: BTreeSet<Category>,
    lexicon: BTreeMap<String, BTreeSet<Category>>,
    frames: BTreeMap<String, Vec<String>>,
    controls: Vec<ControlSpec>,
}

impl Grammar {
    pub fn builder() -> GrammarBuilder {
        GrammarBuilder::default()
    }

    pub fn categories(&self) -> &BTreeSet<Category> {
        &self.cats
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rules_with_head<'a>(&'a self, head: &'a Category) -> impl Iterator<Item = &'a Rule> {
        self.rules.iter().filter(move |r| &r.head == head)
    }

    pub fn leaf_cats(&self) -> &BTreeSet<Category> {
        &self.leaf_cats
    }

    pub fn root_cats(&self) -> &BTreeSet<Category> {
        &self.root_cats
    }

    pub fn is_leaf(&self, c: &Category) -> bool {
        self.leaf_cats.contains(c)
    }

    pub fn is_root(&self, c: &Category) -> bool {
        self.root_cats.contains(c)
    }

    pub fn lexicon(&self) -> &BTreeMap<String, BTreeSet<Category>> {
        &self.lexicon
    }

    pub fn categories_of(&self, form: &str) -> Option<&BTreeSet<Category>> {
        self.lexicon.get(form)
    }

    pub fn frames(&self) -> &BTreeMap<String, Vec<String>> {
        &self.frames
    }

    /// Frame lookup for a node: by word form first, then by category name.
    pub fn lookup_frame(&self, form: &str, cat: &Category) -> Option<&[String]> {
        self.frames
            .get(form)
            .or_else(|| self.frames.get(cat.name()))
            .map(Vec::as_slice)
    }

    pub fn controls(&self) -> &[ControlSpec] {
        &self.controls
    }
}

/// Incremental grammar assembly with declaredness checks.
#[derive(Debug, Default)]
pub struct GrammarBuilder {
    g: Grammar,
}

impl GrammarBuilder {
    pub fn category(&mut self, name: &str) -> Result<&mut Self, GrammarError> {
        self.g.cats.insert(Category::new(name)?);
        Ok(self)
    }

    fn declared(&self, c: &Category) -> Result<(), GrammarError> {
        if self.g.cats.contains(c) {
            Ok(())
        } else {
            Err(GrammarError::invalid(format!("undeclared category {c}")))
        }
    }

    pub fn root(&mut self, name: &str) -> Result<&mut Self, GrammarError> {
        let c = Category::new(name)?;
        self.declared(&c)?;
        self.g.root_cats.insert(c);
        Ok(self)
    }

    pub fn leaf(&mut self, name: &str) -> Result<&mut Self, GrammarError> {
        let c = Category::new(name)?;
        self.declared(&c)?;
        self.g.leaf_cats.insert(c);
        Ok(self)
    }

    pub fn rule(&mut self, rule: Rule) -> Result<&mut Self, GrammarError> {
        rule.check_labels()?;
        self.declared(&rule.head)?;
        for slot in rule.slots() {
            self.declared(&slot.category)?;
        }
        self.g.rules.push(rule);
        Ok(self)
    }

    pub fn word(&mut self, form: &str, cats: &[&str]) -> Result<&mut Self, GrammarError> {
        check_form(form)?;
        if cats.is_empty() {
            return Err(GrammarError::invalid(format!(
                "word {form} declared with no categories"
            )));
        }
        for name in cats {
            let c = Category::new(*name)?;
            self.declared(&c)?;
            self.g
                .lexicon
                .entry(form.to_string())
                .or_default()
                .insert(c);
        }
        Ok(self)
    }

    pub fn frame(&mut self, trigger: &str, labels: &[&str]) -> Result<&mut Self, GrammarError> {
        check_symbol("frame trigger", trigger)?;
        if labels.is_empty() {
            return Err(GrammarError::invalid(format!(
                "frame for {trigger} has no labels"
            )));
        }
        for l in labels {
            check_label(l)?;
        }
        let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        if let Some(prev) = self.g.frames.get(trigger) {
            if prev != &labels {
                return Err(GrammarError::invalid(format!(
                    "frame for {trigger} redefined with different labels"
                )));
            }
        }
        self.g.frames.insert(trigger.to_string(), labels);
        Ok(self)
    }

    pub fn control(&mut self, trigger: &str, path: &[&str]) -> Result<&mut Self, GrammarError> {
        let spec = ControlSpec::new(trigger, path.iter().map(|s| s.to_string()).collect())?;
        self.g.controls.push(spec);
        Ok(self)
    }

    /// Finish assembly. Rules and controls are stored sorted with duplicates
    /// collapsed, so equal grammars compare equal regardless of input order.
    pub fn build(mut self) -> Grammar {
        self.g.rules.sort();
        self.g.rules.dedup();
        self.g.controls.sort();
        self.g.controls.dedup();
        self.g
    }
}

/// Parse the grammar text format. Category declarations are gathered in a
/// first pass, so directive order does not matter.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut b = Grammar::builder();

    let logical_lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let stripped = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            (i + 1, stripped.split_whitespace().collect::<Vec<_>>())
        })
        .filter(|(_, toks)| !toks.is_empty())
        .collect();

    for (line, toks) in &logical_lines {
        if toks[0] == "cat" {
            if toks.len() < 2 {
                return Err(GrammarError::Syntax {
                    line: *line,
                    msg: "cat directive needs at least one name".into(),
                });
            }
            for name in &toks[1..] {
                b.category(name).map_err(|e| e.at_line(*line))?;
            }
        }
    }

    for (line, toks) in &logical_lines {
        let line = *line;
        let at = |e: GrammarError| e.at_line(line);
        let syntax = |msg: String| GrammarError::Syntax { line, msg };
        match toks[0] {
            "cat" => {}
            "root" | "leaf" => {
                if toks.len() < 2 {
                    return Err(syntax(format!(
                        "{} directive needs at least one name",
                        toks[0]
                    )));
                }
                for name in &toks[1..] {
                    if toks[0] == "root" {
                        b.root(name).map_err(at)?;
                    } else {
                        b.leaf(name).map_err(at)?;
                    }
                }
            }
            "rule" => {
                if toks.len() < 3 || toks[2] != ":" {
                    return Err(syntax(
                        "rule syntax is `rule Head : slots* * slots*`".into(),
                    ));
                }
                let head = Category::new(toks[1]).map_err(at)?;
                let mut left = Vec::new();
                let mut right = Vec::new();
                let mut seen_star = false;
                for tok in &toks[3..] {
                    if *tok == "*" {
                        if seen_star {
                            return Err(syntax("rule has more than one `*`".into()));
                        }
                        seen_star = true;
                        continue;
                    }
                    let slot = match tok.split_once(':') {
                        Some((cat, label)) => {
                            Slot::labeled(Category::new(cat).map_err(at)?, label).map_err(at)?
                        }
                        None => Slot::new(Category::new(*tok).map_err(at)?),
                    };
                    if seen_star {
                        right.push(slot);
                    } else {
                        left.push(slot);
                    }
                }
                if !seen_star {
                    return Err(syntax("rule has no governor position `*`".into()));
                }
                if left.is_empty() && right.is_empty() {
                    // X(*) with no dependents is exactly a leaf declaration.
                    b.leaf(head.name()).map_err(at)?;
                } else {
                    b.rule(Rule::new(head, left, right).map_err(at)?)
                        .map_err(at)?;
                }
            }
            "word" => {
                if toks.len() < 4 || toks[2] != ":" {
                    return Err(syntax("word syntax is `word form : Cat+`".into()));
                }
                b.word(toks[1], &toks[3..]).map_err(at)?;
            }
            "frame" => {
                if toks.len() < 4 || toks[2] != ":" {
                    return Err(syntax("frame syntax is `frame trigger : LABEL+`".into()));
                }
                b.frame(toks[1], &toks[3..]).map_err(at)?;
            }
            "control" => {
                if toks.len() != 6 || toks[2] != ":" || toks[4] != "=" || toks[5] != "SELF" {
                    return Err(syntax(
                        "control syntax is `control trigger : LABEL(.LABEL)* = SELF`".into(),
                    ));
                }
                let path: Vec<&str> = toks[3].split('.').collect();
                b.control(toks[1], &path).map_err(at)?;
            }
            other => {
                return Err(syntax(format!("unknown directive `{other}`")));
            }
        }
    }

    Ok(b.build())
}

/// Canonical serializer: directives in a fixed order, one entry per line,
/// entries sorted lexicographically, single spaces, LF line endings.
/// `parse_grammar(render_grammar(g)) == g` for every grammar value.
pub fn render_grammar(g: &Grammar) -> String {
    let mut out = String::new();
    for c in &g.cats {
        out.push_str(&format!("cat {c}\n"));
    }
    for c in &g.root_cats {
        out.push_str(&format!("root {c}\n"));
    }
    for c in &g.leaf_cats {
        out.push_str(&format!("leaf {c}\n"));
    }
    let mut rule_lines: Vec<String> = g.rules.iter().map(|r| format!("rule {r}\n")).collect();
    rule_lines.sort();
    for l in rule_lines {
        out.push_str(&l);
    }
    for (form, cats) in &g.lexicon {
        let cats: Vec<&str> = cats.iter().map(Category::name).collect();
        out.push_str(&format!("word {} : {}\n", form, cats.join(" ")));
    }
    for (trigger, labels) in &g.frames {
        out.push_str(&format!("frame {} : {}\n", trigger, labels.join(" ")));
    }
    for spec in &g.controls {
        out.push_str(&format!("control {spec}\n"));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {}", tag, self.message)
    }
}

fn err(message: String) -> Diagnostic {
    Diagnostic {
        severity: Severity::Error,
        message,
    }
}

fn warn(message: String) -> Diagnostic {
    Diagnostic {
        severity: Severity::Warning,
        message,
    }
}

/// Diagnose a grammar. Errors make the grammar unusable for parsing and the
/// CFG construction; warnings flag dead or unproductive pieces.
pub fn validate_grammar(g: &Grammar) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if g.root_cats().is_empty() {
        out.push(err("no root category declared".into()));
    }

    for rule in g.rules() {
        if rule.arity() == 0 {
            out.push(err(format!(
                "rule `{rule}` has no dependent slots; use a leaf declaration"
            )));
        }
        let mut seen = BTreeSet::new();
        for slot in rule.slots() {
            if let Some(l) = &slot.label {
                if !seen.insert(l) {
                    out.push(err(format!("duplicate label {l} in rule `{rule}`")));
                }
            }
        }
    }

    let mut mentioned: BTreeSet<&Category> = BTreeSet::new();
    mentioned.extend(g.root_cats());
    mentioned.extend(g.leaf_cats());
    for rule in g.rules() {
        mentioned.insert(&rule.head);
        mentioned.extend(rule.slots().map(|s| &s.category));
    }
    for cats in g.lexicon().values() {
        mentioned.extend(cats);
    }

    let completable: BTreeSet<&Category> = g
        .rules()
        .iter()
        .map(|r| &r.head)
        .chain(g.leaf_cats())
        .collect();

    for c in g.categories() {
        if !mentioned.contains(c) {
            out.push(warn(format!("unreachable category {c}")));
        } else if !completable.contains(c) {
            out.push(warn(format!(
                "category {c} has no rule or leaf declaration and can never complete"
            )));
        }
    }

    for rule in g.rules() {
        let has_word = g.lexicon().values().any(|cats| cats.contains(&rule.head));
        if !has_word {
            out.push(warn(format!(
                "no word of category {} for rule `{}`",
                rule.head, rule
            )));
        }
    }

    out
}

/// One context-free production with the position of its head child.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Production {
    pub lhs: String,
    pub rhs: Vec<String>,
    pub head_index: usize,
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {} # head={}",
            self.lhs,
            self.rhs.join(" "),
            self.head_index
        )
    }
}

/// A context-free grammar with head-marked productions, strongly equivalent
/// to the dependency grammar it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub nonterminals: BTreeSet<String>,
    pub terminals: BTreeSet<String>,
    pub start: String,
    pub productions: Vec<Production>,
}

impl Cfg {
    /// Emission format: one production per line, canonically sorted.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for p in &self.productions {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }
}

/// Phrasal nonterminal for a category.
pub fn bar_symbol(c: &Category) -> String {
    format!("{}_bar", c.name())
}

/// Preterminal for a category.
pub fn lex_symbol(c: &Category) -> String {
    format!("{}_lex", c.name())
}

/// Construct the strongly equivalent context-free grammar.
///
/// For every category X there is a phrasal nonterminal `X_bar` and a
/// preterminal `X_lex` with `X_lex -> w` for every word of category X. Every
/// dependency rule `X(A .. * .. Z)` becomes `X_bar -> A_bar .. X_lex .. Z_bar`
/// with the head index at the `X_lex` position; every leaf declaration
/// becomes `X_bar -> X_lex`, and the start symbol expands to `X_bar` for
/// every root category. The terminal alphabet is exactly the lexicon's word
/// forms. Equal grammars yield identical values, including production order.
pub fn gaifman_cfg(g: &Grammar) -> Cfg {
    let mut productions = Vec::new();

    for c in g.root_cats() {
        productions.push(Production {
            lhs: CFG_START.to_string(),
            rhs: vec![bar_symbol(c)],
            head_index: 0,
        });
    }

    for rule in g.rules() {
        let mut rhs: Vec<String> = rule.left.iter().map(|s| bar_symbol(&s.category)).collect();
        let head_index = rhs.len();
        rhs.push(lex_symbol(&rule.head));
        rhs.extend(rule.right.iter().map(|s| bar_symbol(&s.category)));
        productions.push(Production {
            lhs: bar_symbol(&rule.head),
            rhs,
            head_index,
        });
    }

    for c in g.leaf_cats() {
        productions.push(Production {
            lhs: bar_symbol(c),
            rhs: vec![lex_symbol(c)],
            head_index: 0,
        });
    }

    for (form, cats) in g.lexicon() {
        for c in cats {
            productions.push(Production {
                lhs: lex_symbol(c),
                rhs: vec![form.clone()],
                head_index: 0,
            });
        }
    }

    productions.sort();
    productions.dedup();

    let mut nonterminals: BTreeSet<String> = BTreeSet::new();
    nonterminals.insert(CFG_START.to_string());
    for c in g.categories() {
        nonterminals.insert(bar_symbol(c));
        nonterminals.insert(lex_symbol(c));
    }

    Cfg {
        nonterminals,
        terminals: g.lexicon().keys().cloned().collect(),
        start: CFG_START.to_string(),
        productions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DNV: &str = "cat D N V\nroot V\nleaf D\nleaf N\nrule N : D:DET *\nrule V : N:SUBJ *\nword the : D\nword dog : N\nword barks : V\n";

    #[test]
    fn parse_minimal_grammar() {
        let g = parse_grammar("cat V\nroot V\nleaf V\nword runs : V\n").unwrap();
        assert_eq!(g.rules().len(), 0);
        assert!(g.is_root(&Category::new("V").unwrap()));
        assert!(g.is_leaf(&Category::new("V").unwrap()));
        let v = Category::new("V").unwrap();
        assert_eq!(
            g.categories_of("runs").unwrap().iter().collect::<Vec<_>>(),
            vec![&v]
        );
    }

    #[test]
    fn parse_dnv_grammar() {
        let g = parse_grammar(DNV).unwrap();
        assert_eq!(g.rules().len(), 2);
        let n_rule = &g.rules()[0];
        assert_eq!(n_rule.head.name(), "N");
        assert_eq!(n_rule.left.len(), 1);
        assert_eq!(n_rule.left[0].category.name(), "D");
        assert_eq!(n_rule.left[0].label.as_deref(), Some("DET"));
        assert!(n_rule.right.is_empty());
    }

    #[test]
    fn undeclared_category_is_an_error() {
        let e = parse_grammar("rule N : D *\n").unwrap_err();
        match e {
            GrammarError::Syntax { line, msg } => {
                assert_eq!(line, 1);
                assert!(msg.contains("undeclared category"), "{msg}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_directive_is_an_error() {
        let e = parse_grammar("cat V\nfoo V\n").unwrap_err();
        assert!(e.to_string().contains("unknown directive"));
        assert!(e.to_string().contains("line 2"));
    }

    #[test]
    fn duplicate_rule_lines_collapse() {
        let g = parse_grammar("cat N D\nroot N\nleaf D\nrule N : D *\nrule N : D *\n").unwrap();
        assert_eq!(g.rules().len(), 1);
    }

    #[test]
    fn duplicate_labels_in_rule_rejected() {
        let e = parse_grammar("cat V N\nrule V : N:OBJ * N:OBJ\n").unwrap_err();
        assert!(e.to_string().contains("duplicate label"));
    }

    #[test]
    fn zero_slot_rule_is_a_leaf_declaration() {
        let g = parse_grammar("cat V\nroot V\nrule V : *\nword v : V\n").unwrap();
        assert!(g.rules().is_empty());
        assert!(g.is_leaf(&Category::new("V").unwrap()));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let g =
            parse_grammar("# a grammar\n\ncat V # the only category\nroot V\nleaf V\n").unwrap();
        assert_eq!(g.categories().len(), 1);
    }

    #[test]
    fn multi_category_words() {
        let g = parse_grammar("cat N V\nroot V\nleaf N V\nword duck : N V\n").unwrap();
        assert_eq!(g.categories_of("duck").unwrap().len(), 2);
    }

    #[test]
    fn render_parse_round_trip() {
        let text = format!("{DNV}frame barks : SUBJ\nframe dog : DET\ncontrol V : SUBJ = SELF\n");
        let g = parse_grammar(&text).unwrap();
        let rendered = render_grammar(&g);
        let g2 = parse_grammar(&rendered).unwrap();
        assert_eq!(g, g2);
        assert_eq!(render_grammar(&g2), rendered);
    }

    #[test]
    fn canonical_rendering_is_sorted_one_entry_per_line() {
        // Shuffled input; rendering normalizes order, spacing, and endings.
        let text = "word dog : N\ncat V N D\nframe barks : SUBJ\nleaf N D\ncontrol V : SUBJ = SELF\nrule V : N:SUBJ *\nroot V\nrule N : D:DET *\nword the : D\nword barks : V\n";
        let g = parse_grammar(text).unwrap();
        assert_eq!(
            render_grammar(&g),
            "cat D\ncat N\ncat V\nroot V\nleaf D\nleaf N\nrule N : D:DET *\nrule V : N:SUBJ *\nword barks : V\nword dog : N\nword the : D\nframe barks : SUBJ\ncontrol V : SUBJ = SELF\n"
        );
    }

    #[test]
    fn validate_clean_grammar() {
        let g = parse_grammar(DNV).unwrap();
        assert!(validate_grammar(&g).is_empty());
    }

    #[test]
    fn validate_missing_root() {
        let g = parse_grammar("cat V\nleaf V\nword v : V\n").unwrap();
        let ds = validate_grammar(&g);
        assert!(ds
            .iter()
            .any(|d| d.severity == Severity::Error && d.message.contains("no root category")));
    }

    #[test]
    fn validate_unreachable_category() {
        let g = parse_grammar("cat V P\nroot V\nleaf V\nword v : V\n").unwrap();
        let ds = validate_grammar(&g);
        assert!(ds.iter().any(
            |d| d.severity == Severity::Warning && d.message.contains("unreachable category P")
        ));
    }

    #[test]
    fn validate_rule_head_without_word() {
        let g = parse_grammar("cat N V\nroot V\nleaf N\nrule V : N *\nword n : N\n").unwrap();
        let ds = validate_grammar(&g);
        assert!(ds.iter().any(
            |d| d.severity == Severity::Warning && d.message.contains("no word of category V")
        ));
    }

    #[test]
    fn validate_zero_slot_rule_built_programmatically() {
        let mut b = Grammar::builder();
        b.category("V").unwrap();
        b.root("V").unwrap();
        b.rule(Rule::new(Category::new("V").unwrap(), vec![], vec![]).unwrap())
            .unwrap();
        b.word("v", &["V"]).unwrap();
        let g = b.build();
        let ds = validate_grammar(&g);
        assert!(ds
            .iter()
            .any(|d| d.severity == Severity::Error && d.message.contains("no dependent slots")));
    }

    #[test]
    fn gaifman_trivial_grammar() {
        let g = parse_grammar("cat V\nroot V\nleaf V\nword runs : V\n").unwrap();
        let cfg = gaifman_cfg(&g);
        assert_eq!(
            cfg.render(),
            "S^ -> V_bar # head=0\nV_bar -> V_lex # head=0\nV_lex -> runs # head=0\n"
        );
        assert_eq!(cfg.terminals.iter().collect::<Vec<_>>(), vec!["runs"]);
    }

    #[test]
    fn gaifman_dnv_grammar() {
        let g = parse_grammar(DNV).unwrap();
        let cfg = gaifman_cfg(&g);
        let n_rule = Production {
            lhs: "N_bar".into(),
            rhs: vec!["D_bar".into(), "N_lex".into()],
            head_index: 1,
        };
        let v_rule = Production {
            lhs: "V_bar".into(),
            rhs: vec!["N_bar".into(), "V_lex".into()],
            head_index: 1,
        };
        assert!(cfg.productions.contains(&n_rule));
        assert!(cfg.productions.contains(&v_rule));
        let forms: Vec<&str> = cfg.terminals.iter().map(String::as_str).collect();
        assert_eq!(forms, vec!["barks", "dog", "the"]);
    }

    #[test]
    fn gaifman_is_deterministic() {
        // Same grammar assembled in two different input orders.
        let g1 = parse_grammar(DNV).unwrap();
        let shuffled = "word barks : V\nrule V : N:SUBJ *\ncat V N D\nleaf N\nleaf D\nword dog : N\nroot V\nrule N : D:DET *\nword the : D\n";
        let g2 = parse_grammar(shuffled).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(gaifman_cfg(&g1), gaifman_cfg(&g2));
    }

    #[test]
    fn control_line_parses() {
        let g = parse_grammar("cat X Y\nroot X\nleaf Y\nrule X : * Y:COMMENT\nword x : X\nword y : Y\ncontrol X : COMMENT.OBJ = SELF\n").unwrap();
        assert_eq!(g.controls().len(), 1);
        assert_eq!(g.controls()[0].trigger, "X");
        assert_eq!(g.controls()[0].gap_path, vec!["COMMENT", "OBJ"]);
    }

    #[test]
    fn bad_control_line() {
        let e = parse_grammar("cat X\ncontrol X : OBJ = OTHER\n").unwrap_err();
        assert!(e.to_string().contains("control syntax"));
    }

    #[test]
    fn reserved_characters_rejected() {
        assert!(Category::new("A*B").is_err());
        assert!(Category::new("").is_err());
        assert!(Category::new("A B").is_err());
        assert!(Slot::labeled(Category::new("N").unwrap(), "A.B").is_err());
        assert!(Slot::labeled(Category::new("N").unwrap(), "_1").is_err());
    }
}
