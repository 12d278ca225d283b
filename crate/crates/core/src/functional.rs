//! Functional structures and predicate-argument semantics.
//!
//! [`build_fstructure`] turns a labeled analysis into a nested
//! attribute-value structure: every token contributes one level whose PRED
//! is its word form and whose attributes are its dependents, keyed by arc
//! label. The starred slot of a rule is both the syntactic and the
//! functional head, so the governor's level always contains its dependents.
//!
//! [`resolve_control`] applies the grammar's control specifications: for a
//! node matching a trigger, a gap variable is installed at the given path
//! below it and co-indexed with the node itself. [`to_semantics`] then folds
//! the structure into a predicate-argument term, ordering arguments by the
//! lexical frame of each predicate and writing gaps as shared variables.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::ds::UNLABELED;
use crate::grammar::{Category, Grammar};
use crate::parser::Analysis;

pub type VarId = usize;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FunctionalError {
    #[error("functional uniqueness violated: two {function} dependents under token {head}")]
    DuplicateFunction { head: usize, function: String },
    #[error("control conflict at {path} below token {trigger}: the position is already filled")]
    ControlConflict { trigger: usize, path: String },
    #[error("token {token} (`{pred}`) has dependents but no frame")]
    MissingFrame { token: usize, pred: String },
    #[error("frame for `{pred}` does not match its functions: {detail}")]
    FrameMismatch { pred: String, detail: String },
}

/// A nested attribute-value structure with PRED values and gap variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalStructure {
    pub pred: String,
    /// Token index of the contributing node, used for co-indexing.
    pub index: usize,
    pub attrs: BTreeMap<String, FunctionalStructure>,
    pub gaps: BTreeMap<String, VarId>,
    category: Category,
}

impl FunctionalStructure {
    pub fn category(&self) -> &Category {
        &self.category
    }

    /// Number of PRED-bearing sub-structures, this one included.
    pub fn node_count(&self) -> usize {
        1 + self.attrs.values().map(Self::node_count).sum::<usize>()
    }

    /// Find the sub-structure contributed by a token.
    pub fn find_index(&self, index: usize) -> Option<&FunctionalStructure> {
        if self.index == index {
            return Some(self);
        }
        self.attrs.values().find_map(|f| f.find_index(index))
    }

    fn find_index_mut(&mut self, index: usize) -> Option<&mut FunctionalStructure> {
        if self.index == index {
            return Some(self);
        }
        self.attrs
            .values_mut()
            .find_map(|f| f.find_index_mut(index))
    }

    fn max_var(&self) -> VarId {
        let here = self.gaps.values().copied().max().unwrap_or(0);
        self.attrs
            .values()
            .map(Self::max_var)
            .max()
            .unwrap_or(0)
            .max(here)
    }

    /// JSON form: `{"pred", "index", "attrs": {..}, "gaps": {f: "x1"}}`.
    pub fn to_json(&self) -> Value {
        let attrs: serde_json::Map<String, Value> = self
            .attrs
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect();
        let gaps: serde_json::Map<String, Value> = self
            .gaps
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(format!("x{v}"))))
            .collect();
        json!({
            "pred": self.pred,
            "index": self.index,
            "attrs": Value::Object(attrs),
            "gaps": Value::Object(gaps),
        })
    }
}

/// A gap variable bound to its controller token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorefNote {
    pub variable: VarId,
    pub antecedent: usize,
}

/// Build the functional structure of an analysis, rooted at the independent
/// token. Unlabeled arcs receive positional pseudo-functions `_1`, `_2`, ..
/// numbered left to right under each head, so purely unlabeled grammars
/// still build.
pub fn build_fstructure(a: &Analysis) -> Result<FunctionalStructure, FunctionalError> {
    let ds = a.ds();
    let root = ds.independents()[0];
    build_node(a, root)
}

fn build_node(a: &Analysis, i: usize) -> Result<FunctionalStructure, FunctionalError> {
    let ds = a.ds();
    let token = ds.token(i);
    let mut attrs = BTreeMap::new();
    let mut positional = 0usize;
    for d in ds.deps_of(i) {
        let arc = ds.incoming(d).expect("dependent has an incoming arc");
        let function = if arc.label == UNLABELED {
            positional += 1;
            format!("_{positional}")
        } else {
            arc.label.clone()
        };
        let sub = build_node(a, d)?;
        if attrs.insert(function.clone(), sub).is_some() {
            return Err(FunctionalError::DuplicateFunction { head: i, function });
        }
    }
    Ok(FunctionalStructure {
        pred: token.form.clone(),
        index: i,
        attrs,
        gaps: BTreeMap::new(),
        category: token.category.clone(),
    })
}

/// Apply the grammar's control specifications.
///
/// For every specification whose trigger matches a node's form or category,
/// the gap path is followed from that node's own level; if the full prefix
/// exists, a gap variable co-indexed with the node is installed at the final
/// function. Missing prefixes mean the specification simply does not fire.
/// A path whose final position already carries an attribute, or is gapped by
/// a different firing, is a control conflict. Applying the resolution twice
/// is the same as applying it once.
pub fn resolve_control(
    fs: &FunctionalStructure,
    a: &Analysis,
    g: &Grammar,
) -> Result<(FunctionalStructure, Vec<CorefNote>), FunctionalError> {
    let mut out = fs.clone();
    let mut notes = Vec::new();
    let mut next_var = fs.max_var() + 1;
    let mut gapped_here: Vec<(usize, String)> = Vec::new();

    for spec in g.controls() {
        for token in a.ds().tokens() {
            if token.form != spec.trigger && token.category.name() != spec.trigger {
                continue;
            }
            let Some(node) = out.find_index(token.index) else {
                continue;
            };
            // Walk the prefix; the spec does not fire if any step is absent.
            let (last, prefix) = spec.gap_path.split_last().expect("path is non-empty");
            let mut cursor = node;
            let mut fired = true;
            for step in prefix {
                match cursor.attrs.get(step) {
                    Some(next) => cursor = next,
                    None => {
                        fired = false;
                        break;
                    }
                }
            }
            if !fired {
                continue;
            }
            let container = cursor.index;
            let address = (container, last.clone());
            let target = out
                .find_index_mut(container)
                .expect("container was just located");
            if target.attrs.contains_key(last) || gapped_here.contains(&address) {
                return Err(FunctionalError::ControlConflict {
                    trigger: token.index,
                    path: spec.gap_path.join("."),
                });
            }
            let var = match target.gaps.get(last) {
                Some(&existing) => existing,
                None => {
                    let var = next_var;
                    next_var += 1;
                    target.gaps.insert(last.clone(), var);
                    var
                }
            };
            gapped_here.push(address);
            notes.push(CorefNote {
                variable: var,
                antecedent: token.index,
            });
        }
    }

    notes.sort();
    notes.dedup();
    Ok((out, notes))
}

/// A predicate-argument term with shared variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemanticTerm {
    Const(String),
    Var(VarId),
    App {
        functor: String,
        args: Vec<SemanticTerm>,
    },
}

impl fmt::Display for SemanticTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticTerm::Const(c) => f.write_str(c),
            SemanticTerm::Var(v) => write!(f, "x{v}"),
            SemanticTerm::App { functor, args } => {
                write!(f, "{functor}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl SemanticTerm {
    /// Variables occurring in the term, in order of first appearance.
    pub fn variables(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<VarId>) {
        match self {
            SemanticTerm::Const(_) => {}
            SemanticTerm::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            SemanticTerm::App { args, .. } => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }
}

/// Fold a functional structure into a semantic term.
///
/// A node with dependents or gaps needs a frame (looked up by word form
/// first, then by category); the frame must name exactly the functions
/// present, and fixes the argument order. Bare nodes without a frame become
/// constants.
pub fn to_semantics(
    fs: &FunctionalStructure,
    g: &Grammar,
) -> Result<SemanticTerm, FunctionalError> {
    let frame = g.lookup_frame(&fs.pred, &fs.category);
    if fs.attrs.is_empty() && fs.gaps.is_empty() {
        return match frame {
            None => Ok(SemanticTerm::Const(fs.pred.clone())),
            Some(frame) => Err(FunctionalError::FrameMismatch {
                pred: fs.pred.clone(),
                detail: format!("frame names {:?} but the node has no functions", frame),
            }),
        };
    }
    let Some(frame) = frame else {
        return Err(FunctionalError::MissingFrame {
            token: fs.index,
            pred: fs.pred.clone(),
        });
    };
    for function in fs.attrs.keys().chain(fs.gaps.keys()) {
        if !frame.contains(function) {
            return Err(FunctionalError::FrameMismatch {
                pred: fs.pred.clone(),
                detail: format!("function {function} is not in the frame {frame:?}"),
            });
        }
    }
    let mut args = Vec::with_capacity(frame.len());
    for function in frame {
        if let Some(sub) = fs.attrs.get(function) {
            args.push(to_semantics(sub, g)?);
        } else if let Some(&var) = fs.gaps.get(function) {
            args.push(SemanticTerm::Var(var));
        } else {
            return Err(FunctionalError::FrameMismatch {
                pred: fs.pred.clone(),
                detail: format!("frame names {function}, which is neither an attribute nor a gap"),
            });
        }
    }
    Ok(SemanticTerm::App {
        functor: fs.pred.clone(),
        args,
    })
}

/// Render a term with its co-reference annotations:
/// `functor(arg, .., x1) # x1 = token[3]`.
pub fn render_semantics(term: &SemanticTerm, notes: &[CorefNote]) -> String {
    let mut out = term.to_string();
    let mut notes: Vec<&CorefNote> = notes.iter().collect();
    notes.sort();
    for n in notes {
        out.push_str(&format!(" # x{} = token[{}]", n.variable, n.antecedent));
    }
    out
}
