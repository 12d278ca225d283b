//! Conversion between dependency structures and head-annotated phrase
//! markers.
//!
//! [`ds_to_pm`] derives the minimal phrase marker of a well-formed
//! projective structure: every token with dependents becomes one node whose
//! children are the full projections of its dependents around the token
//! itself, so the result contains no unary non-leaf nodes. [`pm_to_ds`] goes
//! the other way by head percolation: the lexical head of a node is the
//! lexical head of its marked head child, and every non-head child
//! contributes an arc.
//!
//! The correspondence is many-to-one in the phrase-marker direction: nested
//! and flat head-annotated trees can percolate to the same dependency
//! structure. Arc labels are not representable in phrase markers; a label
//! map keyed by dependent index is offered as a lossless side channel.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::axioms::{self, Violation};
use crate::ds::{Arc, DependencyStructure, FormatError, PhraseMarker, Token, UNLABELED};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConvertError {
    #[error("input structure is not a well-formed projective tree ({} violations)", .0.len())]
    IllFormed(Vec<Violation>),
    #[error("phrase-marker node has no valid head annotation")]
    MissingHead,
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("label map names dependent {0}, which has no incoming arc")]
    UnknownDependent(usize),
}

/// Derive the minimal phrase marker of a well-formed projective dependency
/// structure. Labels are dropped; use [`label_map`] to keep them.
pub fn ds_to_pm(ds: &DependencyStructure) -> Result<PhraseMarker, ConvertError> {
    let violations = axioms::validate(ds);
    if !violations.is_empty() {
        return Err(ConvertError::IllFormed(violations));
    }
    let root = ds.independents()[0];
    Ok(subtree_pm(ds, root))
}

fn subtree_pm(ds: &DependencyStructure, i: usize) -> PhraseMarker {
    let deps = ds.deps_of(i);
    if deps.is_empty() {
        return PhraseMarker::Leaf(ds.token(i).clone());
    }
    let mut children = Vec::with_capacity(deps.len() + 1);
    let mut head_child = 0;
    for &d in deps.iter().filter(|&&d| d < i) {
        children.push(subtree_pm(ds, d));
        head_child += 1;
    }
    children.push(PhraseMarker::Leaf(ds.token(i).clone()));
    for &d in deps.iter().filter(|&&d| d > i) {
        children.push(subtree_pm(ds, d));
    }
    PhraseMarker::node(children, head_child).expect("projective subtree has a contiguous fringe")
}

/// Recover a dependency structure from a head-annotated phrase marker by
/// head percolation. Tokens are re-indexed by fringe position, so a phrase
/// marker over any contiguous token range yields a structure over `1..=n`.
/// All arcs are unlabeled.
pub fn pm_to_ds(pm: &PhraseMarker) -> Result<DependencyStructure, ConvertError> {
    let fringe = pm.fringe();
    for pair in fringe.windows(2) {
        if pair[1].index != pair[0].index + 1 {
            return Err(ConvertError::Format(FormatError::Malformed(format!(
                "fringe is not contiguous: token {} follows token {}",
                pair[1].index, pair[0].index
            ))));
        }
    }
    let offset = fringe.first().map_or(0, |t| t.index - 1);
    let tokens: Vec<Token> = fringe
        .iter()
        .map(|t| Token::new(t.index - offset, t.form.clone(), t.category.clone()))
        .collect::<Result<_, _>>()
        .map_err(FormatError::Structure)?;

    let mut arcs = Vec::new();
    percolate(pm, offset, &mut arcs)?;
    DependencyStructure::new(tokens, arcs)
        .map_err(|e| ConvertError::Format(FormatError::Structure(e)))
}

/// Lexical head of a subtree, collecting one arc per non-head child.
fn percolate(pm: &PhraseMarker, offset: usize, arcs: &mut Vec<Arc>) -> Result<usize, ConvertError> {
    match pm {
        PhraseMarker::Leaf(t) => Ok(t.index - offset),
        PhraseMarker::Node {
            children,
            head_child,
        } => {
            if *head_child >= children.len() {
                return Err(ConvertError::MissingHead);
            }
            let mut dep_heads = Vec::with_capacity(children.len());
            for c in children {
                dep_heads.push(percolate(c, offset, arcs)?);
            }
            let head = dep_heads[*head_child];
            for (k, &d) in dep_heads.iter().enumerate() {
                if k != *head_child {
                    arcs.push(Arc::unlabeled(head, d));
                }
            }
            Ok(head)
        }
    }
}

/// The labels a phrase marker cannot carry, keyed by dependent index.
/// Unlabeled arcs are omitted.
pub fn label_map(ds: &DependencyStructure) -> BTreeMap<usize, String> {
    ds.arcs()
        .iter()
        .filter(|a| a.label != UNLABELED)
        .map(|a| (a.dep, a.label.clone()))
        .collect()
}

/// Re-apply a label map produced by [`label_map`] after a round trip through
/// phrase-marker land.
pub fn apply_labels(
    ds: &DependencyStructure,
    labels: &BTreeMap<usize, String>,
) -> Result<DependencyStructure, ConvertError> {
    for dep in labels.keys() {
        if *dep == 0 || *dep > ds.len() || ds.incoming(*dep).is_none() {
            return Err(ConvertError::UnknownDependent(*dep));
        }
    }
    let arcs = ds
        .arcs()
        .iter()
        .map(|a| match labels.get(&a.dep) {
            Some(l) => Arc::new(a.head, a.dep, l.clone()),
            None => a.clone(),
        })
        .collect();
    DependencyStructure::new(ds.tokens().to_vec(), arcs)
        .map_err(|e| ConvertError::Format(FormatError::Structure(e)))
}
