//! Loading wrappers and documents, and evaluating either kind of wrapper
//! to a complex object.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use testkit::corpus::Language;
use testkit::guided::Guide;
use wrapcore::doctree::{DocError, DocTree};
use wrapcore::elog::{extract, Anchor, Condition, ElogProgram, Emit};
use wrapcore::hel::{desugar, eval_vf_with, translate_vf, Cc, EvalOptions, HelStatement, VfPatom, VfStatement};
use wrapcore::object::ComplexObject;
use wrapcore::rpn::{eval_rpn, translate_rpn, Cond, Rpn};

use crate::CliError;

#[derive(Clone, Debug)]
pub enum Wrapper {
    Rpn(Rpn),
    /// The source statement and its variable-free form.
    Hel(HelStatement, VfStatement),
    Vhel(VfStatement),
    Elog(ElogProgram),
}

#[derive(Clone, Debug)]
pub struct Loaded {
    pub path: PathBuf,
    pub language: Language,
    pub wrapper: Wrapper,
}

pub fn load_wrapper(path: &Path) -> Result<Loaded, CliError> {
    let language = Language::from_path(path).ok_or_else(|| {
        CliError::wrapper(anyhow!("{}: unknown wrapper extension (expected .rpn, .hel, .vhel or .elog)", path.display()))
    })?;
    let text = fs::read_to_string(path)
        .with_context(|| format!("{}: cannot read wrapper", path.display()))
        .map_err(CliError::wrapper)?;
    let at = |e: &dyn std::fmt::Display| CliError::wrapper(anyhow!("{}: {e}", path.display()));
    let wrapper = match language {
        Language::Rpn => Wrapper::Rpn(Rpn::parse(text.trim()).map_err(|e| at(&e))?),
        Language::Hel => {
            let w = HelStatement::parse(&text).map_err(|e| at(&e))?;
            let vf = desugar(&w).map_err(|e| at(&e))?;
            Wrapper::Hel(w, vf)
        }
        Language::Vhel => Wrapper::Vhel(VfStatement::parse(&text).map_err(|e| at(&e))?),
        Language::Elog => Wrapper::Elog(ElogProgram::parse(&text).map_err(|e| at(&e))?),
    };
    Ok(Loaded { path: path.to_path_buf(), language, wrapper })
}

pub fn load_document(path: &Path) -> Result<DocTree, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("{}: cannot read document", path.display()))
        .map_err(CliError::document)?;
    DocTree::parse(&text).map_err(|e| {
        let DocError::MalformedInput { offset, .. } = &e;
        let (line, col) = line_col(&text, *offset);
        CliError::document(anyhow!("{}:{line}:{col}: {e}", path.display()))
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text.as_bytes()[..offset.min(text.len())];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let col = before.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
    (line, col)
}

impl Wrapper {
    /// The variable-free statement behind a HEL or vHEL wrapper.
    pub fn vf(&self) -> Option<&VfStatement> {
        match self {
            Wrapper::Hel(_, vf) | Wrapper::Vhel(vf) => Some(vf),
            _ => None,
        }
    }

    /// Shapes generated documents after the statement; Elog programs have
    /// no single path to follow.
    pub fn guide(&self) -> Option<Guide<'_>> {
        match self {
            Wrapper::Rpn(w) => Some(Guide::Rpn(w)),
            Wrapper::Hel(_, vf) | Wrapper::Vhel(vf) => Some(Guide::Vf(vf)),
            Wrapper::Elog(_) => None,
        }
    }

    /// The Elog form: the program itself or its translation.
    pub fn program(&self) -> anyhow::Result<ElogProgram> {
        match self {
            Wrapper::Rpn(w) => Ok(translate_rpn(w).program),
            Wrapper::Hel(_, vf) | Wrapper::Vhel(vf) => Ok(translate_vf(vf)?.program),
            Wrapper::Elog(p) => Ok(p.clone()),
        }
    }

    /// Errors here are wrapper errors: strict single-value violations,
    /// unstratified rule ranges, programs without a schema.
    pub fn evaluate(&self, t: &DocTree, opts: EvalOptions) -> anyhow::Result<ComplexObject> {
        match self {
            Wrapper::Rpn(w) => Ok(eval_rpn(w, t)),
            Wrapper::Hel(_, vf) | Wrapper::Vhel(vf) => Ok(eval_vf_with(vf, t, opts)?),
            Wrapper::Elog(p) => Ok(extract(p, t, Emit::Text)?),
        }
    }

    /// Tags and strings the wrapper mentions, for generating documents it
    /// can actually match.
    pub fn alphabet(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut tags = BTreeSet::new();
        let mut texts = BTreeSet::new();
        match self {
            Wrapper::Rpn(w) => {
                for p in w.patoms() {
                    tags.extend(p.path.tags().iter().map(|t| t.as_str().to_string()));
                    for c in &p.conds {
                        let mut c = c;
                        while let Cond::Chain(_, rest) = c {
                            c = rest;
                        }
                        if let Cond::TxtEq(s) = c {
                            texts.insert(s.clone());
                        }
                    }
                }
            }
            Wrapper::Hel(_, vf) | Wrapper::Vhel(vf) => vf_alphabet(&vf.cc, &mut tags, &mut texts),
            Wrapper::Elog(p) => {
                for r in &p.rules {
                    if let Anchor::Step { path, .. } = &r.anchor {
                        tags.extend(path.tags().iter().map(|t| t.as_str().to_string()));
                    }
                    for c in &r.conds {
                        match c {
                            Condition::Contains { path, .. } => {
                                tags.extend(path.tags().iter().map(|t| t.as_str().to_string()))
                            }
                            Condition::ContainsText { text, .. } => {
                                texts.insert(text.clone());
                            }
                            Condition::Label(_, t) => {
                                tags.insert(t.as_str().to_string());
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        tags.retain(|t| !t.starts_with('#'));
        (tags, texts)
    }
}

fn vf_alphabet(cc: &Cc<VfPatom>, tags: &mut BTreeSet<String>, texts: &mut BTreeSet<String>) {
    for p in cc.patoms() {
        tags.insert(p.tag.as_str().to_string());
        for c in &p.conds {
            tags.extend(c.pseq.iter().map(|q| q.tag.as_str().to_string()));
            texts.insert(c.text.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_become_line_and_column() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 99), (1, 3));
    }

    #[test]
    fn alphabet_covers_conditions() {
        let w = Wrapper::Rpn(Rpn::parse(r#"a.b{c.txt = "x"}.txt"#).unwrap());
        let (tags, texts) = w.alphabet();
        assert_eq!(tags.into_iter().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(texts.into_iter().collect::<Vec<_>>(), ["x"]);
    }
}
