use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::anyhow;
use testkit::corpus::Language;
use testkit::fixtures::{quadratic_tree, QUADRATIC_PROGRAM};
use testkit::gen::{self, TreeGenSpec};
use testkit::guided::{gen_guided_tree, Guide};
use testkit::shrink::{minimize, tree_candidates};
use wrapcore::doctree::{DocTree, TreeBuilder};
use wrapcore::elog::{eliminate_aux, eval_fixpoint, output_graph, ElogProgram};
use wrapcore::hel::{translate_vf, validate_vars, EvalOptions, SingleValue};
use wrapcore::object::ComplexObject;
use wrapcore::rpn::translate_rpn;

use crate::wrapper::{load_document, load_wrapper, Loaded, Wrapper};
use crate::{CliError, OutMode, Style, Target, EXIT_DIVERGENCE, EXIT_OK};

fn wrapper_err(w: &Loaded, e: impl std::fmt::Display) -> CliError {
    CliError::wrapper(anyhow!("{}: {e}", w.path.display()))
}

pub(crate) fn run(
    wpath: &Path,
    dpath: &Path,
    mode: Option<OutMode>,
    single_value: SingleValue,
    cut: bool,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let w = load_wrapper(wpath)?;
    let t = load_document(dpath)?;
    if cut && w.wrapper.vf().is_none() {
        return Err(wrapper_err(&w, "--cut applies to hel and vhel wrappers only"));
    }
    let default = if w.language == Language::Elog { OutMode::Atoms } else { OutMode::Json };
    match mode.unwrap_or(default) {
        OutMode::Json => {
            let obj = w.wrapper.evaluate(&t, EvalOptions { single_value, cut }).map_err(|e| wrapper_err(&w, e))?;
            writeln!(out, "{}", obj.to_json())?;
        }
        mode => {
            if cut {
                return Err(wrapper_err(&w, "cut evaluation has no Elog form; use --out json"));
            }
            let program = w.wrapper.program().map_err(|e| wrapper_err(&w, e))?;
            let store = eval_fixpoint(&program, &t).map_err(|e| wrapper_err(&w, e))?;
            if mode == OutMode::Atoms {
                write!(out, "{}", store.dump())?;
            } else {
                let store = eliminate_aux(&store, &program.aux).map_err(|e| wrapper_err(&w, e))?;
                write!(out, "{}", output_graph(&store, &t).to_dot(&t))?;
            }
        }
    }
    Ok(EXIT_OK)
}

pub(crate) fn translate(wpath: &Path, to: Target, out: &mut dyn Write) -> Result<u8, CliError> {
    let w = load_wrapper(wpath)?;
    match (&w.wrapper, to) {
        (Wrapper::Rpn(r), Target::Elog) => write!(out, "{}", translate_rpn(r).program)?,
        (Wrapper::Hel(_, vf) | Wrapper::Vhel(vf), Target::Vhel) => writeln!(out, "{vf}")?,
        (Wrapper::Hel(_, vf) | Wrapper::Vhel(vf), Target::Elog) => {
            let tr = translate_vf(vf).map_err(|e| wrapper_err(&w, e))?;
            write!(out, "{}", tr.program)?;
        }
        (_, to) => {
            let to = if to == Target::Vhel { "vhel" } else { "elog" };
            return Err(wrapper_err(&w, format!("unsupported direction {} -> {to}", w.language)));
        }
    }
    Ok(EXIT_OK)
}

pub(crate) fn check(wpath: &Path, dpath: Option<&Path>, out: &mut dyn Write, style: Style) -> Result<u8, CliError> {
    let w = load_wrapper(wpath)?;
    let ok = style.good("ok");
    match &w.wrapper {
        Wrapper::Rpn(r) => {
            writeln!(out, "{ok}: rpn statement of type {}, depth {}", r.typecheck(), r.depth())?;
        }
        Wrapper::Hel(h, vf) => {
            let witnesses = validate_vars(h).map_err(|e| wrapper_err(&w, e))?;
            writeln!(out, "{ok}: hel statement, {} condition(s)", witnesses.len())?;
            for p in witnesses {
                writeln!(out, "  condition variable bound at {p}")?;
            }
            writeln!(out, "  variable-free form: {vf}")?;
        }
        Wrapper::Vhel(vf) => {
            let cuts = if vf.has_cuts() { "with cut marks" } else { "without cut marks" };
            writeln!(out, "{ok}: vhel statement {cuts}")?;
        }
        Wrapper::Elog(p) => {
            // rule ranges on recursive predicates are caught by stratification,
            // which any document exercises
            let empty = TreeBuilder::new().finish();
            eval_fixpoint(p, &empty).map_err(|e| wrapper_err(&w, e))?;
            describe_program(p, out, &ok)?;
        }
    }
    if let Some(dpath) = dpath {
        let t = load_document(dpath)?;
        if let Wrapper::Elog(p) = &w.wrapper {
            let store = eval_fixpoint(p, &t).map_err(|e| wrapper_err(&w, e))?;
            writeln!(out, "{ok}: {} atoms on {}", store.len(), dpath.display())?;
        } else {
            let obj = w.wrapper.evaluate(&t, EvalOptions::default()).map_err(|e| wrapper_err(&w, e))?;
            let n = obj.as_set().map_or(0, <[_]>::len);
            writeln!(out, "{ok}: {n} top-level element(s) on {}", dpath.display())?;
        }
    }
    Ok(EXIT_OK)
}

fn describe_program(p: &ElogProgram, out: &mut dyn Write, ok: &str) -> std::io::Result<()> {
    let preds = p.predicates();
    writeln!(
        out,
        "{ok}: elog program, {} rule(s), {} predicate(s), {} auxiliary{}",
        p.rules.len(),
        preds.len(),
        p.aux.len(),
        if p.schema.is_some() { ", with schema" } else { "" }
    )
}

pub(crate) enum DiffSource {
    Document(PathBuf),
    Generate { n: usize, seed: u64 },
}

pub(crate) fn diff(
    apath: &Path,
    bpath: &Path,
    source: DiffSource,
    single_value: SingleValue,
    out: &mut dyn Write,
    style: Style,
) -> Result<u8, CliError> {
    let a = load_wrapper(apath)?;
    let b = load_wrapper(bpath)?;
    let opts = EvalOptions { single_value, cut: false };
    let outcome = |t: &DocTree| -> Result<Option<(ComplexObject, ComplexObject)>, CliError> {
        let x = a.wrapper.evaluate(t, opts).map_err(|e| wrapper_err(&a, e))?;
        let y = b.wrapper.evaluate(t, opts).map_err(|e| wrapper_err(&b, e))?;
        Ok((x != y).then_some((x, y)))
    };
    let report = |out: &mut dyn Write, x: &ComplexObject, y: &ComplexObject| -> std::io::Result<()> {
        writeln!(out, "  {}: {}", a.path.display(), x.to_json())?;
        writeln!(out, "  {}: {}", b.path.display(), y.to_json())
    };
    match source {
        DiffSource::Document(dpath) => {
            let t = load_document(&dpath)?;
            if let Some((x, y)) = outcome(&t)? {
                writeln!(out, "{} on {}", style.bad("divergence"), dpath.display())?;
                report(out, &x, &y)?;
                return Ok(EXIT_DIVERGENCE);
            }
            writeln!(out, "{} on {}", style.good("no divergence"), dpath.display())?;
        }
        DiffSource::Generate { n, seed } => {
            let spec = generation_spec(&a.wrapper, &b.wrapper, seed);
            let guides: Vec<Guide<'_>> = [&a.wrapper, &b.wrapper].into_iter().filter_map(Wrapper::guide).collect();
            let mut rng = gen::rng(seed);
            for i in 0..n {
                // alternate shaped and shapeless documents
                let t = if i % 2 == 0 && !guides.is_empty() {
                    gen_guided_tree(&mut rng, &guides, &spec)
                } else {
                    gen::gen_tree_with(&mut rng, &spec)
                };
                if outcome(&t)?.is_some() {
                    let small = minimize(t, tree_candidates, |t| matches!(outcome(t), Ok(Some(_))));
                    let (x, y) = outcome(&small)?.expect("shrinking keeps the divergence");
                    writeln!(
                        out,
                        "{} on generated document {} of {n} (seed {seed}), shrunk to {} nodes:",
                        style.bad("divergence"),
                        i + 1,
                        small.len()
                    )?;
                    writeln!(out, "  document: {}", small.serialize())?;
                    report(out, &x, &y)?;
                    return Ok(EXIT_DIVERGENCE);
                }
            }
            writeln!(out, "{} on {n} generated documents (seed {seed})", style.good("no divergence"))?;
        }
    }
    Ok(EXIT_OK)
}

/// Random documents over the tags and strings the two wrappers mention,
/// deep enough for their paths.
fn generation_spec(a: &Wrapper, b: &Wrapper, seed: u64) -> TreeGenSpec {
    let (mut tags, mut texts) = a.alphabet();
    let (tb, xb) = b.alphabet();
    tags.extend(tb);
    texts.extend(xb);
    texts.insert("x".to_string());
    let default = TreeGenSpec::default();
    TreeGenSpec {
        seed,
        tags: if tags.is_empty() { default.tags.clone() } else { tags.into_iter().collect() },
        texts: texts.into_iter().collect(),
        max_depth: 7,
        ..default
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BenchReport {
    pub atoms: usize,
    pub elapsed: Duration,
}

/// Evaluates the quadratic program on the `(m, n)` tree.
pub fn bench(m: usize, n: usize) -> BenchReport {
    let program = ElogProgram::parse(QUADRATIC_PROGRAM).expect("fixture parses");
    let t = quadratic_tree(m, n);
    let start = Instant::now();
    let store = eval_fixpoint(&program, &t).expect("fixture evaluates");
    BenchReport { atoms: store.count("p"), elapsed: start.elapsed() }
}
