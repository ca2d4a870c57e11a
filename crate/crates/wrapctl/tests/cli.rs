use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use testkit::corpus::corpus_dir;
use testkit::fixtures::HEL_VF_LISTING;
use wrapcore::hel::VfStatement;

fn corpus(rel: &str) -> PathBuf {
    corpus_dir().join(rel)
}

fn wrapctl(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wrapctl"))
        .args(args.iter().map(|a| a.as_ref()))
        .env("WRAPCTL_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn run_item_values() {
    let o = wrapctl(&[&"run", &corpus("doc1/items.rpn"), &corpus("doc1/document.doc")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "[\"A\",\"C\"]\n");
    let again = wrapctl(&[&"run", &corpus("doc1/items.rpn"), &corpus("doc1/document.doc")]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn run_reports_wrapper_errors_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let ns = write(
        dir.path(),
        "ns.elog",
        "p(X0,X) :- root(_,X0), subelem[\"_\"](X0,X).\np(X0,X) :- p(_,X0), subelem[\"_\"](X0,X) [0].\n",
    );
    let o = wrapctl(&[&"run", &ns, &corpus("doc1/document.doc")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("defined recursively"), "{}", stderr(&o));

    let bad = write(dir.path(), "bad.rpn", "a.(b.txt)");
    let o = wrapctl(&[&"run", &bad, &corpus("doc1/document.doc")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.rpn: syntax error at 1:"), "{}", stderr(&o));

    let unknown = write(dir.path(), "w.xpath", "a");
    let o = wrapctl(&[&"run", &unknown, &corpus("doc1/document.doc")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown wrapper extension"));
}

#[test]
fn run_reports_document_errors_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "bad.doc", "<a>\n  <b></a>");
    let o = wrapctl(&[&"run", &corpus("doc1/items.rpn"), &doc]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.doc:2:"), "{}", stderr(&o));
    let o = wrapctl(&[&"run", &corpus("doc1/items.rpn"), &dir.path().join("missing.doc")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_do_not_look_like_document_errors() {
    let o = wrapctl(&[&"bench", &"--m", &"0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn strict_and_lenient_single_values() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "d.doc", "<r><i><t>x</t><t>y</t><n>1</n></i><i><t>z</t><n>2</n></i></r>");
    let w = write(dir.path(), "w.vhel", "r.i{t.txt = \"y\"}.n.txt;");
    let o = wrapctl(&[&"run", &w, &doc]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not single-valued"), "{}", stderr(&o));
    let o = wrapctl(&[&"run", &w, &doc, &"--lenient"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[\"1\"]\n");
    let o = wrapctl(&[&"run", &w, &doc, &"--lenient", &"--strict"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cut_flag() {
    let doc = corpus("doc1/document.doc");
    let o = wrapctl(&[&"run", &corpus("doc1/cut.vhel"), &doc, &"--cut"]);
    assert_eq!(stdout(&o), "[\"A\"]\n");
    let o = wrapctl(&[&"run", &corpus("doc1/cut.vhel"), &doc]);
    assert_eq!(stdout(&o), "[\"A\",\"C\"]\n");
    let o = wrapctl(&[&"run", &corpus("doc1/items.rpn"), &doc, &"--cut"]);
    assert_eq!(o.status.code(), Some(1));
    let o = wrapctl(&[&"run", &corpus("doc1/cut.vhel"), &doc, &"--cut", &"--out", &"atoms"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn elog_output_modes() {
    let w = corpus("parity-even/parity.elog");
    let doc = corpus("parity-even/document.doc");
    let atoms = stdout(&wrapctl(&[&"run", &w, &doc]));
    assert!(atoms.lines().any(|l| l == "evenmark(0,1)"), "{atoms}");
    assert!(atoms.lines().any(|l| l.starts_with("odd(")));
    let json = wrapctl(&[&"run", &w, &doc, &"--out", &"json"]);
    assert_eq!(stdout(&json), "[\"1234\"]\n");
    let dot = stdout(&wrapctl(&[&"run", &w, &doc, &"--out", &"dot"]));
    assert!(dot.starts_with("digraph"), "{dot}");
    assert!(dot.contains("evenmark") && !dot.contains("odd"), "{dot}");
    // a translated statement also has an atom form
    let atoms = stdout(&wrapctl(&[&"run", &corpus("doc1/items.rpn"), &corpus("doc1/document.doc"), &"--out", &"atoms"]));
    assert_eq!(atoms.lines().filter(|l| l.starts_with("p5(")).count(), 2, "{atoms}");
}

#[test]
fn translate_directions() {
    let o = wrapctl(&[&"translate", &corpus("doc1/listing.hel"), &"--to", &"vhel"]);
    assert_eq!(o.status.code(), Some(0));
    let printed = VfStatement::parse(&stdout(&o)).unwrap();
    assert_eq!(printed, VfStatement::parse(HEL_VF_LISTING).unwrap());
    let squash = |s: &str| s.split_whitespace().collect::<String>();
    assert_eq!(squash(&stdout(&o)), squash(HEL_VF_LISTING));

    let dir = tempfile::tempdir().unwrap();
    let txt = write(dir.path(), "t.rpn", "txt");
    let o = wrapctl(&[&"translate", &txt, &"--to", &"elog"]);
    assert_eq!(stdout(&o), "@schema {.:txt}.\n");

    let o = wrapctl(&[&"translate", &corpus("doc1/items.rpn"), &"--to", &"vhel"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unsupported direction rpn -> vhel"));
    let o = wrapctl(&[&"translate", &corpus("quadratic/quadratic.elog"), &"--to", &"elog"]);
    assert_eq!(o.status.code(), Some(1));
    let o = wrapctl(&[&"translate", &corpus("doc1/cut.vhel"), &"--to", &"elog"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_reports() {
    let o = wrapctl(&[&"check", &corpus("doc1/listing.hel"), &corpus("doc1/document.doc")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("ok: hel statement, 1 condition(s)"), "{out}");
    assert!(out.contains("tr[i:*].td[1].txt"), "{out}");
    let o = wrapctl(&[&"check", &corpus("catalog/pairs.rpn")]);
    assert!(stdout(&o).contains("type {<{String}, {String}>}"), "{}", stdout(&o));

    let dir = tempfile::tempdir().unwrap();
    let unbound = write(dir.path(), "u.hel", "a(b.txt # c[i:*].txt)\nwhere a.c[j].txt = \"x\";");
    let o = wrapctl(&[&"check", &unbound]);
    assert_eq!(o.status.code(), Some(1));
    let ns = write(
        dir.path(),
        "ns.elog",
        "p(X0,X) :- root(_,X0), subelem[\"_\"](X0,X).\np(X0,X) :- p(_,X0), subelem[\"_\"](X0,X) [0].\n",
    );
    assert_eq!(wrapctl(&[&"check", &ns]).status.code(), Some(1));
}

#[test]
fn diff_on_a_document() {
    let doc = corpus("doc1/document.doc");
    let o = wrapctl(&[&"diff", &corpus("doc1/divergence.rpn"), &corpus("doc1/divergence.vhel"), &doc]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    assert!(out.contains("divergence.rpn: []"), "{out}");
    assert!(out.contains("divergence.vhel: [\"C\"]"), "{out}");
    let o = wrapctl(&[&"diff", &corpus("doc1/items.rpn"), &corpus("doc1/items.rpn"), &doc]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("no divergence"));
}

#[test]
fn diff_on_generated_documents() {
    let o = wrapctl(&[
        &"diff",
        &corpus("doc1/items.rpn"),
        &corpus("doc1/items.elog"),
        &"--generate",
        &"500",
        &"--seed",
        &"5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o), "no divergence on 500 generated documents (seed 5)\n");

    let o = wrapctl(&[&"diff", &corpus("doc1/divergence.rpn"), &corpus("doc1/divergence.vhel"), &"--generate", &"200"]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    assert!(out.contains("shrunk to"), "{out}");
    assert!(out.contains("document: <html>"), "{out}");
}

#[test]
fn bench_counts_quadratic_atoms() {
    for (m, n, atoms) in [(3, 2, 6), (1, 1, 1), (100, 100, 10_000)] {
        let o = wrapctl(&[&"bench", &"quadratic", &"--m", &m.to_string(), &"--n", &n.to_string()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(&format!(": {atoms} p-atoms in ")), "{}", stdout(&o));
    }
}

#[test]
fn color_is_controlled_by_the_environment() {
    let run = |color: &str| {
        Command::new(env!("CARGO_BIN_EXE_wrapctl"))
            .args(["check".as_ref(), corpus("doc1/items.rpn").as_os_str()])
            .env("WRAPCTL_COLOR", color)
            .output()
            .unwrap()
    };
    assert!(stdout(&run("1")).contains("\x1b[32mok\x1b[0m"));
    assert!(!stdout(&run("0")).contains('\x1b'));
}
