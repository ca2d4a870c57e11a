//! Every corpus wrapper against its golden, the golden against the
//! brute-force oracles, and every translation against re-parsing.

use testkit::corpus::{corpus_dir, load_corpus, Language};
use testkit::fixtures::PARITY_PROGRAM;
use testkit::{naive_helvf, naive_rpn};
use wrapcore::elog::{extract, ElogProgram, Emit};
use wrapcore::hel::{translate_vf, EvalOptions, VfStatement};
use wrapcore::object::ComplexObject;
use wrapcore::rpn::translate_rpn;
use wrapctl::wrapper::{load_document, load_wrapper, Wrapper};

#[test]
fn goldens_hold() {
    let cases = load_corpus(&corpus_dir()).unwrap();
    assert!(cases.len() >= 5);
    let mut checked = 0;
    for case in &cases {
        let t = load_document(&case.document).unwrap();
        for wf in &case.wrappers {
            let w = load_wrapper(&wf.path).unwrap();
            let golden = wf.expected_json().unwrap().unwrap_or_else(|| panic!("{} has no golden", wf.path.display()));
            let got = w.wrapper.evaluate(&t, EvalOptions::default()).unwrap();
            assert_eq!(got.to_json(), golden, "{}", wf.path.display());

            // the golden agrees with an evaluator that shares no code with the engine
            let oracle = match &w.wrapper {
                Wrapper::Rpn(r) => Some((naive_rpn(r, &t), r.typecheck())),
                Wrapper::Hel(_, vf) | Wrapper::Vhel(vf) => Some((naive_helvf(vf, &t), vf.to_rpn().typecheck())),
                Wrapper::Elog(_) => None,
            };
            if let Some((expected, ty)) = oracle {
                let parsed = ComplexObject::from_json(&golden, &ty).expect("golden conforms to the type");
                assert_eq!(parsed, expected, "{}", wf.path.display());
            }
            checked += 1;
        }
    }
    assert!(checked >= 15, "{checked}");
}

#[test]
fn translations_reparse_and_agree() {
    for case in load_corpus(&corpus_dir()).unwrap() {
        let t = load_document(&case.document).unwrap();
        for wf in &case.wrappers {
            let w = load_wrapper(&wf.path).unwrap();
            let program = match &w.wrapper {
                Wrapper::Rpn(r) => translate_rpn(r).program,
                Wrapper::Hel(_, vf) | Wrapper::Vhel(vf) => {
                    assert_eq!(&VfStatement::parse(&vf.to_string()).unwrap(), vf, "{}", wf.path.display());
                    match translate_vf(vf) {
                        Ok(tr) => tr.program,
                        Err(_) => {
                            assert!(vf.has_cuts(), "{}", wf.path.display());
                            continue;
                        }
                    }
                }
                Wrapper::Elog(p) => p.clone(),
            };
            let reparsed = ElogProgram::parse(&program.to_string()).unwrap();
            assert_eq!(reparsed, program, "{}", wf.path.display());
            if wf.language != Language::Elog {
                let direct = w.wrapper.evaluate(&t, EvalOptions::default()).unwrap();
                assert_eq!(extract(&reparsed, &t, Emit::Text).unwrap(), direct, "{}", wf.path.display());
            }
        }
    }
}

#[test]
fn shipped_parity_program_is_the_fixture() {
    let fixture = ElogProgram::parse(PARITY_PROGRAM).unwrap();
    for case in ["parity-even", "parity-odd"] {
        let text = std::fs::read_to_string(corpus_dir().join(case).join("parity.elog")).unwrap();
        assert_eq!(ElogProgram::parse(&text).unwrap(), fixture);
    }
}
