//! The on-disk wrapper corpus: one directory per case, holding
//! `document.doc`, any number of wrappers (`.rpn`, `.hel`, `.vhel`,
//! `.elog`) and, next to a wrapper `w.ext`, an optional golden
//! `w.ext.expected.json`.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Wrapper language, decided by file extension alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Language {
    Rpn,
    Hel,
    Vhel,
    Elog,
}

impl Language {
    pub fn from_extension(ext: &str) -> Option<Language> {
        match ext {
            "rpn" => Some(Language::Rpn),
            "hel" => Some(Language::Hel),
            "vhel" => Some(Language::Vhel),
            "elog" => Some(Language::Elog),
            _ => None,
        }
    }

    pub fn from_path(path: &Path) -> Option<Language> {
        path.extension().and_then(|e| e.to_str()).and_then(Language::from_extension)
    }

    pub fn extension(self) -> &'static str {
        match self {
            Language::Rpn => "rpn",
            Language::Hel => "hel",
            Language::Vhel => "vhel",
            Language::Elog => "elog",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Clone, Debug)]
pub struct WrapperFile {
    pub path: PathBuf,
    pub language: Language,
    pub expected: Option<PathBuf>,
}

impl WrapperFile {
    pub fn source(&self) -> io::Result<String> {
        fs::read_to_string(&self.path)
    }

    pub fn expected_json(&self) -> io::Result<Option<serde_json::Value>> {
        let Some(p) = &self.expected else { return Ok(None) };
        let text = fs::read_to_string(p)?;
        serde_json::from_str(&text).map(Some).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub name: String,
    pub document: PathBuf,
    pub wrappers: Vec<WrapperFile>,
}

/// `<workspace>/corpus`.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Cases sorted by name; wrappers sorted by file name.
pub fn load_corpus(dir: &Path) -> io::Result<Vec<Case>> {
    let mut cases = Vec::new();
    for entry in fs::read_dir(dir)? {
        let case_dir = entry?.path();
        if !case_dir.is_dir() {
            continue;
        }
        let document = case_dir.join("document.doc");
        if !document.is_file() {
            continue;
        }
        let mut wrappers = Vec::new();
        for f in fs::read_dir(&case_dir)? {
            let path = f?.path();
            if let Some(language) = Language::from_path(&path) {
                let mut golden = path.clone().into_os_string();
                golden.push(".expected.json");
                let golden = PathBuf::from(golden);
                let expected = golden.is_file().then_some(golden);
                wrappers.push(WrapperFile { path, language, expected });
            }
        }
        wrappers.sort_by(|a, b| a.path.cmp(&b.path));
        let name = case_dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        cases.push(Case { name, document, wrappers });
    }
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_a_case() {
        let dir = tempfile::tempdir().unwrap();
        let case = dir.path().join("one");
        fs::create_dir(&case).unwrap();
        fs::write(case.join("document.doc"), "<a/>").unwrap();
        fs::write(case.join("w.rpn"), "a.txt").unwrap();
        fs::write(case.join("w.rpn.expected.json"), "[\"\"]").unwrap();
        fs::write(case.join("notes.txt"), "ignored").unwrap();
        let cases = load_corpus(dir.path()).unwrap();
        assert_eq!(cases.len(), 1);
        assert_eq!(cases[0].wrappers.len(), 1);
        let w = &cases[0].wrappers[0];
        assert_eq!(w.language, Language::Rpn);
        assert_eq!(w.expected_json().unwrap(), Some(serde_json::json!([""])));
    }

    #[test]
    fn extension_detection() {
        assert_eq!(Language::from_path(Path::new("x/y.vhel")), Some(Language::Vhel));
        assert_eq!(Language::from_path(Path::new("x/y.json")), None);
    }
}
