//! Complex objects (sets, records, strings), their types, and the schema that
//! maps pattern predicates to set positions.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::Value;

use crate::syntax::{Cursor, SyntaxError};

/// Value of a wrapper: nested sets, fixed-arity records and strings.
///
/// Sets keep the document order of the nodes they came from and hold no
/// duplicates. Equality ignores set order.
#[derive(Clone, Debug)]
pub enum ComplexObject {
    Str(String),
    Record(Vec<ComplexObject>),
    Set(Vec<ComplexObject>),
}

/// Order-free normal form used for equality and hashing of sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Canon {
    Str(String),
    Record(Vec<Canon>),
    Set(Vec<Canon>),
}

impl ComplexObject {
    pub fn str(s: impl Into<String>) -> Self {
        ComplexObject::Str(s.into())
    }

    /// Builds a set, dropping later duplicates.
    pub fn set(items: impl IntoIterator<Item = ComplexObject>) -> Self {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for item in items {
            if seen.insert(item.canon()) {
                out.push(item);
            }
        }
        ComplexObject::Set(out)
    }

    pub fn empty_set() -> Self {
        ComplexObject::Set(Vec::new())
    }

    fn canon(&self) -> Canon {
        match self {
            ComplexObject::Str(s) => Canon::Str(s.clone()),
            ComplexObject::Record(es) => Canon::Record(es.iter().map(Self::canon).collect()),
            ComplexObject::Set(es) => {
                let set: BTreeSet<Canon> = es.iter().map(Self::canon).collect();
                Canon::Set(set.into_iter().collect())
            }
        }
    }

    pub fn as_set(&self) -> Option<&[ComplexObject]> {
        match self {
            ComplexObject::Set(es) => Some(es),
            _ => None,
        }
    }

    pub fn is_empty_set(&self) -> bool {
        matches!(self, ComplexObject::Set(es) if es.is_empty())
    }

    /// Hoare ordering: every set element of `self` is below some element of
    /// the corresponding set of `other`; strings equal; records pointwise.
    pub fn is_sub_object(&self, other: &ComplexObject) -> bool {
        match (self, other) {
            (ComplexObject::Str(a), ComplexObject::Str(b)) => a == b,
            (ComplexObject::Record(a), ComplexObject::Record(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.is_sub_object(y))
            }
            (ComplexObject::Set(a), ComplexObject::Set(b)) => {
                a.iter().all(|x| b.iter().any(|y| x.is_sub_object(y)))
            }
            _ => false,
        }
    }

    /// Whether the value has type `ty`.
    pub fn conforms(&self, ty: &RpnType) -> bool {
        match (self, ty) {
            (ComplexObject::Str(_), RpnType::Str) => true,
            (ComplexObject::Set(es), RpnType::Set(inner)) => es.iter().all(|e| e.conforms(inner)),
            (ComplexObject::Record(es), RpnType::Record(ts)) => {
                es.len() == ts.len() && es.iter().zip(ts).all(|(e, t)| e.conforms(t))
            }
            _ => false,
        }
    }

    /// Sets and records become arrays, strings stay strings.
    pub fn to_json(&self) -> Value {
        match self {
            ComplexObject::Str(s) => Value::String(s.clone()),
            ComplexObject::Record(es) | ComplexObject::Set(es) => {
                Value::Array(es.iter().map(Self::to_json).collect())
            }
        }
    }

    /// Reads back [`ComplexObject::to_json`] output given the expected type.
    pub fn from_json(value: &Value, ty: &RpnType) -> Option<ComplexObject> {
        match (value, ty) {
            (Value::String(s), RpnType::Str) => Some(ComplexObject::str(s.as_str())),
            (Value::Array(items), RpnType::Set(inner)) => items
                .iter()
                .map(|v| ComplexObject::from_json(v, inner))
                .collect::<Option<Vec<_>>>()
                .map(ComplexObject::set),
            (Value::Array(items), RpnType::Record(ts)) if items.len() == ts.len() => items
                .iter()
                .zip(ts)
                .map(|(v, t)| ComplexObject::from_json(v, t))
                .collect::<Option<Vec<_>>>()
                .map(ComplexObject::Record),
            _ => None,
        }
    }
}

impl PartialEq for ComplexObject {
    fn eq(&self, other: &Self) -> bool {
        self.canon() == other.canon()
    }
}

impl Eq for ComplexObject {}

impl fmt::Display for ComplexObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, es: &[ComplexObject]| {
            for (i, e) in es.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{e}")?;
            }
            Ok(())
        };
        match self {
            ComplexObject::Str(s) => write!(f, "{s:?}"),
            ComplexObject::Record(es) => {
                f.write_str("<")?;
                list(f, es)?;
                f.write_str(">")
            }
            ComplexObject::Set(es) => {
                f.write_str("{")?;
                list(f, es)?;
                f.write_str("}")
            }
        }
    }
}

/// Types of RPN values: `{String}`, `{<{String}, {String}>}`, ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RpnType {
    Str,
    Set(Box<RpnType>),
    Record(Vec<RpnType>),
}

impl RpnType {
    pub fn set_of(inner: RpnType) -> Self {
        RpnType::Set(Box::new(inner))
    }

    /// Set depth along the first record entry; `{String}` has depth 1.
    pub fn set_depth(&self) -> usize {
        match self {
            RpnType::Str => 0,
            RpnType::Set(inner) => 1 + inner.set_depth(),
            RpnType::Record(ts) => ts.iter().map(Self::set_depth).max().unwrap_or(0),
        }
    }
}

impl fmt::Display for RpnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RpnType::Str => f.write_str("String"),
            RpnType::Set(inner) => write!(f, "{{{inner}}}"),
            RpnType::Record(ts) => {
                f.write_str("<")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(">")
            }
        }
    }
}

/// Where the members of a set come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSource {
    /// The singleton of the current node (a statement without patoms).
    Context,
    /// The atoms `p(v, w)` of this predicate, for the current node `v`.
    Pred(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetElem {
    Text,
    Record(Vec<SetSchema>),
}

/// One set position of a type term with the predicate that fills it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSchema {
    pub source: SetSource,
    pub elem: SetElem,
}

/// Predicate-to-set-position association for rendering complex objects.
///
/// Text form: `{p:txt}`, `{.:<{p1:txt},{p2:txt}>}`; `.` is the context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectSchema {
    pub top: SetSchema,
}

impl SetSchema {
    pub fn text(source: SetSource) -> Self {
        SetSchema { source, elem: SetElem::Text }
    }

    fn ty(&self) -> RpnType {
        RpnType::set_of(match &self.elem {
            SetElem::Text => RpnType::Str,
            SetElem::Record(es) => RpnType::Record(es.iter().map(Self::ty).collect()),
        })
    }

    fn visit<'a>(&'a self, out: &mut Vec<(&'a str, Option<usize>)>, ordinal: Option<usize>) {
        if let SetSource::Pred(p) = &self.source {
            out.push((p, ordinal));
        }
        if let SetElem::Record(es) = &self.elem {
            for (i, e) in es.iter().enumerate() {
                e.visit(out, Some(i));
            }
        }
    }
}

impl ObjectSchema {
    pub fn new(top: SetSchema) -> Self {
        ObjectSchema { top }
    }

    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        let mut c = Cursor::new(text);
        let s = parse_schema(&mut c)?;
        c.finish()?;
        Ok(s)
    }

    pub fn ty(&self) -> RpnType {
        self.top.ty()
    }

    /// Predicates with a set position, in schema order, with their record
    /// ordinal when they sit directly inside a record.
    pub fn positions(&self) -> Vec<(&str, Option<usize>)> {
        let mut out = Vec::new();
        self.top.visit(&mut out, None);
        out
    }

    pub fn predicates(&self) -> BTreeSet<&str> {
        self.positions().into_iter().map(|(p, _)| p).collect()
    }
}

impl fmt::Display for SetSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        match &self.source {
            SetSource::Context => f.write_str(".")?,
            SetSource::Pred(p) => f.write_str(p)?,
        }
        f.write_str(":")?;
        match &self.elem {
            SetElem::Text => f.write_str("txt")?,
            SetElem::Record(es) => {
                f.write_str("<")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(">")?;
            }
        }
        f.write_str("}")
    }
}

impl fmt::Display for ObjectSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.top)
    }
}

pub(crate) fn parse_schema(c: &mut Cursor<'_>) -> Result<ObjectSchema, SyntaxError> {
    parse_set_schema(c).map(ObjectSchema::new)
}

fn parse_set_schema(c: &mut Cursor<'_>) -> Result<SetSchema, SyntaxError> {
    c.expect("{")?;
    let source = if c.eat(".") {
        SetSource::Context
    } else {
        SetSource::Pred(c.expect_ident("predicate name or '.'")?.to_string())
    };
    c.expect(":")?;
    let elem = if c.eat_keyword("txt") {
        SetElem::Text
    } else {
        c.expect("<")?;
        let mut es = vec![parse_set_schema(c)?];
        while c.eat(",") {
            es.push(parse_set_schema(c)?);
        }
        c.expect(">")?;
        if es.len() < 2 {
            return c.error("a record needs at least two entries");
        }
        SetElem::Record(es)
    };
    c.expect("}")?;
    Ok(SetSchema { source, elem })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> ComplexObject {
        ComplexObject::str(x)
    }

    #[test]
    fn sets_ignore_order_and_duplicates() {
        let a = ComplexObject::set([s("A"), s("C"), s("A")]);
        assert_eq!(a.as_set().unwrap().len(), 2);
        assert_eq!(a, ComplexObject::set([s("C"), s("A")]));
        assert_ne!(a, ComplexObject::set([s("A")]));
        assert_eq!(a.to_json(), serde_json::json!(["A", "C"]));
    }

    #[test]
    fn hoare_order() {
        let big = ComplexObject::set([ComplexObject::Record(vec![
            ComplexObject::set([s("a"), s("b")]),
            ComplexObject::set([s("c")]),
        ])]);
        let small = ComplexObject::set([ComplexObject::Record(vec![
            ComplexObject::set([s("a")]),
            ComplexObject::empty_set(),
        ])]);
        assert!(small.is_sub_object(&big));
        assert!(!big.is_sub_object(&small));
        assert!(ComplexObject::empty_set().is_sub_object(&small));
    }

    #[test]
    fn conformance() {
        let ty = RpnType::set_of(RpnType::Record(vec![RpnType::set_of(RpnType::Str), RpnType::set_of(RpnType::Str)]));
        let v = ComplexObject::set([ComplexObject::Record(vec![ComplexObject::set([s("x")]), ComplexObject::empty_set()])]);
        assert!(v.conforms(&ty));
        assert!(!ComplexObject::set([s("x")]).conforms(&ty));
        assert_eq!(ty.to_string(), "{<{String}, {String}>}");
        assert_eq!(ComplexObject::from_json(&v.to_json(), &ty).unwrap(), v);
    }

    #[test]
    fn schema_syntax() {
        let text = "{.:<{p1:txt},{p2:<{.:txt},{p3:txt}>}>}";
        let schema = ObjectSchema::parse(text).unwrap();
        assert_eq!(schema.to_string(), text);
        assert_eq!(schema.positions(), vec![("p1", Some(0)), ("p2", Some(1)), ("p3", Some(1))]);
        assert_eq!(
            schema.ty().to_string(),
            "{<{String}, {<{String}, {String}>}>}"
        );
        assert!(ObjectSchema::parse("{.:<{p:txt}>}").is_err());
    }
}
