use crate::doctree::Tag;
use crate::pathrange::{parse_range, Range};
use crate::syntax::{Cursor, SyntaxError};

use super::{Cc, HelCond, HelPatom, HelStatement, Step, VRange, VfCond, VfPatom, VfStatement};

enum Tail {
    Txt,
    Record,
}

/// `patom (('.' | '->') patom)*` up to `.txt` or `(`.
fn parse_pseq<P>(
    c: &mut Cursor<'_>,
    atom: &mut impl FnMut(&mut Cursor<'_>, Step) -> Result<P, SyntaxError>,
) -> Result<(Vec<P>, Tail), SyntaxError> {
    let mut out = vec![atom(c, Step::Child)?];
    loop {
        if c.eat("->") || c.eat("→") {
            out.push(atom(c, Step::Descendant)?);
        } else if c.eat("(") {
            return Ok((out, Tail::Record));
        } else if c.eat(".") {
            if c.eat_keyword("txt") {
                return Ok((out, Tail::Txt));
            }
            if c.eat("(") {
                return Ok((out, Tail::Record));
            }
            out.push(atom(c, Step::Child)?);
        } else {
            return c.error("expected '.', '->', '(' or '.txt'");
        }
    }
}

fn parse_cc<P>(
    c: &mut Cursor<'_>,
    atom: &mut impl FnMut(&mut Cursor<'_>, Step) -> Result<P, SyntaxError>,
) -> Result<Cc<P>, SyntaxError> {
    let (ps, tail) = parse_pseq(c, atom)?;
    match tail {
        Tail::Txt => Ok(Cc::Txt(ps)),
        Tail::Record => {
            let mut entries = vec![parse_cc(c, atom)?];
            while c.eat("#") {
                entries.push(parse_cc(c, atom)?);
            }
            if entries.len() < 2 {
                return c.error("a record needs at least two entries");
            }
            c.expect(")")?;
            Ok(Cc::Record(ps, entries))
        }
    }
}

fn parse_tag(c: &mut Cursor<'_>) -> Result<Tag, SyntaxError> {
    let save = c.clone();
    let tag = c.expect_ident("a tag")?;
    if matches!(tag, "txt" | "where" | "and") {
        *c = save;
        return c.error(format!("expected a tag, found keyword '{tag}' ('txt' must follow a path)"));
    }
    Ok(Tag::new(tag))
}

/// `[ρ]`, `[i:ρ]` or `[i]`.
fn parse_vrange(c: &mut Cursor<'_>) -> Result<VRange, SyntaxError> {
    let mut probe = c.clone();
    let vr = match probe.ident() {
        Some(id) if id != "regex" && id != "last" => {
            *c = probe;
            let range = if c.eat(":") { parse_range(c)? } else { Range::Star };
            VRange { var: Some(id.to_string()), range }
        }
        _ => VRange { var: None, range: parse_range(c)? },
    };
    c.expect("]")?;
    Ok(vr)
}

fn parse_text_test<P>(
    c: &mut Cursor<'_>,
    atom: &mut impl FnMut(&mut Cursor<'_>, Step) -> Result<P, SyntaxError>,
) -> Result<(bool, Vec<P>, String), SyntaxError> {
    let cut = c.eat("!");
    let pseq = if c.eat_keyword("txt") {
        Vec::new()
    } else {
        match parse_pseq(c, atom)? {
            (ps, Tail::Txt) => ps,
            (_, Tail::Record) => return c.error("records are not allowed in conditions"),
        }
    };
    c.expect("=")?;
    Ok((cut, pseq, c.string()?))
}

fn hel_patom(c: &mut Cursor<'_>, step: Step) -> Result<HelPatom, SyntaxError> {
    let tag = parse_tag(c)?;
    let vrange = if c.eat("[") { Some(parse_vrange(c)?) } else { None };
    if c.looking_at("{") {
        return c.error("conditions belong in the where clause");
    }
    Ok(HelPatom { step, tag, vrange })
}

fn vf_patom(c: &mut Cursor<'_>, step: Step, nested: bool) -> Result<VfPatom, SyntaxError> {
    let tag = parse_tag(c)?;
    let range = if c.eat("[") {
        let r = parse_range(c)?;
        c.expect("]")?;
        Some(r)
    } else {
        None
    };
    let mut conds = Vec::new();
    if c.looking_at("{") {
        if nested {
            return c.error("conditions may not be nested inside conditions");
        }
        c.expect("{")?;
        loop {
            let (cut, pseq, text) = parse_text_test(c, &mut |c, s| vf_patom(c, s, true))?;
            conds.push(VfCond { cut, pseq, text });
            if !c.eat_keyword("and") {
                break;
            }
        }
        c.expect("}")?;
    }
    Ok(VfPatom { step, tag, range, conds })
}

pub(super) fn parse_hel(text: &str) -> Result<HelStatement, SyntaxError> {
    let mut c = Cursor::new(text);
    let cc = parse_cc(&mut c, &mut hel_patom)?;
    let mut conds = Vec::new();
    if c.eat_keyword("where") {
        loop {
            let (cut, pseq, text) = parse_text_test(&mut c, &mut hel_patom)?;
            conds.push(HelCond { cut, pseq, text });
            if !c.eat_keyword("and") {
                break;
            }
        }
    }
    c.eat(";");
    c.finish()?;
    Ok(HelStatement { cc, conds })
}

pub(super) fn parse_vf(text: &str) -> Result<VfStatement, SyntaxError> {
    let mut c = Cursor::new(text);
    let cc = parse_cc(&mut c, &mut |c, s| vf_patom(c, s, false))?;
    if c.looking_at("where") {
        return c.error("variable-free statements have no where clause");
    }
    c.eat(";");
    c.finish()?;
    Ok(VfStatement { cc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hel::tests::{LISTING, LISTING_VF};

    #[test]
    fn listing_parses() {
        let w = parse_hel(LISTING).unwrap();
        assert_eq!(w.conds.len(), 1);
        let Cc::Record(ps, es) = &w.cc else { panic!("record expected") };
        assert_eq!(ps.len(), 3);
        assert_eq!(es[1].pseq()[0].var(), Some("i"));
        assert_eq!(w.conds[0].pseq[3].vrange, Some(VRange { var: Some("i".into()), range: Range::Star }));
        assert_eq!(parse_hel(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn minimal_statement() {
        let w = parse_hel("a.txt").unwrap();
        assert_eq!(w.cc, Cc::Txt(vec![HelPatom { step: Step::Child, tag: Tag::new("a"), vrange: None }]));
        assert!(w.conds.is_empty());
    }

    #[test]
    fn vf_round_trips() {
        for src in [
            LISTING_VF,
            "a->b[last]{!txt = \"x\" and c->d[0-2].txt = \"y\"}.txt;",
            "a[regex:1.0*](b.txt # c(d.txt # e.txt));",
        ] {
            let w = parse_vf(src).unwrap();
            assert_eq!(w.to_string(), src);
        }
    }

    #[test]
    fn rejects_out_of_grammar_forms() {
        assert!(parse_vf("a{b{c.txt = \"x\"}.txt = \"y\"}.txt").is_err());
        assert!(parse_vf("a{b(c.txt # d.txt) = \"y\"}.txt").is_err());
        assert!(parse_vf("a(b.txt)").is_err());
        assert!(parse_vf("txt").is_err());
        assert!(parse_vf("a.txt where a.txt = \"x\"").is_err());
        assert!(parse_hel("a{b.txt = \"x\"}.txt").is_err());
        assert!(parse_hel("a[i:*].txt where").is_err());
    }

    #[test]
    fn unicode_arrow() {
        assert_eq!(parse_vf("a→b.txt").unwrap(), parse_vf("a->b.txt").unwrap());
    }
}
