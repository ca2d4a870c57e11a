//! Index-variable validation and elimination.

use std::collections::BTreeMap;

use super::{Cc, HelCond, HelError, HelPatom, HelStatement, VfCond, VfPatom, VfStatement};

/// Root-to-`txt` paths through the construction part, one record entry at
/// a time.
fn cc_paths(cc: &Cc<HelPatom>) -> Vec<Vec<&HelPatom>> {
    let head: Vec<&HelPatom> = cc.pseq().iter().collect();
    match cc {
        Cc::Txt(_) => vec![head],
        Cc::Record(_, es) => es
            .iter()
            .flat_map(cc_paths)
            .map(|tail| head.iter().copied().chain(tail).collect())
            .collect(),
    }
}

fn render_path(path: &[&HelPatom]) -> String {
    let cc = Cc::Txt(path.iter().map(|p| (*p).clone()).collect());
    cc.to_string()
}

/// Where condition `c` mismatches `path` in its first `len` patoms, if
/// anywhere.
fn mismatch(c: &HelCond, path: &[&HelPatom], len: usize) -> Option<(usize, String)> {
    for (k, q) in c.pseq[..len].iter().enumerate() {
        let Some(p) = path.get(k) else {
            return Some((k, format!("construction path ends before '{}'", q.tag)));
        };
        if p.step != q.step {
            return Some((k, format!("step before '{}' differs", q.tag)));
        }
        if p.tag != q.tag {
            return Some((k, format!("expected tag '{}', found '{}'", p.tag, q.tag)));
        }
        if p.var() != q.var() {
            let show = |v: Option<&str>| v.map_or("no variable".to_string(), |v| format!("variable {v}"));
            return Some((k, format!("at '{}': {} against {}", q.tag, show(q.var()), show(p.var()))));
        }
        let range_ok = match q.var() {
            Some(_) => q.range().is_star() || q.range() == p.range(),
            None => q.range() == p.range(),
        };
        if !range_ok {
            return Some((k, format!("at '{}': range {} against {}", q.tag, q.range(), p.range())));
        }
    }
    None
}

/// Checks the index-variable constraints and returns, per condition, the
/// construction path its variable-bearing prefix matches.
pub fn validate_vars(w: &HelStatement) -> Result<Vec<String>, HelError> {
    let mut seen = BTreeMap::new();
    for p in w.cc.patoms() {
        if let Some(v) = p.var() {
            if seen.insert(v, ()).is_some() {
                return Err(HelError::VarUsedTwice(v.to_string()));
            }
        }
    }
    let paths = cc_paths(&w.cc);
    let mut witnesses = Vec::new();
    for c in &w.conds {
        for v in c.pseq.iter().filter_map(HelPatom::var) {
            if !seen.contains_key(v) {
                return Err(HelError::VarUnbound { var: v.to_string(), cond: c.to_string() });
            }
        }
        let Some(last) = c.pseq.iter().rposition(|p| p.var().is_some()) else {
            return Err(HelError::ConditionWithoutVariable(c.to_string()));
        };
        let mut best: Option<(usize, String)> = None;
        let mut found = None;
        for path in &paths {
            match mismatch(c, path, last + 1) {
                None => {
                    found = Some(render_path(path));
                    break;
                }
                Some((k, detail)) => {
                    if best.as_ref().is_none_or(|(bk, _)| k > *bk) {
                        best = Some((k, detail));
                    }
                }
            }
        }
        match found {
            Some(path) => witnesses.push(path),
            None => {
                let detail = best.map_or_else(String::new, |(_, d)| d);
                return Err(HelError::PrefixMismatch { cond: c.to_string(), detail });
            }
        }
    }
    Ok(witnesses)
}

/// Removes index variables: each condition loses its prefix up to its
/// rightmost variable and what remains is attached, in where-clause order,
/// to the construction patom carrying that variable, whose range is kept.
pub fn desugar(w: &HelStatement) -> Result<VfStatement, HelError> {
    validate_vars(w)?;
    let mut attached: BTreeMap<&str, Vec<VfCond>> = BTreeMap::new();
    for c in &w.conds {
        let last = c.pseq.iter().rposition(|p| p.var().is_some()).expect("validated");
        let var = c.pseq[last].var().expect("validated");
        let pseq = c.pseq[last + 1..].iter().map(|p| plain(p, Vec::new())).collect();
        attached.entry(var).or_default().push(VfCond { cut: c.cut, pseq, text: c.text.clone() });
    }
    let cc = w.cc.map(&mut |p: &HelPatom| {
        let conds = p.var().and_then(|v| attached.remove(v)).unwrap_or_default();
        Ok::<_, HelError>(plain(p, conds))
    })?;
    Ok(VfStatement { cc })
}

fn plain(p: &HelPatom, conds: Vec<VfCond>) -> VfPatom {
    VfPatom { step: p.step, tag: p.tag.clone(), range: p.vrange.as_ref().map(|r| r.range.clone()), conds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hel::tests::{doc1, LISTING, LISTING_VF};
    use crate::hel::eval_vf;

    fn hel(src: &str) -> HelStatement {
        HelStatement::parse(src).unwrap()
    }

    #[test]
    fn listing_witness() {
        assert_eq!(validate_vars(&hel(LISTING)).unwrap(), ["html.body.table.tr[i:*].td[1].txt"]);
        assert_eq!(desugar(&hel(LISTING)).unwrap(), VfStatement::parse(LISTING_VF).unwrap());
    }

    #[test]
    fn violations() {
        let div = "html.body.table(tr[0].td[0].txt # tr[i:*].td[1].txt)\n\
                   where html.body.div.tr[i].td[0].txt = \"item\";";
        match validate_vars(&hel(div)) {
            Err(HelError::PrefixMismatch { detail, .. }) => assert!(detail.contains("div"), "{detail}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            validate_vars(&hel("a(b[i].txt # c[i].txt)")),
            Err(HelError::VarUsedTwice("i".into()))
        );
        assert!(matches!(
            validate_vars(&hel("a(b.txt # c.txt) where d[i].txt = \"x\";")),
            Err(HelError::VarUnbound { var, .. }) if var == "i"
        ));
        assert!(matches!(
            validate_vars(&hel("a[i].txt where a.txt = \"x\";")),
            Err(HelError::ConditionWithoutVariable(_))
        ));
        assert!(matches!(
            validate_vars(&hel("a[0].b[i].txt where a.b[i].txt = \"x\";")),
            Err(HelError::PrefixMismatch { .. })
        ));
    }

    #[test]
    fn empty_where_erases_variables() {
        let w = hel("a[i:0-2]->b[j].txt");
        assert_eq!(desugar(&w).unwrap(), VfStatement::parse("a[0-2]->b[*].txt").unwrap());
    }

    #[test]
    fn shared_variable_conditions_are_conjoined() {
        let both = hel(
            "html.body.table.tr[i:*].td[1].txt \
             where html.body.table.tr[i].td[0].txt = \"item\" and html.body.table.tr[i].td[1].txt = \"C\";",
        );
        let vf = desugar(&both).unwrap();
        assert_eq!(
            vf.to_string(),
            "html.body.table.tr[*]{td[0].txt = \"item\" and td[1].txt = \"C\"}.td[1].txt;"
        );
        // same result as nesting the second condition on its own
        let t = doc1();
        let one = VfStatement::parse("html.body.table.tr{td[0].txt = \"item\"}.td[1].txt").unwrap();
        let other = VfStatement::parse("html.body.table.tr{td[1].txt = \"C\"}.td[1].txt").unwrap();
        let (a, b) = (eval_vf(&one, &t), eval_vf(&other, &t));
        let meet: Vec<_> = a.as_set().unwrap().iter().filter(|x| b.as_set().unwrap().contains(x)).cloned().collect();
        assert_eq!(eval_vf(&vf, &t).as_set().unwrap(), meet.as_slice());
    }

    #[test]
    fn condition_on_deepest_variable() {
        let w = hel("a[i].b[j:1].txt where a[i].b[j].c.txt = \"x\" and a[i].txt = \"y\";");
        assert_eq!(desugar(&w).unwrap().to_string(), "a[*]{txt = \"y\"}.b[1]{c.txt = \"x\"}.txt;");
    }
}
