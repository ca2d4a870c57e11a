//! Greedy shrinking of failing inputs.

use wrapcore::doctree::DocTree;
use wrapcore::hel::{Cc, VfPatom, VfStatement};
use wrapcore::pathrange::Range;
use wrapcore::rpn::{Patom, Rpn};

/// Repeatedly replaces `x` by the first smaller candidate that still
/// fails, until none does.
pub fn minimize<T: Clone>(mut x: T, candidates: impl Fn(&T) -> Vec<T>, fails: impl Fn(&T) -> bool) -> T {
    'outer: loop {
        for c in candidates(&x) {
            if fails(&c) {
                x = c;
                continue 'outer;
            }
        }
        return x;
    }
}

/// Trees with one subtree removed, largest subtrees first.
pub fn tree_candidates(t: &DocTree) -> Vec<DocTree> {
    let mut nodes: Vec<_> = t.nodes().filter(|&v| !t.is_root(v)).collect();
    nodes.sort_by_key(|&v| std::cmp::Reverse(t.subtree(v).count()));
    nodes.into_iter().map(|v| t.without_subtree(v)).collect()
}

/// Shorter chains, fewer record entries and conditions, `*` ranges.
pub fn rpn_candidates(w: &Rpn) -> Vec<Rpn> {
    let mut out = Vec::new();
    match w {
        Rpn::Txt => {}
        Rpn::Chain(p, rest) => {
            out.push((**rest).clone());
            for q in patom_candidates(p) {
                out.push(Rpn::Chain(q, rest.clone()));
            }
            for r in rpn_candidates(rest) {
                out.push(Rpn::Chain(p.clone(), Box::new(r)));
            }
        }
        Rpn::Record(es) => {
            out.extend(es.iter().cloned());
            if es.len() > 2 {
                for i in 0..es.len() {
                    let mut fewer = es.clone();
                    fewer.remove(i);
                    out.push(Rpn::Record(fewer));
                }
            }
            for (i, e) in es.iter().enumerate() {
                for r in rpn_candidates(e) {
                    let mut es = es.clone();
                    es[i] = r;
                    out.push(Rpn::Record(es));
                }
            }
        }
    }
    out
}

fn patom_candidates(p: &Patom) -> Vec<Patom> {
    let mut out = Vec::new();
    for i in 0..p.conds.len() {
        let mut q = p.clone();
        q.conds.remove(i);
        out.push(q);
    }
    if !p.range.is_star() {
        out.push(Patom { range: Range::Star, ..p.clone() });
    }
    out
}

/// Shorter path sequences, fewer entries and conditions, no ranges.
pub fn vf_candidates(w: &VfStatement) -> Vec<VfStatement> {
    cc_candidates(&w.cc).into_iter().map(|cc| VfStatement { cc }).collect()
}

fn with_pseq(cc: &Cc<VfPatom>, ps: Vec<VfPatom>) -> Cc<VfPatom> {
    match cc {
        Cc::Txt(_) => Cc::Txt(ps),
        Cc::Record(_, es) => Cc::Record(ps, es.clone()),
    }
}

fn cc_candidates(cc: &Cc<VfPatom>) -> Vec<Cc<VfPatom>> {
    let mut out = Vec::new();
    let ps = cc.pseq();
    if let Cc::Record(_, es) = cc {
        // splice one entry onto the path sequence
        for e in es {
            let mut joined = ps.to_vec();
            joined.extend(e.pseq().iter().cloned());
            out.push(with_pseq(e, joined));
        }
        if es.len() > 2 {
            for i in 0..es.len() {
                let mut fewer = es.clone();
                fewer.remove(i);
                out.push(Cc::Record(ps.to_vec(), fewer));
            }
        }
        for (i, e) in es.iter().enumerate() {
            for r in cc_candidates(e) {
                let mut es = es.clone();
                es[i] = r;
                out.push(Cc::Record(ps.to_vec(), es));
            }
        }
    }
    if ps.len() > 1 {
        for i in 0..ps.len() {
            let mut fewer = ps.to_vec();
            fewer.remove(i);
            fewer[0].step = wrapcore::hel::Step::Child;
            out.push(with_pseq(cc, fewer));
        }
    }
    for (i, p) in ps.iter().enumerate() {
        let mut variants = Vec::new();
        for k in 0..p.conds.len() {
            let mut q = p.clone();
            q.conds.remove(k);
            variants.push(q);
        }
        if p.range.is_some() {
            variants.push(VfPatom { range: None, ..p.clone() });
        }
        for q in variants {
            let mut ps = ps.to_vec();
            ps[i] = q;
            out.push(with_pseq(cc, ps));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_to_the_culprit() {
        let t = DocTree::parse("<a><b><c/></b><d>x</d><c/></a>").unwrap();
        let has_c = |t: &DocTree| t.nodes().any(|v| t.label(v).as_str() == "c");
        let small = minimize(t, tree_candidates, has_c);
        assert_eq!(small.to_sexpr(), "(#doc (a (c)))");
    }

    #[test]
    fn statements_shrink_and_stay_valid() {
        let w = Rpn::parse(r#"a[1].(b{txt = "x"}.txt # c.txt # d.e.txt)"#).unwrap();
        let mentions_e = |w: &Rpn| w.to_string().contains('e');
        assert_eq!(minimize(w, rpn_candidates, mentions_e).to_string(), "e.txt");
        let v = VfStatement::parse(r#"a->b[1]{c.txt = "x"}(d.txt # e->f.txt)"#).unwrap();
        let small = minimize(v, vf_candidates, |w| w.to_string().contains('f'));
        assert_eq!(small.to_string(), "f.txt;");
        for c in vf_candidates(&VfStatement::parse("a->b(c.txt # d.txt # e.txt)").unwrap()) {
            assert_eq!(VfStatement::parse(&c.to_string()).unwrap(), c);
        }
    }
}
