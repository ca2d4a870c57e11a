//! Shared documents and wrappers.

use wrapcore::doctree::{DocTree, Tag, TreeBuilder};

/// `#doc → html → body → table → tr×3`, each row holding two cells.
pub const DOC1: &str = "<html><body><table>\
    <tr><td>item</td><td>A</td></tr>\
    <tr><td>x</td><td>B</td></tr>\
    <tr><td>item</td><td>C</td></tr>\
    </table></body></html>";

pub const EXAMPLE_3_3: &str = r#"html.body.table.tr{td[0].txt = "item"}.td[1].txt"#;

/// Same text under both semantics; only the order of range and
/// conditions differs.
pub const DIVERGENCE: &str = r#"html.body.table.tr[1]{td[0].txt = "item"}.td[1].txt"#;

pub const HEL_LISTING: &str = "html.body.table(tr[0].td[0].txt # tr[i:*].td[1].txt)\n\
    where html.body.table.tr[i].td[0].txt = \"item\";";

pub const HEL_VF_LISTING: &str = r#"html.body.table(tr[0].td[0].txt # tr[*]{td[0].txt = "item"}.td[1].txt);"#;

pub const CUT_STATEMENT: &str = r#"html.body.table.tr[*]{!td[0].txt = "item"}.td[1].txt"#;

/// Every `b` relates to every `l` below the chain.
pub const QUADRATIC_PROGRAM: &str = r#"p(X0,X) :- dom(_,X0), subelem["(^l)*.l"](X0,X)."#;

/// Marks the top element (`evenmark`) iff the top element has an even
/// number of children: `odd`/`even` alternate along the sibling chain.
pub const PARITY_PROGRAM: &str = r#"@schema {evenmark:txt}.
@aux top odd even.
top(X0,X) :- root(_,X0), subelem["_"](X0,X).
odd(X0,X) :- top(_,X0), subelem["_|#text"](X0,X), firstchild(X0,X).
even(X0,X) :- top(_,X0), subelem["_|#text"](X0,X), nextsibling(Y,X), odd(_,Y).
odd(X0,X) :- top(_,X0), subelem["_|#text"](X0,X), nextsibling(Y,X), even(_,Y).
evenmark(X0,X) :- root(_,X0), subelem["_"](X0,X), leaf(X).
evenmark(X0,X) :- root(_,X0), subelem["_"](X0,X), contains["_|#text"](X,Z), even(_,Z), lastsibling(Z).
"#;

pub fn doc1() -> DocTree {
    DocTree::parse(DOC1).expect("fixture parses")
}

/// `b1 → b2 → … → bm → l1 … ln`, with `b1` as the root.
pub fn quadratic_tree(m: usize, n: usize) -> DocTree {
    assert!(m >= 1, "the chain needs at least one b");
    let mut b = TreeBuilder::with_root(Tag::new("b"));
    for _ in 1..m {
        b.open(Tag::new("b"));
    }
    for _ in 0..n {
        b.leaf(Tag::new("l"));
    }
    b.finish()
}

/// `<top>` with `n` empty `<c/>` children.
pub fn parity_tree(n: usize) -> DocTree {
    let mut b = TreeBuilder::new();
    b.open(Tag::new("top"));
    for _ in 0..n {
        b.leaf(Tag::new("c"));
    }
    b.finish()
}
