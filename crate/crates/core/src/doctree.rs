//! Ordered, tag-labeled document trees.
//!
//! A [`DocTree`] is an immutable arena of nodes whose ids are assigned in
//! preorder, so `NodeId` order *is* document order. Parsed documents get a
//! synthetic root labeled [`DOC_TAG`] above the top-level element; text lives
//! on leaf nodes labeled [`TEXT_TAG`].

use std::fmt;

use thiserror::Error;

/// Label of the synthetic document root.
pub const DOC_TAG: &str = "#doc";
/// Label of text leaves.
pub const TEXT_TAG: &str = "#text";

/// A node label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tag(String);

impl Tag {
    pub fn new(name: impl Into<String>) -> Self {
        Tag(name.into())
    }

    pub fn text() -> Self {
        Tag(TEXT_TAG.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Reserved labels start with `#`; they never come out of the tag lexer.
    pub fn is_reserved(&self) -> bool {
        self.0.starts_with('#')
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Tag {
    fn from(s: &str) -> Self {
        Tag::new(s)
    }
}

/// Dense node index; 0 is the root and ids follow document order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocError {
    #[error("malformed input at byte {offset}: {message}")]
    MalformedInput { offset: usize, message: String },
}

#[derive(Clone, Debug)]
struct NodeData {
    label: Tag,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    prev: Option<NodeId>,
    next: Option<NodeId>,
    text: Option<String>,
    /// One past the last id in this node's subtree.
    end: u32,
}

/// Immutable ordered labeled tree.
#[derive(Clone, Debug)]
pub struct DocTree {
    nodes: Vec<NodeData>,
}

impl PartialEq for DocTree {
    fn eq(&self, other: &Self) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.nodes.iter().zip(&other.nodes).all(|(a, b)| {
                a.label == b.label && a.parent == b.parent && a.text == b.text
            })
    }
}

impl Eq for DocTree {}

impl DocTree {
    /// Parses the supported tag-nesting subset. See [`parse_document`].
    pub fn parse(input: &str) -> Result<DocTree, DocError> {
        parse_document(input.as_bytes())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn nodes(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        (0..self.nodes.len()).map(NodeId::new)
    }

    fn node(&self, v: NodeId) -> &NodeData {
        &self.nodes[v.index()]
    }

    pub fn label(&self, v: NodeId) -> &Tag {
        &self.node(v).label
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.node(v).parent
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.node(v).children
    }

    pub fn first_child(&self, v: NodeId) -> Option<NodeId> {
        self.node(v).children.first().copied()
    }

    pub fn next_sibling(&self, v: NodeId) -> Option<NodeId> {
        self.node(v).next
    }

    pub fn prev_sibling(&self, v: NodeId) -> Option<NodeId> {
        self.node(v).prev
    }

    /// True when `v` has no next sibling (the root included).
    pub fn is_last_sibling(&self, v: NodeId) -> bool {
        self.node(v).next.is_none()
    }

    pub fn is_root(&self, v: NodeId) -> bool {
        v == NodeId::ROOT
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.node(v).children.is_empty()
    }

    /// Content of a text leaf; `None` for elements.
    pub fn text(&self, v: NodeId) -> Option<&str> {
        self.node(v).text.as_deref()
    }

    /// Strict document order.
    pub fn precedes(&self, v: NodeId, w: NodeId) -> bool {
        v < w
    }

    /// Strict ancestor test, O(1) thanks to preorder ids.
    pub fn is_ancestor(&self, v: NodeId, w: NodeId) -> bool {
        v < w && w.0 < self.node(v).end
    }

    /// All ids of the subtree rooted at `v`, in document order, `v` first.
    pub fn subtree(&self, v: NodeId) -> impl Iterator<Item = NodeId> {
        (v.index()..self.node(v).end as usize).map(NodeId::new)
    }

    /// `v` followed by its ancestors up to the root.
    pub fn ancestors_or_self(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(Some(v), move |&u| self.parent(u))
    }

    /// Depth of `v` (root has depth 0).
    pub fn depth(&self, v: NodeId) -> usize {
        self.ancestors_or_self(v).count() - 1
    }

    fn text_leaves(&self, v: NodeId) -> impl Iterator<Item = &str> {
        self.subtree(v).filter_map(|u| self.text(u))
    }

    /// Concatenation of all text below `v` in document order.
    pub fn txt(&self, v: NodeId) -> String {
        self.text_leaves(v).collect()
    }

    /// `txt(v) == s` without building the concatenation.
    pub fn txt_eq(&self, v: NodeId, s: &str) -> bool {
        let mut rest = s.as_bytes();
        for piece in self.text_leaves(v) {
            let piece = piece.as_bytes();
            if rest.len() < piece.len() || &rest[..piece.len()] != piece {
                return false;
            }
            rest = &rest[piece.len()..];
        }
        rest.is_empty()
    }

    /// Serializes back to the tag-nesting input syntax. Parsing the output
    /// yields an equal tree when no two text leaves are adjacent siblings.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for &c in self.children(NodeId::ROOT) {
            self.write_markup(c, &mut out);
        }
        out
    }

    fn write_markup(&self, v: NodeId, out: &mut String) {
        if let Some(text) = self.text(v) {
            escape_text(text, out);
            return;
        }
        let name = self.label(v).as_str();
        if self.is_leaf(v) {
            out.push('<');
            out.push_str(name);
            out.push_str("/>");
            return;
        }
        out.push('<');
        out.push_str(name);
        out.push('>');
        for &c in self.children(v) {
            self.write_markup(c, out);
        }
        out.push_str("</");
        out.push_str(name);
        out.push('>');
    }

    /// Canonical S-expression dump: `(tag child... "text")`.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        self.write_sexpr(NodeId::ROOT, &mut out);
        out
    }

    fn write_sexpr(&self, v: NodeId, out: &mut String) {
        if let Some(text) = self.text(v) {
            out.push_str(&serde_json::to_string(text).expect("string serialization"));
            return;
        }
        out.push('(');
        out.push_str(self.label(v).as_str());
        for &c in self.children(v) {
            out.push(' ');
            self.write_sexpr(c, out);
        }
        out.push(')');
    }

    /// Copy of the tree with the subtree at `v` removed. The root cannot be removed.
    pub fn without_subtree(&self, v: NodeId) -> DocTree {
        assert!(!self.is_root(v), "cannot remove the root");
        let mut b = TreeBuilder::with_root(self.label(NodeId::ROOT).clone());
        for &c in self.children(NodeId::ROOT) {
            self.copy_into(c, Some(v), &mut b);
        }
        b.finish()
    }

    fn copy_into(&self, v: NodeId, skip: Option<NodeId>, b: &mut TreeBuilder) {
        if Some(v) == skip {
            return;
        }
        if let Some(text) = self.text(v) {
            b.text(text);
            return;
        }
        b.open(self.label(v).clone());
        for &c in self.children(v) {
            self.copy_into(c, skip, b);
        }
        b.close();
    }
}

fn escape_text(text: &str, out: &mut String) {
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(ch),
        }
    }
}

/// Incremental preorder construction of a [`DocTree`].
///
/// Adjacent text children are merged into one leaf.
#[derive(Debug)]
pub struct TreeBuilder {
    nodes: Vec<NodeData>,
    open: Vec<NodeId>,
}

impl Default for TreeBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl TreeBuilder {
    /// Builder rooted at the synthetic `#doc` node.
    pub fn new() -> Self {
        Self::with_root(Tag::new(DOC_TAG))
    }

    /// Builder with an arbitrary root label, for trees that do not come from
    /// a parsed document.
    pub fn with_root(label: Tag) -> Self {
        TreeBuilder {
            nodes: vec![NodeData {
                label,
                parent: None,
                children: Vec::new(),
                prev: None,
                next: None,
                text: None,
                end: 0,
            }],
            open: vec![NodeId::ROOT],
        }
    }

    /// Number of currently open elements, root excluded.
    pub fn depth(&self) -> usize {
        self.open.len() - 1
    }

    fn current(&self) -> NodeId {
        *self.open.last().expect("builder root is never closed")
    }

    fn push(&mut self, label: Tag, text: Option<String>) -> NodeId {
        let parent = self.current();
        let id = NodeId::new(self.nodes.len());
        let prev = self.nodes[parent.index()].children.last().copied();
        if let Some(p) = prev {
            self.nodes[p.index()].next = Some(id);
        }
        self.nodes[parent.index()].children.push(id);
        self.nodes.push(NodeData {
            label,
            parent: Some(parent),
            children: Vec::new(),
            prev,
            next: None,
            text,
            end: 0,
        });
        id
    }

    pub fn open(&mut self, label: Tag) -> NodeId {
        let id = self.push(label, None);
        self.open.push(id);
        id
    }

    pub fn close(&mut self) -> NodeId {
        assert!(self.open.len() > 1, "close without matching open");
        self.open.pop().expect("checked above")
    }

    /// Adds an empty element.
    pub fn leaf(&mut self, label: Tag) -> NodeId {
        self.push(label, None)
    }

    pub fn text(&mut self, content: &str) -> NodeId {
        let parent = self.current();
        if let Some(&last) = self.nodes[parent.index()].children.last() {
            if let Some(existing) = self.nodes[last.index()].text.as_mut() {
                existing.push_str(content);
                return last;
            }
        }
        self.push(Tag::text(), Some(content.to_string()))
    }

    /// Closes remaining open elements and finalizes subtree extents.
    pub fn finish(mut self) -> DocTree {
        self.open.truncate(1);
        let n = self.nodes.len();
        for i in (0..n).rev() {
            let end = match self.nodes[i].children.last() {
                Some(&c) => self.nodes[c.index()].end,
                None => (i + 1) as u32,
            };
            self.nodes[i].end = end;
        }
        DocTree { nodes: self.nodes }
    }
}

/// Parses UTF-8 tag-nested input into a [`DocTree`].
///
/// Tags are case-insensitive and normalized to lowercase; attributes are
/// skipped; comments, `<!...>` and `<?...?>` are ignored. Whitespace-only
/// text is dropped, other text is kept verbatim after entity decoding.
pub fn parse_document(bytes: &[u8]) -> Result<DocTree, DocError> {
    let input = std::str::from_utf8(bytes).map_err(|e| DocError::MalformedInput {
        offset: e.valid_up_to(),
        message: "invalid UTF-8".into(),
    })?;
    Parser { src: input, pos: 0 }.run()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, DocError> {
        Err(DocError::MalformedInput {
            offset,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn run(mut self) -> Result<DocTree, DocError> {
        let mut b = TreeBuilder::new();
        let mut names: Vec<(String, usize)> = Vec::new();
        let mut top_level_seen = false;
        while self.pos < self.src.len() {
            let rest = self.rest();
            if rest.starts_with("<!--") {
                match rest.find("-->") {
                    Some(i) => self.pos += i + 3,
                    None => return self.err(self.pos, "unterminated comment"),
                }
            } else if rest.starts_with("<!") || rest.starts_with("<?") {
                match rest.find('>') {
                    Some(i) => self.pos += i + 1,
                    None => return self.err(self.pos, "unterminated declaration"),
                }
            } else if rest.starts_with("</") {
                let start = self.pos;
                self.pos += 2;
                let name = self.tag_name()?;
                self.skip_ws();
                if !self.rest().starts_with('>') {
                    return self.err(self.pos, "expected '>' in closing tag");
                }
                self.pos += 1;
                match names.pop() {
                    Some((open, _)) if open == name => {
                        b.close();
                    }
                    Some((open, _)) => {
                        return self.err(start, format!("</{name}> does not close <{open}>"))
                    }
                    None => return self.err(start, format!("unexpected </{name}>")),
                }
            } else if rest.starts_with('<') {
                let start = self.pos;
                self.pos += 1;
                let name = self.tag_name()?;
                let self_closing = self.skip_attributes()?;
                if names.is_empty() {
                    if top_level_seen {
                        return self.err(start, "more than one top-level element");
                    }
                    top_level_seen = true;
                }
                if self_closing {
                    b.leaf(Tag::new(name));
                } else {
                    b.open(Tag::new(name.clone()));
                    names.push((name, start));
                }
            } else {
                let start = self.pos;
                let end = rest.find('<').map_or(self.src.len(), |i| self.pos + i);
                let raw = &self.src[start..end];
                self.pos = end;
                if raw.trim().is_empty() {
                    continue;
                }
                if names.is_empty() {
                    return self.err(start, "text outside the top-level element");
                }
                b.text(&decode_entities(raw));
            }
        }
        if let Some((open, _)) = names.last() {
            return self.err(self.src.len(), format!("unclosed <{open}>"));
        }
        Ok(b.finish())
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn tag_name(&mut self) -> Result<String, DocError> {
        let rest = self.rest();
        let mut len = 0;
        for (i, ch) in rest.char_indices() {
            let ok = if i == 0 {
                ch.is_ascii_alphabetic()
            } else {
                ch.is_ascii_alphanumeric() || matches!(ch, '-' | '_' | ':' | '.')
            };
            if !ok {
                break;
            }
            len = i + ch.len_utf8();
        }
        if len == 0 {
            return self.err(self.pos, "expected tag name");
        }
        let name = rest[..len].to_ascii_lowercase();
        self.pos += len;
        Ok(name)
    }

    /// Skips attributes up to `>`; returns whether the tag was `/>`.
    fn skip_attributes(&mut self) -> Result<bool, DocError> {
        let mut quote: Option<char> = None;
        let start = self.pos;
        let mut prev = ' ';
        for (i, ch) in self.rest().char_indices() {
            match quote {
                Some(q) if ch == q => quote = None,
                Some(_) => {}
                None => match ch {
                    '"' | '\'' => quote = Some(ch),
                    '<' => return self.err(start + i, "'<' inside a tag"),
                    '>' => {
                        self.pos += i + 1;
                        return Ok(prev == '/');
                    }
                    _ => {}
                },
            }
            prev = ch;
        }
        self.err(self.src.len(), "unterminated tag")
    }
}

fn decode_entities(raw: &str) -> String {
    if !raw.contains('&') {
        return raw.to_string();
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        let decoded = rest.find(';').and_then(|semi| {
            let name = &rest[1..semi];
            let ch = match name {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                _ if name.starts_with("#x") || name.starts_with("#X") => {
                    u32::from_str_radix(&name[2..], 16).ok().and_then(char::from_u32)
                }
                _ if name.starts_with('#') => name[1..].parse().ok().and_then(char::from_u32),
                _ => None,
            };
            ch.map(|c| (c, semi + 1))
        });
        match decoded {
            Some((c, used)) => {
                out.push(c);
                rest = &rest[used..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}
