//! Ranges: position selectors over document-ordered sequences.
//!
//! A range denotes a word language over `{0,1}` with at most one word per
//! length; applied to a sequence of length `k`, the word of length `k` marks
//! the selected positions. Structured forms (`*`, `i`, `i-j`, unions, `last`)
//! are evaluated by direct indexing; `regex:` ranges go through a DFA.
//!
//! Surface syntax (0-based positions): `*`, `2`, `1-3`, `0,2-4`, `last`,
//! `regex:<expr>` where `<expr>` uses `0`, `1`, `.`/juxtaposition, `|`, `*`,
//! parentheses, and `()` for the empty word.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Cursor, SyntaxError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RangeError {
    #[error("range has no word of length {0}")]
    NoWordOfLength(usize),
    #[error("range is not of density one: several words of length {0}")]
    MultipleWords(usize),
}

/// Regular expression over `{0,1}`; `false` is `0`, `true` is `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BinRegex {
    Empty,
    Epsilon,
    Bit(bool),
    Concat(Vec<BinRegex>),
    Alt(Vec<BinRegex>),
    Star(Box<BinRegex>),
}

impl BinRegex {
    pub fn parse(text: &str) -> Result<BinRegex, SyntaxError> {
        let mut c = Cursor::new(text);
        let r = parse_bin_alt(&mut c)?;
        c.finish()?;
        Ok(r)
    }

    fn bits(bit: bool, n: usize) -> Vec<BinRegex> {
        vec![BinRegex::Bit(bit); n]
    }

    fn precedence(&self) -> u8 {
        match self {
            BinRegex::Alt(rs) if rs.len() > 1 => 0,
            BinRegex::Concat(rs) if rs.len() > 1 => 1,
            BinRegex::Star(_) => 2,
            _ => 3,
        }
    }

    pub fn compile(&self) -> BinDfa {
        BinDfa::new(self)
    }
}

impl fmt::Display for BinRegex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, r: &BinRegex, min: u8| {
            if r.precedence() < min {
                write!(f, "({r})")
            } else {
                write!(f, "{r}")
            }
        };
        match self {
            BinRegex::Empty => f.write_str("!"),
            BinRegex::Epsilon => f.write_str("()"),
            BinRegex::Bit(b) => f.write_str(if *b { "1" } else { "0" }),
            BinRegex::Concat(rs) if rs.is_empty() => f.write_str("()"),
            BinRegex::Alt(rs) if rs.is_empty() => f.write_str("!"),
            BinRegex::Concat(rs) | BinRegex::Alt(rs) if rs.len() == 1 => write!(f, "{}", rs[0]),
            BinRegex::Concat(rs) => {
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    child(f, r, 2)?;
                }
                Ok(())
            }
            BinRegex::Alt(rs) => {
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    child(f, r, 1)?;
                }
                Ok(())
            }
            BinRegex::Star(r) => {
                child(f, r, 3)?;
                f.write_str("*")
            }
        }
    }
}

fn parse_bin_alt(c: &mut Cursor<'_>) -> Result<BinRegex, SyntaxError> {
    let mut alts = vec![parse_bin_concat(c)?];
    while c.eat("|") {
        alts.push(parse_bin_concat(c)?);
    }
    Ok(if alts.len() == 1 { alts.pop().expect("one") } else { BinRegex::Alt(alts) })
}

fn parse_bin_concat(c: &mut Cursor<'_>) -> Result<BinRegex, SyntaxError> {
    let mut parts = Vec::new();
    loop {
        c.eat(".");
        match c.peek() {
            Some('0' | '1' | '(' | '!') => parts.push(parse_bin_postfix(c)?),
            _ => break,
        }
    }
    match parts.len() {
        0 => c.error("expected 0, 1 or '('"),
        1 => Ok(parts.pop().expect("one")),
        _ => Ok(BinRegex::Concat(parts)),
    }
}

fn parse_bin_postfix(c: &mut Cursor<'_>) -> Result<BinRegex, SyntaxError> {
    let mut r = if c.eat("0") {
        BinRegex::Bit(false)
    } else if c.eat("1") {
        BinRegex::Bit(true)
    } else if c.eat("!") {
        BinRegex::Empty
    } else {
        c.expect("(")?;
        if c.eat(")") {
            BinRegex::Epsilon
        } else {
            let r = parse_bin_alt(c)?;
            c.expect(")")?;
            r
        }
    };
    while c.eat("*") {
        r = BinRegex::Star(Box::new(r));
    }
    Ok(r)
}

const NO: u32 = u32::MAX;

/// DFA over `{0,1}` obtained by subset construction.
#[derive(Clone, Debug)]
pub struct BinDfa {
    trans: Vec<[u32; 2]>,
    accepting: Vec<bool>,
}

impl BinDfa {
    pub fn new(r: &BinRegex) -> Self {
        // Thompson NFA
        let mut eps: Vec<Vec<usize>> = Vec::new();
        let mut sym: Vec<Vec<(bool, usize)>> = Vec::new();
        fn state(eps: &mut Vec<Vec<usize>>, sym: &mut Vec<Vec<(bool, usize)>>) -> usize {
            eps.push(Vec::new());
            sym.push(Vec::new());
            eps.len() - 1
        }
        fn build(
            r: &BinRegex,
            eps: &mut Vec<Vec<usize>>,
            sym: &mut Vec<Vec<(bool, usize)>>,
        ) -> (usize, usize) {
            let s = state(eps, sym);
            let a = state(eps, sym);
            match r {
                BinRegex::Empty => {}
                BinRegex::Epsilon => eps[s].push(a),
                BinRegex::Bit(b) => sym[s].push((*b, a)),
                BinRegex::Concat(rs) => {
                    let mut cur = s;
                    for r in rs {
                        let (is, ia) = build(r, eps, sym);
                        eps[cur].push(is);
                        cur = ia;
                    }
                    eps[cur].push(a);
                }
                BinRegex::Alt(rs) => {
                    for r in rs {
                        let (is, ia) = build(r, eps, sym);
                        eps[s].push(is);
                        eps[ia].push(a);
                    }
                }
                BinRegex::Star(inner) => {
                    let (is, ia) = build(inner, eps, sym);
                    eps[s].extend([is, a]);
                    eps[ia].extend([is, a]);
                }
            }
            (s, a)
        }
        let (start, accept) = build(r, &mut eps, &mut sym);
        let closure = |seed: Vec<usize>| {
            let mut out = BTreeSet::new();
            let mut stack = seed;
            while let Some(q) = stack.pop() {
                if out.insert(q) {
                    stack.extend(eps[q].iter().copied());
                }
            }
            out
        };
        let mut ids: BTreeMap<BTreeSet<usize>, u32> = BTreeMap::new();
        let mut sets = vec![closure(vec![start])];
        ids.insert(sets[0].clone(), 0);
        let mut trans = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(d) = queue.pop_front() {
            if trans.len() <= d {
                trans.resize(d + 1, [NO, NO]);
            }
            for bit in [false, true] {
                let targets: Vec<usize> = sets[d]
                    .iter()
                    .flat_map(|&q| sym[q].iter())
                    .filter(|(b, _)| *b == bit)
                    .map(|&(_, t)| t)
                    .collect();
                if targets.is_empty() {
                    continue;
                }
                let next = closure(targets);
                let id = *ids.entry(next.clone()).or_insert_with(|| {
                    sets.push(next);
                    queue.push_back(sets.len() - 1);
                    (sets.len() - 1) as u32
                });
                trans[d][bit as usize] = id;
            }
        }
        trans.resize(sets.len(), [NO, NO]);
        let accepting = sets.iter().map(|s| s.contains(&accept)).collect();
        BinDfa { trans, accepting }
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn accepts(&self, word: &[bool]) -> bool {
        let mut q = 0u32;
        for &b in word {
            q = self.trans[q as usize][b as usize];
            if q == NO {
                return false;
            }
        }
        self.accepting[q as usize]
    }

    /// `table[r][q]` = number of accepted words of length `r` from `q`, saturated at 2.
    fn count_table(&self, k: usize) -> Vec<Vec<u8>> {
        let n = self.num_states();
        let mut table = Vec::with_capacity(k + 1);
        table.push(self.accepting.iter().map(|&a| a as u8).collect::<Vec<u8>>());
        for r in 1..=k {
            let prev: &Vec<u8> = &table[r - 1];
            let row = (0..n)
                .map(|q| {
                    self.trans[q]
                        .iter()
                        .filter(|&&t| t != NO)
                        .map(|&t| prev[t as usize])
                        .sum::<u8>()
                        .min(2)
                })
                .collect();
            table.push(row);
        }
        table
    }

    /// Number of words of length `k` (saturating at 2).
    pub fn count_words(&self, k: usize) -> u8 {
        self.count_table(k)[k][0]
    }

    /// The unique word of length `k`, found by reachability counting.
    pub fn unique_word(&self, k: usize) -> Result<Vec<bool>, RangeError> {
        let table = self.count_table(k);
        match table[k][0] {
            0 => return Err(RangeError::NoWordOfLength(k)),
            1 => {}
            _ => return Err(RangeError::MultipleWords(k)),
        }
        let mut q = 0usize;
        let mut word = Vec::with_capacity(k);
        for remaining in (0..k).rev() {
            let bit = [false, true]
                .into_iter()
                .find(|&b| {
                    let t = self.trans[q][b as usize];
                    t != NO && table[remaining][t as usize] == 1
                })
                .expect("a count of one has exactly one continuation");
            word.push(bit);
            q = self.trans[q][bit as usize] as usize;
        }
        Ok(word)
    }

    /// Rejects the language if some length up to `probe` has two or more words.
    pub fn check_at_most_one(&self, probe: usize) -> Result<(), RangeError> {
        let n = self.num_states();
        let mut prev: Vec<u8> = self.accepting.iter().map(|&a| a as u8).collect();
        if prev[0] > 1 {
            return Err(RangeError::MultipleWords(0));
        }
        for r in 1..=probe {
            let row: Vec<u8> = (0..n)
                .map(|q| {
                    self.trans[q]
                        .iter()
                        .filter(|&&t| t != NO)
                        .map(|&t| prev[t as usize])
                        .sum::<u8>()
                        .min(2)
                })
                .collect();
            if row[0] > 1 {
                return Err(RangeError::MultipleWords(r));
            }
            prev = row;
        }
        Ok(())
    }

    /// Probe length large enough for word-count periodicity to show.
    pub fn density_probe(&self) -> usize {
        let n = self.num_states();
        (n * n + n).max(64)
    }
}

/// A `regex:` range: the expression plus its compiled, density-checked DFA.
#[derive(Clone, Debug)]
pub struct RawRange {
    regex: BinRegex,
    dfa: BinDfa,
}

impl RawRange {
    pub fn new(regex: BinRegex) -> Result<Self, RangeError> {
        let dfa = regex.compile();
        dfa.check_at_most_one(dfa.density_probe())?;
        Ok(RawRange { regex, dfa })
    }

    pub fn regex(&self) -> &BinRegex {
        &self.regex
    }

    pub fn dfa(&self) -> &BinDfa {
        &self.dfa
    }
}

impl PartialEq for RawRange {
    fn eq(&self, other: &Self) -> bool {
        self.regex == other.regex
    }
}

impl Eq for RawRange {}

/// Closed interval of 0-based positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Range {
    Star,
    Index(usize),
    /// Inclusive, `lo <= hi`.
    Interval(usize, usize),
    /// Two or more comma-separated items.
    Union(Vec<Span>),
    Last,
    Raw(RawRange),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    /// Positions are counted from the end of the sequence.
    Backward,
}

impl Range {
    pub fn parse(text: &str) -> Result<Range, SyntaxError> {
        let mut c = Cursor::new(text);
        let r = parse_range(&mut c)?;
        c.finish()?;
        Ok(r)
    }

    pub fn raw(text: &str) -> Result<Range, SyntaxError> {
        Range::parse(&format!("regex:{text}"))
    }

    pub fn is_star(&self) -> bool {
        matches!(self, Range::Star)
    }

    fn spans(&self) -> Option<Vec<Span>> {
        match self {
            Range::Index(i) => Some(vec![Span { lo: *i, hi: *i }]),
            Range::Interval(lo, hi) => Some(vec![Span { lo: *lo, hi: *hi }]),
            Range::Union(spans) => Some(spans.clone()),
            _ => None,
        }
    }

    /// Selection mask for a sequence of length `k`.
    pub fn mask(&self, k: usize) -> Result<Vec<bool>, RangeError> {
        match self {
            Range::Star => Ok(vec![true; k]),
            Range::Last => Ok((0..k).map(|p| p + 1 == k).collect()),
            Range::Raw(raw) => raw.dfa.unique_word(k),
            _ => {
                let spans = self.spans().expect("structured range");
                Ok((0..k).map(|p| spans.iter().any(|s| s.lo <= p && p <= s.hi)).collect())
            }
        }
    }

    /// Density-one `{0,1}` expression with the same semantics: exactly one
    /// word per length, equal to [`Range::mask`] at every length.
    pub fn to_bin_regex(&self) -> BinRegex {
        match self {
            Range::Star => BinRegex::Star(Box::new(BinRegex::Bit(true))),
            // () | 0*.1
            Range::Last => BinRegex::Alt(vec![
                BinRegex::Epsilon,
                BinRegex::Concat(vec![BinRegex::Star(Box::new(BinRegex::Bit(false))), BinRegex::Bit(true)]),
            ]),
            Range::Raw(raw) => raw.regex.clone(),
            _ => {
                // Length-k prefixes of the infinite word b_0 b_1 ... b_m 0 0 ...:
                // (b_0 (b_1 (... (b_m 0*)?)?)?)?
                let spans = self.spans().expect("structured range");
                let last = spans.iter().map(|s| s.hi).max().unwrap_or(0);
                let mut r = BinRegex::Star(Box::new(BinRegex::Bit(false)));
                for p in (0..=last).rev() {
                    let bit = spans.iter().any(|s| s.lo <= p && p <= s.hi);
                    r = BinRegex::Alt(vec![BinRegex::Epsilon, BinRegex::Concat(vec![BinRegex::Bit(bit), r])]);
                }
                r
            }
        }
    }

    /// The 0-based form of the interval expression `0^i.1^(j-i+1).0*`. Unlike
    /// [`Range::to_bin_regex`] it has no words of length `<= j`.
    pub fn interval_regex(i: usize, j: usize) -> BinRegex {
        assert!(i <= j);
        let mut parts = BinRegex::bits(false, i);
        parts.extend(BinRegex::bits(true, j - i + 1));
        parts.push(BinRegex::Star(Box::new(BinRegex::Bit(false))));
        BinRegex::Concat(parts)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let span = |f: &mut fmt::Formatter<'_>, s: &Span| {
            if s.lo == s.hi {
                write!(f, "{}", s.lo)
            } else {
                write!(f, "{}-{}", s.lo, s.hi)
            }
        };
        match self {
            Range::Star => f.write_str("*"),
            Range::Index(i) => write!(f, "{i}"),
            Range::Interval(i, j) => write!(f, "{i}-{j}"),
            Range::Union(spans) => {
                for (k, s) in spans.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    span(f, s)?;
                }
                Ok(())
            }
            Range::Last => f.write_str("last"),
            Range::Raw(raw) => write!(f, "regex:{}", raw.regex),
        }
    }
}

/// Parses a range up to (not including) the closing `]`.
pub(crate) fn parse_range(c: &mut Cursor<'_>) -> Result<Range, SyntaxError> {
    if c.eat_keyword("regex") {
        c.expect(":")?;
        let r = parse_bin_alt(c)?;
        return RawRange::new(r).map(Range::Raw).or_else(|e| c.error(e.to_string()));
    }
    if c.eat_keyword("last") {
        return Ok(Range::Last);
    }
    let mut star = false;
    let mut spans = Vec::new();
    loop {
        if c.eat("*") {
            star = true;
        } else {
            let Some(lo) = c.number() else {
                return c.error("expected range item ('*', i or i-j)");
            };
            let hi = if c.eat("-") {
                match c.number() {
                    Some(hi) => hi,
                    None => return c.error("expected interval end"),
                }
            } else {
                lo
            };
            if hi < lo {
                return c.error(format!("empty interval {lo}-{hi}"));
            }
            spans.push(Span { lo, hi });
        }
        if !c.eat(",") {
            break;
        }
    }
    Ok(if star {
        Range::Star
    } else if spans.len() == 1 {
        let s = spans[0];
        if s.lo == s.hi {
            Range::Index(s.lo)
        } else {
            Range::Interval(s.lo, s.hi)
        }
    } else {
        Range::Union(spans)
    })
}

/// Applies `range` to a sequence sorted in document order.
///
/// With [`Direction::Backward`] the range is matched against the reversed
/// sequence; the result is returned in forward order either way.
pub fn apply_range<T: Copy>(seq: &[T], range: &Range, dir: Direction) -> Result<Vec<T>, RangeError> {
    if range.is_star() {
        return Ok(seq.to_vec());
    }
    let mask = range.mask(seq.len())?;
    let k = seq.len();
    Ok(match dir {
        Direction::Forward => seq.iter().zip(&mask).filter(|(_, m)| **m).map(|(x, _)| *x).collect(),
        Direction::Backward => (0..k).filter(|&p| mask[k - 1 - p]).map(|p| seq[p]).collect(),
    })
}

/// The unique word of length `k` of the range's density-one language, as a
/// string of `0`/`1`, computed on the automaton.
pub fn unique_word(range: &Range, k: usize) -> Result<String, RangeError> {
    let word = match range {
        Range::Raw(raw) => raw.dfa.unique_word(k)?,
        _ => range.to_bin_regex().compile().unique_word(k)?,
    };
    Ok(word.into_iter().map(|b| if b { '1' } else { '0' }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn star_is_identity() {
        for k in 0..10 {
            let s: Vec<usize> = (0..k).collect();
            assert_eq!(apply_range(&s, &Range::Star, Direction::Forward).unwrap(), s);
        }
    }

    #[test]
    fn interval_selects_positions() {
        let s = [1, 2, 3, 4, 5];
        assert_eq!(apply_range(&s, &Range::Interval(1, 2), Direction::Forward).unwrap(), [2, 3]);
    }

    #[test]
    fn last_equals_backward_first() {
        let s = [1, 2, 3];
        let back = Range::raw("1.0*").unwrap();
        assert_eq!(apply_range(&s, &Range::Last, Direction::Forward).unwrap(), [3]);
        assert_eq!(apply_range(&s, &back, Direction::Backward).unwrap(), [3]);
    }

    #[test]
    fn unique_word_examples() {
        assert_eq!(unique_word(&Range::Interval(0, 0), 3).unwrap(), "100");
        assert_eq!(unique_word(&Range::Star, 0).unwrap(), "");
        assert_eq!(unique_word(&Range::Last, 4).unwrap(), "0001");
        assert_eq!(unique_word(&Range::Index(5), 3).unwrap(), "000");
    }

    /// Brute force: enumerate all 2^k words of length k.
    fn words_of_length(dfa: &BinDfa, k: usize) -> Vec<Vec<bool>> {
        (0..1u32 << k)
            .map(|m| (0..k).map(|i| m >> (k - 1 - i) & 1 == 1).collect::<Vec<bool>>())
            .filter(|w| dfa.accepts(w))
            .collect()
    }

    #[test]
    fn index_zero_regex_has_one_word_of_length_three() {
        let dfa = Range::Interval(0, 0).to_bin_regex().compile();
        assert_eq!(words_of_length(&dfa, 3), vec![vec![true, false, false]]);
    }

    #[test]
    fn density_violation_is_detected() {
        let dfa = BinRegex::parse("1* 0 1*").unwrap().compile();
        assert_eq!(words_of_length(&dfa, 2).len(), 2);
        assert_eq!(dfa.unique_word(2), Err(RangeError::MultipleWords(2)));
        assert!(Range::raw("1* 0 1*").is_err());
        assert!(Range::raw("1*01*").is_err());
        assert_eq!(
            RawRange::new(BinRegex::parse("1*01*").unwrap()).unwrap_err(),
            RangeError::MultipleWords(2)
        );
    }

    #[test]
    fn missing_lengths_surface_as_errors() {
        let first = Range::raw("1.0*").unwrap();
        assert_eq!(apply_range::<u8>(&[], &first, Direction::Forward), Err(RangeError::NoWordOfLength(0)));
        assert_eq!(apply_range(&[7, 8], &first, Direction::Forward).unwrap(), [7]);
    }

    #[test]
    fn interval_display_form_matches_structured_range_on_long_sequences() {
        let (i, j) = (1, 3);
        let dfa = Range::interval_regex(i, j).compile();
        for k in 0..12 {
            match dfa.unique_word(k) {
                Ok(w) => {
                    assert!(k > j);
                    assert_eq!(w, Range::Interval(i, j).mask(k).unwrap());
                }
                Err(e) => {
                    assert!(k <= j);
                    assert_eq!(e, RangeError::NoWordOfLength(k));
                }
            }
        }
    }

    #[test]
    fn range_syntax() {
        assert_eq!(Range::parse("*").unwrap(), Range::Star);
        assert_eq!(Range::parse("3").unwrap(), Range::Index(3));
        assert_eq!(Range::parse("1-2").unwrap(), Range::Interval(1, 2));
        assert_eq!(Range::parse("0, 2-3").unwrap(), Range::Union(vec![Span { lo: 0, hi: 0 }, Span { lo: 2, hi: 3 }]));
        assert_eq!(Range::parse("1,*").unwrap(), Range::Star);
        assert_eq!(Range::parse("last").unwrap(), Range::Last);
        assert!(Range::parse("3-1").is_err());
        assert!(Range::parse("x").is_err());
        for src in ["*", "0", "2-5", "0,2-3,7", "last", "regex:1.0*", "regex:()|0*.1"] {
            let r = Range::parse(src).unwrap();
            assert_eq!(Range::parse(&r.to_string()).unwrap(), r, "{src}");
        }
    }

    fn structured() -> impl Strategy<Value = Range> {
        prop_oneof![
            Just(Range::Star),
            Just(Range::Last),
            (0usize..8).prop_map(Range::Index),
            (0usize..8, 0usize..5).prop_map(|(i, d)| Range::Interval(i, i + d)),
            prop::collection::vec((0usize..8, 0usize..3), 2..4)
                .prop_map(|v| Range::Union(v.into_iter().map(|(lo, d)| Span { lo, hi: lo + d }).collect())),
        ]
    }

    proptest! {
        #[test]
        fn selection_is_subsequence(r in structured(), k in 0usize..50) {
            let s: Vec<usize> = (0..k).collect();
            let out = apply_range(&s, &r, Direction::Forward).unwrap();
            prop_assert!(out.windows(2).all(|w| w[0] < w[1]));
            if let Range::Index(_) = r {
                prop_assert!(out.len() <= 1);
            }
        }

        #[test]
        fn automaton_word_agrees_with_direct_mask(r in structured(), k in 0usize..40) {
            let word = unique_word(&r, k).unwrap();
            let direct: String = r.mask(k).unwrap().into_iter().map(|b| if b { '1' } else { '0' }).collect();
            prop_assert_eq!(word, direct);
        }

        #[test]
        fn interval_is_direct_indexing(i in 0usize..10, d in 0usize..10, k in 0usize..50) {
            let j = i + d;
            let s: Vec<usize> = (0..k).collect();
            let out = apply_range(&s, &Range::Interval(i, j), Direction::Forward).unwrap();
            let expected: Vec<usize> = (0..k).filter(|p| i <= *p && *p <= j).collect();
            prop_assert_eq!(out, expected);
        }

        #[test]
        fn backward_last_is_forward_last(k in 1usize..50) {
            let s: Vec<usize> = (0..k).collect();
            let first = Range::Index(0);
            prop_assert_eq!(apply_range(&s, &first, Direction::Backward).unwrap(), vec![k - 1]);
            prop_assert_eq!(apply_range(&s, &Range::Last, Direction::Forward).unwrap(), vec![k - 1]);
        }
    }
}
