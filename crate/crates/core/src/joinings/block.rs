//! One-dimensional shifts of finite type given by their allowed words of a fixed length.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::joinings::automaton::{determinize, minimize, Dfa, Nfa};
use crate::subshift::source::SourceKind;
use crate::subshift::{BlockCode, LanguageSource};

const MAX_WORDS: usize = 1 << 22;

/// Points all of whose `len`-words lie in `allowed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSft {
    alphabet: usize,
    len: usize,
    allowed: BTreeSet<Vec<u8>>,
}

fn all_words(alphabet: usize, len: usize) -> Result<Vec<Vec<u8>>> {
    let total = (alphabet as u128)
        .checked_pow(len as u32)
        .filter(|t| *t <= MAX_WORDS as u128);
    let total = total
        .ok_or_else(|| Error::Capacity(format!("{alphabet}^{len} words exceed the word budget")))?;
    Ok((0..total as usize)
        .map(|mut i| {
            let mut w = vec![0u8; len];
            for s in w.iter_mut().rev() {
                *s = (i % alphabet) as u8;
                i /= alphabet;
            }
            w
        })
        .collect())
}

/// Hull offset and positions of a 1-d code window: `(lo, span, offsets relative to lo)`.
pub fn code_span(code: &BlockCode) -> Result<(i64, usize, Vec<usize>)> {
    if code.dim() != 1 {
        return Err(Error::UnsupportedDimension(code.dim()));
    }
    let xs: Vec<i64> = code.window().iter().map(|p| p.x()).collect();
    let lo = *xs.iter().min().expect("window contains the origin");
    let hi = *xs.iter().max().expect("window contains the origin");
    Ok((
        lo,
        (hi - lo + 1) as usize,
        xs.iter().map(|x| (x - lo) as usize).collect(),
    ))
}

/// Applies a 1-d code to every window of `word`; output position `j` reads `word[j..j + span]`.
pub fn apply_code(code: &BlockCode, word: &[u8]) -> Result<Vec<u8>> {
    let (_, span, offsets) = code_span(code)?;
    if word.len() < span {
        return Ok(Vec::new());
    }
    let mut buf = vec![0u8; offsets.len()];
    (0..=word.len() - span)
        .map(|j| {
            for (b, &o) in buf.iter_mut().zip(&offsets) {
                *b = word[j + o];
            }
            code.lookup(&buf).ok_or_else(|| {
                Error::FactorViolation(format!("code undefined on an admissible word {buf:?}"))
            })
        })
        .collect()
}

impl BlockSft {
    pub fn new(
        alphabet: usize,
        len: usize,
        allowed: impl IntoIterator<Item = Vec<u8>>,
    ) -> Result<Self> {
        if len == 0 || alphabet == 0 || alphabet > 255 {
            return Err(Error::InvalidArgument(
                "block SFT needs len ≥ 1 and alphabet in 1..=255".into(),
            ));
        }
        let allowed: BTreeSet<Vec<u8>> = allowed.into_iter().collect();
        for w in &allowed {
            if w.len() != len {
                return Err(Error::InvalidArgument(format!(
                    "allowed word of length {} in a window-{len} SFT",
                    w.len()
                )));
            }
            if let Some(&s) = w.iter().find(|&&s| s as usize >= alphabet) {
                return Err(Error::Symbol {
                    symbol: s as u32,
                    size: alphabet,
                });
            }
        }
        Ok(BlockSft {
            alphabet,
            len,
            allowed,
        })
    }

    pub fn full(alphabet: usize) -> Result<Self> {
        BlockSft::new(alphabet, 1, (0..alphabet).map(|a| vec![a as u8]))
    }

    /// Allowed-word form of a 1-d SFT or of a product of 1-d SFTs.
    pub fn from_source(source: &LanguageSource) -> Result<Self> {
        if source.dim() != 1 {
            return Err(Error::UnsupportedDimension(source.dim()));
        }
        match source.kind() {
            SourceKind::Sft(sft) => {
                if sft.forbidden.is_empty() {
                    return BlockSft::full(source.alphabet());
                }
                let forbidden: BTreeSet<&Vec<u8>> = sft.forbidden.iter().collect();
                let words = all_words(source.alphabet(), sft.window.len())?;
                BlockSft::new(
                    source.alphabet(),
                    sft.window.len(),
                    words.into_iter().filter(|w| !forbidden.contains(w)),
                )
            }
            SourceKind::Product(fs) => {
                let factors = fs
                    .iter()
                    .map(BlockSft::from_source)
                    .collect::<Result<Vec<_>>>()?;
                BlockSft::product(&factors)
            }
            SourceKind::FreeBits(_) => Err(Error::InvalidArgument(
                "free-bits systems are not of finite type; automaton methods need an SFT".into(),
            )),
        }
    }

    /// Product with mixed-radix symbols, first factor least significant.
    pub fn product(factors: &[BlockSft]) -> Result<Self> {
        let len = factors
            .iter()
            .map(|f| f.len)
            .max()
            .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        let alphabet: usize = factors.iter().map(|f| f.alphabet).product();
        if alphabet > 255 {
            return Err(Error::InvalidArgument(format!(
                "product alphabet {alphabet} exceeds 255"
            )));
        }
        let mut words: Vec<Vec<u8>> = vec![vec![0u8; len]];
        let mut radix = 1usize;
        for f in factors {
            let ext = f.extend(len)?;
            if words.len().saturating_mul(ext.allowed.len()) > MAX_WORDS {
                return Err(Error::Capacity(
                    "product SFT has too many allowed words".into(),
                ));
            }
            let mut next = Vec::with_capacity(words.len() * ext.allowed.len());
            for w in &words {
                for v in &ext.allowed {
                    next.push(
                        w.iter()
                            .zip(v)
                            .map(|(&a, &b)| (a as usize + radix * b as usize) as u8)
                            .collect(),
                    );
                }
            }
            words = next;
            radix *= f.alphabet;
        }
        BlockSft::new(alphabet, len, words)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn allowed(&self) -> &BTreeSet<Vec<u8>> {
        &self.allowed
    }

    /// Same shift described by words of length `len ≥ self.len()`.
    pub fn extend(&self, len: usize) -> Result<Self> {
        if len < self.len {
            return Err(Error::InvalidArgument(format!(
                "cannot shrink window {} to {len}",
                self.len
            )));
        }
        let mut words: Vec<Vec<u8>> = self.allowed.iter().cloned().collect();
        for m in self.len..len {
            let mut next = Vec::new();
            for w in &words {
                for a in 0..self.alphabet as u8 {
                    let mut v = w.clone();
                    v.push(a);
                    if self.allowed.contains(&v[m + 1 - self.len..]) {
                        next.push(v);
                    }
                }
            }
            if next.len() > MAX_WORDS {
                return Err(Error::Capacity(format!(
                    "more than {MAX_WORDS} words of length {}",
                    m + 1
                )));
            }
            words = next;
        }
        BlockSft::new(self.alphabet, len, words)
    }

    /// Keeps the allowed words for which `keep` holds.
    pub fn filter(&self, keep: impl Fn(&[u8]) -> bool) -> Self {
        BlockSft {
            alphabet: self.alphabet,
            len: self.len,
            allowed: self.allowed.iter().filter(|w| keep(w)).cloned().collect(),
        }
    }

    /// Sub-shift whose `w`-words all lie in `words` (described at window `max(len, w)`).
    pub fn restrict_words(&self, w: usize, words: &BTreeSet<Vec<u8>>) -> Result<Self> {
        let ext = self.extend(self.len.max(w))?;
        Ok(ext
            .filter(|v| v.windows(w).all(|s| words.contains(s)))
            .trim())
    }

    /// Drops allowed words that occur in no bi-infinite point.
    pub fn trim(&self) -> Self {
        let mut live = self.allowed.clone();
        loop {
            let prefixes: BTreeSet<&[u8]> = live.iter().map(|w| &w[..self.len - 1]).collect();
            let suffixes: BTreeSet<&[u8]> = live.iter().map(|w| &w[1..]).collect();
            let keep: BTreeSet<Vec<u8>> = live
                .iter()
                .filter(|w| suffixes.contains(&w[..self.len - 1]) && prefixes.contains(&w[1..]))
                .cloned()
                .collect();
            if keep.len() == live.len() {
                break;
            }
            live = keep;
        }
        BlockSft {
            alphabet: self.alphabet,
            len: self.len,
            allowed: live,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.trim().allowed.is_empty()
    }

    /// Language words of length `n`.
    pub fn words(&self, n: usize) -> Result<BTreeSet<Vec<u8>>> {
        let t = self.trim();
        if n >= t.len {
            return Ok(t.extend(n)?.allowed);
        }
        Ok(t.allowed.iter().map(|w| w[..n].to_vec()).collect())
    }

    /// Edge graph of the trimmed shift, edges labelled by `label` of the edge word.
    pub fn nfa(&self, label_alphabet: usize, label: impl Fn(&[u8]) -> Result<u8>) -> Result<Nfa> {
        let t = self.trim();
        let mut ids: BTreeMap<&[u8], usize> = BTreeMap::new();
        for w in &t.allowed {
            let n = ids.len();
            ids.entry(&w[..t.len - 1]).or_insert(n);
        }
        let mut edges = vec![Vec::new(); ids.len()];
        for w in &t.allowed {
            let from = ids[&w[..t.len - 1]];
            let to = ids[&w[1..]];
            edges[from].push((label(w)?, to));
        }
        Ok(Nfa {
            alphabet: label_alphabet,
            edges,
        })
    }

    /// Minimal automaton of the language.
    pub fn dfa(&self, max_states: usize) -> Result<Dfa> {
        let nfa = self.nfa(self.alphabet, |w| Ok(w[w.len() - 1]))?;
        Ok(minimize(&determinize(&nfa, max_states)?))
    }

    /// Minimal automaton of the image under a 1-d code (a sofic shift).
    pub fn image_dfa(&self, code: &BlockCode, max_states: usize) -> Result<Dfa> {
        if code.domain_alphabet() != self.alphabet {
            return Err(Error::InvalidArgument(format!(
                "code reads {} symbols but the shift has {}",
                code.domain_alphabet(),
                self.alphabet
            )));
        }
        let (_, span, _) = code_span(code)?;
        let ext = self.trim().extend(self.len.max(span))?;
        let nfa = ext.nfa(code.codomain_alphabet(), |w| {
            Ok(apply_code(code, &w[w.len() - span..])?[0])
        })?;
        Ok(minimize(&determinize(&nfa, max_states)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joinings::automaton::distinguishing_word;

    fn fib(n: usize) -> usize {
        let (mut a, mut b) = (1, 1);
        for _ in 0..n {
            (a, b) = (b, a + b);
        }
        a
    }

    #[test]
    fn golden_mean_words_are_fibonacci() {
        let g = BlockSft::from_source(&LanguageSource::golden_mean()).unwrap();
        for n in 1..=12 {
            assert_eq!(g.words(n).unwrap().len(), fib(n + 1), "n = {n}");
        }
    }

    #[test]
    fn trimming_removes_dead_ends() {
        let s = BlockSft::new(2, 2, [vec![0, 0], vec![0, 1]]).unwrap();
        assert_eq!(s.trim().allowed().len(), 1);
        assert!(BlockSft::new(2, 2, [vec![0, 1]]).unwrap().is_empty());
    }

    #[test]
    fn xor_image_of_full_shift_is_full() {
        let full = BlockSft::full(2).unwrap();
        let img = full.image_dfa(&BlockCode::xor(), 1000).unwrap();
        assert_eq!(distinguishing_word(&img, &full.dfa(1000).unwrap()), None);
        let g = BlockSft::from_source(&LanguageSource::golden_mean()).unwrap();
        let img = g.image_dfa(&BlockCode::xor(), 1000).unwrap();
        assert!(distinguishing_word(&img, &full.dfa(1000).unwrap()).is_some());
    }

    #[test]
    fn products_match_source_counts() {
        let src = LanguageSource::product(vec![
            LanguageSource::golden_mean(),
            LanguageSource::full_shift(1, 2).unwrap(),
        ])
        .unwrap();
        let p = BlockSft::from_source(&src).unwrap();
        assert_eq!(p.alphabet(), 4);
        for n in 1..=8 {
            assert_eq!(p.words(n).unwrap().len(), fib(n + 1) << n);
        }
    }
}
