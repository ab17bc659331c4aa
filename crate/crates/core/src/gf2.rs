//! Binary linear codes over GF(2).
//!
//! Codes are given by generator rows. Membership, message coordinates and
//! syndromes all go through one incremental echelon form: reducing a word
//! by it clears every pivot column, and the residual is a canonical
//! representative of the word's coset of the code.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::{Error, Result};

/// Largest block length for exhaustive enumeration and syndrome tables.
pub const MAX_ENUMERATION_LENGTH: usize = 24;

/// A fixed-length string of bits. Addition is bitwise XOR.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryWord(Vec<bool>);

impl BinaryWord {
    pub fn zeros(len: usize) -> Self {
        BinaryWord(vec![false; len])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BinaryWord(bits)
    }

    /// Unit vector `e_i` of length `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut w = Self::zeros(len);
        w.0[i] = true;
        w
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        BinaryWord((0..len).map(|_| rng.gen()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn is_zero(&self) -> bool {
        !self.0.iter().any(|b| *b)
    }

    fn first_one(&self) -> Option<usize> {
        self.0.iter().position(|b| *b)
    }

    pub fn xor(&self, other: &BinaryWord) -> Result<BinaryWord> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BinaryWord) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::invalid(format!(
                "word lengths differ ({} vs {})",
                self.len(),
                other.len()
            )));
        }
        self.xor_in_place(other);
        Ok(())
    }

    fn xor_in_place(&mut self, other: &BinaryWord) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a ^= *b);
    }

    pub fn distance(&self, other: &BinaryWord) -> Result<usize> {
        self.xor(other).map(|w| w.weight())
    }

    /// Basis-state index with bit 0 as the most significant bit.
    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, b| (acc << 1) | usize::from(*b))
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0
            .iter()
            .try_for_each(|b| f.write_str(if *b { "1" } else { "0" }))
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryWord({self})")
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(format!("bad bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BinaryWord)
    }
}

#[derive(Clone, Debug, PartialEq)]
struct EchelonRow {
    pivot: usize,
    row: BinaryWord,
    /// Which basis vectors sum to `row`.
    combo: BinaryWord,
}

/// Incremental row echelon form of a span with combination tracking.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Echelon {
    n: usize,
    basis_len: usize,
    rows: Vec<EchelonRow>,
}

impl Echelon {
    pub(crate) fn new(n: usize, basis_len: usize) -> Self {
        Echelon {
            n,
            basis_len,
            rows: Vec::new(),
        }
    }

    /// Residual of `word` after clearing pivot columns, with the basis
    /// combination that was subtracted.
    pub(crate) fn reduce(&self, word: &BinaryWord) -> (BinaryWord, BinaryWord) {
        let mut residual = word.clone();
        let mut combo = BinaryWord::zeros(self.basis_len);
        for r in &self.rows {
            if residual.get(r.pivot) {
                residual.xor_in_place(&r.row);
                combo.xor_in_place(&r.combo);
            }
        }
        (residual, combo)
    }

    /// Adds basis vector number `index`; returns false if it is already in
    /// the span.
    pub(crate) fn insert(&mut self, word: &BinaryWord, index: usize) -> bool {
        let (residual, mut combo) = self.reduce(word);
        let Some(pivot) = residual.first_one() else {
            return false;
        };
        combo.flip(index);
        self.rows.push(EchelonRow {
            pivot,
            row: residual,
            combo,
        });
        true
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }
}

/// A binary `[n, k]` code given by `k` linearly independent generators.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryCode {
    n: usize,
    generators: Vec<BinaryWord>,
    echelon: Echelon,
}

impl BinaryCode {
    pub fn new(generators: Vec<BinaryWord>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::invalid("a code needs at least one generator"));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::invalid("block length must be positive"));
        }
        if generators.len() > n {
            return Err(Error::invalid(format!(
                "{} generators exceed block length {n}",
                generators.len()
            )));
        }
        let mut echelon = Echelon::new(n, generators.len());
        for (i, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(Error::invalid(format!(
                    "generator {i} has length {}, expected {n}",
                    g.len()
                )));
            }
            if !echelon.insert(g, i) {
                return Err(Error::invalid(format!(
                    "generator {i} is linearly dependent on the others"
                )));
            }
        }
        Ok(BinaryCode {
            n,
            generators,
            echelon,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[BinaryWord] {
        &self.generators
    }

    fn check_len(&self, word: &BinaryWord) -> Result<()> {
        if word.len() != self.n {
            return Err(Error::invalid(format!(
                "word length {} does not match block length {}",
                word.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// XOR of the generators selected by `message`.
    pub fn encode(&self, message: &BinaryWord) -> Result<BinaryWord> {
        if message.len() != self.k() {
            return Err(Error::invalid(format!(
                "message length {} does not match dimension {}",
                message.len(),
                self.k()
            )));
        }
        let mut word = BinaryWord::zeros(self.n);
        for (g, bit) in self.generators.iter().zip(message.bits()) {
            if *bit {
                word.xor_in_place(g);
            }
        }
        Ok(word)
    }

    pub fn contains(&self, word: &BinaryWord) -> Result<bool> {
        self.check_len(word)?;
        Ok(self.echelon.reduce(word).0.is_zero())
    }

    /// The message that encodes to `word`, if `word` is a codeword.
    pub fn message_of(&self, word: &BinaryWord) -> Result<Option<BinaryWord>> {
        self.check_len(word)?;
        let (residual, combo) = self.echelon.reduce(word);
        Ok(residual.is_zero().then_some(combo))
    }

    /// Canonical coset representative of `word` modulo the code.
    pub fn syndrome(&self, word: &BinaryWord) -> Result<BinaryWord> {
        self.check_len(word)?;
        Ok(self.echelon.reduce(word).0)
    }

    /// Every codeword, in Gray-code order starting from zero.
    pub fn codewords(&self) -> Result<Vec<BinaryWord>> {
        if self.k() > MAX_ENUMERATION_LENGTH {
            return Err(Error::Unsupported(format!(
                "enumerating 2^{} codewords",
                self.k()
            )));
        }
        let mut out = Vec::with_capacity(1 << self.k());
        let mut word = BinaryWord::zeros(self.n);
        out.push(word.clone());
        for step in 1u64..(1 << self.k()) {
            word.xor_in_place(&self.generators[step.trailing_zeros() as usize]);
            out.push(word.clone());
        }
        Ok(out)
    }

    /// Minimum Hamming weight over nonzero codewords.
    pub fn min_distance(&self) -> Result<usize> {
        if self.n > MAX_ENUMERATION_LENGTH {
            return Err(Error::Unsupported(format!(
                "minimum distance for n = {} (limit {MAX_ENUMERATION_LENGTH})",
                self.n
            )));
        }
        let mut word = BinaryWord::zeros(self.n);
        let mut best = usize::MAX;
        for step in 1u64..(1 << self.k()) {
            word.xor_in_place(&self.generators[step.trailing_zeros() as usize]);
            best = best.min(word.weight());
        }
        Ok(best)
    }

    /// Parses the plain-text code format: a header line `n k` followed by
    /// `k` rows of `n` characters from `{0, 1}`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse("empty code file"))?;
        let mut fields = header.split_whitespace();
        let mut field = |name| -> Result<usize> {
            fields
                .next()
                .ok_or_else(|| Error::parse(format!("header is missing {name}")))?
                .parse()
                .map_err(|_| Error::parse(format!("header {name} is not a non-negative integer")))
        };
        let n = field("n")?;
        let k = field("k")?;
        if fields.next().is_some() {
            return Err(Error::parse("header must be exactly `n k`"));
        }
        if n == 0 || k == 0 || k > n {
            return Err(Error::parse(format!("invalid dimensions n={n} k={k}")));
        }
        let mut rows = Vec::with_capacity(k.min(1024));
        for (lineno, line) in lines {
            if line.is_empty() {
                continue;
            }
            if rows.len() == k {
                return Err(Error::parse(format!(
                    "line {}: more than {k} generator rows",
                    lineno + 1
                )));
            }
            let row: BinaryWord = line
                .parse()
                .map_err(|e| Error::parse(format!("line {}: {e}", lineno + 1)))?;
            if row.len() != n {
                return Err(Error::parse(format!(
                    "line {}: row has {} bits, expected {n}",
                    lineno + 1,
                    row.len()
                )));
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(Error::parse(format!(
                "expected {k} generator rows, found {}",
                rows.len()
            )));
        }
        BinaryCode::new(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.k());
        for g in &self.generators {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for BinaryCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BinaryCode::parse(s)
    }
}

/// Bounded-distance decoder: corrects every error pattern of weight at most
/// `⌊(d − 1)/2⌋` through a table keyed by syndrome.
#[derive(Clone, Debug)]
pub struct SyndromeDecoder {
    code: BinaryCode,
    radius: usize,
    leaders: HashMap<BinaryWord, BinaryWord>,
}

impl SyndromeDecoder {
    pub fn new(code: &BinaryCode) -> Result<Self> {
        let d = code.min_distance()?;
        let radius = (d - 1) / 2;
        let n = code.n();
        let mut leaders = HashMap::new();
        // error patterns of weight 1..=radius, as sorted position sets
        let mut stack: Vec<(usize, BinaryWord, usize)> = vec![(0, BinaryWord::zeros(n), 0)];
        while let Some((start, pattern, weight)) = stack.pop() {
            if weight > 0 {
                leaders
                    .entry(code.syndrome(&pattern)?)
                    .or_insert_with(|| pattern.clone());
            }
            if weight == radius {
                continue;
            }
            for pos in start..n {
                let mut next = pattern.clone();
                next.flip(pos);
                stack.push((pos + 1, next, weight + 1));
            }
        }
        Ok(SyndromeDecoder {
            code: code.clone(),
            radius,
            leaders,
        })
    }

    pub fn code(&self) -> &BinaryCode {
        &self.code
    }

    /// Number of bit errors the decoder corrects.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// The codeword within [`radius`](Self::radius) of `word`, or `None`
    /// when there is none (a decoding failure).
    pub fn decode(&self, word: &BinaryWord) -> Result<Option<BinaryWord>> {
        let syndrome = self.code.syndrome(word)?;
        if syndrome.is_zero() {
            return Ok(Some(word.clone()));
        }
        Ok(self.leaders.get(&syndrome).map(|leader| {
            let mut out = word.clone();
            out.xor_in_place(leader);
            out
        }))
    }
}

/// One-shot decoding with a freshly built table.
pub fn syndrome_decode(code: &BinaryCode, word: &BinaryWord) -> Result<Option<BinaryWord>> {
    SyndromeDecoder::new(code)?.decode(word)
}

/// `[7,4,3]` Hamming code in systematic form.
pub fn hamming74() -> BinaryCode {
    BinaryCode::parse("7 4\n1000110\n0100101\n0010011\n0001111\n").expect("valid built-in code")
}

/// The `[7,3,4]` dual of [`hamming74`], contained in it.
pub fn hamming74_dual() -> BinaryCode {
    BinaryCode::parse("7 3\n1101100\n1011010\n0111001\n").expect("valid built-in code")
}
