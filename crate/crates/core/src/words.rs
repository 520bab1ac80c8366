//! Freely reduced words in a free group of finite rank.
//!
//! Letter `+i` stands for the free generator `x_{i-1}` and `-i` for its
//! inverse. Every word carries its rank so that mixing words from free groups
//! of different rank is caught instead of silently producing garbage.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A freely reduced word; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWord")]
pub struct ReducedWord {
    letters: Vec<i32>,
    rank: usize,
}

#[derive(Deserialize)]
struct RawWord {
    letters: Vec<i32>,
    rank: usize,
}

impl TryFrom<RawWord> for ReducedWord {
    type Error = Error;

    fn try_from(raw: RawWord) -> Result<Self> {
        let w = ReducedWord::reduce(&raw.letters, raw.rank)?;
        if w.letters != raw.letters {
            return Err(Error::contract("serialized word is not freely reduced"));
        }
        Ok(w)
    }
}

fn check_letter(letter: i32, rank: usize) -> Result<()> {
    if letter == 0 || letter.unsigned_abs() as usize > rank {
        Err(Error::MalformedWord { letter, rank })
    } else {
        Ok(())
    }
}

/// Free reduction with a stack; appends `letters` onto an already reduced prefix.
fn push_reduced(stack: &mut Vec<i32>, letters: impl IntoIterator<Item = i32>) {
    for l in letters {
        if stack.last() == Some(&-l) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
}

impl ReducedWord {
    /// Freely reduces a raw letter sequence.
    pub fn reduce(letters: &[i32], rank: usize) -> Result<Self> {
        for &l in letters {
            check_letter(l, rank)?;
        }
        let mut stack = Vec::with_capacity(letters.len());
        push_reduced(&mut stack, letters.iter().copied());
        Ok(ReducedWord { letters: stack, rank })
    }

    pub fn identity(rank: usize) -> Self {
        ReducedWord {
            letters: Vec::new(),
            rank,
        }
    }

    /// The free generator `x_index` (0-based).
    pub fn generator(rank: usize, index: usize) -> Result<Self> {
        let letter = i32::try_from(index + 1).map_err(|_| Error::MalformedWord {
            letter: i32::MAX,
            rank,
        })?;
        Self::reduce(&[letter], rank)
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Length with respect to the free basis.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    fn same_rank(&self, other: &Self) -> Result<()> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            })
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_rank(other)?;
        let mut stack = self.letters.clone();
        push_reduced(&mut stack, other.letters.iter().copied());
        Ok(ReducedWord {
            letters: stack,
            rank: self.rank,
        })
    }

    pub fn inverse(&self) -> Self {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
            rank: self.rank,
        }
    }

    /// `self^by = by^{-1} * self * by`.
    pub fn conjugate(&self, by: &Self) -> Result<Self> {
        self.same_rank(by)?;
        let mut stack = by.inverse().letters;
        push_reduced(&mut stack, self.letters.iter().copied());
        push_reduced(&mut stack, by.letters.iter().copied());
        Ok(ReducedWord {
            letters: stack,
            rank: self.rank,
        })
    }

    pub fn pow(&self, exponent: i64) -> Self {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut stack = Vec::new();
        for _ in 0..exponent.unsigned_abs() {
            push_reduced(&mut stack, base.letters.iter().copied());
        }
        ReducedWord {
            letters: stack,
            rank: self.rank,
        }
    }

    /// Multiplies a sequence of words; the empty sequence gives the identity.
    pub fn product<'a>(rank: usize, words: impl IntoIterator<Item = &'a ReducedWord>) -> Result<Self> {
        let mut acc = ReducedWord::identity(rank);
        for w in words {
            acc = acc.mul(w)?;
        }
        Ok(acc)
    }

    /// Exponent-sum vector.
    pub fn abelianize(&self) -> AbelianVector {
        let mut exps = vec![0i64; self.rank];
        for &l in &self.letters {
            let slot = l.unsigned_abs() as usize - 1;
            exps[slot] += i64::from(l.signum());
        }
        AbelianVector(exps)
    }

    /// All contiguous subwords, including the identity and the word itself.
    pub fn subwords(&self) -> BTreeSet<ReducedWord> {
        let mut out = BTreeSet::new();
        for i in 0..=self.letters.len() {
            for j in i..=self.letters.len() {
                out.insert(ReducedWord {
                    letters: self.letters[i..j].to_vec(),
                    rank: self.rank,
                });
            }
        }
        out
    }

    /// Highest generator index (1-based) occurring in the word, 0 for the identity.
    pub fn support(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Parses space-separated signed letters; `e` or an empty string is the identity.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "e" || text == "1e" {
            return Ok(Self::identity(rank));
        }
        let mut letters = Vec::new();
        let mut pos = 0;
        for token in text.split_whitespace() {
            let offset = pos + text[pos..].find(token).unwrap_or(0);
            pos = offset + token.len();
            let letter: i32 = token.parse().map_err(|_| Error::Parse {
                line: 1,
                column: offset + 1,
                message: format!("`{token}` is not a signed integer letter"),
            })?;
            check_letter(letter, rank)?;
            letters.push(letter);
        }
        Self::reduce(&letters, rank)
    }
}

impl Ord for ReducedWord {
    /// Shortlex: shorter words first, then lexicographic on letters.
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then(self.letters.len().cmp(&other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses a word file: an optional `rank=N` header followed by one word per line.
/// Blank lines and `#` comments are skipped.
pub fn parse_word_list(text: &str, default_rank: Option<usize>) -> Result<(usize, Vec<ReducedWord>)> {
    let mut rank = default_rank;
    let mut words = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(value) = line.strip_prefix("rank=").or_else(|| line.strip_prefix("rank =")) {
            let r: usize = value.trim().parse().map_err(|_| Error::Parse {
                line: idx + 1,
                column: 6,
                message: format!("bad rank `{}`", value.trim()),
            })?;
            if r == 0 {
                return Err(Error::Parse {
                    line: idx + 1,
                    column: 6,
                    message: "rank must be positive".into(),
                });
            }
            rank = Some(r);
            continue;
        }
        let r = rank.ok_or(Error::Parse {
            line: idx + 1,
            column: 1,
            message: "word given before any rank header".into(),
        })?;
        let w = ReducedWord::parse(line, r).map_err(|e| match e {
            Error::Parse { column, message, .. } => Error::Parse {
                line: idx + 1,
                column,
                message,
            },
            other => other,
        })?;
        words.push(w);
    }
    let rank = rank.ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "missing rank".into(),
    })?;
    Ok((rank, words))
}

/// Number of reduced words of length at most `radius` in a free group of rank `rank`.
pub fn ball_cardinality(rank: usize, radius: usize) -> Option<usize> {
    let mut total: usize = 1;
    let mut sphere: usize = 2 * rank;
    for _ in 0..radius {
        total = total.checked_add(sphere)?;
        sphere = sphere.checked_mul(2 * rank - 1)?;
    }
    Some(total)
}

/// All reduced words of length at most `radius`, in shortlex order.
///
/// Built breadth first by extending reduced words with non-cancelling letters.
pub fn enumerate_ball(rank: usize, radius: usize, cap: usize) -> Result<Vec<ReducedWord>> {
    if rank == 0 {
        return Err(Error::contract("rank must be positive"));
    }
    match ball_cardinality(rank, radius) {
        Some(n) if n <= cap => {}
        _ => return Err(Error::ResourceCap { what: "free ball", cap }),
    }
    let r = rank as i32;
    let alphabet: Vec<i32> = (-r..=r).filter(|&l| l != 0).collect();
    let mut out = vec![ReducedWord::identity(rank)];
    let mut frontier = vec![Vec::<i32>::new()];
    for _ in 0..radius {
        let mut next = Vec::with_capacity(frontier.len() * (2 * rank - 1).max(1));
        for w in &frontier {
            for &l in &alphabet {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut ext = w.clone();
                ext.push(l);
                next.push(ext);
            }
        }
        out.extend(next.iter().map(|letters| ReducedWord {
            letters: letters.clone(),
            rank,
        }));
        frontier = next;
    }
    Ok(out)
}

/// A finite set of non-identity words closed under inversion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawWordSet")]
pub struct SymmetricWordSet {
    words: BTreeSet<ReducedWord>,
    rank: usize,
}

#[derive(Deserialize)]
struct RawWordSet {
    words: Vec<ReducedWord>,
    rank: usize,
}

impl TryFrom<RawWordSet> for SymmetricWordSet {
    type Error = Error;

    fn try_from(raw: RawWordSet) -> Result<Self> {
        SymmetricWordSet::new(raw.rank, raw.words)
    }
}

impl SymmetricWordSet {
    /// Validates an explicitly symmetric set.
    pub fn new(rank: usize, words: impl IntoIterator<Item = ReducedWord>) -> Result<Self> {
        let words: BTreeSet<_> = words.into_iter().collect();
        for w in &words {
            if w.rank != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: w.rank,
                });
            }
            if w.is_identity() {
                return Err(Error::contract("identity is not allowed in a generating set"));
            }
            if !words.contains(&w.inverse()) {
                return Err(Error::contract(format!("generating set lacks the inverse of `{w}`")));
            }
        }
        Ok(SymmetricWordSet { words, rank })
    }

    /// Adds inverses and drops the identity.
    pub fn symmetrize(rank: usize, words: impl IntoIterator<Item = ReducedWord>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for w in words {
            if w.rank != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: w.rank,
                });
            }
            if !w.is_identity() {
                set.insert(w.inverse());
                set.insert(w);
            }
        }
        Ok(SymmetricWordSet { words: set, rank })
    }

    /// `{x_0^{±1}, …, x_{rank-1}^{±1}}`.
    pub fn free_basis(rank: usize) -> Self {
        let r = rank as i32;
        let words = (-r..=r)
            .filter(|&l| l != 0)
            .map(|l| ReducedWord {
                letters: vec![l],
                rank,
            })
            .collect();
        SymmetricWordSet { words, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &ReducedWord) -> bool {
        self.words.contains(w)
    }

    /// Members in shortlex order.
    pub fn iter(&self) -> impl Iterator<Item = &ReducedWord> {
        self.words.iter()
    }
}

/// Exponent-sum vector of a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianVector(pub Vec<i64>);

impl AbelianVector {
    pub fn zero(rank: usize) -> Self {
        AbelianVector(vec![0; rank])
    }

    pub fn l1(&self) -> i64 {
        self.0.iter().map(|e| e.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn neg(&self) -> Self {
        AbelianVector(self.0.iter().map(|e| -e).collect())
    }
}

impl Add for &AbelianVector {
    type Output = AbelianVector;

    fn add(self, rhs: &AbelianVector) -> AbelianVector {
        AbelianVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(letters: &[i32]) -> ReducedWord {
        ReducedWord::reduce(letters, 2).unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert!(w(&[1, -1]).is_identity());
        assert!(w(&[1, 2, -2, -1]).is_identity());
        assert_eq!(w(&[1, 2, -1]).letters(), &[1, 2, -1]);
    }

    #[test]
    fn malformed_letters_are_rejected() {
        assert_eq!(
            ReducedWord::reduce(&[0], 2),
            Err(Error::MalformedWord { letter: 0, rank: 2 })
        );
        assert_eq!(
            ReducedWord::reduce(&[3], 2),
            Err(Error::MalformedWord { letter: 3, rank: 2 })
        );
    }

    #[test]
    fn algebra_examples() {
        assert!(w(&[1]).mul(&w(&[-1])).unwrap().is_identity());
        assert_eq!(w(&[1]).conjugate(&w(&[2])).unwrap().letters(), &[-2, 1, 2]);
        assert_eq!(w(&[1, 2]).inverse().letters(), &[-2, -1]);
        let other = ReducedWord::reduce(&[1], 3).unwrap();
        assert!(matches!(w(&[1]).mul(&other), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn ball_examples() {
        let b0 = enumerate_ball(2, 0, 1000).unwrap();
        assert_eq!(b0, vec![ReducedWord::identity(2)]);
        let b1 = enumerate_ball(2, 1, 1000).unwrap();
        assert_eq!(b1.len(), 5);
        let b2 = enumerate_ball(2, 2, 1000).unwrap();
        assert_eq!(b2.len(), 17);
        assert!(matches!(enumerate_ball(2, 10, 100), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn ball_matches_generate_then_reduce() {
        // Independent route: reduce every raw sequence over the alphabet.
        for rank in 1..=3usize {
            for radius in 0..=3usize {
                let r = rank as i32;
                let alphabet: Vec<i32> = (-r..=r).filter(|&l| l != 0).collect();
                let mut seen = BTreeSet::new();
                let mut seqs: Vec<Vec<i32>> = vec![vec![]];
                for _ in 0..radius {
                    let mut next = Vec::new();
                    for s in &seqs {
                        for &l in &alphabet {
                            let mut t = s.clone();
                            t.push(l);
                            next.push(t);
                        }
                    }
                    seqs.extend(next);
                    seqs.sort();
                    seqs.dedup();
                }
                for s in &seqs {
                    seen.insert(ReducedWord::reduce(s, rank).unwrap());
                }
                let ball: BTreeSet<_> = enumerate_ball(rank, radius, 1 << 20).unwrap().into_iter().collect();
                assert_eq!(ball, seen, "rank {rank} radius {radius}");
                assert_eq!(ball.len(), ball_cardinality(rank, radius).unwrap());
            }
        }
    }

    #[test]
    fn ball_closed_under_inverse_and_prefixes() {
        let ball: BTreeSet<_> = enumerate_ball(2, 3, 1 << 12).unwrap().into_iter().collect();
        for v in &ball {
            assert!(ball.contains(&v.inverse()));
            for k in 0..v.len() {
                assert!(ball.contains(&ReducedWord::reduce(&v.letters()[..k], 2).unwrap()));
            }
        }
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(w(&[1, 2, -1, -2]).abelianize(), AbelianVector(vec![0, 0]));
        assert_eq!(w(&[1, 1, 2]).abelianize(), AbelianVector(vec![2, 1]));
        assert_eq!(ReducedWord::identity(2).abelianize(), AbelianVector(vec![0, 0]));
    }

    #[test]
    fn parse_and_display() {
        let c = ReducedWord::parse("1 2 -1 -2", 2).unwrap();
        assert_eq!(c.to_string(), "1 2 -1 -2");
        assert_eq!(ReducedWord::parse("e", 2).unwrap(), ReducedWord::identity(2));
        assert!(matches!(
            ReducedWord::parse("1 x", 2),
            Err(Error::Parse { column: 3, .. })
        ));
        let (rank, words) = parse_word_list("rank=2\n1 2 -1 -2\n# c\n\n1\n", None).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(words, vec![c, w(&[1])]);
    }

    #[test]
    fn symmetric_sets() {
        assert!(SymmetricWordSet::new(2, [w(&[1])]).is_err());
        assert!(SymmetricWordSet::new(2, [ReducedWord::identity(2)]).is_err());
        let s = SymmetricWordSet::symmetrize(2, [w(&[1, 2]), ReducedWord::identity(2)]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(SymmetricWordSet::free_basis(2).len(), 4);
    }

    fn word_strategy() -> impl Strategy<Value = ReducedWord> {
        proptest::collection::vec(prop_oneof![-3i32..=-1, 1i32..=3], 0..12)
            .prop_map(|l| ReducedWord::reduce(&l, 3).unwrap())
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(w in word_strategy()) {
            prop_assert_eq!(ReducedWord::reduce(w.letters(), 3).unwrap(), w);
        }

        #[test]
        fn length_bounds(a in word_strategy(), b in word_strategy()) {
            prop_assert!(a.mul(&b).unwrap().len() <= a.len() + b.len());
            prop_assert!(a.conjugate(&b).unwrap().len() <= a.len() + 2 * b.len());
            prop_assert_eq!(a.inverse().inverse(), a.clone());
        }

        #[test]
        fn abelianization_is_a_homomorphism(a in word_strategy(), b in word_strategy()) {
            prop_assert_eq!(a.mul(&b).unwrap().abelianize(), &a.abelianize() + &b.abelianize());
            prop_assert_eq!(a.conjugate(&b).unwrap().abelianize(), a.abelianize());
        }

        #[test]
        fn associativity(a in word_strategy(), b in word_strategy(), c in word_strategy()) {
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        }
    }
}
