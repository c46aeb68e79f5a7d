//! Words, circuits, and brute-force equivalence-class counting.
//!
//! This module is the independent combinatorial oracle for the closed-form
//! limit moments: `#Pi(w)` is counted exhaustively by a pruned depth-first
//! search over circuits, and limit moments are assembled as
//! `t^m sum_w #Pi(w) / n^{1+m}` with a two-point `1/n` extrapolation
//! reported alongside.

use crate::patterns::{LinkKind, LinkTable};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CombinatError {
    #[error("word enumeration supports 1 <= m <= {max}, got {m}")]
    UnsupportedRange { m: usize, max: usize },
    #[error("brute-force budget exceeded: n={n}, word length {len} (limits: n <= 32, length <= 6)")]
    BudgetExceeded { n: usize, len: usize },
    #[error("{0}")]
    InvalidWord(String),
}

/// Largest half-length served by the word enumerator.
pub const MAX_WORD_HALF_LEN: usize = 5;

const MAX_BRUTE_N: usize = 32;
const MAX_BRUTE_LEN: usize = 6;

/// A pair-matched word: a string over a first-occurrence-ordered alphabet in
/// which every letter appears exactly twice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    /// Validates canonical form (letters indexed 0.. in order of first
    /// occurrence) and pair-matching.
    pub fn new(letters: Vec<u8>) -> Result<Self, CombinatError> {
        let mut counts = vec![0usize; letters.len()];
        let mut next = 0u8;
        for &c in &letters {
            if c > next {
                return Err(CombinatError::InvalidWord(format!(
                    "letters must appear in first-occurrence order, saw {c} before {next}"
                )));
            }
            if c == next {
                next += 1;
            }
            counts[c as usize] += 1;
        }
        if counts.iter().take(next as usize).any(|&c| c != 2) {
            return Err(CombinatError::InvalidWord(
                "every letter must appear exactly twice".into(),
            ));
        }
        Ok(Word { letters })
    }

    /// Parses from ascii letters, e.g. `"abba"`.
    pub fn parse(s: &str) -> Result<Self, CombinatError> {
        let letters = s
            .bytes()
            .map(|b| {
                if b.is_ascii_lowercase() {
                    Ok(b - b'a')
                } else {
                    Err(CombinatError::InvalidWord(format!(
                        "non-letter byte {b} in word"
                    )))
                }
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Word::new(letters)
    }

    #[inline]
    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn as_string(&self) -> String {
        self.letters.iter().map(|&c| (b'a' + c) as char).collect()
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.as_string())
    }
}

/// All pair-matched words of length `2m`; there are `(2m-1)!!` of them.
pub fn enumerate_pair_matched(m: usize) -> Result<Vec<Word>, CombinatError> {
    if m == 0 || m > MAX_WORD_HALF_LEN {
        return Err(CombinatError::UnsupportedRange {
            m,
            max: MAX_WORD_HALF_LEN,
        });
    }
    let mut out = Vec::new();
    let mut prefix: Vec<u8> = Vec::with_capacity(2 * m);
    let mut open: Vec<u8> = Vec::new(); // letters seen once
    fn rec(
        len: usize,
        next_letter: u8,
        prefix: &mut Vec<u8>,
        open: &mut Vec<u8>,
        out: &mut Vec<Word>,
    ) {
        if prefix.len() == len {
            if open.is_empty() {
                out.push(Word {
                    letters: prefix.clone(),
                });
            }
            return;
        }
        // Close any currently open letter.
        for idx in 0..open.len() {
            let c = open.remove(idx);
            prefix.push(c);
            rec(len, next_letter, prefix, open, out);
            prefix.pop();
            open.insert(idx, c);
        }
        // Or open a fresh one; first-occurrence order fixes its name.
        if (next_letter as usize) < len / 2 && prefix.len() + 1 + open.len() + 1 <= len {
            open.push(next_letter);
            prefix.push(next_letter);
            rec(len, next_letter + 1, prefix, open, out);
            prefix.pop();
            open.pop();
        }
    }
    rec(2 * m, 0, &mut prefix, &mut open, &mut out);
    out.sort_by(|a, b| a.letters.cmp(&b.letters));
    Ok(out)
}

/// Non-crossing test by stack matching: at each second occurrence the letter
/// must close the most recently opened one.
pub fn is_noncrossing(w: &Word) -> bool {
    let mut seen = vec![false; w.len()];
    let mut stack: Vec<u8> = Vec::new();
    for &c in w.letters() {
        if !seen[c as usize] {
            seen[c as usize] = true;
            stack.push(c);
        } else if stack.pop() != Some(c) {
            return false;
        }
    }
    true
}

/// Odd-even matching: the two positions of each letter have opposite parity.
/// These are the words that survive in the reverse-circulant limit; there
/// are `m!` of them at length `2m`.
pub fn is_odd_even_matched(w: &Word) -> bool {
    let mut first_pos = vec![usize::MAX; w.len()];
    for (pos, &c) in w.letters().iter().enumerate() {
        if first_pos[c as usize] == usize::MAX {
            first_pos[c as usize] = pos;
        } else if (pos - first_pos[c as usize]) % 2 == 0 {
            return false;
        }
    }
    true
}

/// Exact cardinality of the equivalence class `Pi(w)`: the number of
/// circuits `pi: {0..l} -> {1..n}`, `pi(0) = pi(l)`, whose link-value
/// coincidence pattern is exactly `w` (equal values iff equal letters).
pub fn count_circuits(kind: LinkKind, n: usize, w: &Word) -> Result<u64, CombinatError> {
    count_circuits_pattern(kind, n, w.letters())
}

/// As [`count_circuits`], for an arbitrary coincidence pattern (any word in
/// canonical form, matched or not).
pub fn count_circuits_pattern(
    kind: LinkKind,
    n: usize,
    pattern: &[u8],
) -> Result<u64, CombinatError> {
    let len = pattern.len();
    if n > MAX_BRUTE_N || len > MAX_BRUTE_LEN || len == 0 {
        return Err(CombinatError::BudgetExceeded { n, len });
    }
    let table = LinkTable::new(kind, n).expect("n >= 1");
    let letters = 1 + *pattern.iter().max().unwrap() as usize;

    // DFS over vertices pi(0), pi(1), ..., pi(len-1); pi(len) closes to
    // pi(0). `assigned[c]` is the class bound to letter c, if any. A prefix
    // dies as soon as one edge violates the iff-pattern, which prunes the
    // n^(len+1) raw space down to roughly n^(letters+1).
    struct Dfs<'a> {
        table: &'a LinkTable,
        pattern: &'a [u8],
        n: usize,
        assigned: Vec<Option<usize>>,
        pi: Vec<usize>,
        count: u64,
    }
    impl Dfs<'_> {
        /// Checks edge `q` (1-based) against the pattern; returns the letter
        /// to unbind on backtrack, if this edge bound one.
        fn bind_edge(&mut self, q: usize) -> Option<Option<u8>> {
            let v = self.table.index_unchecked(self.pi[q - 1], self.pi[q]);
            let c = self.pattern[q - 1];
            match self.assigned[c as usize] {
                Some(v0) => {
                    if v0 == v {
                        Some(None)
                    } else {
                        None
                    }
                }
                None => {
                    // Distinct letters must carry distinct values.
                    if self.assigned.iter().any(|a| *a == Some(v)) {
                        None
                    } else {
                        self.assigned[c as usize] = Some(v);
                        Some(Some(c))
                    }
                }
            }
        }

        fn recurse(&mut self, q: usize) {
            let len = self.pattern.len();
            if q == len {
                // Last edge closes the circuit; no free vertex.
                self.pi[len] = self.pi[0];
                if let Some(bound) = self.bind_edge(len) {
                    self.count += 1;
                    if let Some(c) = bound {
                        self.assigned[c as usize] = None;
                    }
                }
                return;
            }
            for v in 1..=self.n {
                self.pi[q] = v;
                if let Some(bound) = self.bind_edge(q) {
                    self.recurse(q + 1);
                    if let Some(c) = bound {
                        self.assigned[c as usize] = None;
                    }
                }
            }
        }
    }

    let mut dfs = Dfs {
        table: &table,
        pattern,
        n,
        assigned: vec![None; letters],
        pi: vec![0; len + 1],
        count: 0,
    };
    for start in 1..=n {
        dfs.pi[0] = start;
        dfs.recurse(1);
    }
    Ok(dfs.count)
}

/// Circuit counts of one word across several orders, with the `1/n`
/// extrapolation of the normalized ratio.
#[derive(Debug, Clone)]
pub struct WordLimit {
    pub word: Word,
    /// `(n, #Pi(w), #Pi(w) / n^{1+m})` per requested order.
    pub counts: Vec<(usize, u64, f64)>,
    /// Two-point Richardson extrapolation of the ratio in `1/n` from the two
    /// largest orders; equals the last ratio when only one order is given.
    pub extrapolated: f64,
}

/// Brute-force limit moment `t^m sum_w #Pi(w)/n^{1+m}` over pair-matched
/// words, evaluated at the largest affordable order with extrapolation
/// diagnostics.
#[derive(Debug, Clone)]
pub struct LimitMomentEstimate {
    pub order: usize,
    pub time: f64,
    /// Value at the largest order in `samples`.
    pub value_at_max: f64,
    /// `1/n`-extrapolated value.
    pub extrapolated: f64,
    pub words: Vec<WordLimit>,
}

fn extrapolate(points: &[(usize, f64)]) -> f64 {
    match points {
        [] => 0.0,
        [(_, r)] => *r,
        [.., (n1, r1), (n2, r2)] => {
            // r(n) = r_inf + c/n through the two largest orders.
            let (n1, n2) = (*n1 as f64, *n2 as f64);
            (n2 * r2 - n1 * r1) / (n2 - n1)
        }
    }
}

/// Assembles the `2m`-th limit moment of the CTRW ensemble by brute force.
pub fn limit_moment_combinatorial(
    kind: LinkKind,
    m: usize,
    t: f64,
    samples: &[usize],
) -> Result<LimitMomentEstimate, CombinatError> {
    if m == 0 || m > 3 {
        return Err(CombinatError::UnsupportedRange { m, max: 3 });
    }
    let words = enumerate_pair_matched(m)?;
    let mut per_word = Vec::with_capacity(words.len());
    let tm = t.powi(m as i32);
    let mut sum_at_max = 0.0;
    let mut sum_extrap = 0.0;
    for w in words {
        let mut counts = Vec::with_capacity(samples.len());
        for &n in samples {
            let c = count_circuits(kind, n, &w)?;
            let ratio = c as f64 / (n as f64).powi(1 + m as i32);
            counts.push((n, c, ratio));
        }
        let points: Vec<(usize, f64)> = counts.iter().map(|&(n, _, r)| (n, r)).collect();
        let extrapolated = extrapolate(&points);
        if let Some(&(_, _, last)) = counts.last() {
            sum_at_max += last;
        }
        sum_extrap += extrapolated;
        per_word.push(WordLimit {
            word: w,
            counts,
            extrapolated,
        });
    }
    Ok(LimitMomentEstimate {
        order: 2 * m,
        time: t,
        value_at_max: tm * sum_at_max,
        extrapolated: tm * sum_extrap,
        words: per_word,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfn;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn word_validation() {
        assert!(Word::parse("abba").is_ok());
        assert!(Word::parse("aabb").is_ok());
        // 'b' before 'a' breaks first-occurrence order.
        assert!(Word::parse("baab").is_err());
        // Letter appearing once is not pair-matched.
        assert!(Word::parse("aab").is_err());
        // Letter appearing three times.
        assert!(Word::parse("aaa").is_err());
    }

    #[test]
    fn enumeration_counts_are_double_factorials() {
        assert_eq!(
            enumerate_pair_matched(1).unwrap(),
            vec![w("aa")]
        );
        let m2 = enumerate_pair_matched(2).unwrap();
        assert_eq!(m2, vec![w("aabb"), w("abab"), w("abba")]);
        assert_eq!(enumerate_pair_matched(3).unwrap().len(), 15);
        assert_eq!(enumerate_pair_matched(4).unwrap().len(), 105);
        assert_eq!(enumerate_pair_matched(5).unwrap().len(), 945);
        assert!(enumerate_pair_matched(6).is_err());
        assert!(enumerate_pair_matched(0).is_err());
    }

    #[test]
    fn noncrossing_classification() {
        assert!(is_noncrossing(&w("abba")));
        assert!(is_noncrossing(&w("aabb")));
        assert!(!is_noncrossing(&w("abab")));
        for m in 1..=5usize {
            let nc = enumerate_pair_matched(m)
                .unwrap()
                .iter()
                .filter(|v| is_noncrossing(v))
                .count();
            assert_eq!(nc as u64, specfn::catalan(m as u32).unwrap(), "m={m}");
        }
    }

    #[test]
    fn odd_even_classification() {
        // Each letter sits once on an odd and once on an even position;
        // m! such words.
        assert!(is_odd_even_matched(&w("aabb")));
        assert!(is_odd_even_matched(&w("abba")));
        assert!(!is_odd_even_matched(&w("abab")));
        for m in 1..=5usize {
            let cnt = enumerate_pair_matched(m)
                .unwrap()
                .iter()
                .filter(|v| is_odd_even_matched(v))
                .count() as u64;
            let fact: u64 = (1..=m as u64).product();
            assert_eq!(cnt, fact, "m={m}");
        }
    }

    #[test]
    fn count_circuits_budget() {
        assert!(count_circuits(LinkKind::Wigner, 33, &w("aa")).is_err());
        assert!(count_circuits(LinkKind::Wigner, 8, &w("aabbcc")).is_ok());
        assert!(count_circuits_pattern(LinkKind::Wigner, 8, &[0, 0, 1, 1, 2, 2, 3, 3]).is_err());
    }

    #[test]
    fn count_circuits_word_aa() {
        // For a symmetric link both edges of a length-2 circuit carry the
        // same value, so every circuit matches 'aa': n^2 of them.
        for n in [4usize, 8] {
            for kind in [
                LinkKind::Wigner,
                LinkKind::SymToeplitz,
                LinkKind::SymmetricCirculant,
            ] {
                assert_eq!(
                    count_circuits(kind, n, &w("aa")).unwrap(),
                    (n * n) as u64,
                    "{kind:?} n={n}"
                );
            }
        }
        // The plain circulant is not symmetric: value equality forces
        // 2(pi(1) - pi(0)) = 0 mod n, so n circuits for odd n and 2n for
        // even n.
        assert_eq!(count_circuits(LinkKind::Circulant, 7, &w("aa")).unwrap(), 7);
        assert_eq!(count_circuits(LinkKind::Circulant, 8, &w("aa")).unwrap(), 16);
    }

    #[test]
    fn wigner_crossing_suppression() {
        // #Pi(abba)/n^3 -> 1 (increasing toward 1), #Pi(abab)/n^3 -> 0.
        let mut prev_ratio = 0.0;
        for &n in &[8usize, 16, 24] {
            let nc = count_circuits(LinkKind::Wigner, n, &w("abba")).unwrap();
            let cr = count_circuits(LinkKind::Wigner, n, &w("abab")).unwrap();
            assert!(nc >= cr, "crossing suppression violated at n={n}");
            let ratio = nc as f64 / (n as f64).powi(3);
            assert!(ratio > prev_ratio, "abba ratio not increasing at n={n}");
            prev_ratio = ratio;
        }
        let n = 24f64;
        let nc = count_circuits(LinkKind::Wigner, 24, &w("abba")).unwrap() as f64;
        let cr = count_circuits(LinkKind::Wigner, 24, &w("abab")).unwrap() as f64;
        assert!((nc / n.powi(3) - 1.0).abs() < 0.25);
        assert!(cr / n.powi(3) < 0.1);
    }

    #[test]
    fn symmetric_circulant_all_words_contribute() {
        // Every m = 2 word has limit 1 (Gaussian 4th moment 3 = 1+1+1);
        // counts within 20% of n^3 at n = 24.
        for word in enumerate_pair_matched(2).unwrap() {
            let c = count_circuits(LinkKind::SymmetricCirculant, 24, &word).unwrap();
            let ratio = c as f64 / 24f64.powi(3);
            assert!(
                (ratio - 1.0).abs() < 0.2,
                "{word}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn reverse_circulant_odd_even_words_survive() {
        // Brute-force validation of the odd-even classification: surviving
        // words carry ratio near 1, the rest near 0.
        for word in enumerate_pair_matched(2).unwrap() {
            let c = count_circuits(LinkKind::ReverseCirculant, 25, &word).unwrap();
            let ratio = c as f64 / 25f64.powi(3);
            if is_odd_even_matched(&word) {
                assert!(ratio > 0.75, "{word}: ratio {ratio}");
            } else {
                assert!(ratio < 0.1, "{word}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn pattern_classes_partition_all_circuits() {
        // Every circuit belongs to exactly one coincidence pattern, so the
        // counts over all set partitions of edge positions sum to n^l.
        fn set_partitions(l: usize) -> Vec<Vec<u8>> {
            let mut out = Vec::new();
            let mut cur = vec![0u8; l];
            fn rec(pos: usize, maxc: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
                if pos == cur.len() {
                    out.push(cur.clone());
                    return;
                }
                for c in 0..=maxc {
                    cur[pos] = c;
                    rec(pos + 1, maxc.max(c + 1), cur, out);
                }
            }
            rec(0, 0, &mut cur, &mut out);
            out
        }
        for kind in [LinkKind::Wigner, LinkKind::ReverseCirculant, LinkKind::Circulant] {
            for n in [5usize, 6] {
                for l in [2usize, 3, 4] {
                    let total: u64 = set_partitions(l)
                        .iter()
                        .map(|p| count_circuits_pattern(kind, n, p).unwrap())
                        .sum();
                    assert_eq!(total, (n as u64).pow(l as u32), "{kind:?} n={n} l={l}");
                }
            }
        }
    }

    #[test]
    fn limit_moment_wigner_m2() {
        let est =
            limit_moment_combinatorial(LinkKind::Wigner, 2, 1.0, &[8, 16, 24]).unwrap();
        // Extrapolates toward C_2 = 2.
        assert!(
            (est.extrapolated - 2.0).abs() < 0.2,
            "extrapolated {}",
            est.extrapolated
        );
        assert!(est.value_at_max > 1.5 && est.value_at_max < 2.2);
    }

    #[test]
    fn limit_moment_symmetric_circulant_m2_scales_in_time() {
        let est =
            limit_moment_combinatorial(LinkKind::SymmetricCirculant, 2, 2.0, &[8, 16, 24])
                .unwrap();
        // Gaussian fourth moment 3 t^2 = 12 at t = 2.
        assert!(
            (est.extrapolated - 12.0).abs() < 1.2,
            "extrapolated {}",
            est.extrapolated
        );
    }

    #[test]
    fn limit_moment_reverse_circulant_m2() {
        let est =
            limit_moment_combinatorial(LinkKind::ReverseCirculant, 2, 1.0, &[9, 17, 25]).unwrap();
        // m! with m = 2.
        assert!(
            (est.extrapolated - 2.0).abs() < 0.2,
            "extrapolated {}",
            est.extrapolated
        );
    }

    #[test]
    fn limit_moment_range_checks() {
        assert!(limit_moment_combinatorial(LinkKind::Wigner, 4, 1.0, &[8]).is_err());
        assert!(limit_moment_combinatorial(LinkKind::Wigner, 0, 1.0, &[8]).is_err());
    }
}
