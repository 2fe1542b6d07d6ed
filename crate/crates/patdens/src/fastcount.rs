//! Exact instance-window counting for density computations.
//!
//! The density denominator is quadratic in the word length, so the naive
//! sweep (match every substring) is the baseline but not the workhorse.
//! Several pattern shapes admit exact closed characterizations of their
//! instance windows, which this module counts directly:
//!
//! - all variables distinct: every window of length ≥ k is an instance;
//! - `B^r` for a block `B` of `j` distinct variables (covers `xx`, `xxx`,
//!   `xyxy`, ...): instances are exactly the `r`-th powers `U^r` with
//!   `|U| ≥ j`, counted per period with bit-parallel run detection;
//! - `xxyy`: windows splitting into two nonempty squares, counted from the
//!   (expected linear-size) set of square occurrences;
//! - `xyx`: windows with a border shorter than half the window, counted
//!   per start by an interval union over the suffix Z-array.
//!
//! Everything else goes through the generic matcher sweep, memoized by
//! window content for short words. The fast paths are validated against
//! the sweep in the test suite.

use crate::matcher::PatternInfo;
use crate::words::{Pattern, Word};
use crate::zfn;
use std::collections::HashMap;

/// Number of instance windows of `p` in `w`; the numerator of the density.
pub(crate) fn count_instance_windows(p: &Pattern, w: &Word) -> u64 {
    let n = w.len();
    if n == 0 {
        return 0;
    }
    let k = p.distinct();
    if p.multiplicities().iter().all(|&m| m == 1) {
        // Any window of length >= k splits into k nonempty images.
        if n < k {
            return 0;
        }
        let j = (n - k + 1) as u64;
        return j * (j + 1) / 2;
    }
    if let Some((j, r)) = block_power(p) {
        return Scanner::new(w.symbols()).count_powers(r, j);
    }
    if p.symbols() == [0, 0, 1, 1] {
        return count_xxyy_windows(w.symbols());
    }
    if p.symbols() == [0, 1, 0] {
        return count_aba_windows(w.symbols());
    }
    count_instance_windows_sweep(p, w)
}

/// True when [`count_instance_windows`] has a subquadratic counting route
/// for `p`; used by Monte Carlo budget accounting.
pub(crate) fn has_fast_counter(p: &Pattern) -> bool {
    p.multiplicities().iter().all(|&m| m == 1)
        || block_power(p).is_some()
        || p.symbols() == [0, 0, 1, 1]
}

/// Generic window sweep over the matcher; memoized by window content for
/// short words, where windows repeat often.
pub(crate) fn count_instance_windows_sweep(p: &Pattern, w: &Word) -> u64 {
    let info = PatternInfo::new(p);
    let syms = w.symbols();
    let n = syms.len();
    let mut total = 0u64;
    if n <= 32 {
        let mut memo: HashMap<&[u8], bool> = HashMap::new();
        for a in 0..n {
            for b in a + 1..=n {
                let win = &syms[a..b];
                let hit = *memo.entry(win).or_insert_with(|| info.window_is_instance(win));
                total += hit as u64;
            }
        }
    } else {
        for a in 0..n {
            for b in a + 1..=n {
                total += info.window_is_instance_fast(&syms[a..b]) as u64;
            }
        }
    }
    total
}

/// Recognizes `p = B^r` for a block `B` of distinct variables; returns
/// `(|B|, r)`.
fn block_power(p: &Pattern) -> Option<(usize, usize)> {
    let syms = p.symbols();
    let k = p.distinct();
    if syms.len() % k != 0 {
        return None;
    }
    let r = syms.len() / k;
    if r < 2 {
        return None;
    }
    // Canonical numbering puts first occurrences in order, so the first
    // block must read 0..k and the rest must repeat it.
    if (0..k).any(|i| syms[i] as usize != i) {
        return None;
    }
    if (k..syms.len()).any(|i| syms[i] != syms[i - k]) {
        return None;
    }
    Some((k, r))
}

/// Windows of the form `PPQQ` with `P, Q` nonempty: for each start, the
/// distinct ends reachable as square-then-square.
fn count_xxyy_windows(w: &[u8]) -> u64 {
    let n = w.len();
    if n < 4 {
        return 0;
    }
    let ends_from = Scanner::new(w).square_ends_by_start();
    // stamp[b] marks ends already counted for the current start.
    let mut stamp = vec![usize::MAX; n + 1];
    let mut total = 0u64;
    for a in 0..n {
        for &m in &ends_from[a] {
            for &b in &ends_from[m as usize] {
                let b = b as usize;
                if stamp[b] != a {
                    stamp[b] = a;
                    total += 1;
                }
            }
        }
    }
    total
}

/// Windows that are instances of `xyx`: those with a border of length
/// `l` satisfying `1 <= l` and `2l < m` for window length `m`.
///
/// For a fixed start, a border of the window ending at `b` is a position
/// `c` whose suffix matches the prefix for at least `b - c` symbols; the
/// valid ends per `c` form an interval, and the intervals arrive with
/// nondecreasing left endpoints, so their union is a single sweep.
fn count_aba_windows(w: &[u8]) -> u64 {
    let n = w.len();
    let mut z = Vec::new();
    let mut total = 0u64;
    for a in 0..n {
        let s = &w[a..];
        let len = s.len();
        zfn::z_array_into(s, &mut z);
        let mut covered = 0usize; // ends <= covered are already counted
        for c in 1..len {
            if z[c] == 0 {
                continue;
            }
            // border length l = b - c needs l <= z[c] and 2l <= m - 1,
            // i.e. b <= 2c - 1 (relative to the suffix start).
            let hi = (c + z[c]).min(2 * c - 1).min(len);
            let from = covered.max(c); // interval is [c + 1, hi]
            if hi > from {
                total += (hi - from) as u64;
                covered = hi;
            }
        }
    }
    total
}

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Clears bits at positions `>= bits`.
fn mask_tail(v: &mut [u64], bits: usize) {
    let full = bits / WORD_BITS;
    if bits % WORD_BITS != 0 && full < v.len() {
        v[full] &= (1u64 << (bits % WORD_BITS)) - 1;
    }
    for w in v.iter_mut().skip(full + usize::from(bits % WORD_BITS != 0)) {
        *w = 0;
    }
}

/// `dst` receives `out_bits` bits of `src >> shift` (zero-filled).
fn shr_into(src: &[u64], shift: usize, out_bits: usize, dst: &mut Vec<u64>) {
    let nw = words_for(out_bits);
    dst.clear();
    dst.resize(nw, 0);
    let wo = shift / WORD_BITS;
    let bo = shift % WORD_BITS;
    for (j, out) in dst.iter_mut().enumerate() {
        let lo = src.get(j + wo).copied().unwrap_or(0);
        *out = if bo == 0 {
            lo
        } else {
            let hi = src.get(j + wo + 1).copied().unwrap_or(0);
            (lo >> bo) | (hi << (WORD_BITS - bo))
        };
    }
    mask_tail(dst, out_bits);
}

/// Bit-parallel detector of `r`-th power occurrences.
///
/// For period `l`, `D_l[i] = (w[i] == w[i + l])`; a power `P^r` with
/// `|P| = l` starts at `i` exactly when `D_l` has `(r-1)·l` consecutive
/// ones from `i`. Runs are detected by AND-doubling for short requirements
/// and by a scalar run scan (behind a cheap all-ones filter) for long ones.
struct Scanner<'a> {
    w: &'a [u8],
    n: usize,
    /// Per-letter position masks, for letters that occur in `w`.
    masks: Vec<Vec<u64>>,
    present: Vec<u8>,
    d: Vec<u64>,
    run: Vec<u64>,
    tmp: Vec<u64>,
}

impl<'a> Scanner<'a> {
    fn new(w: &'a [u8]) -> Scanner<'a> {
        let n = w.len();
        let max_letter = w.iter().copied().max().unwrap_or(0) as usize;
        let nw = words_for(n);
        let mut masks = vec![Vec::new(); max_letter + 1];
        let mut present = Vec::new();
        for (i, &c) in w.iter().enumerate() {
            let m = &mut masks[c as usize];
            if m.is_empty() {
                m.resize(nw, 0);
                present.push(c);
            }
            m[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
        }
        Scanner { w, n, masks, present, d: Vec::new(), run: Vec::new(), tmp: Vec::new() }
    }

    /// Fills `self.d` with the `n - l` bits of `D_l`.
    fn build_d(&mut self, l: usize) {
        let nd = self.n - l;
        let nw = words_for(nd);
        self.d.clear();
        self.d.resize(nw, 0);
        if self.present.len() <= WORD_BITS {
            for &c in &self.present {
                let m = &self.masks[c as usize];
                shr_into(m, l, nd, &mut self.tmp);
                for j in 0..nw {
                    self.d[j] |= m[j] & self.tmp[j];
                }
            }
            mask_tail(&mut self.d, nd);
        } else {
            for i in 0..nd {
                if self.w[i] == self.w[i + l] {
                    self.d[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
                }
            }
        }
    }

    /// Leaves in `self.run` the positions `i` where `d[i .. i+need]` is all
    /// ones. Requires `1 <= need <= 63`.
    fn build_runs_short(&mut self, need: usize) {
        let nd_words = self.d.len();
        self.run.clear();
        self.run.extend_from_slice(&self.d);
        let mut have = 1usize;
        while have < need {
            let s = have.min(need - have);
            shr_into(&self.run, s, nd_words * WORD_BITS, &mut self.tmp);
            for j in 0..nd_words {
                self.run[j] &= self.tmp[j];
            }
            have += s;
        }
    }

    /// Count of set bits of `v` at positions `0..=limit`.
    fn count_upto(v: &[u64], limit: usize) -> u64 {
        let bits = limit + 1;
        let mut total = 0u64;
        for (j, &x) in v.iter().enumerate().take(words_for(bits)) {
            let x = if (j + 1) * WORD_BITS > bits {
                x & ((1u64 << (bits - j * WORD_BITS)) - 1)
            } else {
                x
            };
            total += x.count_ones() as u64;
        }
        total
    }

    /// True when some run of `>= 63` ones may exist (a run that long must
    /// fully cover an aligned 32-bit half-word).
    fn long_run_possible(&self) -> bool {
        self.d.iter().any(|&x| (x & 0xFFFF_FFFF) == 0xFFFF_FFFF || (x >> 32) == 0xFFFF_FFFF)
    }

    /// Maximal runs of ones in `self.d` (bit length `nd`), as `(start, end)`.
    fn maximal_runs(&self, nd: usize) -> Vec<(usize, usize)> {
        let mut runs = Vec::new();
        let mut start: Option<usize> = None;
        for i in 0..=nd {
            let b = i < nd && (self.d[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1;
            match (b, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    runs.push((s, i));
                    start = None;
                }
                _ => {}
            }
        }
        runs
    }

    /// Number of occurrences of `r`-th powers `U^r` with `|U| >= min_period`.
    fn count_powers(&mut self, r: usize, min_period: usize) -> u64 {
        let mut total = 0u64;
        let mut l = min_period.max(1);
        while r * l <= self.n {
            self.build_d(l);
            let need = (r - 1) * l;
            let limit = self.n - r * l; // last admissible start
            if need <= 63 {
                self.build_runs_short(need);
                total += Self::count_upto(&self.run, limit);
            } else if self.long_run_possible() {
                for (s, e) in self.maximal_runs(self.n - l) {
                    if e - s >= need {
                        let hi = limit.min(e - need);
                        if hi >= s {
                            total += (hi - s + 1) as u64;
                        }
                    }
                }
            }
            l += 1;
        }
        total
    }

    /// For each position, the ends of squares starting there.
    fn square_ends_by_start(&mut self) -> Vec<Vec<u32>> {
        let mut by_start = vec![Vec::new(); self.n + 1];
        let mut l = 1usize;
        while 2 * l <= self.n {
            let limit = self.n - 2 * l;
            self.build_d(l);
            if l <= 63 {
                self.build_runs_short(l);
                for (j, &x) in self.run.iter().enumerate() {
                    let mut x = x;
                    while x != 0 {
                        let i = j * WORD_BITS + x.trailing_zeros() as usize;
                        x &= x - 1;
                        if i <= limit {
                            by_start[i].push((i + 2 * l) as u32);
                        }
                    }
                }
            } else if self.long_run_possible() {
                for (s, e) in self.maximal_runs(self.n - l) {
                    if e - s >= l {
                        let hi = limit.min(e - l);
                        for i in s..=hi {
                            by_start[i].push((i + 2 * l) as u32);
                        }
                    }
                }
            }
            l += 1;
        }
        by_start
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> Pattern {
        Pattern::parse(s).unwrap()
    }

    /// Deterministic pseudo-random word.
    fn rand_word(len: usize, q: usize, seed: u64) -> Word {
        let mut x = seed | 1;
        let syms = (0..len)
            .map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((x >> 33) % q as u64) as u8
            })
            .collect();
        Word::new(syms, q).unwrap()
    }

    #[test]
    fn fast_paths_agree_with_sweep_random() {
        let patterns = ["xx", "xxx", "xyx", "xyxy", "xxyy", "xyzxyz", "abc", "ab", "x"];
        for seed in 1..=6u64 {
            for q in [2usize, 3] {
                for len in [1usize, 2, 5, 17, 40, 81] {
                    let w = rand_word(len, q, seed * 1000 + len as u64);
                    for p in patterns {
                        let p = pat(p);
                        assert_eq!(
                            count_instance_windows(&p, &w),
                            count_instance_windows_sweep(&p, &w),
                            "pattern {p}, q {q}, len {len}, seed {seed}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fast_paths_agree_with_sweep_structured() {
        let words = [
            "a".repeat(70),
            "ab".repeat(40),
            "aab".repeat(25),
            "abba".repeat(18),
            "aabb".repeat(18),
        ];
        for text in &words {
            let w = Word::parse(text).unwrap();
            for p in ["xx", "xxx", "xyx", "xyxy", "xxyy"] {
                let p = pat(p);
                assert_eq!(
                    count_instance_windows(&p, &w),
                    count_instance_windows_sweep(&p, &w),
                    "pattern {p}, word {text}"
                );
            }
        }
    }

    #[test]
    fn long_period_runs() {
        // Periodic word long enough that the required run length exceeds 63,
        // exercising the scalar run-scan path.
        let w = Word::parse(&"ab".repeat(100)).unwrap(); // length 200
        let squares_expected: u64 = {
            // squares in (ab)^100 are at even periods l with any start
            // i <= 200 - 2l; count = sum over even l of (201 - 2l)
            (1..=100u64).filter(|l| l % 2 == 0).map(|l| 201 - 2 * l).sum()
        };
        let got = Scanner::new(w.symbols()).count_powers(2, 1);
        assert_eq!(got, squares_expected);
    }

    #[test]
    fn unary_word_square_count() {
        // a^n: a square of period l starts at i <= n - 2l.
        let n = 130u64;
        let w = Word::parse(&"a".repeat(n as usize)).unwrap();
        let expected: u64 = (1..=n / 2).map(|l| n - 2 * l + 1).sum();
        assert_eq!(Scanner::new(w.symbols()).count_powers(2, 1), expected);
    }

    #[test]
    fn density_known_values() {
        let banana = Word::parse("banana").unwrap();
        assert_eq!(count_instance_windows(&pat("xx"), &banana), 2);
        let science = Word::parse("science").unwrap();
        assert_eq!(count_instance_windows(&pat("xyx"), &science), 2);
    }

    #[test]
    fn xxyy_smallest() {
        // aabb is the smallest xxyy instance window of itself
        let w = Word::parse("aabb").unwrap();
        assert_eq!(count_instance_windows(&pat("xxyy"), &w), 1);
    }
}
