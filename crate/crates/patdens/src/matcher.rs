//! Instance detection and encounter enumeration for patterns with
//! variables, plus exact density computation.
//!
//! Matching a pattern with variables is NP-complete in general; at desk
//! scale a backtracking search over image lengths with pruning is adequate.
//! Image lengths are assigned to distinct variables in first-occurrence
//! order; repeated occurrences are consistency-checked by direct comparison
//! against the window. Pruning:
//! - the residual window length must cover one symbol per unassigned
//!   occurrence;
//! - the residual must be expressible given the fixed multiplicities of the
//!   remaining unassigned variables (gcd filter);
//! - for whole-word checks on long windows, candidate images of the first
//!   variable must occur in the window at least as often as the variable
//!   occurs in the pattern (occurrence table from a linear-time Z-array).

use crate::fastcount;
use crate::words::{Pattern, Word};
use crate::zfn;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Window length from which the whole-word occurrence-table prefilter kicks in.
const FAST_PATH_MIN_LEN: usize = 64;

/// Default guard on word length for encounter enumeration.
pub const ENUM_GUARD_DEFAULT: usize = 64;

/// A nonerasing homomorphism: each variable maps to a nonempty word over
/// the target alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    images: Vec<Word>,
}

impl Homomorphism {
    pub fn new(images: Vec<Word>) -> Result<Homomorphism> {
        if images.iter().any(|w| w.is_empty()) {
            return Err(Error::EmptyWord);
        }
        Ok(Homomorphism { images })
    }

    /// Image of variable `v`.
    pub fn image(&self, v: usize) -> &Word {
        &self.images[v]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image_lengths(&self) -> Vec<usize> {
        self.images.iter().map(|w| w.len()).collect()
    }

    /// Applies the homomorphism to a pattern, concatenating images in
    /// pattern order.
    pub fn apply(&self, p: &Pattern) -> Word {
        let mut symbols = Vec::new();
        for &v in p.symbols() {
            symbols.extend_from_slice(self.images[v as usize].symbols());
        }
        let q = self.images.iter().map(|w| w.alphabet_size()).max().unwrap_or(1);
        Word::new(symbols, q).expect("images share a validated alphabet")
    }
}

/// An encounter `(a, b, phi)`: the factor `W[a, b]` equals `phi(V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encounter {
    pub start: usize,
    pub end: usize,
    pub phi: Homomorphism,
}

/// Exact density `delta(V, W)` as instance-window count over the
/// `(|W|+1 choose 2)` substrings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityValue {
    pub numerator: u64,
    pub denominator: u64,
    pub value: BigRational,
}

impl DensityValue {
    fn new(numerator: u64, denominator: u64) -> DensityValue {
        DensityValue {
            numerator,
            denominator,
            value: BigRational::new(BigInt::from(numerator), BigInt::from(denominator)),
        }
    }
}

pub(crate) struct PatternInfo {
    pub syms: Vec<u8>,
    pub mult: Vec<u32>,
    pub k: usize,
    /// `occ_suffix[t][v]`: occurrences of variable `v` in `syms[t..]`.
    occ_suffix: Vec<Vec<u32>>,
    pub all_single: bool,
}

impl PatternInfo {
    pub fn new(p: &Pattern) -> PatternInfo {
        let syms = p.symbols().to_vec();
        let mult = p.multiplicities().to_vec();
        let k = mult.len();
        let mut occ_suffix = vec![vec![0u32; k]; syms.len() + 1];
        for t in (0..syms.len()).rev() {
            occ_suffix[t] = occ_suffix[t + 1].clone();
            occ_suffix[t][syms[t] as usize] += 1;
        }
        let all_single = mult.iter().all(|&m| m == 1);
        PatternInfo { syms, mult, k, occ_suffix, all_single }
    }

    /// Runs the backtracking search over all witness homomorphisms for
    /// `win` as a whole-word instance. `visit` receives `(start, len)` per
    /// variable and returns `true` to abort the search. Witnesses are
    /// visited in lexicographic image-length order.
    pub fn search(
        &self,
        win: &[u8],
        first_cap: usize,
        visit: &mut dyn FnMut(&[usize], &[usize]) -> bool,
    ) -> bool {
        if win.len() < self.syms.len() {
            return false;
        }
        if self.all_single {
            // Unique split shape only when k == |p|; assign greedily:
            // one symbol per variable, the last one takes the rest.
            // (Still enumerate properly when a caller wants all witnesses.)
            // Fall through to the generic search; it is cheap here.
        }
        let mut lens = vec![0usize; self.k];
        let mut starts = vec![0usize; self.k];
        self.step(win, 0, 0, first_cap, &mut lens, &mut starts, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &self,
        win: &[u8],
        t: usize,
        pos: usize,
        first_cap: usize,
        lens: &mut Vec<usize>,
        starts: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize], &[usize]) -> bool,
    ) -> bool {
        if t == self.syms.len() {
            if pos == win.len() {
                return visit(starts, lens);
            }
            return false;
        }
        let v = self.syms[t] as usize;
        let n = win.len();
        if lens[v] > 0 {
            let len = lens[v];
            if pos + len <= n && win[pos..pos + len] == win[starts[v]..starts[v] + len] {
                return self.step(win, t + 1, pos + len, first_cap, lens, starts, visit);
            }
            return false;
        }
        // Branch point: first occurrence of v. Work out the residual budget.
        let occ = &self.occ_suffix[t];
        let cnt = occ[v] as usize;
        let mut fixed = 0usize;
        let mut min_other = 0usize;
        let mut g = 0u32;
        for u in 0..self.k {
            if u == v || occ[u] == 0 {
                continue;
            }
            if lens[u] > 0 {
                fixed += occ[u] as usize * lens[u];
            } else {
                min_other += occ[u] as usize;
                g = crate::words::gcd(g, occ[u]);
            }
        }
        if n < pos + fixed {
            return false;
        }
        let avail = n - pos - fixed;
        if min_other == 0 {
            if avail >= cnt && avail % cnt == 0 {
                let len = avail / cnt;
                if t == 0 && len > first_cap {
                    return false;
                }
                return self.try_len(win, t, pos, first_cap, v, len, lens, starts, visit);
            }
            return false;
        }
        if avail < min_other + cnt {
            return false;
        }
        let mut max_len = (avail - min_other) / cnt;
        if t == 0 {
            max_len = max_len.min(first_cap);
        }
        let g = g as usize;
        for len in 1..=max_len {
            // gcd filter: what the other unassigned variables must absorb
            // is a sum of multiples of their multiplicities.
            if (avail - cnt * len) % g != 0 {
                continue;
            }
            if self.try_len(win, t, pos, first_cap, v, len, lens, starts, visit) {
                return true;
            }
        }
        false
    }

    #[allow(clippy::too_many_arguments)]
    fn try_len(
        &self,
        win: &[u8],
        t: usize,
        pos: usize,
        first_cap: usize,
        v: usize,
        len: usize,
        lens: &mut Vec<usize>,
        starts: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize], &[usize]) -> bool,
    ) -> bool {
        lens[v] = len;
        starts[v] = pos;
        let stop = self.step(win, t + 1, pos + len, first_cap, lens, starts, visit);
        lens[v] = 0;
        stop
    }

    /// Whole-word instance check on a raw window.
    pub fn window_is_instance(&self, win: &[u8]) -> bool {
        if win.len() < self.syms.len() {
            return false;
        }
        if self.all_single {
            return true; // any split into |p| nonempty blocks works
        }
        self.search(win, usize::MAX, &mut |_, _| true)
    }

    /// Instance check with the occurrence-table prefilter for long windows.
    pub fn window_is_instance_fast(&self, win: &[u8]) -> bool {
        if win.len() < self.syms.len() {
            return false;
        }
        if self.all_single {
            return true;
        }
        let first_var = self.syms[0] as usize;
        let r0 = self.mult[first_var];
        if win.len() < FAST_PATH_MIN_LEN || r0 < 2 {
            return self.window_is_instance(win);
        }
        let occ = zfn::prefix_occurrence_counts(win);
        let mut cap = 0usize;
        while cap < win.len() && occ[cap] >= r0 as u64 {
            cap += 1;
        }
        if cap == 0 {
            return false;
        }
        self.search(win, cap, &mut |_, _| true)
    }
}

fn require_nonempty(w: &Word) -> Result<()> {
    if w.is_empty() {
        Err(Error::EmptyWord)
    } else {
        Ok(())
    }
}

/// True iff some nonerasing homomorphism maps `p` onto exactly `w`.
pub fn is_instance(w: &Word, p: &Pattern) -> Result<bool> {
    require_nonempty(w)?;
    let info = PatternInfo::new(p);
    Ok(info.window_is_instance_fast(w.symbols()))
}

/// A witness homomorphism for `w` as an instance of `p`, if any; the
/// witness with the lexicographically smallest image-length vector.
pub fn find_witness(w: &Word, p: &Pattern) -> Result<Option<Homomorphism>> {
    require_nonempty(w)?;
    let info = PatternInfo::new(p);
    let mut found: Option<(Vec<usize>, Vec<usize>)> = None;
    info.search(w.symbols(), usize::MAX, &mut |starts, lens| {
        found = Some((starts.to_vec(), lens.to_vec()));
        true
    });
    match found {
        None => Ok(None),
        Some((starts, lens)) => {
            let images = (0..info.k)
                .map(|v| {
                    Word::new(
                        w.symbols()[starts[v]..starts[v] + lens[v]].to_vec(),
                        w.alphabet_size(),
                    )
                    .expect("image symbols come from a validated word")
                })
                .collect();
            Ok(Some(Homomorphism::new(images)?))
        }
    }
}

/// Exact number of encounters `(a, b, phi)` with `W[a, b] = phi(V)`.
pub fn count_encounters(p: &Pattern, w: &Word) -> Result<u64> {
    require_nonempty(w)?;
    let info = PatternInfo::new(p);
    let syms = w.symbols();
    let n = syms.len();
    let mut total = 0u64;
    for a in 0..n {
        for b in a + 1..=n {
            let win = &syms[a..b];
            if info.all_single {
                total += count_compositions_distinct(win.len(), info.k);
                continue;
            }
            info.search(win, usize::MAX, &mut |_, _| {
                total += 1;
                false
            });
        }
    }
    Ok(total)
}

/// Number of ways to split a length-`n` window into `k` nonempty blocks.
fn count_compositions_distinct(n: usize, k: usize) -> u64 {
    if n < k {
        return 0;
    }
    // (n-1 choose k-1)
    let mut acc = 1u64;
    for i in 0..k - 1 {
        acc = acc * (n - 1 - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Exact density: the proportion of the `(|w|+1 choose 2)` substrings of
/// `w` that are instances of `p`.
pub fn density(p: &Pattern, w: &Word) -> Result<DensityValue> {
    require_nonempty(w)?;
    let n = w.len() as u64;
    let numerator = fastcount::count_instance_windows(p, w);
    Ok(DensityValue::new(numerator, n * (n + 1) / 2))
}

/// All encounters, ordered by `(a, b, image lengths)`.
pub fn enumerate_encounters(p: &Pattern, w: &Word) -> Result<Vec<Encounter>> {
    enumerate_encounters_with_guard(p, w, ENUM_GUARD_DEFAULT)
}

/// [`enumerate_encounters`] with an explicit word-length guard.
pub fn enumerate_encounters_with_guard(
    p: &Pattern,
    w: &Word,
    guard: usize,
) -> Result<Vec<Encounter>> {
    require_nonempty(w)?;
    if w.len() > guard {
        return Err(Error::GuardExceeded { len: w.len(), guard });
    }
    let info = PatternInfo::new(p);
    let syms = w.symbols();
    let q = w.alphabet_size();
    let n = syms.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..=n {
            let win = &syms[a..b];
            info.search(win, usize::MAX, &mut |starts, lens| {
                let images = (0..info.k)
                    .map(|v| {
                        Word::new(win[starts[v]..starts[v] + lens[v]].to_vec(), q)
                            .expect("validated symbols")
                    })
                    .collect::<Vec<_>>();
                out.push(Encounter {
                    start: a,
                    end: b,
                    phi: Homomorphism::new(images).expect("nonerasing by construction"),
                });
                false
            });
        }
    }
    Ok(out)
}
