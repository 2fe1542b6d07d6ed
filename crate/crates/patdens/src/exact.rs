//! Exact rational-arithmetic oracles: instance probabilities, expected
//! densities and encounter counts, composition counts, explicit bounds,
//! and the closed-form limit for the `xyx` pattern.
//!
//! Probabilities and expectations here are exact big rationals; floating
//! point appears only in bound evaluations and in the unbordered-word
//! limit, whose truncation error is controlled analytically.

use crate::matcher::PatternInfo;
use crate::words::{Pattern, Word};
use crate::{Budget, Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

/// Multiplicity profile of a pattern: the multiset `r̄ = (r_1..r_k)` with
/// its gcd `d` and minimum `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionSpec {
    multiplicities: Vec<u32>,
    d: u32,
    r: u32,
    k: usize,
}

impl CompositionSpec {
    pub fn new(multiplicities: Vec<u32>) -> Result<CompositionSpec> {
        if multiplicities.is_empty() || multiplicities.contains(&0) {
            return Err(Error::InvalidParameter(
                "multiplicities must be a nonempty list of positive counts".into(),
            ));
        }
        let d = multiplicities.iter().copied().fold(0, crate::words::gcd);
        let r = *multiplicities.iter().min().expect("nonempty");
        let k = multiplicities.len();
        Ok(CompositionSpec { multiplicities, d, r, k })
    }

    pub fn from_pattern(p: &Pattern) -> CompositionSpec {
        CompositionSpec::new(p.multiplicities().to_vec()).expect("patterns are nonempty")
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// gcd of the multiplicities.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// Minimum multiplicity.
    pub fn r(&self) -> u32 {
        self.r
    }

    /// Number of distinct variables.
    pub fn k(&self) -> usize {
        self.k
    }
}

fn validate_q(q: usize) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidAlphabetSize(q));
    }
    if q > crate::words::MAX_ALPHABET {
        return Err(Error::AlphabetTooLarge(q));
    }
    Ok(())
}

/// `q^n` together with the `q^n * n` enumeration work estimate, checked
/// against the budget.
fn enumeration_size(q: usize, n: usize, budget: &Budget) -> Result<u64> {
    let mut words: u128 = 1;
    for _ in 0..n {
        words = words.saturating_mul(q as u128);
    }
    let work = words.saturating_mul(n as u128);
    let capped = work.min(u64::MAX as u128) as u64;
    budget.check(capped)?;
    if words > u64::MAX as u128 {
        return Err(Error::BudgetExceeded { required: u64::MAX, limit: budget.max_work });
    }
    Ok(words as u64)
}

fn write_digits(mut idx: u64, q: u64, buf: &mut [u8]) {
    for slot in buf.iter_mut().rev() {
        *slot = (idx % q) as u8;
        idx /= q;
    }
}

/// Number of length-`n` words over a `q`-letter alphabet that are
/// instances of `p`.
fn count_instances(p: &Pattern, q: usize, n: usize, budget: &Budget) -> Result<u64> {
    let words = enumeration_size(q, n, budget)?;
    if n < p.len() {
        return Ok(0);
    }
    let info = PatternInfo::new(p);
    let count = (0..words)
        .into_par_iter()
        .fold(
            || (vec![0u8; n], 0u64),
            |(mut buf, acc), idx| {
                write_digits(idx, q as u64, &mut buf);
                let hit = info.window_is_instance(&buf) as u64;
                (buf, acc + hit)
            },
        )
        .map(|(_, acc)| acc)
        .sum();
    Ok(count)
}

/// Exact `I_n(p, Σ_q)`: the probability that a uniform length-`n` word
/// over a `q`-letter alphabet is an instance of `p`.
pub fn instance_probability(p: &Pattern, q: usize, n: usize, budget: &Budget) -> Result<BigRational> {
    validate_q(q)?;
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let count = count_instances(p, q, n, budget)?;
    Ok(BigRational::new(BigInt::from(count), BigInt::from(q).pow(n as u32)))
}

/// Exact `E(δ(p, W_n))` over uniform `W_n`, via the identity
/// `(n+1 choose 2) E(δ) = Σ_{m=1..n} (n+1-m) I_m`.
pub fn expected_density(p: &Pattern, q: usize, n: usize, budget: &Budget) -> Result<BigRational> {
    validate_q(q)?;
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    // Check the total enumeration work up front.
    let mut total_work: u128 = 0;
    let mut words: u128 = 1;
    for m in 1..=n {
        words = words.saturating_mul(q as u128);
        total_work = total_work.saturating_add(words.saturating_mul(m as u128));
    }
    budget.check(total_work.min(u64::MAX as u128) as u64)?;
    let inner = Budget::unlimited(); // accounted above
    let mut sum = BigRational::zero();
    for m in 1..=n {
        let i_m = instance_probability(p, q, m, &inner)?;
        sum += BigRational::from(BigInt::from((n + 1 - m) as u64)) * i_m;
    }
    let pairs = BigInt::from((n as u64) * (n as u64 + 1) / 2);
    Ok(sum / BigRational::from(pairs))
}

/// Exact `E(hom(p, W_n))` by the closed formula
/// `Σ_{L<=n} (n-L+1) Σ_{ℓ̄: Σ r_i ℓ_i = L} q^{(Σ ℓ_i) - L}`,
/// a function of the multiplicity multiset alone.
pub fn expected_hom(p: &Pattern, q: usize, n: usize) -> Result<BigRational> {
    validate_q(q)?;
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let mult = p.multiplicities();
    // f[l_total][L] pattern: accumulate g[L] = Σ_{ℓ̄ : Σ r_i ℓ_i = L} q^{Σ ℓ_i}
    // by one DP pass per variable.
    let qb = BigUint::from(q);
    let mut g: Vec<BigUint> = vec![BigUint::zero(); n + 1];
    g[0] = BigUint::one();
    for &r in mult {
        let r = r as usize;
        let mut next: Vec<BigUint> = vec![BigUint::zero(); n + 1];
        for (len, coeff) in g.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let mut l = 1usize;
            let mut qpow = qb.clone();
            while len + r * l <= n {
                next[len + r * l] += coeff * &qpow;
                qpow *= &qb;
                l += 1;
            }
        }
        g = next;
    }
    let mut total = BigRational::zero();
    for (big_l, coeff) in g.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let windows = BigInt::from((n - big_l + 1) as u64);
        let num = BigInt::from(coeff.clone()) * windows;
        let den = BigInt::from(q).pow(big_l as u32);
        total += BigRational::new(num, den);
    }
    Ok(total)
}

/// Exact `a_n(r̄)`: the number of positive integer tuples `(a_1..a_k)` with
/// `Σ a_i r_i = n`.
pub fn count_compositions(spec: &CompositionSpec, n: usize) -> BigUint {
    let mut counts: Vec<BigUint> = vec![BigUint::zero(); n + 1];
    counts[0] = BigUint::one();
    for &r in spec.multiplicities() {
        let r = r as usize;
        let mut next: Vec<BigUint> = vec![BigUint::zero(); n + 1];
        for t in 0..=n {
            if counts[t].is_zero() {
                continue;
            }
            let mut add = t + r;
            while add <= n {
                let c = counts[t].clone();
                next[add] += c;
                add += r;
            }
        }
        counts = next;
    }
    counts[n].clone()
}

/// Positive coefficients `a_1..a_k` with `Σ a_i r_i = d·n`, minimized in
/// reverse-index priority (smallest `a_k` first, then `a_{k-1}`, ...);
/// `None` when `d·n` is not representable with positive parts.
pub fn frobenius_coeffs(spec: &CompositionSpec, n: usize) -> Result<Option<Vec<u64>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let target = spec.d() as u64 * n as u64;
    if target > 4_000_000 {
        return Err(Error::InvalidParameter(format!(
            "representability table for target {target} is too large"
        )));
    }
    let target = target as usize;
    let rs: Vec<usize> = spec.multiplicities().iter().map(|&r| r as usize).collect();
    // reachable[i][t]: t expressible as a positive combination of r_1..r_i.
    let k = rs.len();
    let mut reachable = vec![vec![false; target + 1]; k + 1];
    reachable[0][0] = true;
    for i in 1..=k {
        for t in 0..=target {
            if t >= rs[i - 1] {
                // a_i >= 1: peel one copy, then zero or more further copies.
                reachable[i][t] = reachable[i - 1][t - rs[i - 1]] || reachable[i][t - rs[i - 1]];
            }
        }
    }
    if !reachable[k][target] {
        return Ok(None);
    }
    let mut coeffs = vec![0u64; k];
    let mut rem = target;
    for i in (1..=k).rev() {
        // smallest positive a_i leaving the remainder representable by the
        // first i-1 multiplicities
        let mut a = 1usize;
        loop {
            let used = a * rs[i - 1];
            debug_assert!(used <= rem, "representability guarantees a solution");
            if reachable[i - 1][rem - used] {
                break;
            }
            a += 1;
        }
        coeffs[i - 1] = a as u64;
        rem -= a * rs[i - 1];
    }
    Ok(Some(coeffs))
}

/// Generalized binomial `(x choose y) = Π_{i=0..y-1} (x - i) / y!`,
/// defined for nonintegral `x`.
pub fn generalized_binomial(x: f64, y: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..y {
        acc *= (x - i as f64) / (i as f64 + 1.0);
    }
    acc
}

fn doubled_profile(p: &Pattern) -> Result<(f64, f64, f64)> {
    if !p.is_doubled() {
        return Err(Error::NondoubledPattern);
    }
    let spec = CompositionSpec::from_pattern(p);
    Ok((spec.d() as f64, spec.r() as f64, spec.k() as f64))
}

/// Upper bound `(n/d + k + 1 choose k + 1) q^{n(1-r)/r}` on `I_n(p, Σ_q)`
/// for doubled `p`, with `k` the number of distinct variables, `d` the
/// multiplicity gcd and `r` the minimum multiplicity.
pub fn instance_count_bound(p: &Pattern, q: usize, n: usize) -> Result<f64> {
    validate_q(q)?;
    let (d, r, k) = doubled_profile(p)?;
    let binom = generalized_binomial(n as f64 / d + k + 1.0, k as u32 + 1);
    Ok(binom * (q as f64).powf(n as f64 * (1.0 - r) / r))
}

/// Tail bound `n^{k+3} q^{f(1-r)/r}` on `P((n+1 choose 2) δ > n f)` for
/// doubled `p`.
pub fn tail_bound(p: &Pattern, q: usize, n: usize, f_value: f64) -> Result<f64> {
    validate_q(q)?;
    if !(f_value > 0.0) {
        return Err(Error::InvalidParameter("f must be positive".into()));
    }
    let (_, r, k) = doubled_profile(p)?;
    Ok((n as f64).powf(k + 3.0) * (q as f64).powf(f_value * (1.0 - r) / r))
}

/// Exact counts of unbordered words of lengths `1..=n_max` over a
/// `q`-letter alphabet, by the recurrence
/// `u_1 = q, u_{2m+1} = q u_{2m}, u_{2m} = q u_{2m-1} - u_m`.
pub fn unbordered_counts(q: usize, n_max: usize) -> Result<Vec<BigUint>> {
    if q < 2 {
        return Err(Error::InvalidAlphabetSize(q));
    }
    let qb = BigUint::from(q);
    let mut u: Vec<BigUint> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let next = if n == 1 {
            qb.clone()
        } else if n % 2 == 1 {
            &u[n - 2] * &qb
        } else {
            &u[n - 2] * &qb - &u[n / 2 - 1]
        };
        u.push(next);
    }
    Ok(u)
}

/// `I(Z_2, Σ_q) = 1 - lim u_n / q^n`: the limiting probability that a long
/// uniform word is an instance of `xyx`, computed to within `tol`.
///
/// In terms of `v_n = u_n / q^n` the recurrence reads `v_{2m} = v_{2m-1} -
/// v_m q^{-m}` and `v_{2m+1} = v_{2m}`; all later decrements past step `2m`
/// total at most `Σ_{j>=m} q^{-j} = q^{1-m}/(q-1)`, which bounds the
/// truncation error.
pub fn bordered_limit(q: usize, tol: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::InvalidAlphabetSize(q));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let qf = q as f64;
    let mut v = vec![1.0f64]; // v_1 = u_1 / q = 1
    let mut m = 1usize;
    loop {
        // tail after computing v_{2m}: future decrements sum to < q^{1-m}/(q-1)
        let tail = qf.powi(1 - (m as i32)) / (qf - 1.0);
        if tail < tol && m > 1 {
            break;
        }
        let v_prev = v[2 * m - 2]; // v_{2m-1} (indices are n-1)
        let v_2m = v_prev - v[m - 1] * qf.powi(-(m as i32));
        v.push(v_2m); // v_{2m}
        v.push(v_2m); // v_{2m+1} = v_{2m}
        m += 1;
    }
    Ok(1.0 - v[2 * m - 2])
}

/// All length-`n` instances of `p` over a `q`-letter alphabet, in
/// lexicographic order.
pub fn enumerate_instances(p: &Pattern, q: usize, n: usize, budget: &Budget) -> Result<Vec<Word>> {
    validate_q(q)?;
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let words = enumeration_size(q, n, budget)?;
    let info = PatternInfo::new(p);
    let mut out = Vec::new();
    let mut buf = vec![0u8; n];
    for idx in 0..words {
        write_digits(idx, q as u64, &mut buf);
        if info.window_is_instance(&buf) {
            out.push(Word::new(buf.clone(), q).expect("digits are below q"));
        }
    }
    Ok(out)
}

/// The subpattern `U`: `p` with every minimum-multiplicity variable
/// removed, or `None` when that removes everything.
pub fn reduced_pattern(p: &Pattern) -> Option<Pattern> {
    let r = p.min_multiplicity();
    let kept: Vec<usize> = p
        .symbols()
        .iter()
        .filter(|&&v| p.multiplicities()[v as usize] > r)
        .map(|&v| v as usize)
        .collect();
    if kept.is_empty() {
        None
    } else {
        Some(Pattern::from_symbols(&kept).expect("nonempty"))
    }
}

/// Whether `win` has a witness homomorphism for `p` whose images of the
/// non-minimum-multiplicity variables total fewer than `threshold` symbols.
pub(crate) fn has_small_witness(
    info: &PatternInfo,
    heavy: &[bool],
    win: &[u8],
    threshold: f64,
) -> bool {
    info.search(win, usize::MAX, &mut |_, lens| {
        let heavy_total: usize = (0..lens.len())
            .filter(|&v| heavy[v])
            .map(|v| lens[v] * info.mult[v] as usize)
            .sum();
        (heavy_total as f64) < threshold
    })
}

/// Fraction of length-`n` instances of `p` admitting a witness `φ` with
/// `|φ(U)| < √n`, where `U` is `p` restricted to the variables of
/// above-minimum multiplicity. Returns 1 when `U` is empty. Requires `n`
/// divisible by the multiplicity gcd `d`.
pub fn lemma_base_fraction(p: &Pattern, q: usize, n: usize, budget: &Budget) -> Result<BigRational> {
    validate_q(q)?;
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let d = p.multiplicity_gcd() as usize;
    if n % d != 0 {
        return Err(Error::InvalidParameter(format!(
            "length {n} is not a multiple of the multiplicity gcd {d}"
        )));
    }
    if reduced_pattern(p).is_none() {
        return Ok(BigRational::one());
    }
    let r = p.min_multiplicity();
    let heavy: Vec<bool> = p.multiplicities().iter().map(|&m| m > r).collect();
    let words = enumeration_size(q, n, budget)?;
    let info = PatternInfo::new(p);
    let threshold = (n as f64).sqrt();
    let mut buf = vec![0u8; n];
    let (mut instances, mut small) = (0u64, 0u64);
    for idx in 0..words {
        write_digits(idx, q as u64, &mut buf);
        if info.window_is_instance(&buf) {
            instances += 1;
            small += has_small_witness(&info, &heavy, &buf, threshold) as u64;
        }
    }
    if instances == 0 {
        return Err(Error::InvalidParameter(format!("pattern has no instances of length {n}")));
    }
    Ok(BigRational::new(BigInt::from(small), BigInt::from(instances)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn pat(s: &str) -> Pattern {
        Pattern::parse(s).unwrap()
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn free() -> Budget {
        Budget::unlimited()
    }

    #[test]
    fn instance_probability_xx() {
        assert_eq!(instance_probability(&pat("xx"), 2, 2, &free()).unwrap(), ratio(1, 2));
        assert_eq!(instance_probability(&pat("xx"), 2, 4, &free()).unwrap(), ratio(1, 4));
        assert_eq!(instance_probability(&pat("xx"), 2, 3, &free()).unwrap(), ratio(0, 1));
    }

    #[test]
    fn instance_probability_aba() {
        assert_eq!(instance_probability(&pat("aba"), 2, 5, &free()).unwrap(), ratio(5, 8));
    }

    #[test]
    fn instance_probability_budget() {
        let tight = Budget::new(10);
        assert!(matches!(
            instance_probability(&pat("xx"), 2, 20, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn expected_density_values() {
        assert_eq!(expected_density(&pat("xx"), 2, 2, &free()).unwrap(), ratio(1, 6));
        assert_eq!(expected_density(&pat("x"), 2, 6, &free()).unwrap(), ratio(1, 1));
        assert_eq!(expected_density(&pat("xx"), 2, 1, &free()).unwrap(), ratio(0, 1));
    }

    #[test]
    fn expected_hom_brute_force() {
        // average count_encounters over all q^n words
        for (p, q, n) in [("ab", 3usize, 3usize), ("xx", 2, 5), ("xyx", 2, 5), ("xyxy", 2, 6)] {
            let p = pat(p);
            let formula = expected_hom(&p, q, n).unwrap();
            let mut total = BigRational::zero();
            let words = (q as u64).pow(n as u32);
            let mut buf = vec![0u8; n];
            for idx in 0..words {
                write_digits(idx, q as u64, &mut buf);
                let w = Word::new(buf.clone(), q).unwrap();
                let c = crate::matcher::count_encounters(&p, &w).unwrap();
                total += BigRational::from(BigInt::from(c));
            }
            let avg = total / BigRational::from(BigInt::from(words));
            assert_eq!(formula, avg, "pattern {p}, q {q}, n {n}");
        }
    }

    #[test]
    fn expected_hom_shortest_instance() {
        assert_eq!(expected_hom(&pat("xyxy"), 2, 3).unwrap(), ratio(0, 1));
    }

    #[test]
    fn expected_hom_anagram_equality() {
        for n in 1..=14 {
            for q in [2usize, 3] {
                assert_eq!(
                    expected_hom(&pat("xyxy"), q, n).unwrap(),
                    expected_hom(&pat("xxyy"), q, n).unwrap(),
                    "q {q}, n {n}"
                );
            }
        }
    }

    #[test]
    fn composition_counts() {
        let s22 = CompositionSpec::new(vec![2, 2]).unwrap();
        assert_eq!(count_compositions(&s22, 6), BigUint::from(2u32));
        assert_eq!(count_compositions(&s22, 5), BigUint::zero());
        let s1 = CompositionSpec::new(vec![1]).unwrap();
        assert_eq!(count_compositions(&s1, 5), BigUint::one());
    }

    #[test]
    fn composition_spec_fields() {
        let s = CompositionSpec::from_pattern(&pat("abacaba"));
        assert_eq!(s.multiplicities(), &[4, 2, 1]);
        assert_eq!((s.d(), s.r(), s.k()), (1, 1, 3));
    }

    #[test]
    fn frobenius_examples() {
        let s23 = CompositionSpec::new(vec![2, 3]).unwrap();
        assert_eq!(frobenius_coeffs(&s23, 5).unwrap(), Some(vec![1, 1]));
        assert_eq!(frobenius_coeffs(&s23, 1).unwrap(), None);
        let s22 = CompositionSpec::new(vec![2, 2]).unwrap();
        assert_eq!(frobenius_coeffs(&s22, 4).unwrap(), Some(vec![3, 1]));
        // identity holds on every success
        for n in 1..=30usize {
            if let Some(a) = frobenius_coeffs(&s23, n).unwrap() {
                let total: u64 =
                    a.iter().zip(s23.multiplicities()).map(|(&a, &r)| a * r as u64).sum();
                assert_eq!(total, s23.d() as u64 * n as u64);
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(generalized_binomial(5.0, 2), 10.0);
        assert!((generalized_binomial(2.5, 2) - 1.875).abs() < 1e-12);
        assert_eq!(generalized_binomial(3.0, 0), 1.0);
    }

    #[test]
    fn bounds() {
        // xx: k = 1, d = 2, r = 2
        let b4 = instance_count_bound(&pat("xx"), 2, 4).unwrap();
        assert!((b4 - 1.5).abs() < 1e-12, "got {b4}");
        assert!(b4 >= 0.25);
        let b2 = instance_count_bound(&pat("xx"), 2, 2).unwrap();
        assert!((b2 - 1.5).abs() < 1e-12, "got {b2}");
        assert!(matches!(instance_count_bound(&pat("aba"), 2, 4), Err(Error::NondoubledPattern)));

        let t = tail_bound(&pat("xx"), 2, 4, 8.0).unwrap();
        assert!((t - 16.0).abs() < 1e-12, "got {t}");
        assert!(matches!(tail_bound(&pat("ab"), 2, 4, 1.0), Err(Error::NondoubledPattern)));
        // exponent linearity: doubling f squares the q-factor
        let t1 = tail_bound(&pat("xx"), 2, 10, 4.0).unwrap();
        let t2 = tail_bound(&pat("xx"), 2, 10, 8.0).unwrap();
        let base = (10.0f64).powi(4);
        assert!(((t2 / base) - (t1 / base).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn unbordered_recurrence_matches_brute_force() {
        // brute force: a word is bordered iff some proper suffix equals a prefix
        for q in [2usize, 3] {
            let n_max = if q == 2 { 16 } else { 10 };
            let expected = unbordered_counts(q, n_max).unwrap();
            for n in 1..=n_max {
                let mut count = 0u64;
                let words = (q as u64).pow(n as u32);
                let mut buf = vec![0u8; n];
                'words: for idx in 0..words {
                    write_digits(idx, q as u64, &mut buf);
                    let z = crate::zfn::z_array(&buf);
                    for c in 1..n {
                        if z[c] == n - c {
                            continue 'words; // bordered
                        }
                    }
                    count += 1;
                }
                assert_eq!(expected[n - 1], BigUint::from(count), "q {q}, n {n}");
            }
        }
    }

    #[test]
    fn unbordered_binary_prefix() {
        // q = 2: 2, 2, 4, 6, 12, 20, 40, 74
        let u = unbordered_counts(2, 8).unwrap();
        let expect: Vec<BigUint> =
            [2u32, 2, 4, 6, 12, 20, 40, 74].iter().map(|&x| BigUint::from(x)).collect();
        assert_eq!(u, expect);
    }

    #[test]
    fn bordered_limit_binary() {
        let v = bordered_limit(2, 1e-7).unwrap();
        assert!((v - 0.7322132).abs() < 1e-7, "got {v}");
        assert!(matches!(bordered_limit(1, 1e-7), Err(Error::InvalidAlphabetSize(1))));
    }

    #[test]
    fn enumerate_instances_examples() {
        let render =
            |ws: Vec<Word>| ws.iter().map(Word::render).collect::<Vec<_>>();
        assert_eq!(
            render(enumerate_instances(&pat("xx"), 2, 4, &free()).unwrap()),
            vec!["aaaa", "abab", "baba", "bbbb"]
        );
        assert_eq!(
            render(enumerate_instances(&pat("xx"), 2, 2, &free()).unwrap()),
            vec!["aa", "bb"]
        );
        assert_eq!(
            render(enumerate_instances(&pat("aba"), 2, 3, &free()).unwrap()),
            vec!["aaa", "aba", "bab", "bbb"]
        );
    }

    #[test]
    fn enumeration_cardinality_matches_probability() {
        for n in 1..=8 {
            let count = enumerate_instances(&pat("xyx"), 2, n, &free()).unwrap().len();
            let prob = instance_probability(&pat("xyx"), 2, n, &free()).unwrap();
            assert_eq!(
                BigRational::new(BigInt::from(count), BigInt::from(1u64 << n)),
                prob,
                "n {n}"
            );
        }
    }

    #[test]
    fn reduced_pattern_examples() {
        assert_eq!(reduced_pattern(&pat("aba")).unwrap().render(), "aa");
        assert!(reduced_pattern(&pat("xxyy")).is_none());
        assert!(reduced_pattern(&pat("xy")).is_none());
        assert_eq!(reduced_pattern(&pat("abacaba")).unwrap().render(), "abaaba");
    }

    #[test]
    fn lemma_base_fraction_trivial_and_exhaustive() {
        assert_eq!(lemma_base_fraction(&pat("xxyy"), 2, 8, &free()).unwrap(), BigRational::one());
        // aba: U = aa, |φ(U)| = 2·|φ(a)|; threshold √n
        let f6 = lemma_base_fraction(&pat("aba"), 2, 6, &free()).unwrap();
        assert!(f6 >= BigRational::zero() && f6 <= BigRational::one());
        // independent oracle: enumerate instances, check minimal-|φ(a)| witness
        let insts = enumerate_instances(&pat("aba"), 2, 6, &free()).unwrap();
        let mut small = 0u64;
        for w in &insts {
            let s = w.symbols();
            let n = s.len();
            // smallest border length l with 2l < n determines the minimal 2l
            let z = crate::zfn::z_array(s);
            let mut best: Option<usize> = None;
            for c in 1..n {
                let l = n - c;
                if 2 * l < n && z[c] >= l {
                    best = Some(best.map_or(l, |b: usize| b.min(l)));
                }
            }
            if let Some(l) = best {
                if ((2 * l) as f64) < (6.0f64).sqrt() {
                    small += 1;
                }
            }
        }
        assert_eq!(
            f6,
            BigRational::new(BigInt::from(small), BigInt::from(insts.len() as u64))
        );
    }

    #[test]
    fn lemma_base_fraction_rejects_nonmultiple() {
        assert!(matches!(
            lemma_base_fraction(&pat("xx"), 2, 5, &free()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn fact_ei_against_exhaustive_average() {
        for p in ["xx", "aba", "xyxy"] {
            let p = pat(p);
            for n in 1..=8usize {
                let formula = expected_density(&p, 2, n, &free()).unwrap();
                let mut total = BigRational::zero();
                let mut buf = vec![0u8; n];
                for idx in 0..(1u64 << n) {
                    write_digits(idx, 2, &mut buf);
                    let w = Word::new(buf.clone(), 2).unwrap();
                    total += crate::matcher::density(&p, &w).unwrap().value;
                }
                let avg = total / BigRational::from_u64(1 << n).unwrap();
                assert_eq!(formula, avg, "pattern {p}, n {n}");
            }
        }
    }
}
