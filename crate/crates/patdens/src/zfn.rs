//! Z-function and prefix-occurrence counting helpers.

/// Z-array: `z[i]` is the length of the longest common prefix of `s` and
/// `s[i..]`, with `z[0] = s.len()`.
pub(crate) fn z_array<T: Eq>(s: &[T]) -> Vec<usize> {
    let mut z = Vec::new();
    z_array_into(s, &mut z);
    z
}

/// [`z_array`] into a reused buffer, for tight per-suffix loops.
pub(crate) fn z_array_into<T: Eq>(s: &[T], z: &mut Vec<usize>) {
    let n = s.len();
    z.clear();
    z.resize(n, 0);
    if n == 0 {
        return;
    }
    z[0] = n;
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        let mut k = if i < r { z[i - l].min(r - i) } else { 0 };
        while i + k < n && s[k] == s[i + k] {
            k += 1;
        }
        z[i] = k;
        if i + k > r {
            l = i;
            r = i + k;
        }
    }
}

/// For every prefix length `len` in `1..=n`, the number of occurrences of
/// `s[0..len]` as a factor of `s` (index `len - 1`). Computed from the
/// Z-array histogram; nonincreasing in `len`.
pub(crate) fn prefix_occurrence_counts(s: &[u8]) -> Vec<u64> {
    let n = s.len();
    let z = z_array(s);
    let mut hist = vec![0u64; n + 1];
    for &v in &z {
        hist[v] += 1;
    }
    // occ(len) = #{i : z[i] >= len}
    let mut occ = vec![0u64; n];
    let mut acc = 0u64;
    for len in (1..=n).rev() {
        acc += hist[len];
        occ[len - 1] = acc;
    }
    occ
}
