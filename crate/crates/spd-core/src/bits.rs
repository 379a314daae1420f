// SPDX-License-Identifier: Apache-2.0

//! Word-level helpers over packed bitstrings.

/// 64-bit words needed to hold `n` bits.
#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Mask selecting the valid bits of the last word of an `n`-bit string.
#[inline]
pub(crate) fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Parity of `popcount(a & b)`.
#[inline]
pub(crate) fn and_parity(a: &[u64], b: &[u64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0u64;
    for (&wa, &wb) in a.iter().zip(b) {
        acc ^= wa & wb;
    }
    acc.count_ones() & 1 == 1
}

/// `popcount(a & b)`.
#[inline]
pub(crate) fn and_count(a: &[u64], b: &[u64]) -> u32 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&wa, &wb)| (wa & wb).count_ones()).sum()
}

/// `popcount(a | b)`.
#[inline]
pub(crate) fn or_count(a: &[u64], b: &[u64]) -> u32 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&wa, &wb)| (wa | wb).count_ones()).sum()
}

/// `popcount(a)`.
#[inline]
pub(crate) fn count(a: &[u64]) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

/// `a ^= b`.
#[inline]
pub(crate) fn xor_into(a: &mut [u64], b: &[u64]) {
    debug_assert_eq!(a.len(), b.len());
    for (wa, &wb) in a.iter_mut().zip(b) {
        *wa ^= wb;
    }
}

/// Lexicographic order treating the last word as most significant.
#[inline]
pub(crate) fn cmp_words(a: &[u64], b: &[u64]) -> core::cmp::Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (wa, wb) in a.iter().rev().zip(b.iter().rev()) {
        match wa.cmp(wb) {
            core::cmp::Ordering::Equal => {}
            other => return other,
        }
    }
    core::cmp::Ordering::Equal
}

#[inline]
pub(crate) fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&w| w == 0)
}
