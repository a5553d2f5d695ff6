//! Compensated and order-fixed summation.
//!
//! Sums over `n <= T` reach a million mixed-sign terms, so every accumulation
//! over `n` goes through [`CompensatedSum`] (Kahan-style, with an exact
//! two-sum error term). Reductions across panels, strata or trials go through
//! [`pairwise_sum`], whose tree shape depends only on the input length, so a
//! parallel map followed by it is bit-identical for every thread count.

use std::iter::FromIterator;
use std::ops::AddAssign;

#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    /// Knuth's branch-free two-sum; the rounding error of every addition is
    /// carried in `compensation`.
    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        let v = t - self.sum;
        self.compensation += (self.sum - (t - v)) + (value - v);
        self.sum = t;
    }

    /// Merges another accumulator.
    #[inline]
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.compensation += other.compensation;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for CompensatedSum {
    #[inline]
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator of terms.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().collect::<CompensatedSum>().value()
}

/// Compensated `sum_i a[i] * b[i]`, accumulated in four interleaved lanes.
#[inline]
pub fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut lanes = [CompensatedSum::new(); 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for l in 0..4 {
            lanes[l].add(x[l] * y[l]);
        }
    }
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        lanes[0].add(x * y);
    }
    let [mut acc, b1, b2, b3] = lanes;
    acc.merge(&b1);
    acc.merge(&b2);
    acc.merge(&b3);
    acc.value()
}

/// Fixed-shape pairwise reduction.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    match values.len() {
        0 => 0.0,
        n if n <= LEAF => compensated_sum(values.iter().copied()),
        n => {
            let (left, right) = values.split_at(n / 2);
            pairwise_sum(left) + pairwise_sum(right)
        }
    }
}
