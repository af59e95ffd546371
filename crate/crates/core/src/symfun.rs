//! Elementary symmetric functions, deleted symmetric functions and power sums.

use serde::Serialize;
use thiserror::Error;

use crate::scalar::{lift_exact, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectrumError {
    #[error("spectrum must contain at least one value")]
    Empty,
    #[error("radical slot {slot} is out of range for a spectrum of length {len}")]
    RadicalOutOfRange { slot: usize, len: usize },
    #[error("radical slot {slot} holds {value}, expected 0")]
    RadicalNonzero { slot: usize, value: String },
}

/// Ordered eigenvalues of a shape operator, optionally marking the slot that
/// belongs to the radical direction (whose eigenvalue is 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum<S> {
    values: Vec<S>,
    radical_slot: Option<usize>,
}

impl<S: Scalar> Spectrum<S> {
    pub fn new(values: Vec<S>, radical_slot: Option<usize>) -> Result<Self, SpectrumError> {
        if values.is_empty() {
            return Err(SpectrumError::Empty);
        }
        if let Some(slot) = radical_slot {
            let value = values.get(slot).ok_or(SpectrumError::RadicalOutOfRange {
                slot,
                len: values.len(),
            })?;
            if !value.is_zero() {
                return Err(SpectrumError::RadicalNonzero {
                    slot,
                    value: value.to_string(),
                });
            }
        }
        Ok(Self {
            values,
            radical_slot,
        })
    }

    /// Spectrum without a radical slot.
    pub fn plain(values: Vec<S>) -> Result<Self, SpectrumError> {
        Self::new(values, None)
    }

    /// Prepends the radical eigenvalue 0 at slot 0 to the given screen values.
    pub fn with_radical_first(screen: Vec<S>) -> Self {
        let mut values = Vec::with_capacity(screen.len() + 1);
        values.push(S::zero());
        values.extend(screen);
        Self {
            values,
            radical_slot: Some(0),
        }
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn radical_slot(&self) -> Option<usize> {
        self.radical_slot
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices that are not the radical slot.
    pub fn screen_indices(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| Some(i) != self.radical_slot)
            .collect()
    }

    /// Values at the screen indices, in order.
    pub fn screen_values(&self) -> Vec<S> {
        self.screen_indices()
            .into_iter()
            .map(|i| self.values[i].clone())
            .collect()
    }
}

/// `σ_r` of `values`, by expanding `∏(1 + κ_i t)` one factor at a time.
pub fn sigma_of<S: Scalar>(values: &[S], r: usize) -> S {
    if r > values.len() {
        return S::zero();
    }
    let mut e = vec![S::zero(); r + 1];
    e[0] = S::one();
    for (count, v) in values.iter().enumerate() {
        for k in (1..=r.min(count + 1)).rev() {
            let term = e[k - 1].clone() * v.clone();
            e[k] = e[k].clone() + term;
        }
    }
    e[r].clone()
}

/// `σ_r` of the spectrum; 1 for `r = 0` and 0 for `r` beyond the length.
pub fn sigma<S: Scalar>(spectrum: &Spectrum<S>, r: usize) -> S {
    sigma_of(spectrum.values(), r)
}

/// Power sums `[p_1, ..., p_k]` with `p_j = Σ κ_i^j`.
pub fn power_sums<S: Scalar>(values: &[S], k: usize) -> Vec<S> {
    let mut sums = vec![S::zero(); k];
    for v in values {
        let mut pow = v.clone();
        for sum in sums.iter_mut() {
            *sum = sum.clone() + pow.clone();
            pow = pow * v.clone();
        }
    }
    sums
}

/// Elementary symmetric functions `[e_0, ..., e_k]` from power sums
/// `[p_1, ..., p_k]` via `k e_k = Σ_{i=1}^{k} (-1)^{i-1} e_{k-i} p_i`.
pub fn elementary_from_power_sums<S: Scalar>(power_sums: &[S]) -> Vec<S> {
    let k_max = power_sums.len();
    let mut e = Vec::with_capacity(k_max + 1);
    e.push(S::one());
    for k in 1..=k_max {
        let mut acc = S::zero();
        for i in 1..=k {
            let term = e[k - i].clone() * power_sums[i - 1].clone();
            acc = if i % 2 == 1 { acc + term } else { acc - term };
        }
        e.push(acc / S::from_i64(k as i64));
    }
    e
}

/// `[σ_0, ..., σ_len]` in O(len²) operations through the power-sum recurrence.
/// Float spectra are evaluated exactly and rounded once.
pub fn sigma_all_fast<S: Scalar>(spectrum: &Spectrum<S>) -> Vec<S> {
    let values = spectrum.values();
    lift_exact(
        values,
        |q| elementary_from_power_sums(&power_sums(q, q.len())),
        || elementary_from_power_sums(&power_sums(values, values.len())),
    )
}

/// `σ_r` of the spectrum with entry `beta` removed.
///
/// # Panics
/// Panics when `beta` is out of range.
pub fn sigma_deleted<S: Scalar>(spectrum: &Spectrum<S>, r: usize, beta: usize) -> S {
    sigma_deleted_of(spectrum.values(), r, beta)
}

/// Slice form of [`sigma_deleted`].
pub fn sigma_deleted_of<S: Scalar>(values: &[S], r: usize, beta: usize) -> S {
    assert!(
        beta < values.len(),
        "deleted index {beta} out of range for length {}",
        values.len()
    );
    let rest: Vec<S> = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != beta)
        .map(|(_, v)| v.clone())
        .collect();
    sigma_of(&rest, r)
}

/// `Σ_i κ_i² σ_{r-1}(κ without i)` over the given values.
pub fn squared_deleted_sum<S: Scalar>(values: &[S], r: usize) -> S {
    assert!(r >= 1, "order must be at least 1");
    (0..values.len()).fold(S::zero(), |acc, i| {
        let k = values[i].clone();
        acc + k.clone() * k * sigma_deleted_of(values, r - 1, i)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_i64(x)).collect()
    }

    #[test]
    fn conformal_example_spectrum() {
        let s = Spectrum::new(ints(&[0, 1, 1, 1, 0, 0, 0]), Some(0)).unwrap();
        assert_eq!(sigma(&s, 2), Rational::from_i64(3));
        assert_eq!(sigma_all_fast(&s), ints(&[1, 3, 3, 1, 0, 0, 0, 0]));
        assert_eq!(sigma_deleted(&s, 2, 1), Rational::from_i64(1));
        assert_eq!(sigma(&s, 9), Rational::from_i64(0));
    }

    #[test]
    fn single_value() {
        let s = Spectrum::plain(vec![Rational::from_ratio(-2, 3)]).unwrap();
        assert_eq!(
            sigma_all_fast(&s),
            vec![Rational::from_i64(1), Rational::from_ratio(-2, 3)]
        );
    }

    #[test]
    fn invalid_spectra_are_rejected() {
        assert_eq!(
            Spectrum::<f64>::plain(vec![]).unwrap_err(),
            SpectrumError::Empty
        );
        assert!(matches!(
            Spectrum::new(vec![1.0, 0.0], Some(0)),
            Err(SpectrumError::RadicalNonzero { slot: 0, .. })
        ));
        assert!(matches!(
            Spectrum::new(vec![0.0], Some(3)),
            Err(SpectrumError::RadicalOutOfRange { .. })
        ));
    }

    #[test]
    fn screen_values_skip_radical() {
        let s = Spectrum::with_radical_first(ints(&[4, 5]));
        assert_eq!(s.screen_indices(), vec![1, 2]);
        assert_eq!(s.screen_values(), ints(&[4, 5]));
    }
}
