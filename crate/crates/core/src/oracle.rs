//! Plain, irreversible reference searches used as ground truth.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("keys are not strictly increasing at index {at}")]
pub struct UnsortedInput {
    pub at: usize,
}

/// Answers of a linear search for one key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearAnswer {
    pub first: Option<usize>,
    pub count: usize,
    pub found: bool,
}

pub fn linear_oracle(keys: &[i64], k: i64) -> LinearAnswer {
    let first = keys.iter().position(|&x| x == k);
    let count = keys.iter().filter(|&&x| x == k).count();
    LinearAnswer {
        first,
        count,
        found: first.is_some(),
    }
}

pub fn binary_oracle(sorted: &[i64], k: i64) -> Result<Option<usize>, UnsortedInput> {
    if let Some(at) = sorted.windows(2).position(|w| w[0] >= w[1]) {
        return Err(UnsortedInput { at: at + 1 });
    }
    Ok(sorted.binary_search(&k).ok())
}

/// Smallest `v >= 0` with `2^v >= n`.
pub fn ceil_log2(n: i64) -> i64 {
    let mut v = 0;
    while v < 63 && (1i64 << v) < n {
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_examples() {
        assert_eq!(
            linear_oracle(&[7, 3, 9], 3),
            LinearAnswer { first: Some(1), count: 1, found: true }
        );
        assert_eq!(
            linear_oracle(&[], 1),
            LinearAnswer { first: None, count: 0, found: false }
        );
        assert_eq!(
            linear_oracle(&[3, 3, 9], 3),
            LinearAnswer { first: Some(0), count: 2, found: true }
        );
    }

    #[test]
    fn binary_examples() {
        assert_eq!(binary_oracle(&[2, 3, 5, 7, 11], 7), Ok(Some(3)));
        assert_eq!(binary_oracle(&[9], 2), Ok(None));
        assert_eq!(binary_oracle(&[], 2), Ok(None));
        assert_eq!(binary_oracle(&[1, 3, 3], 3), Err(UnsortedInput { at: 2 }));
    }

    #[test]
    fn binary_matches_linear_on_sorted_input() {
        let keys: Vec<i64> = (0..20).map(|i| i * 3 + 1).collect();
        for k in -1..62 {
            assert_eq!(binary_oracle(&keys, k).unwrap(), linear_oracle(&keys, k).first);
        }
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<i64> = [-3, 0, 1, 2, 3, 4, 5, 8, 9, 512, 513].iter().map(|&n| ceil_log2(n)).collect();
        assert_eq!(got, vec![0, 0, 0, 1, 2, 2, 3, 3, 4, 9, 10]);
    }
}
