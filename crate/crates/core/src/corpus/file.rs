use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// How a file of keys is laid out in arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    /// `r[0..n)` holds the keys and `r[n]` is a sentinel equal to the key
    /// searched for.
    ArrayWithSentinel,
    /// Parallel `head`/`next`/`prev` arrays of length `n + 1`; record 0 is
    /// the first, record `n` is the sentinel, -1 is null.
    Dlist,
    /// As `Dlist` without `prev`.
    List,
    /// Strictly increasing keys, no sentinel.
    SortedArray,
    /// Only the length `n` matters.
    Size,
}

impl Representation {
    pub const ALL: [Representation; 5] = [
        Representation::ArrayWithSentinel,
        Representation::Dlist,
        Representation::List,
        Representation::SortedArray,
        Representation::Size,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::ArrayWithSentinel => "array-with-sentinel",
            Representation::Dlist => "dlist",
            Representation::List => "list",
            Representation::SortedArray => "sorted-array",
            Representation::Size => "size",
        }
    }

    /// Smallest file the corpus programs accept in this layout.
    pub fn min_len(self) -> usize {
        match self {
            Representation::SortedArray | Representation::Size => 1,
            _ => 0,
        }
    }

    pub fn needs_sorted(self) -> bool {
        self == Representation::SortedArray
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Representation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown representation `{s}`"))
    }
}

/// A file of keys plus the key to look for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileSpec {
    pub representation: Representation,
    pub keys: Vec<i64>,
    pub sorted: bool,
    pub key: i64,
}

impl FileSpec {
    pub fn new(representation: Representation, keys: Vec<i64>, key: i64) -> Self {
        let sorted = keys.windows(2).all(|w| w[0] < w[1]);
        FileSpec {
            representation,
            keys,
            sorted,
            key,
        }
    }

    pub fn n(&self) -> usize {
        self.keys.len()
    }

    /// `r`: keys followed by the sentinel.
    pub fn with_sentinel(&self) -> Vec<i64> {
        let mut r = self.keys.clone();
        r.push(self.key);
        r
    }

    pub fn next(&self) -> Vec<i64> {
        let n = self.n() as i64;
        (0..=n).map(|i| if i < n { i + 1 } else { -1 }).collect()
    }

    pub fn prev(&self) -> Vec<i64> {
        (0..=self.n() as i64).map(|i| i - 1).collect()
    }

    /// The named array of this layout, if it has one. `keys` is the key
    /// array itself: with its sentinel for the array layout, plain for the
    /// sorted layout.
    pub fn array(&self, name: &str) -> Option<Vec<i64>> {
        use Representation::*;
        match (self.representation, name) {
            (ArrayWithSentinel, "keys") => Some(self.with_sentinel()),
            (SortedArray, "keys") => Some(self.keys.clone()),
            (Dlist | List, "head") => Some(self.with_sentinel()),
            (Dlist | List, "next") => Some(self.next()),
            (Dlist, "prev") => Some(self.prev()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinel_array() {
        let f = FileSpec::new(Representation::ArrayWithSentinel, vec![7, 3, 9], 3);
        assert_eq!(f.array("keys"), Some(vec![7, 3, 9, 3]));
        assert_eq!(f.array("next"), None);
        assert!(!f.sorted);
    }

    #[test]
    fn dlist_layout() {
        let f = FileSpec::new(Representation::Dlist, vec![7, 3, 9], 4);
        assert_eq!(f.array("head"), Some(vec![7, 3, 9, 4]));
        assert_eq!(f.array("next"), Some(vec![1, 2, 3, -1]));
        assert_eq!(f.array("prev"), Some(vec![-1, 0, 1, 2]));
    }

    #[test]
    fn empty_list_is_only_the_sentinel() {
        let f = FileSpec::new(Representation::List, vec![], 1);
        assert_eq!(f.array("head"), Some(vec![1]));
        assert_eq!(f.array("next"), Some(vec![-1]));
        assert_eq!(f.array("prev"), None);
    }

    #[test]
    fn representation_names_round_trip() {
        for r in Representation::ALL {
            assert_eq!(r.name().parse::<Representation>(), Ok(r));
        }
    }
}
