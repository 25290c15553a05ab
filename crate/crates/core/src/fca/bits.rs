//! Fixed-width bitset used for context rows/columns, extents and intents.

/// A fixed-length set of bit positions backed by 64-bit words. Bits past
/// `len` are kept zero so whole-word comparisons stay valid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut bits = Bits {
            len,
            words: vec![u64::MAX; len.div_ceil(64)],
        };
        bits.mask_tail();
        bits
    }

    fn mask_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        if self.len == 0 {
            self.words.clear();
        }
    }

    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        self.words[index / 64] & (1 << (index % 64)) != 0
    }

    pub fn set(&mut self, index: usize) {
        debug_assert!(index < self.len);
        self.words[index / 64] |= 1 << (index % 64);
    }

    pub fn clear(&mut self, index: usize) {
        debug_assert!(index < self.len);
        self.words[index / 64] &= !(1 << (index % 64));
    }

    pub fn and_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (word, &mask) in self.words.iter_mut().zip(&other.words) {
            *word &= mask;
        }
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &Bits) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    /// True when both sets agree on every position strictly below `upto`.
    pub fn prefix_matches(&self, other: &Bits, upto: usize) -> bool {
        debug_assert_eq!(self.len, other.len);
        let full_words = upto / 64;
        for i in 0..full_words {
            if self.words[i] != other.words[i] {
                return false;
            }
        }
        let tail = upto % 64;
        if tail != 0 {
            let mask = (1u64 << tail) - 1;
            if self.words[full_words] & mask != other.words[full_words] & mask {
                return false;
            }
        }
        true
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = Bits::new(len);
        for index in indices {
            bits.set(index);
        }
        bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_operations() {
        let mut bits = Bits::new(130);
        bits.set(0);
        bits.set(64);
        bits.set(129);
        assert!(bits.get(0) && bits.get(64) && bits.get(129));
        assert!(!bits.get(1));
        assert_eq!(bits.count_ones(), 3);
        assert_eq!(bits.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        bits.clear(64);
        assert_eq!(bits.count_ones(), 2);
    }

    #[test]
    fn full_masks_tail_bits() {
        let bits = Bits::full(70);
        assert_eq!(bits.count_ones(), 70);
        assert!(bits.get(69));
    }

    #[test]
    fn subset_and_prefix() {
        let a = Bits::from_indices(10, [1, 3]);
        let b = Bits::from_indices(10, [1, 3, 7]);
        assert!(a.is_subset(&b));
        assert!(a.is_strict_subset(&b));
        assert!(!b.is_subset(&a));
        assert!(a.prefix_matches(&b, 7));
        assert!(!a.prefix_matches(&b, 8));
    }

    #[test]
    fn intersection() {
        let mut a = Bits::from_indices(8, [0, 2, 4, 6]);
        let b = Bits::from_indices(8, [2, 3, 4]);
        a.and_assign(&b);
        assert_eq!(a.ones().collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn zero_length_set() {
        let bits = Bits::full(0);
        assert_eq!(bits.count_ones(), 0);
        assert!(bits.is_subset(&Bits::new(0)));
    }
}
