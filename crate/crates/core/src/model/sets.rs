use core::fmt;

macro_rules! type_set {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(u64);

        impl $name {
            pub const EMPTY: Self = Self(0);

            /// The set `{0, 1, .., n-1}`.
            pub fn full(n: usize) -> Self {
                debug_assert!(n <= 64);
                if n >= 64 {
                    Self(u64::MAX)
                } else {
                    Self((1u64 << n) - 1)
                }
            }

            pub const fn from_bits(bits: u64) -> Self {
                Self(bits)
            }

            pub fn singleton(index: usize) -> Self {
                Self(1u64 << index)
            }

            pub const fn bits(self) -> u64 {
                self.0
            }

            #[inline]
            pub fn contains(self, index: usize) -> bool {
                index < 64 && self.0 & (1u64 << index) != 0
            }

            #[inline]
            pub fn insert(&mut self, index: usize) {
                self.0 |= 1u64 << index;
            }

            #[inline]
            pub fn remove(&mut self, index: usize) {
                self.0 &= !(1u64 << index);
            }

            #[inline]
            pub fn union(self, other: Self) -> Self {
                Self(self.0 | other.0)
            }

            #[inline]
            pub fn intersection(self, other: Self) -> Self {
                Self(self.0 & other.0)
            }

            #[inline]
            pub fn difference(self, other: Self) -> Self {
                Self(self.0 & !other.0)
            }

            /// Complement relative to `{0, .., n-1}`.
            pub fn complement(self, n: usize) -> Self {
                Self(!self.0 & Self::full(n).0)
            }

            #[inline]
            pub fn is_empty(self) -> bool {
                self.0 == 0
            }

            #[inline]
            pub fn len(self) -> usize {
                self.0.count_ones() as usize
            }

            pub fn is_subset(self, other: Self) -> bool {
                self.0 & !other.0 == 0
            }

            /// Members in increasing index order.
            pub fn iter(self) -> SetIter {
                SetIter(self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_set().entries(self.iter()).finish()
            }
        }

        impl FromIterator<usize> for $name {
            fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
                let mut set = Self::EMPTY;
                for i in iter {
                    set.insert(i);
                }
                set
            }
        }

        impl IntoIterator for $name {
            type Item = usize;
            type IntoIter = SetIter;

            fn into_iter(self) -> SetIter {
                self.iter()
            }
        }
    };
}

type_set!(
    /// A subset of agent types, by declared index.
    AgentSet
);
type_set!(
    /// A subset of good types, by declared index.
    GoodSet
);

pub struct SetIter(u64);

impl Iterator for SetIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SetIter {}

/// Nonempty subsets of `{0, .., n-1}` by increasing cardinality, then in
/// lexicographic order of their sorted index lists.
pub struct SubsetsByCardinality {
    n: usize,
    current: [u8; 64],
    k: usize,
    done: bool,
}

impl SubsetsByCardinality {
    pub fn new(n: usize) -> Self {
        assert!(n <= 64, "at most 64 types");
        let mut current = [0u8; 64];
        current[0] = 0;
        Self {
            n,
            current,
            k: 1,
            done: n == 0,
        }
    }

    fn advance(&mut self) {
        let (n, k) = (self.n, self.k);
        // rightmost position that can still move right
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if (self.current[pos] as usize) < n - k + pos {
                self.current[pos] += 1;
                for q in pos + 1..k {
                    self.current[q] = self.current[q - 1] + 1;
                }
                return;
            }
        }
        self.k += 1;
        if self.k > n {
            self.done = true;
            return;
        }
        for q in 0..self.k {
            self.current[q] = q as u8;
        }
    }
}

impl Iterator for SubsetsByCardinality {
    type Item = AgentSet;

    fn next(&mut self) -> Option<AgentSet> {
        if self.done {
            return None;
        }
        let set = self.current[..self.k]
            .iter()
            .map(|&i| i as usize)
            .collect::<AgentSet>();
        self.advance();
        Some(set)
    }
}
