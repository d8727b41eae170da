//! Fixed-length bitsets with word-level shifts and rotations.
//!
//! Progression counting reduces to intersecting a set with shifted or
//! rotated copies of itself and taking popcounts, so the shift primitives
//! here are the inner loop of the whole counting layer. Bits beyond `len`
//! in the last word are kept zero as an invariant.

/// A fixed-length set of bits, index range `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    /// An empty set on `0..len`.
    pub fn new(len: usize) -> Self {
        BitSet { len, words: vec![0; len.div_ceil(64)] }
    }

    /// Builds a set from member indices. Panics on out-of-range indices.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut s = BitSet::new(len);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    /// Number of addressable indices (not the popcount).
    pub fn len(&self) -> usize {
        self.len
    }

    /// True when `len == 0`.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Adds index `i` to the set.
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    /// Removes index `i` from the set.
    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    /// Membership test.
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of members.
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// In-place intersection with another set of the same length.
    pub fn and_assign(&mut self, other: &BitSet) {
        assert_eq!(self.len, other.len, "bitset length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// In-place union with another set of the same length.
    pub fn or_assign(&mut self, other: &BitSet) {
        assert_eq!(self.len, other.len, "bitset length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// The set `{i : i + t ∈ self}`: every member moves down by `t`,
    /// members below `t` fall off. `t ≥ len` yields the empty set.
    pub fn shift_down(&self, t: usize) -> BitSet {
        let mut out = BitSet::new(self.len);
        if t >= self.len {
            return out;
        }
        let (q, r) = (t / 64, (t % 64) as u32);
        let n = self.words.len();
        for w in 0..n {
            let lo = if w + q < n { self.words[w + q] } else { 0 };
            out.words[w] = if r == 0 {
                lo
            } else {
                let hi = if w + q + 1 < n { self.words[w + q + 1] } else { 0 };
                (lo >> r) | (hi << (64 - r))
            };
        }
        out.mask_tail();
        out
    }

    /// The set `{i : i − t ∈ self}`: every member moves up by `t`, members
    /// pushed past `len − 1` fall off. `t ≥ len` yields the empty set.
    pub fn shift_up(&self, t: usize) -> BitSet {
        let mut out = BitSet::new(self.len);
        if t >= self.len {
            return out;
        }
        let (q, r) = (t / 64, (t % 64) as u32);
        let n = self.words.len();
        for w in (0..n).rev() {
            if w < q {
                break;
            }
            let lo = self.words[w - q];
            out.words[w] = if r == 0 {
                lo
            } else {
                let hi = if w >= q + 1 { self.words[w - q - 1] } else { 0 };
                (lo << r) | (hi >> (64 - r))
            };
        }
        out.mask_tail();
        out
    }

    /// The set `{i : (i + t) mod len ∈ self}`: a cyclic shift down by `t`.
    pub fn rotate_down(&self, t: usize) -> BitSet {
        if self.len == 0 {
            return self.clone();
        }
        let t = t % self.len;
        if t == 0 {
            return self.clone();
        }
        let mut out = self.shift_down(t);
        out.or_assign(&self.shift_up(self.len - t));
        out
    }

    /// Iterates member indices in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }

    /// Clears any bits at indices ≥ `len` in the last word.
    fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}
