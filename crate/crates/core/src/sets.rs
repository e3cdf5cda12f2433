use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A subset of senders `{0, .., K-1}` stored as a bitmask.
///
/// Displayed and serialized with 1-based indices, matching the way demand
/// sets are written in network descriptions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SenderSet(u32);

/// Largest sender count supported by the bitmask representation.
pub const MAX_SENDERS: usize = 20;

impl SenderSet {
    pub const EMPTY: SenderSet = SenderSet(0);

    pub fn from_bits(bits: u32) -> Self {
        SenderSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// All senders `{0, .., k-1}`.
    pub fn full(k: usize) -> Self {
        assert!(k <= MAX_SENDERS);
        SenderSet(((1u64 << k) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        SenderSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        SenderSet(it.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        SenderSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SenderSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SenderSet(self.0 & !other.0)
    }

    pub fn complement(self, k: usize) -> Self {
        SenderSet::full(k).difference(self)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Member indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    /// Every subset of `self`, including the empty set and `self`, in
    /// increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = SenderSet> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(SenderSet(cur))
        })
    }

    /// Nonempty subsets of `self`.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = SenderSet> {
        self.subsets().filter(|s| !s.is_empty())
    }

    /// Supersets of `self` within `{0, .., k-1}`.
    pub fn supersets(self, k: usize) -> impl Iterator<Item = SenderSet> {
        let base = self;
        self.complement(k).subsets().map(move |extra| base.union(extra))
    }

    /// Sum of `rates` over members.
    pub fn sum(self, rates: &[f64]) -> f64 {
        self.iter().map(|i| rates[i]).sum()
    }

    /// Members sorted lexicographically by their index lists, which is the
    /// order used when reporting the first violated constraint.
    pub fn lex_key(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for SenderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SenderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SenderSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let one_based: Vec<usize> = self.iter().map(|i| i + 1).collect();
        one_based.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SenderSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        let mut bits = 0u32;
        for i in v {
            if i == 0 || i > MAX_SENDERS {
                return Err(serde::de::Error::custom(format!(
                    "sender index {i} out of range 1..={MAX_SENDERS}"
                )));
            }
            bits |= 1 << (i - 1);
        }
        Ok(SenderSet(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_power_set() {
        let s = SenderSet::from_indices([0, 2, 3]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|t| t.is_subset(s)));
        assert_eq!(subs[0], SenderSet::EMPTY);
        assert_eq!(*subs.last().unwrap(), s);
        assert_eq!(SenderSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn supersets_within_k() {
        let d = SenderSet::singleton(0);
        let sup: Vec<_> = d.supersets(3).collect();
        assert_eq!(sup.len(), 4);
        assert!(sup.iter().all(|s| d.is_subset(*s)));
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(SenderSet::from_indices([0, 2]).to_string(), "{1,3}");
        assert_eq!(SenderSet::EMPTY.to_string(), "{}");
    }

    #[test]
    fn serde_round_trip() {
        let s = SenderSet::from_indices([1, 3]);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, "[2,4]");
        let back: SenderSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SenderSet>("[0]").is_err());
    }
}
