use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exponent vector `I = (i₁, …, i_N)` of the monomial `x^I`.
///
/// Ordered graded-lexicographically: by total degree first, then with larger
/// leading exponents first, so degree 2 runs `x², xy, xz, y², yz, z²`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex<const N: usize>(pub [u32; N]);

pub type MultiIndex3 = MultiIndex<3>;
pub type MultiIndex2 = MultiIndex<2>;

impl<const N: usize> MultiIndex<N> {
    pub const fn new(exponents: [u32; N]) -> Self {
        Self(exponents)
    }

    pub const fn zero() -> Self {
        Self([0; N])
    }

    /// The unit vector `e_var`.
    pub fn unit(var: usize) -> Self {
        let mut e = [0; N];
        e[var] = 1;
        Self(e)
    }

    /// `|I| = i₁ + … + i_N`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// True iff at most one exponent is nonzero, i.e. `x^I` lies on the union
    /// of coordinate axes `C_N`.
    pub fn on_axes(&self) -> bool {
        self.0.iter().filter(|&&e| e != 0).count() <= 1
    }

    pub fn get(&self, var: usize) -> u32 {
        self.0[var]
    }

    pub fn exponents(&self) -> [u32; N] {
        self.0
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        let mut out = [0u32; N];
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = self.0[j].checked_add(other.0[j])?;
        }
        Some(Self(out))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("exponent overflow")
    }

    /// `self − other` if `x^other` divides `x^self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = [0u32; N];
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = self.0[j].checked_sub(other.0[j])?;
        }
        Some(Self(out))
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// Componentwise minimum (exponent of the monomial gcd).
    pub fn meet(&self, other: &Self) -> Self {
        let mut out = self.0;
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = (*slot).min(other.0[j]);
        }
        Self(out)
    }

    /// Signed dot product with an integer weight vector.
    pub fn dot(&self, weights: &[i64; N]) -> i64 {
        self.0.iter().zip(weights.iter()).map(|(&e, &w)| e as i64 * w).sum()
    }

    /// All indices of total degree exactly `d`, in ascending order.
    pub fn of_degree(d: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = [0u32; N];
        fill::<N>(&mut out, &mut cur, 0, d);
        out.sort();
        out
    }

    /// All indices with total degree `≤ d`, in ascending order.
    pub fn up_to_degree(d: u32) -> Vec<Self> {
        (0..=d).flat_map(Self::of_degree).collect()
    }
}

fn fill<const N: usize>(out: &mut Vec<MultiIndex<N>>, cur: &mut [u32; N], pos: usize, remaining: u32) {
    if N == 0 {
        return;
    }
    if pos == N - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(*cur));
        return;
    }
    for e in 0..=remaining {
        cur[pos] = e;
        fill(out, cur, pos + 1, remaining - e);
    }
}

impl<const N: usize> Ord for MultiIndex<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl<const N: usize> PartialOrd for MultiIndex<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const N: usize> fmt::Debug for MultiIndex<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, e) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl<const N: usize> fmt::Display for MultiIndex<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<const N: usize> Serialize for MultiIndex<N> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de, const N: usize> Deserialize<'de> for MultiIndex<N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        let arr: [u32; N] = v
            .try_into()
            .map_err(|v: Vec<u32>| serde::de::Error::invalid_length(v.len(), &"one exponent per variable"))?;
        Ok(Self(arr))
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex<N> {
    fn from(e: [u32; N]) -> Self {
        Self(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let deg2 = MultiIndex3::of_degree(2);
        let expected: Vec<MultiIndex3> =
            [[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]].into_iter().map(MultiIndex).collect();
        assert_eq!(deg2, expected);
        assert!(MultiIndex3::new([0, 0, 5]) > MultiIndex3::new([4, 0, 0]));
    }

    #[test]
    fn axes_membership() {
        assert!(MultiIndex3::new([0, 0, 0]).on_axes());
        assert!(MultiIndex3::new([0, 7, 0]).on_axes());
        assert!(!MultiIndex3::new([1, 0, 1]).on_axes());
    }

    #[test]
    fn counts_up_to_degree() {
        // C(d+3, 3) monomials in three variables.
        assert_eq!(MultiIndex3::up_to_degree(4).len(), 35);
        assert_eq!(MultiIndex2::up_to_degree(4).len(), 15);
    }
}
