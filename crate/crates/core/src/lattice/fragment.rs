use serde::{Deserialize, Serialize};

use super::LatVec;
use crate::error::{Error, Result};

/// A sorted set of atom indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AtomSet(Vec<usize>);

impl AtomSet {
    pub fn new(mut atoms: Vec<usize>) -> Self {
        atoms.sort_unstable();
        atoms.dedup();
        AtomSet(atoms)
    }

    pub(crate) fn from_sorted(atoms: Vec<usize>) -> Self {
        debug_assert!(atoms.windows(2).all(|w| w[0] < w[1]));
        AtomSet(atoms)
    }

    /// The atoms `support[i]` for every bit `i` set in `bits`.
    pub fn from_bits(support: &[usize], bits: u64) -> Self {
        AtomSet(
            support
                .iter()
                .enumerate()
                .filter(|(i, _)| bits >> i & 1 == 1)
                .map(|(_, &a)| a)
                .collect(),
        )
    }

    /// Bit mask of this set relative to `support`, if it is contained in it.
    pub fn to_bits(&self, support: &[usize]) -> Option<u64> {
        let mut bits = 0u64;
        for a in &self.0 {
            let i = support.binary_search(a).ok()?;
            bits |= 1 << i;
        }
        Some(bits)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.0.binary_search(&atom).is_ok()
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.0.iter().all(|&a| other.contains(a))
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        self.0.iter().all(|&a| !other.contains(a))
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        AtomSet::new(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.iter().copied().filter(|&a| other.contains(a)).collect())
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.iter().copied().filter(|&a| !other.contains(a)).collect())
    }
}

impl FromIterator<usize> for AtomSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        AtomSet::new(iter.into_iter().collect())
    }
}

/// A fragment `y = x · 1_S` of a base vector `x`, with `S ⊆ supp(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    base: LatVec,
    mask: AtomSet,
}

impl Fragment {
    pub fn new(base: LatVec, mask: AtomSet) -> Result<Self> {
        if !mask.is_subset(&base.support()) {
            return Err(Error::contract(format!(
                "fragment mask {:?} is not contained in the support of the base",
                mask.as_slice()
            )));
        }
        Ok(Fragment { base, mask })
    }

    pub fn base(&self) -> &LatVec {
        &self.base
    }

    pub fn mask(&self) -> &AtomSet {
        &self.mask
    }

    pub fn value(&self) -> LatVec {
        self.base.restrict(&self.mask)
    }

    /// The mutually complemented fragment `x − y`.
    pub fn complement(&self) -> Fragment {
        Fragment {
            mask: self.base.support().difference(&self.mask),
            base: self.base.clone(),
        }
    }
}

/// `y ⊑ x`, decided order-theoretically as `|y| ∧ |x − y| = 0`.
pub fn is_fragment(y: &LatVec, x: &LatVec) -> Result<bool> {
    y.is_disjoint(&x.sub(y)?)
}

/// Every fragment of `x`, masks counted in binary over the support order.
pub fn enumerate_fragments(x: &LatVec, cap: usize) -> Result<Fragments> {
    let support = x.support().0;
    let cap = cap.min(63);
    if support.len() > cap {
        return Err(Error::CapExceeded {
            what: "fragment enumeration support",
            size: support.len(),
            cap,
        });
    }
    Ok(Fragments {
        base: x.clone(),
        end: 1u64 << support.len(),
        support,
        next: 0,
    })
}

/// Iterator over the `2^|supp x|` fragments of a vector.
pub struct Fragments {
    base: LatVec,
    support: Vec<usize>,
    next: u64,
    end: u64,
}

impl Fragments {
    pub fn support(&self) -> &[usize] {
        &self.support
    }
}

impl Iterator for Fragments {
    type Item = Fragment;

    fn next(&mut self) -> Option<Fragment> {
        if self.next >= self.end {
            return None;
        }
        let mask = AtomSet::from_bits(&self.support, self.next);
        self.next += 1;
        Some(Fragment {
            base: self.base.clone(),
            mask,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Fragments {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::MeasureSpace;
    use crate::rational::{qi, Q};

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(
            MeasureSpace::counting(c.len()),
            c.iter().map(|&a| qi(a)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn fragment_membership() {
        assert!(is_fragment(&v(&[1, 0]), &v(&[1, 5])).unwrap());
        assert!(!is_fragment(&v(&[1, 2]), &v(&[1, 5])).unwrap());
        let x = v(&[3, -1, 0, 2]);
        assert!(is_fragment(&x, &x).unwrap());
        assert!(is_fragment(&v(&[0, 0, 0, 0]), &x).unwrap());
    }

    #[test]
    fn powerset_order() {
        let got: Vec<LatVec> = enumerate_fragments(&v(&[1, 1]), 20)
            .unwrap()
            .map(|f| f.value())
            .collect();
        assert_eq!(got, vec![v(&[0, 0]), v(&[1, 0]), v(&[0, 1]), v(&[1, 1])]);
        let got: Vec<LatVec> = enumerate_fragments(&v(&[0, 7]), 20)
            .unwrap()
            .map(|f| f.value())
            .collect();
        assert_eq!(got, vec![v(&[0, 0]), v(&[0, 7])]);
    }

    #[test]
    fn cap_refusal_names_the_cap() {
        let x = LatVec::constant(&MeasureSpace::counting(5), Q::from_integer(1.into()));
        match enumerate_fragments(&x, 4) {
            Err(Error::CapExceeded { cap, size, .. }) => {
                assert_eq!((cap, size), (4, 5));
            }
            _ => panic!("expected a cap refusal"),
        }
    }

    #[test]
    fn mask_outside_support_is_rejected() {
        assert!(Fragment::new(v(&[1, 0]), AtomSet::new(vec![1])).is_err());
        let f = Fragment::new(v(&[1, 2, 3]), AtomSet::new(vec![0, 2])).unwrap();
        assert_eq!(f.value(), v(&[1, 0, 3]));
        assert_eq!(f.complement().value(), v(&[0, 2, 0]));
    }

    #[test]
    fn bits_round_trip() {
        let support = [1, 4, 6];
        let s = AtomSet::from_bits(&support, 0b101);
        assert_eq!(s.as_slice(), &[1, 6]);
        assert_eq!(s.to_bits(&support), Some(0b101));
        assert_eq!(AtomSet::new(vec![2]).to_bits(&support), None);
    }
}
