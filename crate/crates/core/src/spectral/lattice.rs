use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// A nonzero integer wave vector `k ∈ Z³ \ {0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveIndex([i32; 3]);

impl WaveIndex {
    /// Returns `None` for the zero vector, which carries the (excluded) spatial mean.
    pub fn new(k: [i32; 3]) -> Option<Self> {
        (k != [0, 0, 0]).then_some(WaveIndex(k))
    }

    #[inline]
    pub fn components(self) -> [i32; 3] {
        self.0
    }

    /// `|k|²` as an exact integer.
    #[inline]
    pub fn norm_sq(self) -> i64 {
        self.0.iter().map(|&c| (c as i64) * (c as i64)).sum()
    }

    #[inline]
    pub fn neg(self) -> Self {
        WaveIndex([-self.0[0], -self.0[1], -self.0[2]])
    }

    /// Largest `|k_i|`; the mode lies in the cube of truncation `n` iff this is `≤ n`.
    #[inline]
    pub fn sup_norm(self) -> usize {
        self.0.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Whether `k` is the stored member of its `±k` pair:
    /// `k₃ > 0`, or `k₃ = 0 ∧ k₂ > 0`, or `k₂ = k₃ = 0 ∧ k₁ > 0`.
    #[inline]
    pub fn is_representative(self) -> bool {
        let [a, b, c] = self.0;
        c > 0 || (c == 0 && (b > 0 || (b == 0 && a > 0)))
    }
}

impl fmt::Display for WaveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Location of a wave vector in half-lattice storage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// Stored directly at this index.
    Direct(usize),
    /// The negated vector is stored at this index; the coefficient is its conjugate.
    Conjugate(usize),
}

/// The half-lattice of representatives of the cube `|k_i| ≤ n`, in lexicographic order.
#[derive(Debug)]
pub struct Lattice {
    n: usize,
    modes: Vec<WaveIndex>,
    norm_sq: Vec<i64>,
    lookup: Vec<Option<Slot>>,
}

impl Lattice {
    fn build(n: usize) -> Self {
        let ni = n as i32;
        let side = 2 * n + 1;
        let mut modes = Vec::with_capacity((side * side * side - 1) / 2);
        for a in -ni..=ni {
            for b in -ni..=ni {
                for c in -ni..=ni {
                    if let Some(k) = WaveIndex::new([a, b, c]) {
                        if k.is_representative() {
                            modes.push(k);
                        }
                    }
                }
            }
        }
        let mut lookup = vec![None; side * side * side];
        let offset = |k: WaveIndex| {
            let [a, b, c] = k.components();
            let s = side as i64;
            let n = n as i64;
            (((a as i64 + n) * s + (b as i64 + n)) * s + (c as i64 + n)) as usize
        };
        for (i, &k) in modes.iter().enumerate() {
            lookup[offset(k)] = Some(Slot::Direct(i));
            lookup[offset(k.neg())] = Some(Slot::Conjugate(i));
        }
        let norm_sq = modes.iter().map(|k| k.norm_sq()).collect();
        Lattice {
            n,
            modes,
            norm_sq,
            lookup,
        }
    }

    /// Shared lattice for truncation `n`; lattices are immutable and cached process-wide.
    pub fn shared(n: usize) -> Arc<Lattice> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Lattice>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("lattice cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(Lattice::build(n)))
            .clone()
    }

    #[inline]
    pub fn truncation(&self) -> usize {
        self.n
    }

    /// Number of stored representatives, `((2n+1)³ − 1) / 2`.
    #[inline]
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    #[inline]
    pub fn modes(&self) -> &[WaveIndex] {
        &self.modes
    }

    #[inline]
    pub fn norm_sq(&self) -> &[i64] {
        &self.norm_sq
    }

    pub fn slot(&self, k: WaveIndex) -> Option<Slot> {
        if k.sup_norm() > self.n {
            return None;
        }
        let [a, b, c] = k.components();
        let s = (2 * self.n + 1) as i64;
        let n = self.n as i64;
        let off = ((a as i64 + n) * s + (b as i64 + n)) * s + (c as i64 + n);
        self.lookup[off as usize]
    }

    pub fn index_of(&self, k: WaveIndex) -> Option<usize> {
        match self.slot(k) {
            Some(Slot::Direct(i)) => Some(i),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vector_is_rejected() {
        assert!(WaveIndex::new([0, 0, 0]).is_none());
    }

    #[test]
    fn exactly_one_of_each_pair_is_stored() {
        for n in 1..=4 {
            let lat = Lattice::shared(n);
            let side = 2 * n + 1;
            assert_eq!(lat.len(), (side * side * side - 1) / 2);
            for &k in lat.modes() {
                assert!(k.is_representative());
                assert!(!k.neg().is_representative());
                let i = lat.index_of(k).unwrap();
                assert_eq!(lat.slot(k.neg()), Some(Slot::Conjugate(i)));
            }
        }
    }

    #[test]
    fn modes_are_lexicographic() {
        let lat = Lattice::shared(3);
        assert!(lat.modes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn out_of_cube_has_no_slot() {
        let lat = Lattice::shared(2);
        assert_eq!(lat.slot(WaveIndex::new([3, 0, 0]).unwrap()), None);
    }
}
