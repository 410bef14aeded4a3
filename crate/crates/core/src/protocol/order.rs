use rand::seq::SliceRandom;
use rand::Rng;

/// A transmission-order scramble. `forward[j]` is the original index of the
/// item sent in slot `j`, so applying to `items` yields
/// `out[j] = items[forward[j]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderPermutation {
    forward: Vec<usize>,
}

impl OrderPermutation {
    pub fn identity(len: usize) -> Self {
        Self {
            forward: (0..len).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut forward: Vec<usize> = (0..len).collect();
        forward.shuffle(rng);
        Self { forward }
    }

    /// Builds from an explicit forward map; panics unless it is a
    /// permutation of 0..len.
    pub fn from_forward(forward: Vec<usize>) -> Self {
        let mut seen = vec![false; forward.len()];
        for &i in &forward {
            assert!(i < forward.len() && !seen[i], "not a permutation: {forward:?}");
            seen[i] = true;
        }
        Self { forward }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn apply<T>(&self, items: Vec<T>) -> Vec<T> {
        assert_eq!(items.len(), self.forward.len());
        let mut slots: Vec<Option<T>> = items.into_iter().map(Some).collect();
        self.forward
            .iter()
            .map(|&i| slots[i].take().expect("permutation visits each index once"))
            .collect()
    }

    /// The permutation that undoes this one: `p.inverse().apply(p.apply(v))
    /// == v`.
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.forward.len()];
        for (j, &i) in self.forward.iter().enumerate() {
            inv[i] = j;
        }
        Self { forward: inv }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_item_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = OrderPermutation::random(1, &mut rng);
        assert_eq!(p.forward(), &[0]);
        assert_eq!(p.apply(vec!["x"]), vec!["x"]);
    }

    #[test]
    fn same_seed_same_permutation() {
        let a = OrderPermutation::random(20, &mut ChaCha8Rng::seed_from_u64(9));
        let b = OrderPermutation::random(20, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn inverse_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for len in [1usize, 2, 5, 16] {
            let p = OrderPermutation::random(len, &mut rng);
            let items: Vec<usize> = (0..len).collect();
            let restored = p.inverse().apply(p.apply(items.clone()));
            assert_eq!(restored, items);
        }
    }

    #[test]
    fn forward_semantics() {
        let p = OrderPermutation::from_forward(vec![2, 0, 1]);
        assert_eq!(p.apply(vec!['a', 'b', 'c']), vec!['c', 'a', 'b']);
    }
}
