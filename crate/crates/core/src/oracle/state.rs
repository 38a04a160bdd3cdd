/// Fixed-width bitset over a task's atom indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    words: Box<[u64]>,
}

impl State {
    pub fn empty(width: usize) -> State {
        State {
            words: vec![0; width.div_ceil(64)].into_boxed_slice(),
        }
    }

    #[inline]
    pub fn contains(&self, atom: usize) -> bool {
        self.words[atom / 64] & (1 << (atom % 64)) != 0
    }

    #[inline]
    pub fn insert(&mut self, atom: usize) {
        self.words[atom / 64] |= 1 << (atom % 64);
    }

    #[inline]
    pub fn remove(&mut self, atom: usize) {
        self.words[atom / 64] &= !(1 << (atom % 64));
    }

    /// Indices of set atoms, ascending.
    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64)
                .filter(move |b| bits & (1 << b) != 0)
                .map(move |b| w * 64 + b)
        })
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}
