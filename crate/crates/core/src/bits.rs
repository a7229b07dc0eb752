/// Square boolean matrix stored as packed rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            data: vec![0; n * words],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        self.data[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }
}

/// Growable bit set used by the relation-composition refuter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    data: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet {
            data: vec![0; n.div_ceil(64).max(1)],
        }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.data[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        (self.data[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn union_with(&mut self, words: &[u64]) {
        for (a, b) in self.data.iter_mut().zip(words) {
            *a |= *b;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.data
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.data.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_rows_do_not_bleed() {
        let mut m = BitMatrix::new(130);
        m.set(1, 129);
        m.set(2, 0);
        assert!(m.get(1, 129));
        assert!(!m.get(1, 0));
        assert!(m.get(2, 0));
        assert!(!m.get(2, 129));
    }

    #[test]
    fn bitset_iterates_in_order() {
        let mut s = BitSet::new(200);
        for i in [3, 64, 65, 199] {
            s.insert(i);
        }
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 64, 65, 199]);
    }
}
