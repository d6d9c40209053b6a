//! Bit-packed linear algebra over GF(2).
//!
//! Every ring here is a GF(2)-vector space and the adjoint map is additive, so
//! the self-adjoint operators form the kernel of the GF(2)-linear map
//! `A ↦ A + A†`. This module supplies the kernel computation.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        let w = &mut self.words[i / 64];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }
}

/// Basis of the null space of the `rows x cols` matrix whose rows are given.
/// Each basis vector has length `cols`.
pub fn kernel_basis(rows: &[BitVec], cols: usize) -> Vec<BitVec> {
    let mut m: Vec<BitVec> = rows.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i].get(c)) else {
            continue;
        };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let pivot_cols: Vec<bool> = {
        let mut v = vec![false; cols];
        for &(_, c) in &pivots {
            v[c] = true;
        }
        v
    };
    (0..cols)
        .filter(|&f| !pivot_cols[f])
        .map(|free| {
            let mut v = BitVec::zeros(cols);
            v.set(free, true);
            // Reduced form: pivot variable = sum of free entries in its row.
            for &(pr, pc) in &pivots {
                if m[pr].get(free) {
                    v.set(pc, true);
                }
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_bits(bits: &[u8]) -> BitVec {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b == 1);
        }
        v
    }

    fn mat_vec(rows: &[BitVec], v: &BitVec) -> bool {
        rows.iter().all(|r| r.ones().filter(|&i| v.get(i)).count() % 2 == 0)
    }

    #[test]
    fn kernel_of_small_matrix() {
        let rows = vec![from_bits(&[1, 1, 0, 0]), from_bits(&[0, 1, 1, 0])];
        let k = kernel_basis(&rows, 4);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(!v.is_zero());
            assert!(mat_vec(&rows, v));
        }
    }

    #[test]
    fn kernel_dimension_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let cols = rng.gen_range(1..=10);
            let nrows = rng.gen_range(0..=10);
            let rows: Vec<BitVec> = (0..nrows)
                .map(|_| {
                    let mut v = BitVec::zeros(cols);
                    for i in 0..cols {
                        v.set(i, rng.gen_bool(0.5));
                    }
                    v
                })
                .collect();
            let brute = (0..1u32 << cols)
                .filter(|&m| {
                    let mut v = BitVec::zeros(cols);
                    for i in 0..cols {
                        v.set(i, (m >> i) & 1 == 1);
                    }
                    mat_vec(&rows, &v)
                })
                .count();
            let k = kernel_basis(&rows, cols);
            assert_eq!(1usize << k.len(), brute);
            assert!(k.iter().all(|v| mat_vec(&rows, v)));
        }
    }

    #[test]
    fn wide_vectors_cross_word_boundary() {
        let mut v = BitVec::zeros(130);
        v.set(129, true);
        v.set(64, true);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![64, 129]);
        v.set(64, false);
        assert!(!v.is_zero());
        assert!(!v.is_empty());
    }
}
