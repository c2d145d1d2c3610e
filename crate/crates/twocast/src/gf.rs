//! Exact arithmetic in GF(2^r) for 1 <= r <= 32, and the small amount of
//! linear algebra (rank, solve, null space) the rest of the crate needs.
//!
//! Elements are polynomials over GF(2) packed into the low `r` bits of a
//! `u32` (bit `i` holds the coefficient of `x^i`). Multiplication is
//! carry-less multiplication followed by reduction modulo
//! [`field_modulus`]`(r)`, which is computed — never transcribed — as the
//! lexicographically smallest irreducible polynomial of degree `r`, so any
//! two builds agree on the representation without sharing a table.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;

/// Largest supported extension degree.
pub const MAX_DEGREE: u8 = 32;

/// Returns the field modulus for GF(2^r): the irreducible polynomial of
/// degree `r` over GF(2) with the smallest value when read as an integer
/// (bit `r` set, nonzero constant term).
///
/// The result is found by exhaustive trial division and cached per degree,
/// so it is deterministic across runs and platforms.
///
/// # Panics
///
/// Panics if `r` is 0 or greater than [`MAX_DEGREE`].
pub fn field_modulus(r: u8) -> u64 {
    assert!(
        (1..=MAX_DEGREE).contains(&r),
        "extension degree must be in 1..={MAX_DEGREE}, got {r}"
    );
    static MODULI: [OnceLock<u64>; MAX_DEGREE as usize + 1] =
        [const { OnceLock::new() }; MAX_DEGREE as usize + 1];
    *MODULI[r as usize].get_or_init(|| {
        // Candidates with a zero constant term are divisible by x, so only
        // odd values can be irreducible (this also selects x+1 over x at
        // degree 1, the only degree where bare x would otherwise qualify).
        let mut candidate = (1u64 << r) | 1;
        loop {
            if is_irreducible(candidate, r) {
                return candidate;
            }
            candidate += 2;
        }
    })
}

/// Degree of a nonzero GF(2) polynomial in packed form.
fn poly_degree(p: u64) -> u32 {
    debug_assert_ne!(p, 0);
    63 - p.leading_zeros()
}

/// Remainder of GF(2) polynomial division.
fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 {
        let da = poly_degree(a);
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Trial division by every polynomial of degree 1..=r/2. A candidate with a
/// nonzero constant term is never divisible by x, so only odd divisors are
/// tried.
fn is_irreducible(candidate: u64, r: u8) -> bool {
    debug_assert_eq!(candidate & 1, 1);
    for deg in 1..=(r as u32 / 2) {
        let lo = 1u64 << deg;
        let hi = 1u64 << (deg + 1);
        let mut d = lo | 1;
        while d < hi {
            if poly_rem(candidate, d) == 0 {
                return false;
            }
            d += 2;
        }
    }
    true
}

/// Carry-less product of two packed GF(2) polynomials of degree < 32.
fn clmul(a: u32, b: u32) -> u64 {
    let b = b as u64;
    let mut acc = 0u64;
    let mut a = a;
    while a != 0 {
        let i = a.trailing_zeros();
        acc ^= b << i;
        a &= a - 1;
    }
    acc
}

/// Reduce a packed polynomial of degree < 2r-1 modulo the degree-r modulus.
fn reduce(mut p: u64, modulus: u64, r: u8) -> u32 {
    while p >> r != 0 {
        let d = poly_degree(p);
        p ^= modulus << (d - r as u32);
    }
    p as u32
}

/// An element of GF(2^r).
///
/// Addition is bitwise XOR (every element is its own additive inverse);
/// multiplication is polynomial multiplication modulo [`field_modulus`].
/// Arithmetic between elements of different fields is a bug and panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    bits: u32,
    r: u8,
}

impl FieldElem {
    /// Wraps `bits` as an element of GF(2^r).
    ///
    /// # Panics
    ///
    /// Panics if `r` is out of range or `bits` has bits at or above `r`.
    pub fn new(r: u8, bits: u32) -> Self {
        assert!(
            (1..=MAX_DEGREE).contains(&r),
            "extension degree must be in 1..={MAX_DEGREE}, got {r}"
        );
        assert!(
            r == 32 || bits < (1u32 << r),
            "element 0x{bits:x} out of range for GF(2^{r})"
        );
        FieldElem { bits, r }
    }

    /// The additive identity of GF(2^r).
    pub fn zero(r: u8) -> Self {
        FieldElem::new(r, 0)
    }

    /// The multiplicative identity of GF(2^r).
    pub fn one(r: u8) -> Self {
        FieldElem::new(r, 1)
    }

    /// Uniformly random element (zero included).
    pub fn random<R: Rng + ?Sized>(r: u8, rng: &mut R) -> Self {
        let mask = if r == 32 { u32::MAX } else { (1u32 << r) - 1 };
        FieldElem::new(r, rng.gen::<u32>() & mask)
    }

    /// Uniformly random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(r: u8, rng: &mut R) -> Self {
        loop {
            let e = Self::random(r, rng);
            if !e.is_zero() {
                return e;
            }
        }
    }

    /// Packed polynomial representation (bit i = coefficient of x^i).
    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Extension degree r.
    pub fn degree(self) -> u8 {
        self.r
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// Multiplicative inverse, or `None` for zero.
    pub fn inv(self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // a^(2^r - 2) = a^(-1) in a field of 2^r elements.
        let exp = if self.r == 32 {
            u32::MAX as u64 - 1
        } else {
            (1u64 << self.r) - 2
        };
        Some(self.pow(exp))
    }

    /// Exponentiation by square-and-multiply.
    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = FieldElem::one(self.r);
        while exp != 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }
}

impl std::ops::Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        assert_eq!(self.r, rhs.r, "mixed-field addition");
        FieldElem { bits: self.bits ^ rhs.bits, r: self.r }
    }
}

impl std::ops::AddAssign for FieldElem {
    fn add_assign(&mut self, rhs: FieldElem) {
        *self = *self + rhs;
    }
}

// Characteristic 2: subtraction and addition coincide.
impl std::ops::Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        self + rhs
    }
}

impl std::ops::Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        assert_eq!(self.r, rhs.r, "mixed-field multiplication");
        let modulus = field_modulus(self.r);
        FieldElem {
            bits: reduce(clmul(self.bits, rhs.bits), modulus, self.r),
            r: self.r,
        }
    }
}

impl std::ops::MulAssign for FieldElem {
    fn mul_assign(&mut self, rhs: FieldElem) {
        *self = *self * rhs;
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.bits, self.r)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

/// Outcome of [`Matrix::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// The system has no solution.
    Inconsistent,
    /// One solution, with `free_vars` coordinates that were sampled freely
    /// (0 means the solution is unique).
    Solved { x: Vec<FieldElem>, free_vars: usize },
}

/// Dense row-major matrix over GF(2^r).
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    r: u8,
    entries: Vec<FieldElem>,
}

impl Matrix {
    /// All-zero matrix.
    pub fn zero(r: u8, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, r, entries: vec![FieldElem::zero(r); rows * cols] }
    }

    /// Identity matrix of size n.
    pub fn identity(r: u8, n: usize) -> Self {
        let mut m = Matrix::zero(r, n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::one(r));
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length and all
    /// entries one degree.
    ///
    /// # Panics
    ///
    /// Panics on ragged input, an empty matrix, or mixed degrees.
    pub fn from_rows(rows: &[Vec<FieldElem>]) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty(), "matrix must be nonempty");
        let cols = rows[0].len();
        let r = rows[0][0].degree();
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            for &e in row {
                assert_eq!(e.degree(), r, "mixed extension degrees");
                entries.push(e);
            }
        }
        Matrix { rows: rows.len(), cols, r, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Common extension degree of the entries.
    pub fn field_degree(&self) -> u8 {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        assert_eq!(v.degree(), self.r, "mixed extension degrees");
        self.entries[i * self.cols + j] = v;
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = FieldElem::zero(self.r);
                for j in 0..self.cols {
                    acc += self.get(i, j) * x[j];
                }
                acc
            })
            .collect()
    }

    /// Rank over GF(2^r) by Gaussian elimination with exact arithmetic.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            let inv = m.get(rank, col).inv().expect("pivot is nonzero");
            for i in (rank + 1)..m.rows {
                let factor = m.get(i, col) * inv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = m.get(i, j) + factor * m.get(rank, j);
                    m.set(i, j, v);
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let (x, y) = (self.get(a, j), self.get(b, j));
            self.set(a, j, y);
            self.set(b, j, x);
        }
    }

    /// Reduced row echelon form; returns pivot column per pivot row.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| !self.get(i, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self.get(row, col).inv().expect("pivot is nonzero");
            for j in col..self.cols {
                let v = self.get(row, j) * inv;
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i == row {
                    continue;
                }
                let factor = self.get(i, col);
                if factor.is_zero() {
                    continue;
                }
                for j in col..self.cols {
                    let v = self.get(i, j) + factor * self.get(row, j);
                    self.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Solves `A x = y`. When the solution set is a family, free variables
    /// are drawn uniformly from `rng`, so every solution is produced with
    /// positive probability.
    ///
    /// # Panics
    ///
    /// Panics if `y.len() != self.rows()`.
    pub fn solve<R: Rng + ?Sized>(&self, y: &[FieldElem], rng: &mut R) -> SolveOutcome {
        assert_eq!(y.len(), self.rows, "dimension mismatch");
        // Eliminate on the augmented matrix [A | y].
        let mut aug = Matrix::zero(self.r, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, y[i]);
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return SolveOutcome::Inconsistent;
        }
        let pivot_rows: Vec<(usize, usize)> =
            pivots.iter().copied().enumerate().map(|(row, col)| (col, row)).collect();
        let is_pivot = |j: usize| pivot_rows.iter().any(|&(col, _)| col == j);
        let mut x = vec![FieldElem::zero(self.r); self.cols];
        let mut free_vars = 0;
        for j in 0..self.cols {
            if !is_pivot(j) {
                x[j] = FieldElem::random(self.r, rng);
                free_vars += 1;
            }
        }
        // RREF leaves each pivot variable expressed by the free ones.
        for &(col, row) in &pivot_rows {
            let mut v = aug.get(row, self.cols);
            for j in (col + 1)..self.cols {
                if !is_pivot(j) {
                    v += aug.get(row, j) * x[j];
                }
            }
            x[col] = v;
        }
        SolveOutcome::Solved { x, free_vars }
    }

    /// Basis of the right null space (empty when the kernel is trivial).
    pub fn null_space(&self) -> Vec<Vec<FieldElem>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot = |j: usize| pivots.contains(&j);
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot(free) {
                continue;
            }
            let mut v = vec![FieldElem::zero(self.r); self.cols];
            v[free] = FieldElem::one(self.r);
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = m.get(row, free); // -x = x in characteristic 2
            }
            basis.push(v);
        }
        basis
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over GF(2^{})", self.rows, self.cols, self.r)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn smallest_moduli_match_exhaustive_search() {
        // Degree 1: x+1 is the only degree-1 candidate with a constant term.
        assert_eq!(field_modulus(1), 0b11);
        // Degree 2: x^2+1 = (x+1)^2 is out, x^2+x+1 is in.
        assert_eq!(field_modulus(2), 0b111);
        // Degree 4: x^4+1 and x^4+x+... candidates below x^4+x+1 all factor.
        assert_eq!(field_modulus(4), 0b1_0011);
    }

    #[test]
    fn moduli_have_degree_r_and_odd_constant() {
        for r in 1..=MAX_DEGREE {
            let m = field_modulus(r);
            assert_eq!(poly_degree(m), r as u32, "degree mismatch at r={r}");
            assert_eq!(m & 1, 1, "constant term must be 1 at r={r}");
        }
    }

    #[test]
    fn gf4_tables() {
        // GF(4) = {0, 1, p, p^2} with p = x (bits 0b10), p^2 = x+1 (0b11).
        let e = |bits| FieldElem::new(2, bits);
        let (zero, one, p, p2) = (e(0), e(1), e(0b10), e(0b11));

        // Addition table (XOR): the interesting rows.
        assert_eq!(one + p, p2);
        assert_eq!(one + p2, p);
        assert_eq!(p + p2, one);
        for &x in &[zero, one, p, p2] {
            assert_eq!(x + x, zero);
            assert_eq!(x + zero, x);
        }

        // Multiplication table.
        assert_eq!(p * p, p2);
        assert_eq!(p * p2, one);
        assert_eq!(p2 * p2, p);
        for &x in &[one, p, p2] {
            assert_eq!(x * one, x);
            assert_eq!(x * zero, zero);
        }

        // Inverses.
        assert_eq!(one.inv(), Some(one));
        assert_eq!(p.inv(), Some(p2));
        assert_eq!(p2.inv(), Some(p));
        assert_eq!(zero.inv(), None);
    }

    #[test]
    fn field_axioms_hold_at_each_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for r in [1u8, 2, 4, 8, 16] {
            for _ in 0..10_000 {
                let a = FieldElem::random(r, &mut rng);
                let b = FieldElem::random(r, &mut rng);
                let c = FieldElem::random(r, &mut rng);
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                assert_eq!((a + b) + c, a + (b + c));
                assert_eq!((a * b) * c, a * (b * c));
                assert_eq!(a * (b + c), a * b + a * c);
                assert_eq!(a + FieldElem::zero(r), a);
                assert_eq!(a * FieldElem::one(r), a);
                assert_eq!(a + a, FieldElem::zero(r));
                if !a.is_zero() {
                    let inv = a.inv().unwrap();
                    assert_eq!(a * inv, FieldElem::one(r));
                }
            }
        }
    }

    #[test]
    fn gf256_has_no_zero_divisors_exhaustively() {
        // A reducible modulus would produce zero divisors; sweep all of
        // GF(2^8) as an independent check on the irreducibility search.
        for a in 1u32..256 {
            for b in 1u32..256 {
                assert!(!(FieldElem::new(8, a) * FieldElem::new(8, b)).is_zero());
            }
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = FieldElem::random(16, &mut rng);
            let mut acc = FieldElem::one(16);
            for k in 0..12u64 {
                assert_eq!(a.pow(k), acc);
                acc *= a;
            }
        }
    }

    #[test]
    fn rank_basics() {
        let one = FieldElem::one(1);
        let zero = FieldElem::zero(1);
        assert_eq!(Matrix::identity(1, 2).rank(), 2);
        let equal_rows = Matrix::from_rows(&[vec![one, one], vec![one, one]]);
        assert_eq!(equal_rows.rank(), 1);
        let zero_row = Matrix::from_rows(&[vec![zero, zero]]);
        assert_eq!(zero_row.rank(), 0);

        // Over GF(4): [[1,1],[p,p^2]] has determinant p^2 - p = 1 != 0.
        let e = |bits| FieldElem::new(2, bits);
        let m = Matrix::from_rows(&[vec![e(1), e(1)], vec![e(0b10), e(0b11)]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let mut m = Matrix::zero(4, rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, FieldElem::random(4, &mut rng));
                }
            }
            let base = m.rank();

            let mut shuffled = Matrix::zero(4, rows, cols);
            let mut row_perm: Vec<usize> = (0..rows).collect();
            let mut col_perm: Vec<usize> = (0..cols).collect();
            for i in (1..rows).rev() {
                row_perm.swap(i, rng.gen_range(0..=i));
            }
            for j in (1..cols).rev() {
                col_perm.swap(j, rng.gen_range(0..=j));
            }
            for i in 0..rows {
                for j in 0..cols {
                    shuffled.set(i, j, m.get(row_perm[i], col_perm[j]));
                }
            }
            assert_eq!(shuffled.rank(), base);
        }
    }

    #[test]
    fn solve_identity_and_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = |bits| FieldElem::new(2, bits);

        // A = I: solution is y itself.
        let y = vec![e(0b10), e(0b11)];
        match Matrix::identity(2, 2).solve(&y, &mut rng) {
            SolveOutcome::Solved { x, free_vars } => {
                assert_eq!(x, y);
                assert_eq!(free_vars, 0);
            }
            other => panic!("expected unique solution, got {other:?}"),
        }

        // A = [[1,1]], y = [0]: the family {(t,t)}.
        let a = Matrix::from_rows(&[vec![e(1), e(1)]]);
        match a.solve(&[e(0)], &mut rng) {
            SolveOutcome::Solved { x, free_vars } => {
                assert_eq!(free_vars, 1);
                assert_eq!(x[0], x[1]);
            }
            other => panic!("expected a family, got {other:?}"),
        }

        // Inconsistent: 0*x = 1.
        let z = Matrix::from_rows(&[vec![e(0), e(0)]]);
        assert_eq!(z.solve(&[e(1)], &mut rng), SolveOutcome::Inconsistent);
    }

    #[test]
    fn solve_family_sampler_reaches_every_solution() {
        // For {(t,t) : t in GF(4)} all four values of t must eventually
        // appear.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = |bits| FieldElem::new(2, bits);
        let a = Matrix::from_rows(&[vec![e(1), e(1)]]);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..200 {
            if let SolveOutcome::Solved { x, .. } = a.solve(&[e(0)], &mut rng) {
                seen.insert(x[0].bits());
            }
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn null_space_vectors_lie_in_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=5);
            let mut m = Matrix::zero(4, rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, FieldElem::random(4, &mut rng));
                }
            }
            let basis = m.null_space();
            assert_eq!(basis.len(), cols - m.rank());
            for v in &basis {
                assert!(m.mul_vec(v).iter().all(|e| e.is_zero()));
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(bits in 1u32..=u16::MAX as u32) {
            let a = FieldElem::new(16, bits);
            prop_assert_eq!(a * a.inv().unwrap(), FieldElem::one(16));
        }

        #[test]
        fn solve_satisfies_consistent_systems(seed in 0u64..1 << 48) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=4);
            let mut a = Matrix::zero(8, rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a.set(i, j, FieldElem::random(8, &mut rng));
                }
            }
            // Build y from a known solution so the system is consistent.
            let x0: Vec<FieldElem> =
                (0..cols).map(|_| FieldElem::random(8, &mut rng)).collect();
            let y = a.mul_vec(&x0);
            match a.solve(&y, &mut rng) {
                SolveOutcome::Solved { x, .. } => prop_assert_eq!(a.mul_vec(&x), y),
                SolveOutcome::Inconsistent => prop_assert!(false, "consistent system"),
            }
        }
    }
}
