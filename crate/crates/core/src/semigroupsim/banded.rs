//! Banded matrices and LU factorization with partial pivoting.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Entry type for banded storage: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Square matrix with `kl` sub- and `ku` superdiagonals, stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Banded<T> {
    pub dim: usize,
    pub kl: usize,
    pub ku: usize,
    data: Vec<T>,
}

impl<T: Scalar> Banded<T> {
    pub fn zeros(dim: usize, kl: usize, ku: usize) -> Self {
        Banded {
            dim,
            kl,
            ku,
            data: vec![T::zero(); dim * (kl + ku + 1)],
        }
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i >= self.dim || j >= self.dim || !self.in_band(i, j) {
            return T::zero();
        }
        self.data[i * self.width() + j + self.kl - i]
    }

    /// Adds `v` at `(i, j)`; panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.dim && j < self.dim && self.in_band(i, j), "({i}, {j}) outside the band");
        let w = self.width();
        self.data[i * w + j + self.kl - i] += v;
    }

    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.dim)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Banded<U> {
        Banded {
            dim: self.dim,
            kl: self.kl,
            ku: self.ku,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `alpha I + beta self`.
    pub fn shifted(&self, alpha: T, beta: T) -> Banded<T> {
        let mut out = self.map(|v| v * beta);
        for i in 0..self.dim {
            out.add(i, i, alpha);
        }
        out
    }

    pub fn mul_vec<V>(&self, x: &[V]) -> Vec<V>
    where
        V: Scalar + Mul<T, Output = V>,
    {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = V::zero();
                for j in self.row_range(i) {
                    acc += x[j] * self.get(i, j);
                }
                acc
            })
            .collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<T>
    where
        T: nalgebra::Scalar,
    {
        nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn factor(&self) -> Result<BandLu<T>, SingularPivot> {
        BandLu::new(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub column: usize,
}

/// LU factors of a banded matrix. Row interchanges widen the upper band of
/// `U` to `kl + ku`.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    dim: usize,
    kl: usize,
    /// Upper bandwidth of `U`.
    ku: usize,
    /// Row `i` holds columns `i - kl ..= i + ku`; `L` multipliers below the
    /// diagonal, `U` on and above it.
    data: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: Scalar> BandLu<T> {
    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width() + j + self.kl - i
    }

    fn new(a: &Banded<T>) -> Result<Self, SingularPivot> {
        let dim = a.dim;
        let kl = a.kl;
        let ku = a.kl + a.ku;
        let mut lu = BandLu {
            dim,
            kl,
            ku,
            data: vec![T::zero(); dim * (2 * kl + a.ku + 1)],
            pivots: vec![0; dim],
        };
        for i in 0..dim {
            for j in a.row_range(i) {
                let k = lu.idx(i, j);
                lu.data[k] = a.get(i, j);
            }
        }
        for j in 0..dim {
            let last_row = (j + kl).min(dim - 1);
            let last_col = (j + ku).min(dim - 1);
            let mut p = j;
            let mut best = lu.data[lu.idx(j, j)].modulus();
            for i in j + 1..=last_row {
                let v = lu.data[lu.idx(i, j)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > 0.0) {
                return Err(SingularPivot { column: j });
            }
            lu.pivots[j] = p;
            if p != j {
                for c in j..=last_col {
                    let (a, b) = (lu.idx(j, c), lu.idx(p, c));
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.data[lu.idx(j, j)];
            for i in j + 1..=last_row {
                let l = lu.data[lu.idx(i, j)] / pivot;
                let li = lu.idx(i, j);
                lu.data[li] = l;
                if l == T::zero() {
                    continue;
                }
                for c in j + 1..=last_col {
                    let u = lu.data[lu.idx(j, c)];
                    let ic = lu.idx(i, c);
                    lu.data[ic] -= l * u;
                }
            }
        }
        Ok(lu)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solves in place for a right-hand side whose entries scale by `T`.
    pub fn solve_in_place<V>(&self, b: &mut [V])
    where
        V: Scalar + Mul<T, Output = V>,
    {
        assert_eq!(b.len(), self.dim);
        let n = self.dim;
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            for i in j + 1..=(j + self.kl).min(n - 1) {
                b[i] -= bj * self.data[self.idx(i, j)];
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for c in i + 1..=(i + self.ku).min(n - 1) {
                acc -= b[c] * self.data[self.idx(i, c)];
            }
            b[i] = acc * recip(self.data[self.idx(i, i)]);
        }
    }

    pub fn solve<V>(&self, b: &[V]) -> Vec<V>
    where
        V: Scalar + Mul<T, Output = V>,
    {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

fn recip<T: Scalar>(v: T) -> T {
    T::from_real(1.0) / v
}
