//! Full-rank integer lattices in lower-triangular Hermite normal form.
//!
//! Rows are basis vectors. Row i has support in columns 0..=i, a positive
//! diagonal entry, and entries left of the diagonal reduced into
//! [0, diagonal of that column's row).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice<T> {
    rows: Vec<Vec<T>>,
}

/// Result of row reduction with a unimodular transform `U`:
/// `U · input = [hnf rows; zero rows]`.
#[derive(Debug, Clone)]
pub struct Echelon<T> {
    pub hnf: Vec<Vec<T>>,
    /// Rows of `U` producing the HNF rows.
    pub transform: Vec<Vec<T>>,
    /// Rows of `U` producing zero rows: a basis of the left kernel.
    pub kernel: Vec<Vec<T>>,
}

fn sub_mul<T: Scalar>(a: &mut [T], b: &[T], q: &T) {
    if q.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.clone() - q.clone() * y.clone();
    }
}

/// Row-reduce to lower-triangular HNF, tracking the transform.
/// Requires the rows to span a full-rank lattice.
pub fn echelon<T: Scalar>(input: &[Vec<T>]) -> Result<Echelon<T>> {
    let m = input.len();
    let c = input.first().map_or(0, |r| r.len());
    let mut w: Vec<Vec<T>> = input.to_vec();
    let mut u: Vec<Vec<T>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    let mut active: Vec<usize> = (0..m).collect();
    let mut pivot_of = vec![usize::MAX; c];
    for col in (0..c).rev() {
        loop {
            let nz: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&r| !w[r][col].is_zero())
                .collect();
            if nz.is_empty() {
                return Err(Error::InvalidArgument("lattice is not of full rank".into()));
            }
            let p = *nz.iter().min_by_key(|&&r| w[r][col].abs()).unwrap();
            if nz.len() == 1 {
                if w[p][col].is_negative() {
                    w[p].iter_mut().for_each(|x| *x = -x.clone());
                    u[p].iter_mut().for_each(|x| *x = -x.clone());
                }
                pivot_of[col] = p;
                active.retain(|&r| r != p);
                break;
            }
            let (wp, up) = (w[p].clone(), u[p].clone());
            for &r in &nz {
                if r != p {
                    let q = w[r][col].clone() / wp[col].clone();
                    sub_mul(&mut w[r], &wp, &q);
                    sub_mul(&mut u[r], &up, &q);
                }
            }
        }
    }
    for i in 0..c {
        let ri = pivot_of[i];
        for j in (0..i).rev() {
            let rj = pivot_of[j];
            let q = w[ri][j].div_floor(&w[rj][j]);
            let (wj, uj) = (w[rj].clone(), u[rj].clone());
            sub_mul(&mut w[ri], &wj, &q);
            sub_mul(&mut u[ri], &uj, &q);
        }
    }
    Ok(Echelon {
        hnf: pivot_of.iter().map(|&r| w[r].clone()).collect(),
        transform: pivot_of.iter().map(|&r| u[r].clone()).collect(),
        kernel: active.iter().map(|&r| u[r].clone()).collect(),
    })
}

/// Solve y · H = s for lower-triangular H, if an integral solution exists.
pub fn solve_triangular<T: Scalar>(h: &[Vec<T>], s: &[T]) -> Option<Vec<T>> {
    let c = h.len();
    let mut rest: Vec<T> = s.to_vec();
    let mut y = vec![T::zero(); c];
    for col in (0..c).rev() {
        let (q, r) = rest[col].div_rem(&h[col][col]);
        if !r.is_zero() {
            return None;
        }
        for (k, v) in rest.iter_mut().enumerate().take(col + 1) {
            *v = v.clone() - q.clone() * h[col][k].clone();
        }
        y[col] = q;
    }
    Some(y)
}

impl<T: Scalar> Lattice<T> {
    /// Lattice spanned by the given rows (must be full rank).
    pub fn from_generators(rows: &[Vec<T>]) -> Result<Self> {
        Ok(Lattice {
            rows: echelon(rows)?.hnf,
        })
    }

    /// Trust the caller: rows must already be a reduced HNF.
    pub(crate) fn from_hnf_unchecked(rows: Vec<Vec<T>>) -> Self {
        Lattice { rows }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, T::one())
    }

    pub fn scalar(n: usize, s: T) -> Self {
        Lattice {
            rows: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { s.clone() } else { T::zero() })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.len())
            .map(|i| self.rows[i][i].clone())
            .collect()
    }

    /// Index in ℤ^n, the determinant of the HNF.
    pub fn index(&self) -> T {
        self.diagonal().into_iter().fold(T::one(), |a, b| a * b)
    }

    /// Canonical representative in the box [0, h_ii).
    pub fn reduce(&self, v: &[T]) -> Vec<T> {
        let mut v = v.to_vec();
        for i in (0..self.rows.len()).rev() {
            let q = v[i].div_floor(&self.rows[i][i]);
            sub_mul(&mut v, &self.rows[i], &q);
        }
        v
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    pub fn is_canonical(&self, v: &[T]) -> bool {
        v.len() == self.rows.len()
            && v.iter()
                .zip(self.diagonal())
                .all(|(x, d)| !x.is_negative() && *x < d)
    }

    /// Whether `self ⊆ other`.
    pub fn is_sublattice_of(&self, other: &Lattice<T>) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// All canonical representatives, lexicographic order.
    pub fn representatives(&self) -> Vec<Vec<T>> {
        let d = self.diagonal();
        let mut out: Vec<Vec<T>> = vec![vec![]];
        for di in &d {
            let mut next = Vec::new();
            for p in &out {
                let mut x = T::zero();
                while &x < di {
                    let mut q = p.clone();
                    q.push(x.clone());
                    next.push(q);
                    x = x + T::one();
                }
            }
            out = next;
        }
        out
    }

    /// L1 ∩ L2, from the left kernel of the stacked bases.
    pub fn intersect(&self, other: &Lattice<T>) -> Result<Lattice<T>> {
        let n = self.dim();
        let stacked: Vec<Vec<T>> = self.rows.iter().chain(&other.rows).cloned().collect();
        let e = echelon(&stacked)?;
        let gens: Vec<Vec<T>> = e
            .kernel
            .iter()
            .map(|k| combine(&k[..n], &self.rows))
            .collect();
        Lattice::from_generators(&gens)
    }
}

fn combine<T: Scalar>(coef: &[T], rows: &[Vec<T>]) -> Vec<T> {
    let n = rows[0].len();
    (0..n)
        .map(|c| {
            coef.iter()
                .zip(rows)
                .fold(T::zero(), |acc, (a, r)| acc + a.clone() * r[c].clone())
        })
        .collect()
}

/// Chinese remaindering for lattice cosets: y with y ≡ x1 mod L1 and
/// y ≡ x2 mod L2, reduced mod L1 ∩ L2. Fails when x2 − x1 ∉ L1 + L2.
pub fn crt_pair<T: Scalar>(
    x1: &[T],
    l1: &Lattice<T>,
    x2: &[T],
    l2: &Lattice<T>,
) -> Result<(Vec<T>, Lattice<T>)> {
    let n = l1.dim();
    let stacked: Vec<Vec<T>> = l1.rows.iter().chain(&l2.rows).cloned().collect();
    let e = echelon(&stacked)?;
    let diff: Vec<T> = x2
        .iter()
        .zip(x1)
        .map(|(a, b)| a.clone() - b.clone())
        .collect();
    let s = solve_triangular(&e.hnf, &diff)
        .ok_or_else(|| Error::InvalidArgument("incompatible congruences".into()))?;
    let c = combine(&s, &e.transform);
    let l1part = combine(&c[..n], &l1.rows);
    let y: Vec<T> = x1
        .iter()
        .zip(&l1part)
        .map(|(a, b)| a.clone() + b.clone())
        .collect();
    let gens: Vec<Vec<T>> = e
        .kernel
        .iter()
        .map(|k| combine(&k[..n], &l1.rows))
        .collect();
    let inter = Lattice::from_generators(&gens)?;
    Ok((inter.reduce(&y), inter))
}

#[derive(Debug, Clone, Serialize)]
pub struct HnfView {
    pub rows: Vec<Vec<String>>,
}

impl<T: Scalar> Lattice<T> {
    pub fn view(&self) -> HnfView {
        HnfView {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_basic() {
        let l = Lattice::<i64>::from_generators(&[vec![4, 2], vec![2, 6], vec![0, 10]]).unwrap();
        // every generator lies in the lattice and the index matches |det| of a basis
        for g in [[4, 2], [2, 6], [0, 10]] {
            assert!(l.contains(&g));
        }
        let r = l.rows();
        assert_eq!(r[0][1], 0);
        assert!(r[1][0] >= 0 && r[1][0] < r[0][0]);
        assert_eq!(l.index(), 20);
    }

    #[test]
    fn transform_is_consistent() {
        let input = vec![vec![3i64, 1], vec![5, 7], vec![2, 2], vec![1, 9]];
        let e = echelon(&input).unwrap();
        let apply = |u: &Vec<i64>| -> Vec<i64> {
            (0..2)
                .map(|c| u.iter().zip(&input).map(|(a, r)| a * r[c]).sum())
                .collect()
        };
        for (u, h) in e.transform.iter().zip(&e.hnf) {
            assert_eq!(&apply(u), h);
        }
        for k in &e.kernel {
            assert_eq!(apply(k), vec![0, 0]);
        }
        assert_eq!(e.kernel.len(), 2);
    }

    #[test]
    fn crt() {
        let l1 = Lattice::<i64>::scalar(1, 4);
        let l2 = Lattice::<i64>::scalar(1, 9);
        let (y, l) = crt_pair(&[3], &l1, &[2], &l2).unwrap();
        assert_eq!(l.index(), 36);
        assert_eq!(y[0].rem_euclid(4), 3);
        assert_eq!(y[0].rem_euclid(9), 2);
        assert_eq!(
            solve_triangular(&[vec![2i64, 0], vec![1, 3]], &[6, 6]),
            Some(vec![2, 2])
        );
        // non-coprime indices, coprime lattices
        let a = Lattice::<i64>::from_generators(&[vec![9, 0], vec![4, 1]]).unwrap();
        let b = Lattice::<i64>::from_generators(&[vec![3, 0], vec![2, 1]]).unwrap();
        let (y, l) = crt_pair(&[2, 0], &a, &[1, 0], &b).unwrap();
        assert_eq!(l.index(), 27);
        assert!(a.contains(&[y[0] - 2, y[1]]) && b.contains(&[y[0] - 1, y[1]]));
        assert!(crt_pair(
            &[1],
            &Lattice::scalar(1, 4i64),
            &[2],
            &Lattice::scalar(1, 6)
        )
        .is_err());
        assert_eq!(
            solve_triangular(&[vec![2i64, 0], vec![1, 3]], &[5, 6]),
            None
        );
    }
}
