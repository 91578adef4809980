//! Dense rational matrices, small enough for Gauss-Jordan.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::Rat;

pub type RMat = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> RMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect()
}

pub fn zeros(r: usize, c: usize) -> RMat {
    vec![vec![Rat::zero(); c]; r]
}

pub fn is_square(m: &RMat, n: usize) -> bool {
    m.len() == n && m.iter().all(|row| row.len() == n)
}

pub fn mul(a: &RMat, b: &RMat) -> RMat {
    let inner = b.len();
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rat::zero(), |acc, l| acc + &row[l] * &b[l][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &RMat, v: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Rat::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn transpose(a: &RMat) -> RMat {
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn det(a: &RMat) -> Rat {
    let n = a.len();
    let mut m = a.clone();
    let mut acc = Rat::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if piv != col {
            m.swap(piv, col);
            acc = -acc;
        }
        let p = m[col][col].clone();
        acc *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    acc
}

pub fn inverse(a: &RMat) -> Result<RMat> {
    let n = a.len();
    if !is_square(a, n) {
        return Err(Error::DimMismatch("inverse of a non-square matrix".into()));
    }
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::Singular)?;
        m.swap(piv, col);
        let p = m[col][col].clone();
        for c in 0..2 * n {
            m[col][c] = &m[col][c] / &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..2 * n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}
