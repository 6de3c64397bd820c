//! Exact rational linear algebra: fraction-free Gaussian elimination
//! with deterministic pivoting (first nonzero entry in row-major
//! order), nullspace bases, rank, and linear solving.
//!
//! Rows are scaled to integers, eliminated with the one-step
//! fraction-free (Bareiss) rule, and solutions are normalized to
//! primitive integer vectors with positive leading entry, so results
//! are reproducible across runs and platforms.

use crate::poly::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-echelon data of an integer matrix: the reduced rows and the
/// pivot column of each nonzero row.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn to_integer_rows(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            assert_eq!(row.len(), cols, "ragged matrix");
            let mut scale = BigInt::one();
            for x in row {
                scale = scale.lcm(x.denom());
            }
            row.iter()
                .map(|x| x.numer() * (&scale / x.denom()))
                .collect()
        })
        .collect()
}

fn echelon(rows: &[Vec<Rat>], cols: usize) -> Echelon {
    let mut m = to_integer_rows(rows, cols);
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r >= nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let pivot = m[r][c].clone();
        for i in r + 1..nrows {
            let factor = m[i][c].clone();
            for j in c..cols {
                let val = &pivot * &m[i][j] - &factor * &m[r][j];
                debug_assert!((&val % &prev).is_zero());
                m[i][j] = val / &prev;
            }
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    m.truncate(pivots.len());
    Echelon { rows: m, pivots }
}

/// Scale to a primitive integer vector whose first nonzero entry is
/// positive.
fn normalize(v: &mut [Rat]) {
    let mut scale = BigInt::one();
    for x in v.iter() {
        scale = scale.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&scale / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return;
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            g = -g;
        }
    }
    for (slot, x) in v.iter_mut().zip(ints.iter_mut()) {
        *slot = Rat::from_integer(std::mem::take(x) / &g);
    }
}

/// Rank of the matrix given as rows of width `cols`.
pub fn rank(rows: &[Vec<Rat>], cols: usize) -> usize {
    echelon(rows, cols).pivots.len()
}

/// Flatten a linear map into polynomial slots to a rational matrix.
///
/// `columns[u]` lists, slot by slot, the polynomial image of the
/// `u`-th unknown; the optional `rhs` is a target with the same slot
/// count. One matrix row is emitted per `(slot, monomial)` pair, slots
/// in order and monomials ascending graded-lex, so the layout is
/// deterministic. Solving `rows * v = rhs_vec` is then equivalent to
/// matching the polynomial identity slot by slot.
pub fn linearize(
    columns: &[Vec<crate::poly::Poly>],
    rhs: Option<&[crate::poly::Poly]>,
) -> (Vec<Vec<Rat>>, Option<Vec<Rat>>) {
    use std::collections::BTreeSet;

    let slots = columns
        .first()
        .map(|c| c.len())
        .or_else(|| rhs.map(|r| r.len()))
        .unwrap_or(0);
    for col in columns {
        assert_eq!(col.len(), slots, "ragged column");
    }
    if let Some(r) = rhs {
        assert_eq!(r.len(), slots, "rhs slot count mismatch");
    }

    let mut rows = Vec::new();
    let mut rhs_vec = rhs.map(|_| Vec::new());
    for s in 0..slots {
        let mut monomials = BTreeSet::new();
        for col in columns {
            monomials.extend(col[s].terms().map(|(m, _)| m.clone()));
        }
        if let Some(r) = rhs {
            monomials.extend(r[s].terms().map(|(m, _)| m.clone()));
        }
        for m in monomials {
            rows.push(columns.iter().map(|col| col[s].coeff(&m)).collect());
            if let (Some(v), Some(r)) = (rhs_vec.as_mut(), rhs) {
                v.push(r[s].coeff(&m));
            }
        }
    }
    (rows, rhs_vec)
}

/// Basis of the right kernel `{ v : A v = 0 }`, one vector per free
/// column, in ascending free-column order.
pub fn nullspace(rows: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let ech = echelon(rows, cols);
    let pivot_of_col: Vec<Option<usize>> = {
        let mut v = vec![None; cols];
        for (row, &pc) in ech.pivots.iter().enumerate() {
            v[pc] = Some(row);
        }
        v
    };
    let mut basis = Vec::new();
    for fc in 0..cols {
        if pivot_of_col[fc].is_some() {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[fc] = Rat::one();
        for row in (0..ech.pivots.len()).rev() {
            let pc = ech.pivots[row];
            if pc > fc {
                continue;
            }
            let mut acc = Rat::zero();
            for j in pc + 1..cols {
                if !v[j].is_zero() && !ech.rows[row][j].is_zero() {
                    acc += Rat::from_integer(ech.rows[row][j].clone()) * &v[j];
                }
            }
            v[pc] = -acc / Rat::from_integer(ech.rows[row][pc].clone());
        }
        normalize(&mut v);
        basis.push(v);
    }
    basis
}

/// One exact solution of `A v = b`, if the system is consistent. Free
/// variables are set to zero.
pub fn solve(rows: &[Vec<Rat>], cols: usize, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(rows.len(), b.len());
    let augmented: Vec<Vec<Rat>> = rows
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let ech = echelon(&augmented, cols + 1);
    if ech.pivots.last() == Some(&cols) {
        return None; // inconsistent: pivot in the right-hand-side column
    }
    let mut v = vec![Rat::zero(); cols];
    for row in (0..ech.pivots.len()).rev() {
        let pc = ech.pivots[row];
        let mut acc = Rat::from_integer(ech.rows[row][cols].clone());
        for j in pc + 1..cols {
            if !v[j].is_zero() && !ech.rows[row][j].is_zero() {
                acc -= Rat::from_integer(ech.rows[row][j].clone()) * &v[j];
            }
        }
        v[pc] = acc / Rat::from_integer(ech.rows[row][pc].clone());
    }
    Some(v)
}
