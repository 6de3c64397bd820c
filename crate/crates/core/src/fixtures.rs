//! Bundled example structures, both as direct constructors and as the
//! JSON manifests shipped with the command-line tool. The manifest
//! loader is tested against these constructors, so the two routes keep
//! each other honest.

use crate::base::PoissonBase;
use crate::fiber::TripleData;
use crate::poly::{rat_int, Poly, Rat};

/// Rotation-invariant linear base on three variables:
/// `{x_i, x_j} = eps_ijk x_k`.
pub fn so3_base() -> PoissonBase {
    let n = 3;
    let mut entries = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let mut p = Poly::zero(n);
            for k in 0..3 {
                let sign = levi_civita(i, j, k);
                if sign != 0 {
                    p = &p + &Poly::var(n, k).scale(&rat_int(sign));
                }
            }
            entries.push(((i, j), p));
        }
    }
    PoissonBase::new(n, entries).expect("fixture is well-formed")
}

/// The rank-3 triple over [`so3_base`]: fiber bracket
/// `[e_a, e_b] = 2 eps eps_abc e_c`, connection `D_{dx_i} e_a =
/// eps_iab e_b`, and zero K tensor. Valid for every `eps`, flat, and
/// centerless exactly when `eps != 0`.
pub fn so3_triple(eps: Rat) -> TripleData {
    let n = 3;
    let k = 3;
    let two_eps = &eps + &eps;
    let mut c_entries = Vec::new();
    let mut gamma_entries = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in 0..k {
                let sign = levi_civita(a, b, c);
                if sign != 0 {
                    let coeff = Poly::constant(n, two_eps.clone()).scale(&rat_int(sign));
                    if !coeff.is_zero() {
                        c_entries.push(((c, a, b), coeff));
                    }
                }
            }
        }
    }
    for i in 0..n {
        for a in 0..k {
            for b in 0..k {
                let sign = levi_civita(i, a, b);
                if sign != 0 {
                    gamma_entries.push(((b, i, a), Poly::from_int(n, sign)));
                }
            }
        }
    }
    TripleData::new(so3_base(), k, c_entries, gamma_entries, []).expect("fixture is well-formed")
}

/// The module of `k x k` matrices over a base: fiber rank `k^2` with
/// basis `E_pq` in row-major order, matrix-commutator bracket, the
/// anchor-only connection, and zero K tensor.
pub fn matrix_triple(k: usize, base: PoissonBase) -> TripleData {
    let n = base.nvars();
    let rank = k * k;
    let idx = |p: usize, q: usize| p * k + q;
    let mut c_entries = Vec::new();
    for b in 0..rank {
        for g in b + 1..rank {
            let (p, q) = (b / k, b % k);
            let (r, s) = (g / k, g % k);
            // [E_pq, E_rs] = delta_qr E_ps - delta_sp E_rq
            let mut coeffs = std::collections::BTreeMap::new();
            if q == r {
                *coeffs.entry(idx(p, s)).or_insert(0i64) += 1;
            }
            if s == p {
                *coeffs.entry(idx(r, q)).or_insert(0i64) -= 1;
            }
            for (a, coeff) in coeffs {
                if coeff != 0 {
                    c_entries.push(((a, b, g), Poly::from_int(n, coeff)));
                }
            }
        }
    }
    TripleData::new(base, rank, c_entries, [], []).expect("fixture is well-formed")
}

/// The module-form variant of the matrix fixture: the same rank-`k^2`
/// module of `k x k` matrices, abelian fiber, anchor-only connection
/// (entrywise base bracket), zero K tensor. This is the structure
/// induced by the flat module action `(f, M) -> ({f, M_pq})`.
pub fn matrix_module_triple(k: usize, base: PoissonBase) -> TripleData {
    TripleData::zero(base, k * k)
}

/// Everything-zero structure: zero base bracket, abelian fiber of the
/// given rank, zero connection and K tensor.
pub fn zero_triple(n: usize, k: usize) -> TripleData {
    TripleData::zero(PoissonBase::zero(n), k)
}

fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Bundled manifest: the rotation-invariant fixture with parameter
/// `eps` (default 1/2).
pub const SO3_JSON: &str = include_str!("../fixtures/so3.json");
/// Bundled manifest: 2x2 matrix module over the rotation-invariant
/// base.
pub const MATRIX2_JSON: &str = include_str!("../fixtures/matrix2.json");
/// Bundled manifest: the rotation-invariant base with no fiber.
pub const SO3_BASE_ONLY_JSON: &str = include_str!("../fixtures/so3_base_only.json");
