//! The free module `P1 = P0^k` with its fiber Lie bracket, the
//! contravariant derivative, the curvature-control tensor `K`, and the
//! structure checks that make the three of them a valid triple.
//!
//! All three tensors are stored densely over their index ranges; skew
//! pairs are stored once (`b < g`, `i < j`) and expanded on read. The
//! structure conditions are operator identities whose two sides are
//! module-linear in every argument, so checking them on the `dx_i` and
//! `e_a` bases is a complete verification, not a sample.

use crate::base::{OneForm, PoissonBase};
use crate::linalg;
use crate::poly::{Poly, PolyError, Rat};
use crate::report::CheckReport;
use num_traits::Zero;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TripleError {
    #[error("{tensor} entry ({a},{b},{c}) out of range (fiber rank {k}, {n} variables)")]
    EntryOutOfRange {
        tensor: &'static str,
        a: usize,
        b: usize,
        c: usize,
        k: usize,
        n: usize,
    },
    #[error("{tensor} entry ({a},{b},{c}): skew slot on the diagonal")]
    DiagonalEntry {
        tensor: &'static str,
        a: usize,
        b: usize,
        c: usize,
    },
    #[error("{tensor} entry ({a},{b},{c}) given more than once (skew slots are given once)")]
    DuplicateEntry {
        tensor: &'static str,
        a: usize,
        b: usize,
        c: usize,
    },
    #[error("{tensor} entry ({a},{b},{c}): {source}")]
    BadPoly {
        tensor: &'static str,
        a: usize,
        b: usize,
        c: usize,
        source: PolyError,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradingError {
    #[error("{family} entry at {at} is not homogeneous")]
    NonHomogeneous { family: &'static str, at: String },
    #[error("{family} entries have mixed degrees")]
    MixedDegrees { family: &'static str },
    #[error("grading mismatch: base entries of degree {pi_degree} need connection entries of one degree less, found {gamma_degree}")]
    IncompatibleShift { pi_degree: u32, gamma_degree: u32 },
}

/// Degree bookkeeping of a weight-graded triple: the contravariant
/// differential shifts homogeneous entry degree by `shift`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grading {
    pub shift: i64,
}

/// Element of the free module: a length-`k` vector of polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberElem {
    nvars: usize,
    coords: Vec<Poly>,
}

impl FiberElem {
    pub fn new(nvars: usize, coords: Vec<Poly>) -> Self {
        for c in &coords {
            assert_eq!(c.nvars(), nvars, "variable count mismatch in fiber element");
        }
        FiberElem { nvars, coords }
    }

    pub fn zero(nvars: usize, k: usize) -> Self {
        FiberElem {
            nvars,
            coords: vec![Poly::zero(nvars); k],
        }
    }

    /// Basis vector `e_a` (0-based).
    pub fn basis(nvars: usize, k: usize, a: usize) -> Self {
        assert!(a < k);
        let mut v = FiberElem::zero(nvars, k);
        v.coords[a] = Poly::one(nvars);
        v
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    pub fn coord(&self, a: usize) -> &Poly {
        &self.coords[a]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &FiberElem) -> FiberElem {
        assert_eq!(self.rank(), other.rank(), "fiber rank mismatch");
        FiberElem {
            nvars: self.nvars,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &FiberElem) -> FiberElem {
        assert_eq!(self.rank(), other.rank(), "fiber rank mismatch");
        FiberElem {
            nvars: self.nvars,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> FiberElem {
        FiberElem {
            nvars: self.nvars,
            coords: self.coords.iter().map(Poly::neg).collect(),
        }
    }

    /// Module action `f * eta`.
    pub fn scale_poly(&self, f: &Poly) -> FiberElem {
        FiberElem {
            nvars: self.nvars,
            coords: self.coords.iter().map(|c| c * f).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> FiberElem {
        FiberElem {
            nvars: self.nvars,
            coords: self.coords.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// `Some(d)` when every coordinate is homogeneous of the same
    /// degree `d` (zero coordinates are compatible with anything).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg: Option<u32> = None;
        for c in &self.coords {
            if c.is_zero() {
                continue;
            }
            match (deg, c.homogeneous_degree()) {
                (_, None) => return None,
                (None, Some(d)) => deg = Some(d),
                (Some(d0), Some(d)) if d0 == d => {}
                _ => return None,
            }
        }
        deg.or(Some(0))
    }
}

impl fmt::Display for FiberElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn pair_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Structure tensors of the extension: fiber bracket constants `c`,
/// connection coefficients `gamma`, and the skew tensor `kk`, over a
/// base Poisson algebra.
///
/// Conventions, all indices 0-based:
/// - `[e_b, e_g]_1 = sum_a c[a][b][g] e_a`, skew in `(b, g)`;
/// - `D_{dx_i} e_b = sum_a gamma[a][i][b] e_a`;
/// - `K(dx_i, dx_j) = sum_a kk[a][i][j] e_a`, skew in `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleData {
    base: PoissonBase,
    k: usize,
    c: Vec<Poly>,
    gamma: Vec<Poly>,
    kk: Vec<Poly>,
}

impl TripleData {
    /// Build from sparse entries. Skew slots may be given in either
    /// index order (the stored value is sign-normalized) but only once.
    pub fn new(
        base: PoissonBase,
        k: usize,
        c_entries: impl IntoIterator<Item = ((usize, usize, usize), Poly)>,
        gamma_entries: impl IntoIterator<Item = ((usize, usize, usize), Poly)>,
        kk_entries: impl IntoIterator<Item = ((usize, usize, usize), Poly)>,
    ) -> Result<Self, TripleError> {
        let n = base.nvars();
        let mut t = TripleData {
            base,
            k,
            c: vec![Poly::zero(n); k * pair_count(k)],
            gamma: vec![Poly::zero(n); k * n * k],
            kk: vec![Poly::zero(n); k * pair_count(n)],
        };
        let mut c_seen = vec![false; t.c.len()];
        let mut g_seen = vec![false; t.gamma.len()];
        let mut kk_seen = vec![false; t.kk.len()];

        for ((a, b, g), p) in c_entries {
            Self::check_poly("fiber bracket", a, b, g, &p, n)?;
            if a >= k || b >= k || g >= k {
                return Err(TripleError::EntryOutOfRange {
                    tensor: "fiber bracket",
                    a,
                    b,
                    c: g,
                    k,
                    n,
                });
            }
            if b == g {
                return Err(TripleError::DiagonalEntry {
                    tensor: "fiber bracket",
                    a,
                    b,
                    c: g,
                });
            }
            let (lo, hi, val) = if b < g { (b, g, p) } else { (g, b, p.neg()) };
            let idx = a * pair_count(k) + pair_index(lo, hi, k);
            if c_seen[idx] {
                return Err(TripleError::DuplicateEntry {
                    tensor: "fiber bracket",
                    a,
                    b,
                    c: g,
                });
            }
            c_seen[idx] = true;
            t.c[idx] = val;
        }
        for ((a, i, b), p) in gamma_entries {
            Self::check_poly("connection", a, i, b, &p, n)?;
            if a >= k || i >= n || b >= k {
                return Err(TripleError::EntryOutOfRange {
                    tensor: "connection",
                    a,
                    b: i,
                    c: b,
                    k,
                    n,
                });
            }
            let idx = (a * n + i) * k + b;
            if g_seen[idx] {
                return Err(TripleError::DuplicateEntry {
                    tensor: "connection",
                    a,
                    b: i,
                    c: b,
                });
            }
            g_seen[idx] = true;
            t.gamma[idx] = p;
        }
        for ((a, i, j), p) in kk_entries {
            Self::check_poly("k tensor", a, i, j, &p, n)?;
            if a >= k || i >= n || j >= n {
                return Err(TripleError::EntryOutOfRange {
                    tensor: "k tensor",
                    a,
                    b: i,
                    c: j,
                    k,
                    n,
                });
            }
            if i == j {
                return Err(TripleError::DiagonalEntry {
                    tensor: "k tensor",
                    a,
                    b: i,
                    c: j,
                });
            }
            let (lo, hi, val) = if i < j { (i, j, p) } else { (j, i, p.neg()) };
            let idx = a * pair_count(n) + pair_index(lo, hi, n);
            if kk_seen[idx] {
                return Err(TripleError::DuplicateEntry {
                    tensor: "k tensor",
                    a,
                    b: i,
                    c: j,
                });
            }
            kk_seen[idx] = true;
            t.kk[idx] = val;
        }
        Ok(t)
    }

    fn check_poly(
        tensor: &'static str,
        a: usize,
        b: usize,
        c: usize,
        p: &Poly,
        n: usize,
    ) -> Result<(), TripleError> {
        if p.nvars() != n {
            return Err(TripleError::BadPoly {
                tensor,
                a,
                b,
                c,
                source: PolyError::VarCountMismatch(p.nvars(), n),
            });
        }
        Ok(())
    }

    /// The zero triple: abelian fiber, anchor-only derivative, no K.
    pub fn zero(base: PoissonBase, k: usize) -> Self {
        TripleData::new(base, k, [], [], []).expect("zero triple is well-formed")
    }

    pub fn base(&self) -> &PoissonBase {
        &self.base
    }

    pub fn fiber_rank(&self) -> usize {
        self.k
    }

    pub fn nvars(&self) -> usize {
        self.base.nvars()
    }

    /// `c[a][b][g]` with skew expansion in `(b, g)`.
    pub fn c_at(&self, a: usize, b: usize, g: usize) -> Poly {
        use std::cmp::Ordering::*;
        match b.cmp(&g) {
            Equal => Poly::zero(self.nvars()),
            Less => self.c[a * pair_count(self.k) + pair_index(b, g, self.k)].clone(),
            Greater => self.c[a * pair_count(self.k) + pair_index(g, b, self.k)].neg(),
        }
    }

    /// `gamma[a][i][b]`.
    pub fn gamma_at(&self, a: usize, i: usize, b: usize) -> &Poly {
        &self.gamma[(a * self.nvars() + i) * self.k + b]
    }

    /// `kk[a][i][j]` with skew expansion in `(i, j)`.
    pub fn kk_at(&self, a: usize, i: usize, j: usize) -> Poly {
        use std::cmp::Ordering::*;
        let n = self.nvars();
        match i.cmp(&j) {
            Equal => Poly::zero(n),
            Less => self.kk[a * pair_count(n) + pair_index(i, j, n)].clone(),
            Greater => self.kk[a * pair_count(n) + pair_index(j, i, n)].neg(),
        }
    }

    pub fn has_fiber_bracket(&self) -> bool {
        self.c.iter().any(|p| !p.is_zero())
    }

    pub fn has_k_tensor(&self) -> bool {
        self.kk.iter().any(|p| !p.is_zero())
    }

    /// `[eta, xi]_1`, module-bilinear and skew.
    pub fn fiber_bracket(&self, eta: &FiberElem, xi: &FiberElem) -> FiberElem {
        assert_eq!(eta.rank(), self.k, "fiber rank mismatch");
        assert_eq!(xi.rank(), self.k, "fiber rank mismatch");
        let n = self.nvars();
        let mut out = FiberElem::zero(n, self.k);
        for b in 0..self.k {
            for g in b + 1..self.k {
                let pair = &(eta.coord(b) * xi.coord(g)) - &(eta.coord(g) * xi.coord(b));
                if pair.is_zero() {
                    continue;
                }
                for a in 0..self.k {
                    let coeff = &self.c[a * pair_count(self.k) + pair_index(b, g, self.k)];
                    if !coeff.is_zero() {
                        out.coords[a] = &out.coords[a] + &(coeff * &pair);
                    }
                }
            }
        }
        out
    }

    /// `ad_eta = [eta, .]_1` applied to `xi`.
    pub fn ad(&self, eta: &FiberElem, xi: &FiberElem) -> FiberElem {
        self.fiber_bracket(eta, xi)
    }

    /// `K(dx_i, dx_j)` as a fiber element.
    pub fn k_form(&self, i: usize, j: usize) -> FiberElem {
        let n = self.nvars();
        FiberElem::new(n, (0..self.k).map(|a| self.kk_at(a, i, j)).collect())
    }

    /// `K(alpha, beta)` by module-bilinear skew expansion.
    pub fn k_apply(&self, alpha: &OneForm, beta: &OneForm) -> FiberElem {
        let n = self.nvars();
        let mut out = FiberElem::zero(n, self.k);
        for i in 0..n {
            for j in i + 1..n {
                let pair = &(alpha.comp(i) * beta.comp(j)) - &(alpha.comp(j) * beta.comp(i));
                if pair.is_zero() {
                    continue;
                }
                out = out.add(&self.k_form(i, j).scale_poly(&pair));
            }
        }
        out
    }

    /// `D_{dx_i} eta`: connection coefficients plus the anchor acting
    /// on coordinates.
    pub fn contra_deriv_basis(&self, i: usize, eta: &FiberElem) -> FiberElem {
        assert_eq!(eta.rank(), self.k, "fiber rank mismatch");
        let n = self.nvars();
        let mut coords = Vec::with_capacity(self.k);
        for a in 0..self.k {
            let mut acc = self.base.bracket_var(i, eta.coord(a));
            for b in 0..self.k {
                let g = self.gamma_at(a, i, b);
                if !g.is_zero() && !eta.coord(b).is_zero() {
                    acc = &acc + &(g * eta.coord(b));
                }
            }
            coords.push(acc);
        }
        FiberElem::new(n, coords)
    }

    /// `D_alpha eta`, module-linear in the form slot.
    pub fn contra_deriv(&self, alpha: &OneForm, eta: &FiberElem) -> FiberElem {
        assert_eq!(alpha.nvars(), self.nvars(), "dimension mismatch");
        let mut out = FiberElem::zero(self.nvars(), self.k);
        for i in 0..self.nvars() {
            if !alpha.comp(i).is_zero() {
                out = out.add(&self.contra_deriv_basis(i, eta).scale_poly(alpha.comp(i)));
            }
        }
        out
    }

    /// `([D_alpha, D_beta] - D_[[alpha,beta]]) eta`.
    pub fn curvature(&self, alpha: &OneForm, beta: &OneForm, eta: &FiberElem) -> FiberElem {
        let ab = self.contra_deriv(alpha, &self.contra_deriv(beta, eta));
        let ba = self.contra_deriv(beta, &self.contra_deriv(alpha, eta));
        let kb = self.contra_deriv(&self.base.koszul(alpha, beta), eta);
        ab.sub(&ba).sub(&kb)
    }

    /// Verify the structure conditions on every basis combination:
    /// the fiber Jacobi identity, invariance of the fiber bracket
    /// under `D`, curvature matching `ad K`, and the cyclic closure
    /// identity for `K`. Each failing instance is reported with its
    /// residual.
    pub fn check(&self) -> CheckReport<FiberElem> {
        let n = self.nvars();
        let k = self.k;
        let mut report = CheckReport::new("triple conditions");

        for a in 0..k {
            for b in a + 1..k {
                for g in b + 1..k {
                    let ea = FiberElem::basis(n, k, a);
                    let eb = FiberElem::basis(n, k, b);
                    let eg = FiberElem::basis(n, k, g);
                    let res = self
                        .fiber_bracket(&self.fiber_bracket(&ea, &eb), &eg)
                        .add(&self.fiber_bracket(&self.fiber_bracket(&eb, &eg), &ea))
                        .add(&self.fiber_bracket(&self.fiber_bracket(&eg, &ea), &eb));
                    if !res.is_zero() {
                        report.push(
                            "fiber Jacobi",
                            format!("(e{},e{},e{})", a + 1, b + 1, g + 1),
                            res,
                        );
                    }
                }
            }
        }

        for i in 0..n {
            for a in 0..k {
                for b in a + 1..k {
                    let ea = FiberElem::basis(n, k, a);
                    let eb = FiberElem::basis(n, k, b);
                    let res = self
                        .contra_deriv_basis(i, &self.fiber_bracket(&ea, &eb))
                        .sub(&self.fiber_bracket(&self.contra_deriv_basis(i, &ea), &eb))
                        .sub(&self.fiber_bracket(&ea, &self.contra_deriv_basis(i, &eb)));
                    if !res.is_zero() {
                        report.push(
                            "bracket invariance",
                            format!("(x{},e{},e{})", i + 1, a + 1, b + 1),
                            res,
                        );
                    }
                }
            }
        }

        for i in 0..n {
            for j in i + 1..n {
                // Exact-form bracket [[dx_i, dx_j]] = d pi_ij, taken
                // through the differential rather than the general
                // 1-form bracket so the curvature route stays
                // independent of `curvature`.
                let d_pi = self.base.differential(&self.base.pi(i, j));
                let k_ij = self.k_form(i, j);
                for b in 0..k {
                    let eb = FiberElem::basis(n, k, b);
                    let res = self
                        .contra_deriv_basis(i, &self.contra_deriv_basis(j, &eb))
                        .sub(&self.contra_deriv_basis(j, &self.contra_deriv_basis(i, &eb)))
                        .sub(&self.contra_deriv(&d_pi, &eb))
                        .sub(&self.fiber_bracket(&k_ij, &eb));
                    if !res.is_zero() {
                        report.push(
                            "curvature control",
                            format!("(x{},x{},e{})", i + 1, j + 1, b + 1),
                            res,
                        );
                    }
                }
            }
        }

        for i in 0..n {
            for j in i + 1..n {
                for l in j + 1..n {
                    let res = self.k_closure_residual(i, j, l);
                    if !res.is_zero() {
                        report.push(
                            "K closure",
                            format!("(x{},x{},x{})", i + 1, j + 1, l + 1),
                            res,
                        );
                    }
                }
            }
        }

        report
    }

    /// Cyclic sum `D_{dx_i} K(dx_j, dx_l) + K(dx_i, [[dx_j, dx_l]]) + cyclic`.
    fn k_closure_residual(&self, i: usize, j: usize, l: usize) -> FiberElem {
        let dx = |m| OneForm::dx(self.nvars(), m);
        let mut acc = FiberElem::zero(self.nvars(), self.k);
        for &(a, b, g) in &[(i, j, l), (j, l, i), (l, i, j)] {
            acc = acc.add(&self.contra_deriv_basis(a, &self.k_form(b, g)));
            acc = acc.add(&self.k_apply(&dx(a), &self.base.koszul(&dx(b), &dx(g))));
        }
        acc
    }

    /// Is `xi` in the center of the fiber Lie algebra?
    pub fn is_central(&self, xi: &FiberElem) -> bool {
        (0..self.k).all(|a| {
            self.fiber_bracket(xi, &FiberElem::basis(self.nvars(), self.k, a))
                .is_zero()
        })
    }

    /// Rational basis of the center elements whose coordinates have
    /// total degree at most `max_degree`. The reported basis is for
    /// that bounded-degree slice only; the full center need not be
    /// finitely generated in this presentation.
    pub fn center_basis(&self, max_degree: u32) -> Vec<FiberElem> {
        let monomials = crate::poly::Monomial::all_up_to_degree(self.nvars(), max_degree);
        self.center_basis_for(&monomials)
    }

    /// Center elements with coordinates homogeneous of degree exactly
    /// `degree`.
    pub fn center_slice_basis(&self, degree: u32) -> Vec<FiberElem> {
        let monomials = crate::poly::Monomial::all_of_degree(self.nvars(), degree);
        self.center_basis_for(&monomials)
    }

    fn center_basis_for(&self, monomials: &[crate::poly::Monomial]) -> Vec<FiberElem> {
        let n = self.nvars();
        let k = self.k;
        // Unknown (b, m) contributes x^m e_b; its bracket against every
        // basis vector must vanish.
        let mut columns = Vec::new();
        for b in 0..k {
            for m in monomials {
                let elem = FiberElem::basis(n, k, b).scale_poly(&monomial_poly(n, m));
                let mut slots = Vec::with_capacity(k * k);
                for a in 0..k {
                    let br = self.fiber_bracket(&elem, &FiberElem::basis(n, k, a));
                    slots.extend(br.coords.iter().cloned());
                }
                columns.push(slots);
            }
        }
        let (rows, _) = linalg::linearize(&columns, None);
        let kernel = linalg::nullspace(&rows, columns.len());
        kernel
            .into_iter()
            .map(|v| {
                let mut coords = vec![Poly::zero(n); k];
                for (u, coeff) in v.into_iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let b = u / monomials.len();
                    let m = &monomials[u % monomials.len()];
                    coords[b] = &coords[b] + &monomial_poly(n, m).scale(&coeff);
                }
                FiberElem::new(n, coords)
            })
            .collect()
    }

    /// Weight grading of the structure polynomials. Succeeds when each
    /// tensor family is homogeneous of a single degree and the base and
    /// connection degrees are compatible; the resulting `shift` is the
    /// degree change of the contravariant differential.
    pub fn weight_grading(&self) -> Result<Grading, GradingError> {
        let pi_deg = family_degree(
            "base",
            self.base
                .entries()
                .map(|(idx, p)| (format!("({},{})", idx.0 + 1, idx.1 + 1), p)),
        )?;
        let gamma_deg = family_degree(
            "connection",
            self.gamma
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(i, p)| (format!("#{i}"), p)),
        )?;
        family_degree(
            "fiber bracket",
            self.c
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(i, p)| (format!("#{i}"), p)),
        )?;
        family_degree(
            "k tensor",
            self.kk
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(i, p)| (format!("#{i}"), p)),
        )?;
        let shift = match (pi_deg, gamma_deg) {
            (Some(p), Some(g)) => {
                if p as i64 - 1 != g as i64 {
                    return Err(GradingError::IncompatibleShift {
                        pi_degree: p,
                        gamma_degree: g,
                    });
                }
                p as i64 - 1
            }
            (Some(p), None) => p as i64 - 1,
            (None, Some(g)) => g as i64,
            (None, None) => 0,
        };
        Ok(Grading { shift })
    }
}

fn family_degree<'a>(
    family: &'static str,
    entries: impl Iterator<Item = (String, &'a Poly)>,
) -> Result<Option<u32>, GradingError> {
    let mut deg: Option<u32> = None;
    for (at, p) in entries {
        let Some(d) = p.homogeneous_degree() else {
            return Err(GradingError::NonHomogeneous { family, at });
        };
        match deg {
            None => deg = Some(d),
            Some(d0) if d0 == d => {}
            Some(_) => return Err(GradingError::MixedDegrees { family }),
        }
    }
    Ok(deg)
}

pub(crate) fn monomial_poly(nvars: usize, m: &crate::poly::Monomial) -> Poly {
    Poly::monomial(nvars, m.clone(), num_traits::One::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{matrix_triple, so3_base, so3_triple, zero_triple};
    use crate::parse::parse_poly;
    use crate::poly::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(src: &str) -> Poly {
        parse_poly(src, 3).unwrap()
    }

    fn fe(coords: &[&str]) -> FiberElem {
        FiberElem::new(3, coords.iter().map(|s| p(s)).collect())
    }

    fn rand_poly(rng: &mut ChaCha8Rng, nvars: usize, max_deg: u32) -> Poly {
        let mut q = Poly::zero(nvars);
        for _ in 0..rng.gen_range(1..=3) {
            let c = rng.gen_range(-3i64..=3);
            let mut term = Poly::from_int(nvars, c);
            let mut deg = 0;
            while deg < max_deg && rng.gen_bool(0.5) {
                term = &term * &Poly::var(nvars, rng.gen_range(0..nvars));
                deg += 1;
            }
            q = &q + &term;
        }
        q
    }

    fn rand_fiber(rng: &mut ChaCha8Rng, nvars: usize, k: usize, max_deg: u32) -> FiberElem {
        FiberElem::new(
            nvars,
            (0..k).map(|_| rand_poly(rng, nvars, max_deg)).collect(),
        )
    }

    #[test]
    fn fiber_bracket_so3() {
        let t = so3_triple(rat(1, 2));
        let e = |a| FiberElem::basis(3, 3, a);
        assert_eq!(t.fiber_bracket(&e(0), &e(1)), e(2));
        assert_eq!(t.fiber_bracket(&e(1), &e(0)), e(2).neg());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let eta = rand_fiber(&mut rng, 3, 3, 2);
            assert!(t.fiber_bracket(&eta, &eta).is_zero());
        }
    }

    #[test]
    fn fiber_bracket_matrix_commutator() {
        let t = matrix_triple(2, so3_base());
        // Basis order E11, E12, E21, E22: [E12, E21] = E11 - E22.
        let e = |a| FiberElem::basis(3, 4, a);
        assert_eq!(t.fiber_bracket(&e(1), &e(2)), e(0).sub(&e(3)));
    }

    #[test]
    fn contra_deriv_so3() {
        let t = so3_triple(rat(1, 2));
        let e = |a| FiberElem::basis(3, 3, a);
        assert_eq!(t.contra_deriv_basis(0, &e(1)), e(2));
        assert!(t
            .contra_deriv(&OneForm::dx(3, 0), &FiberElem::zero(3, 3))
            .is_zero());
    }

    #[test]
    fn contra_deriv_matrix_anchor_action() {
        let t = matrix_triple(2, so3_base());
        // D_{dx1}(x2 E11) = {x1, x2} E11 = x3 E11.
        let eta = FiberElem::basis(3, 4, 0).scale_poly(&p("x2"));
        let want = FiberElem::basis(3, 4, 0).scale_poly(&p("x3"));
        assert_eq!(t.contra_deriv_basis(0, &eta), want);
    }

    #[test]
    fn contra_deriv_leibniz_randomized() {
        let t = so3_triple(rat(1, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..15 {
            let f = rand_poly(&mut rng, 3, 2);
            let eta = rand_fiber(&mut rng, 3, 3, 1);
            let alpha = OneForm::new((0..3).map(|_| rand_poly(&mut rng, 3, 1)).collect());
            let lhs = t.contra_deriv(&alpha, &eta.scale_poly(&f));
            let rhs = t
                .contra_deriv(&alpha, &eta)
                .scale_poly(&f)
                .add(&eta.scale_poly(&t.base().anchor(&alpha, &f)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn curvature_flat_on_fixtures() {
        for t in [so3_triple(rat(1, 2)), matrix_triple(2, so3_base())] {
            let n = t.nvars();
            let k = t.fiber_rank();
            for i in 0..n {
                for j in 0..n {
                    for a in 0..k {
                        let res = t.curvature(
                            &OneForm::dx(n, i),
                            &OneForm::dx(n, j),
                            &FiberElem::basis(n, k, a),
                        );
                        assert!(res.is_zero(), "curvature nonzero at ({i},{j},{a})");
                    }
                }
            }
        }
    }

    #[test]
    fn curvature_skew_in_forms() {
        let t = so3_triple(rat(1, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let alpha = OneForm::new((0..3).map(|_| rand_poly(&mut rng, 3, 1)).collect());
            let eta = rand_fiber(&mut rng, 3, 3, 1);
            assert!(t.curvature(&alpha, &alpha, &eta).is_zero());
        }
    }

    #[test]
    fn triple_check_passes_on_fixtures() {
        assert!(so3_triple(rat(0, 1)).check().passed());
        assert!(so3_triple(rat(1, 2)).check().passed());
        assert!(so3_triple(rat(1, 1)).check().passed());
        assert!(matrix_triple(2, so3_base()).check().passed());
        assert!(zero_triple(2, 2).check().passed());
    }

    #[test]
    fn triple_check_catches_flipped_connection_sign() {
        // Flip the sign of the e3-coefficient of D_{dx1} e2.
        let good = so3_triple(rat(1, 2));
        let mut entries = Vec::new();
        for a in 0..3 {
            for i in 0..3 {
                for b in 0..3 {
                    let mut v = good.gamma_at(a, i, b).clone();
                    if (a, i, b) == (2, 0, 1) {
                        v = v.neg();
                    }
                    if !v.is_zero() {
                        entries.push(((a, i, b), v));
                    }
                }
            }
        }
        let c_entries: Vec<_> = (0..3)
            .flat_map(|a| (0..3).flat_map(move |b| ((b + 1)..3).map(move |g| (a, b, g))))
            .map(|(a, b, g)| ((a, b, g), good.c_at(a, b, g)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        let bad = TripleData::new(so3_base(), 3, c_entries, entries, []).unwrap();
        let report = bad.check();
        assert!(!report.passed());
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == "curvature control" && v.at.starts_with("(x1,x2")));
    }

    #[test]
    fn curvature_route_agrees_with_check_block() {
        // Whether curvature equals ad K on the basis must match the
        // verdict of the curvature block of `check`, on valid and on
        // perturbed data alike.
        let good = so3_triple(rat(1, 2));
        let mut kk_perturbed = so3_triple(rat(1, 2));
        kk_perturbed.kk[pair_index(0, 1, 3)] = Poly::one(3); // K(dx1,dx2) += e1
        for t in [good, kk_perturbed] {
            let direct = (0..3).all(|i| {
                ((i + 1)..3).all(|j| {
                    (0..3).all(|b| {
                        let eb = FiberElem::basis(3, 3, b);
                        t.curvature(&OneForm::dx(3, i), &OneForm::dx(3, j), &eb)
                            == t.fiber_bracket(&t.k_form(i, j), &eb)
                    })
                })
            });
            let block = t
                .check()
                .violations
                .iter()
                .all(|v| v.condition != "curvature control");
            assert_eq!(direct, block);
        }
    }

    #[test]
    fn center_basis_values() {
        let t_half = so3_triple(rat(1, 2));
        assert!(t_half.center_basis(1).is_empty());

        let t_abelian = so3_triple(rat(0, 1));
        let z = t_abelian.center_basis(0);
        assert_eq!(z.len(), 3);
        for (a, zi) in z.iter().enumerate() {
            assert_eq!(*zi, FiberElem::basis(3, 3, a));
        }

        let t_mat = matrix_triple(2, so3_base());
        let z = t_mat.center_basis(0);
        assert_eq!(z.len(), 1);
        assert_eq!(z[0], fe(&["1", "0", "0", "1"]));
    }

    #[test]
    fn deriv_preserves_center() {
        let t = matrix_triple(2, so3_base());
        for xi in t.center_basis(1) {
            for i in 0..3 {
                let d = t.contra_deriv_basis(i, &xi);
                assert!(t.is_central(&d));
            }
        }
    }

    #[test]
    fn k_zero_and_valid_implies_flat() {
        for t in [so3_triple(rat(1, 2)), matrix_triple(2, so3_base())] {
            assert!(!t.has_k_tensor());
            assert!(t.check().passed());
            for i in 0..3 {
                for j in 0..3 {
                    for a in 0..t.fiber_rank() {
                        assert!(t
                            .curvature(
                                &OneForm::dx(3, i),
                                &OneForm::dx(3, j),
                                &FiberElem::basis(3, t.fiber_rank(), a)
                            )
                            .is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn grading_of_fixtures() {
        assert_eq!(so3_triple(rat(1, 2)).weight_grading().unwrap().shift, 0);
        assert_eq!(
            matrix_triple(2, so3_base()).weight_grading().unwrap().shift,
            0
        );
        assert_eq!(zero_triple(3, 2).weight_grading().unwrap().shift, 0);

        let base = PoissonBase::new(2, vec![((0, 1), parse_poly("x1 + 1", 2).unwrap())]).unwrap();
        let t = TripleData::zero(base, 1);
        assert!(matches!(
            t.weight_grading(),
            Err(GradingError::NonHomogeneous { family: "base", .. })
        ));
    }

    #[test]
    fn construction_errors() {
        let base = so3_base();
        assert!(matches!(
            TripleData::new(base.clone(), 2, vec![((0, 1, 1), p("1"))], [], []),
            Err(TripleError::DiagonalEntry { .. })
        ));
        assert!(matches!(
            TripleData::new(
                base.clone(),
                2,
                vec![((0, 0, 1), p("1")), ((0, 1, 0), p("1"))],
                [],
                []
            ),
            Err(TripleError::DuplicateEntry { .. })
        ));
        assert!(matches!(
            TripleData::new(base.clone(), 2, vec![((2, 0, 1), p("1"))], [], []),
            Err(TripleError::EntryOutOfRange { .. })
        ));
        assert!(matches!(
            TripleData::new(base, 2, [], vec![((0, 3, 1), p("1"))], []),
            Err(TripleError::EntryOutOfRange { .. })
        ));
    }
}
