//! Skew multiderivation tensors valued in the fiber, the contravariant
//! differentials on them, the comparison map between the form-indexed
//! and function-indexed pictures, graded cohomology dimensions, and
//! the generalized-derivation membership checks.
//!
//! A rank-`r` tensor is stored by its values on strictly increasing
//! generator tuples. The full multiderivation is recovered by
//! contracting partial derivatives against those values, which is the
//! unique extension with the stored generator data.

use crate::base::OneForm;
use crate::fiber::{FiberElem, GradingError, TripleData};
use crate::linalg;
use crate::poly::{Monomial, Poly};
use crate::report::CheckReport;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("entry key {key:?} has length {got}, expected rank {rank}")]
    KeyLength {
        key: Vec<usize>,
        got: usize,
        rank: usize,
    },
    #[error("entry key {key:?} repeats an index")]
    RepeatedIndex { key: Vec<usize> },
    #[error("entry key {key:?} out of range for {n} variables")]
    IndexOutOfRange { key: Vec<usize>, n: usize },
    #[error("entry key {key:?} given more than once (skew slots are given once)")]
    DuplicateKey { key: Vec<usize> },
    #[error("entry at {key:?} has wrong dimensions")]
    DimensionMismatch { key: Vec<usize> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("input is not weight-graded: {0}")]
    NotGraded(#[from] GradingError),
}

/// Sort an index tuple, tracking the permutation sign. `None` when an
/// index repeats.
fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v: Vec<usize> = idx.to_vec();
    let mut sign = 1i64;
    for i in 0..v.len() {
        for j in (i + 1..v.len()).rev() {
            if v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

fn increasing_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= n {
        rec(0, n, r, &mut Vec::new(), &mut out);
    }
    out
}

/// Shared storage for both tensor flavors: values on strictly
/// increasing index tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SkewStore {
    nvars: usize,
    k: usize,
    rank: usize,
    entries: BTreeMap<Vec<usize>, FiberElem>,
}

impl SkewStore {
    fn new(
        nvars: usize,
        k: usize,
        rank: usize,
        items: impl IntoIterator<Item = (Vec<usize>, FiberElem)>,
    ) -> Result<Self, TensorError> {
        let mut entries = BTreeMap::new();
        for (key, val) in items {
            if key.len() != rank {
                return Err(TensorError::KeyLength {
                    got: key.len(),
                    key,
                    rank,
                });
            }
            if key.iter().any(|&i| i >= nvars) {
                return Err(TensorError::IndexOutOfRange { key, n: nvars });
            }
            let Some((sorted, sign)) = sort_with_sign(&key) else {
                return Err(TensorError::RepeatedIndex { key });
            };
            if val.rank() != k || val.nvars() != nvars {
                return Err(TensorError::DimensionMismatch { key });
            }
            if entries.contains_key(&sorted) {
                return Err(TensorError::DuplicateKey { key });
            }
            let val = if sign < 0 { val.neg() } else { val };
            if !val.is_zero() {
                entries.insert(sorted, val);
            }
        }
        Ok(SkewStore {
            nvars,
            k,
            rank,
            entries,
        })
    }

    fn zero(nvars: usize, k: usize, rank: usize) -> Self {
        SkewStore {
            nvars,
            k,
            rank,
            entries: BTreeMap::new(),
        }
    }

    /// Full skew lookup at an arbitrary tuple.
    fn at(&self, idx: &[usize]) -> FiberElem {
        assert_eq!(idx.len(), self.rank, "arity mismatch");
        match sort_with_sign(idx) {
            None => FiberElem::zero(self.nvars, self.k),
            Some((sorted, sign)) => match self.entries.get(&sorted) {
                None => FiberElem::zero(self.nvars, self.k),
                Some(v) => {
                    if sign < 0 {
                        v.neg()
                    } else {
                        v.clone()
                    }
                }
            },
        }
    }

    fn is_zero(&self) -> bool {
        self.entries.values().all(FiberElem::is_zero)
    }

    fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg: Option<u32> = None;
        for v in self.entries.values() {
            match (deg, v.homogeneous_degree()) {
                (_, None) => return None,
                (None, d) => deg = d,
                (Some(d0), Some(d)) if d0 == d => {}
                _ => return None,
            }
        }
        deg.or(Some(0))
    }
}

/// A skew `r`-multiderivation of the base valued in the fiber, stored
/// by its generator values `Q(x_{i_1}, ..., x_{i_r})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivTensor(SkewStore);

/// A module-multilinear skew map on 1-forms valued in the fiber,
/// stored by its values on `(dx_{i_1}, ..., dx_{i_r})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormTensor(SkewStore);

impl DerivTensor {
    pub fn new(
        nvars: usize,
        k: usize,
        rank: usize,
        items: impl IntoIterator<Item = (Vec<usize>, FiberElem)>,
    ) -> Result<Self, TensorError> {
        SkewStore::new(nvars, k, rank, items).map(DerivTensor)
    }

    pub fn zero(nvars: usize, k: usize, rank: usize) -> Self {
        DerivTensor(SkewStore::zero(nvars, k, rank))
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars
    }

    pub fn fiber_rank(&self) -> usize {
        self.0.k
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Generator value with full skew expansion.
    pub fn entry(&self, idx: &[usize]) -> FiberElem {
        self.0.at(idx)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &FiberElem)> {
        self.0.entries.iter()
    }

    pub fn add(&self, other: &DerivTensor) -> DerivTensor {
        assert_eq!(self.rank(), other.rank());
        let mut out = self.0.clone();
        for (key, val) in &other.0.entries {
            let merged = out
                .entries
                .get(key)
                .map(|cur| cur.add(val))
                .unwrap_or_else(|| val.clone());
            if merged.is_zero() {
                out.entries.remove(key);
            } else {
                out.entries.insert(key.clone(), merged);
            }
        }
        DerivTensor(out)
    }

    pub fn sub(&self, other: &DerivTensor) -> DerivTensor {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DerivTensor {
        let mut out = self.0.clone();
        for val in out.entries.values_mut() {
            *val = val.neg();
        }
        DerivTensor(out)
    }

    pub fn scale(&self, c: &crate::poly::Rat) -> DerivTensor {
        let mut out = SkewStore::zero(self.0.nvars, self.0.k, self.0.rank);
        for (key, val) in &self.0.entries {
            let v = val.scale(c);
            if !v.is_zero() {
                out.entries.insert(key.clone(), v);
            }
        }
        DerivTensor(out)
    }

    /// `Some(d)` when every entry is homogeneous of degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        self.0.homogeneous_degree()
    }

    /// The full multiderivation: contract partials of the arguments
    /// against the generator values.
    pub fn apply(&self, fs: &[Poly]) -> FiberElem {
        assert_eq!(fs.len(), self.rank(), "arity mismatch");
        let n = self.nvars();
        let mut out = FiberElem::zero(n, self.fiber_rank());
        for (key, val) in &self.0.entries {
            // det of the matrix [d_{i_p} f_q].
            let jac: Vec<Vec<Poly>> = key
                .iter()
                .map(|&i| fs.iter().map(|f| f.partial(i)).collect())
                .collect();
            let coeff = det(&jac, n);
            if !coeff.is_zero() {
                out = out.add(&val.scale_poly(&coeff));
            }
        }
        out
    }

    pub fn is_center_valued(&self, triple: &TripleData) -> bool {
        self.0.entries.values().all(|v| triple.is_central(v))
    }
}

impl FormTensor {
    pub fn new(
        nvars: usize,
        k: usize,
        rank: usize,
        items: impl IntoIterator<Item = (Vec<usize>, FiberElem)>,
    ) -> Result<Self, TensorError> {
        SkewStore::new(nvars, k, rank, items).map(FormTensor)
    }

    pub fn zero(nvars: usize, k: usize, rank: usize) -> Self {
        FormTensor(SkewStore::zero(nvars, k, rank))
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars
    }

    pub fn fiber_rank(&self) -> usize {
        self.0.k
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn entry(&self, idx: &[usize]) -> FiberElem {
        self.0.at(idx)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &FiberElem)> {
        self.0.entries.iter()
    }

    /// Module-multilinear evaluation on 1-forms.
    pub fn apply(&self, forms: &[OneForm]) -> FiberElem {
        assert_eq!(forms.len(), self.rank(), "arity mismatch");
        let n = self.nvars();
        let mut out = FiberElem::zero(n, self.fiber_rank());
        for (key, val) in &self.0.entries {
            let comps: Vec<Vec<Poly>> = key
                .iter()
                .map(|&i| forms.iter().map(|a| a.comp(i).clone()).collect())
                .collect();
            let coeff = det(&comps, n);
            if !coeff.is_zero() {
                out = out.add(&val.scale_poly(&coeff));
            }
        }
        out
    }

    /// The comparison map into multiderivations: on generator entries
    /// it is the identity on components (the forms are free on the
    /// `dx_i`), so only the flavor changes.
    pub fn to_deriv(&self) -> DerivTensor {
        DerivTensor(self.0.clone())
    }

    pub fn is_center_valued(&self, triple: &TripleData) -> bool {
        self.0.entries.values().all(|v| triple.is_central(v))
    }
}

fn det(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let r = m.len();
    if r == 0 {
        return Poly::one(nvars);
    }
    if r == 1 {
        return m[0][0].clone();
    }
    // Laplace expansion along the first row; ranks stay tiny here.
    let mut acc = Poly::zero(nvars);
    for (col, top) in m[0].iter().enumerate() {
        if top.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let cof = &det(&minor, nvars) * top;
        acc = if col % 2 == 0 {
            &acc + &cof
        } else {
            &acc - &cof
        };
    }
    acc
}

/// Outcome of the `d^2` check against the curvature contraction.
#[derive(Debug, Clone)]
pub struct DSquaredReport {
    /// Residuals of `d(dQ) - curvature contraction` per entry tuple.
    pub agreement: CheckReport<FiberElem>,
    /// Whether `d(dQ)` itself vanished.
    pub d_squared_zero: bool,
}

/// Outcome of the generalized-derivation membership check.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub ell_poisson: CheckReport<Poly>,
    pub derives_bracket: CheckReport<FiberElem>,
    pub connection_theta: CheckReport<FiberElem>,
    pub k_theta: CheckReport<FiberElem>,
}

impl MembershipReport {
    pub fn passed(&self) -> bool {
        self.ell_poisson.passed()
            && self.derives_bracket.passed()
            && self.connection_theta.passed()
            && self.k_theta.passed()
    }
}

impl fmt::Display for MembershipReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.ell_poisson)?;
        writeln!(f, "{}", self.derives_bracket)?;
        writeln!(f, "{}", self.connection_theta)?;
        writeln!(f, "{}", self.k_theta)?;
        write!(
            f,
            "membership: {}",
            if self.passed() { "yes" } else { "no" }
        )
    }
}

/// A generalized derivation of the fiber: a map `L` with base
/// derivation `ell` such that `L(f eta) = f L(eta) + ell(f) eta`,
/// stored by generator values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenDerivation {
    nvars: usize,
    k: usize,
    ell: Vec<Poly>,
    cols: Vec<FiberElem>,
}

impl GenDerivation {
    pub fn new(nvars: usize, k: usize, ell: Vec<Poly>, cols: Vec<FiberElem>) -> Self {
        assert_eq!(ell.len(), nvars);
        assert_eq!(cols.len(), k);
        GenDerivation {
            nvars,
            k,
            ell,
            cols,
        }
    }

    pub fn apply_ell(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (i, v) in self.ell.iter().enumerate() {
            if !v.is_zero() {
                out = &out + &(&f.partial(i) * v);
            }
        }
        out
    }

    pub fn apply(&self, xi: &FiberElem) -> FiberElem {
        let mut out = FiberElem::zero(self.nvars, self.k);
        for (b, col) in self.cols.iter().enumerate() {
            if !xi.coord(b).is_zero() {
                out = out.add(&col.scale_poly(xi.coord(b)));
            }
        }
        let coeff_part = FiberElem::new(
            self.nvars,
            xi.coords().iter().map(|c| self.apply_ell(c)).collect(),
        );
        out.add(&coeff_part)
    }

    pub fn ell_vals(&self) -> &[Poly] {
        &self.ell
    }

    pub fn col(&self, b: usize) -> &FiberElem {
        &self.cols[b]
    }
}

/// Witness for membership of a 1-cocycle class in the kernel of the
/// torsion-induced map: `c = T_{kas ⊕ eta} + d(center_shift)` with
/// `kas` a base Casimir and `D_{d kas} + ad_eta = 0`.
#[derive(Debug, Clone)]
pub struct TorsionClassWitness {
    pub casimir: Poly,
    pub eta: FiberElem,
    pub center_shift: FiberElem,
}

impl TripleData {
    /// The contravariant differential on multiderivation tensors,
    /// `(dQ)(f_0..f_r) = sum_i (-1)^i D_{df_i} Q(.. f_i ..) +
    /// sum_{i<j} (-1)^{i+j} Q({f_i,f_j}, .. f_i .. f_j ..)`,
    /// evaluated on generator tuples.
    pub fn d_deriv(&self, q: &DerivTensor) -> DerivTensor {
        let n = self.nvars();
        let r = q.rank();
        let mut items = Vec::new();
        for tuple in increasing_tuples(n, r + 1) {
            let mut acc = FiberElem::zero(n, self.fiber_rank());
            for p in 0..=r {
                let rest: Vec<usize> = tuple
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| *m != p)
                    .map(|(_, &i)| i)
                    .collect();
                let term = self.contra_deriv_basis(tuple[p], &q.entry(&rest));
                acc = if p % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            for p in 0..=r {
                for s in p + 1..=r {
                    let mut args = vec![self.base().pi(tuple[p], tuple[s])];
                    args.extend(
                        tuple
                            .iter()
                            .enumerate()
                            .filter(|(m, _)| *m != p && *m != s)
                            .map(|(_, &i)| Poly::var(n, i)),
                    );
                    let term = q.apply(&args);
                    acc = if (p + s) % 2 == 0 {
                        acc.add(&term)
                    } else {
                        acc.sub(&term)
                    };
                }
            }
            if !acc.is_zero() {
                items.push((tuple, acc));
            }
        }
        DerivTensor::new(n, self.fiber_rank(), r + 1, items).expect("well-formed by construction")
    }

    /// The form-level contravariant differential, with the 1-form
    /// bracket in place of the base bracket. On generator entries it
    /// matches [`TripleData::d_deriv`] through the comparison map.
    pub fn d_form(&self, q: &FormTensor) -> FormTensor {
        let n = self.nvars();
        let r = q.rank();
        let dx = |i: usize| OneForm::dx(n, i);
        let mut items = Vec::new();
        for tuple in increasing_tuples(n, r + 1) {
            let mut acc = FiberElem::zero(n, self.fiber_rank());
            for p in 0..=r {
                let rest: Vec<usize> = tuple
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| *m != p)
                    .map(|(_, &i)| i)
                    .collect();
                let term = self.contra_deriv_basis(tuple[p], &q.entry(&rest));
                acc = if p % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            for p in 0..=r {
                for s in p + 1..=r {
                    let mut args = vec![self.base().koszul(&dx(tuple[p]), &dx(tuple[s]))];
                    args.extend(
                        tuple
                            .iter()
                            .enumerate()
                            .filter(|(m, _)| *m != p && *m != s)
                            .map(|(_, &i)| dx(i)),
                    );
                    let term = q.apply(&args);
                    acc = if (p + s) % 2 == 0 {
                        acc.add(&term)
                    } else {
                        acc.sub(&term)
                    };
                }
            }
            if !acc.is_zero() {
                items.push((tuple, acc));
            }
        }
        FormTensor::new(n, self.fiber_rank(), r + 1, items).expect("well-formed by construction")
    }

    /// The K tensor as a rank-2 form tensor.
    pub fn k_as_form_tensor(&self) -> FormTensor {
        let n = self.nvars();
        let mut items = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = self.k_form(i, j);
                if !v.is_zero() {
                    items.push((vec![i, j], v));
                }
            }
        }
        FormTensor::new(n, self.fiber_rank(), 2, items).expect("well-formed by construction")
    }

    /// Verify the square of the contravariant differential against
    /// the curvature contraction `(d^2 Q)(f_0..f_{r+1}) =
    /// sum_{i<j} (-1)^{i+j+1} Curv(df_i, df_j)(Q(.. f_i .. f_j ..))`,
    /// entry by entry.
    pub fn d_squared_check(&self, q: &DerivTensor) -> DSquaredReport {
        let n = self.nvars();
        let r = q.rank();
        let dd = self.d_deriv(&self.d_deriv(q));
        let mut agreement = CheckReport::new("square of the differential");
        let mut d_squared_zero = true;
        for tuple in increasing_tuples(n, r + 2) {
            let lhs = dd.entry(&tuple);
            if !lhs.is_zero() {
                d_squared_zero = false;
            }
            let mut rhs = FiberElem::zero(n, self.fiber_rank());
            for p in 0..tuple.len() {
                for s in p + 1..tuple.len() {
                    let rest: Vec<Poly> = tuple
                        .iter()
                        .enumerate()
                        .filter(|(m, _)| *m != p && *m != s)
                        .map(|(_, &i)| Poly::var(n, i))
                        .collect();
                    let inner = q.apply(&rest);
                    let term = self.curvature(
                        &OneForm::dx(n, tuple[p]),
                        &OneForm::dx(n, tuple[s]),
                        &inner,
                    );
                    acc_signed(&mut rhs, term, (p + s + 1) % 2 == 0);
                }
            }
            let res = lhs.sub(&rhs);
            if !res.is_zero() {
                agreement.push(
                    "curvature identity",
                    format!("({})", tuple_names(&tuple).join(",")),
                    res,
                );
            }
        }
        DSquaredReport {
            agreement,
            d_squared_zero,
        }
    }

    /// Dimensions `(cocycles, coboundaries, difference)` of the
    /// differential restricted to tensors of the given rank whose
    /// entries are homogeneous of the given degree (center-valued if
    /// flagged). Requires weight-graded structure data, which makes
    /// each graded piece a finite exact computation.
    pub fn cohomology_dims(
        &self,
        rank: usize,
        degree: u32,
        center_valued: bool,
    ) -> Result<(usize, usize, usize), CohomologyError> {
        let grading = self.weight_grading()?;
        let shift = grading.shift;

        let cocycles = {
            let basis = self.graded_tensor_basis(rank, degree as i64, center_valued);
            let columns: Vec<Vec<Poly>> = basis
                .iter()
                .map(|q| self.flatten_tensor(&self.d_deriv(q), rank + 1))
                .collect();
            let (rows, _) = linalg::linearize(&columns, None);
            basis.len() - linalg::rank(&rows, columns.len())
        };

        let coboundaries = if rank == 0 {
            0
        } else {
            let source_deg = degree as i64 - shift;
            let basis = self.graded_tensor_basis(rank - 1, source_deg, center_valued);
            let columns: Vec<Vec<Poly>> = basis
                .iter()
                .map(|q| self.flatten_tensor(&self.d_deriv(q), rank))
                .collect();
            let (rows, _) = linalg::linearize(&columns, None);
            linalg::rank(&rows, columns.len())
        };

        Ok((
            cocycles,
            coboundaries,
            cocycles.saturating_sub(coboundaries),
        ))
    }

    /// Filtered fallback for non-graded data: dimensions of the
    /// cocycle space and of the coboundary image within the
    /// degree-at-most window. These are bounds tied to the filtration,
    /// not graded cohomology, and are labeled as such by callers.
    pub fn filtered_dims(
        &self,
        rank: usize,
        max_degree: u32,
        center_valued: bool,
    ) -> (usize, usize) {
        let mut basis = Vec::new();
        for d in 0..=max_degree {
            basis.extend(self.graded_tensor_basis(rank, d as i64, center_valued));
        }
        let columns: Vec<Vec<Poly>> = basis
            .iter()
            .map(|q| self.flatten_tensor(&self.d_deriv(q), rank + 1))
            .collect();
        let (rows, _) = linalg::linearize(&columns, None);
        let cocycles = basis.len() - linalg::rank(&rows, columns.len());

        let boundaries = if rank == 0 {
            0
        } else {
            let mut src = Vec::new();
            for d in 0..=max_degree {
                src.extend(self.graded_tensor_basis(rank - 1, d as i64, center_valued));
            }
            let columns: Vec<Vec<Poly>> = src
                .iter()
                .map(|q| self.flatten_tensor(&self.d_deriv(q), rank))
                .collect();
            let (rows, _) = linalg::linearize(&columns, None);
            linalg::rank(&rows, columns.len())
        };
        (cocycles, boundaries)
    }

    /// Rational basis of rank-`rank` tensors with entries homogeneous
    /// of the given degree, drawn from the center if flagged.
    fn graded_tensor_basis(
        &self,
        rank: usize,
        degree: i64,
        center_valued: bool,
    ) -> Vec<DerivTensor> {
        let n = self.nvars();
        let k = self.fiber_rank();
        if degree < 0 {
            return Vec::new();
        }
        let degree = degree as u32;
        let values: Vec<FiberElem> = if center_valued {
            self.center_slice_basis(degree)
        } else {
            let mut v = Vec::new();
            for b in 0..k {
                for m in Monomial::all_of_degree(n, degree) {
                    v.push(FiberElem::basis(n, k, b).scale_poly(&Poly::monomial(
                        n,
                        m,
                        num_traits::One::one(),
                    )));
                }
            }
            v
        };
        let mut basis = Vec::new();
        for tuple in increasing_tuples(n, rank) {
            for val in &values {
                basis.push(
                    DerivTensor::new(n, k, rank, vec![(tuple.clone(), val.clone())])
                        .expect("well-formed by construction"),
                );
            }
        }
        basis
    }

    /// Flatten a tensor of the given rank into polynomial slots, one
    /// per (tuple, fiber coordinate), for the linear-algebra layer.
    fn flatten_tensor(&self, q: &DerivTensor, rank: usize) -> Vec<Poly> {
        let n = self.nvars();
        let mut slots = Vec::new();
        for tuple in increasing_tuples(n, rank) {
            let v = q.entry(&tuple);
            slots.extend(v.coords().iter().cloned());
        }
        slots
    }

    /// Membership check for generalized derivations compatible with
    /// the structure: `ell` must be a base Poisson derivation, `L`
    /// must derive the fiber bracket, the commutator with the
    /// connection must be inner via `theta`, and `theta` must absorb
    /// the K defect.
    pub fn m_membership_check(&self, l: &GenDerivation, theta: &[FiberElem]) -> MembershipReport {
        let n = self.nvars();
        let k = self.fiber_rank();
        assert_eq!(theta.len(), n, "theta needs one value per generator");
        let var = |i: usize| Poly::var(n, i);
        let basis = |a: usize| FiberElem::basis(n, k, a);
        let theta_at = |u: &Poly| -> FiberElem {
            let mut out = FiberElem::zero(n, k);
            for (i, th) in theta.iter().enumerate() {
                if !th.is_zero() {
                    out = out.add(&th.scale_poly(&u.partial(i)));
                }
            }
            out
        };

        let mut ell_poisson = CheckReport::new("base map is a Poisson derivation");
        for i in 0..n {
            for j in i + 1..n {
                let res = &(&l.apply_ell(&self.base().pi(i, j))
                    - &self.base().bracket(&l.ell_vals()[i], &var(j)))
                    - &self.base().bracket(&var(i), &l.ell_vals()[j]);
                if !res.is_zero() {
                    ell_poisson.push("base identity", format!("(x{},x{})", i + 1, j + 1), res);
                }
            }
        }

        let mut derives_bracket = CheckReport::new("derives the fiber bracket");
        for a in 0..k {
            for b in a + 1..k {
                let res = l
                    .apply(&self.fiber_bracket(&basis(a), &basis(b)))
                    .sub(&self.fiber_bracket(l.col(a), &basis(b)))
                    .sub(&self.fiber_bracket(&basis(a), l.col(b)));
                if !res.is_zero() {
                    derives_bracket.push(
                        "bracket identity",
                        format!("(e{},e{})", a + 1, b + 1),
                        res,
                    );
                }
            }
        }

        let mut connection_theta = CheckReport::new("connection commutator is inner via theta");
        for i in 0..n {
            for a in 0..k {
                let ea = basis(a);
                let res = self
                    .contra_deriv_basis(i, &l.apply(&ea))
                    .sub(&l.apply(&self.contra_deriv_basis(i, &ea)))
                    .add(&self.contra_deriv(&self.base().differential(&l.ell_vals()[i]), &ea))
                    .sub(&self.fiber_bracket(&theta[i], &ea));
                if !res.is_zero() {
                    connection_theta.push(
                        "inner commutator",
                        format!("(x{},e{})", i + 1, a + 1),
                        res,
                    );
                }
            }
        }

        let mut k_theta = CheckReport::new("theta absorbs the K defect");
        for i in 0..n {
            for j in i + 1..n {
                let d_theta = self
                    .contra_deriv_basis(i, &theta[j])
                    .sub(&self.contra_deriv_basis(j, &theta[i]))
                    .sub(&theta_at(&self.base().pi(i, j)));
                let res = l
                    .apply(&self.k_form(i, j))
                    .sub(&self.k_apply(
                        &self.base().differential(&l.ell_vals()[i]),
                        &OneForm::dx(n, j),
                    ))
                    .sub(&self.k_apply(
                        &OneForm::dx(n, i),
                        &self.base().differential(&l.ell_vals()[j]),
                    ))
                    .add(&d_theta);
                if !res.is_zero() {
                    k_theta.push("K defect", format!("(x{},x{})", i + 1, j + 1), res);
                }
            }
        }

        MembershipReport {
            ell_poisson,
            derives_bracket,
            connection_theta,
            k_theta,
        }
    }

    /// Bounded-degree search for a witness that the class of the
    /// 1-cocycle `c` is a torsion class: `c = T_{kas ⊕ eta} + d(xi)`
    /// with `kas` a base Casimir, `D_{d kas} + ad_eta = 0`, and `xi`
    /// central. `None` at this degree window is inconclusive.
    pub fn torsion_class_witness(
        &self,
        c: &DerivTensor,
        max_degree: u32,
    ) -> Option<TorsionClassWitness> {
        assert_eq!(c.rank(), 1, "expected a rank-1 tensor");
        let n = self.nvars();
        let k = self.fiber_rank();
        let monomials = Monomial::all_up_to_degree(n, max_degree);
        let center = self.center_basis(max_degree);

        // Unknowns: base coefficients of kas, fiber coefficients of
        // eta, center coefficients of xi.
        #[derive(Clone)]
        enum Unknown {
            Base(Poly),
            Eta(FiberElem),
            Center(FiberElem),
        }
        let mut unknowns = Vec::new();
        for m in &monomials {
            unknowns.push(Unknown::Base(Poly::monomial(
                n,
                m.clone(),
                num_traits::One::one(),
            )));
        }
        for b in 0..k {
            for m in &monomials {
                unknowns.push(Unknown::Eta(
                    FiberElem::basis(n, k, b).scale_poly(&Poly::monomial(
                        n,
                        m.clone(),
                        num_traits::One::one(),
                    )),
                ));
            }
        }
        for z in &center {
            unknowns.push(Unknown::Center(z.clone()));
        }

        // Slots: n fiber values (the witness equation), n base
        // polynomials (Casimir), k fiber values (operator condition).
        let slot_count = n * (k + 1) + k * k;
        let columns: Vec<Vec<Poly>> = unknowns
            .iter()
            .map(|u| {
                let mut slots = Vec::with_capacity(slot_count);
                match u {
                    Unknown::Base(kas) => {
                        let dk = self.base().differential(kas);
                        for i in 0..n {
                            let w = self.k_apply(&dk, &OneForm::dx(n, i));
                            slots.extend(w.coords().iter().cloned());
                        }
                        for j in 0..n {
                            slots.push(self.base().bracket(kas, &Poly::var(n, j)));
                        }
                        for a in 0..k {
                            let w = self.contra_deriv(&dk, &FiberElem::basis(n, k, a));
                            slots.extend(w.coords().iter().cloned());
                        }
                    }
                    Unknown::Eta(eta) => {
                        for i in 0..n {
                            let w = self.contra_deriv_basis(i, eta).neg();
                            slots.extend(w.coords().iter().cloned());
                        }
                        for _ in 0..n {
                            slots.push(Poly::zero(n));
                        }
                        for a in 0..k {
                            let w = self.fiber_bracket(eta, &FiberElem::basis(n, k, a));
                            slots.extend(w.coords().iter().cloned());
                        }
                    }
                    Unknown::Center(z) => {
                        for i in 0..n {
                            let w = self.contra_deriv_basis(i, z);
                            slots.extend(w.coords().iter().cloned());
                        }
                        for _ in 0..n {
                            slots.push(Poly::zero(n));
                        }
                        for _ in 0..k {
                            slots.extend(FiberElem::zero(n, k).coords().iter().cloned());
                        }
                    }
                }
                slots
            })
            .collect();

        let mut rhs = Vec::with_capacity(slot_count);
        for i in 0..n {
            rhs.extend(c.entry(&[i]).coords().iter().cloned());
        }
        for _ in 0..n {
            rhs.push(Poly::zero(n));
        }
        for _ in 0..(k * k) {
            rhs.push(Poly::zero(n));
        }

        let (rows, rhs_vec) = linalg::linearize(&columns, Some(&rhs));
        let sol = linalg::solve(&rows, columns.len(), &rhs_vec.unwrap())?;

        let mut casimir = Poly::zero(n);
        let mut eta = FiberElem::zero(n, k);
        let mut center_shift = FiberElem::zero(n, k);
        for (u, coeff) in sol.into_iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            match &unknowns[u] {
                Unknown::Base(p) => casimir = &casimir + &p.scale(&coeff),
                Unknown::Eta(v) => eta = eta.add(&v.scale(&coeff)),
                Unknown::Center(z) => center_shift = center_shift.add(&z.scale(&coeff)),
            }
        }
        Some(TorsionClassWitness {
            casimir,
            eta,
            center_shift,
        })
    }
}

fn acc_signed(acc: &mut FiberElem, term: FiberElem, positive: bool) {
    *acc = if positive {
        acc.add(&term)
    } else {
        acc.sub(&term)
    };
}

fn tuple_names(tuple: &[usize]) -> Vec<String> {
    tuple.iter().map(|&i| format!("x{}", i + 1)).collect()
}
