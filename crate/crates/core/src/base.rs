//! The base Poisson algebra: `Q[x1..xn]` with bracket given by a skew
//! matrix of structure polynomials `pi_ij = {x_i, x_j}`.
//!
//! The Jacobi identity is checked on generator triples only. The
//! Jacobiator of a skew biderivation is an alternating triderivation,
//! so vanishing on the generators already implies vanishing
//! identically; a randomized full-Jacobiator test is kept in the test
//! suite as an independent oracle.

use crate::poly::{Poly, PolyError};
use crate::report::CheckReport;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaseError {
    #[error("structure entry ({i},{j}) out of range for {n} variables (need i < j <= n)")]
    EntryOutOfRange { i: usize, j: usize, n: usize },
    #[error("structure entry ({i},{j}) given more than once")]
    DuplicateEntry { i: usize, j: usize },
    #[error("structure entry ({i},{j}): {source}")]
    BadPoly {
        i: usize,
        j: usize,
        source: PolyError,
    },
}

/// A 1-form `a_1 dx_1 + ... + a_n dx_n` with polynomial components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    comps: Vec<Poly>,
}

impl OneForm {
    pub fn new(comps: Vec<Poly>) -> Self {
        OneForm { comps }
    }

    pub fn zero(nvars: usize) -> Self {
        OneForm {
            comps: vec![Poly::zero(nvars); nvars],
        }
    }

    /// The exact generator `dx_i` (0-based).
    pub fn dx(nvars: usize, i: usize) -> Self {
        let mut comps = vec![Poly::zero(nvars); nvars];
        comps[i] = Poly::one(nvars);
        OneForm { comps }
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn nvars(&self) -> usize {
        self.comps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        assert_eq!(self.nvars(), other.nvars());
        OneForm::new(
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        assert_eq!(self.nvars(), other.nvars());
        OneForm::new(
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Module action `f * alpha`.
    pub fn scale_poly(&self, f: &Poly) -> OneForm {
        OneForm::new(self.comps.iter().map(|a| a * f).collect())
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({}) dx{}", c, i + 1))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The base Poisson algebra on `n` variables. Only entries with
/// `i < j` are stored; `pi_ji = -pi_ij` is implied.
///
/// A `PoissonBase` is accepted unvalidated; [`PoissonBase::jacobi_check`]
/// is an explicit operation so that invalid instances stay
/// representable for counterexample workflows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonBase {
    n: usize,
    pi: BTreeMap<(usize, usize), Poly>,
}

impl PoissonBase {
    /// Build from sparse upper-triangular entries `((i, j), pi_ij)`
    /// with 0-based indices `i < j`. Zero polynomials are dropped.
    pub fn new(
        n: usize,
        entries: impl IntoIterator<Item = ((usize, usize), Poly)>,
    ) -> Result<Self, BaseError> {
        let mut pi = BTreeMap::new();
        for ((i, j), p) in entries {
            if i >= j || j >= n {
                return Err(BaseError::EntryOutOfRange { i, j, n });
            }
            if p.nvars() != n {
                return Err(BaseError::BadPoly {
                    i,
                    j,
                    source: PolyError::VarCountMismatch(p.nvars(), n),
                });
            }
            if pi.contains_key(&(i, j)) {
                return Err(BaseError::DuplicateEntry { i, j });
            }
            if !p.is_zero() {
                pi.insert((i, j), p);
            }
        }
        Ok(PoissonBase { n, pi })
    }

    pub fn zero(n: usize) -> Self {
        PoissonBase {
            n,
            pi: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    /// Stored upper-triangular entries, `(i, j)` with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Poly)> {
        self.pi.iter()
    }

    /// `{x_i, x_j}` with full skew extension.
    pub fn pi(&self, i: usize, j: usize) -> Poly {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => Poly::zero(self.n),
            Less => self
                .pi
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| Poly::zero(self.n)),
            Greater => self
                .pi
                .get(&(j, i))
                .map(|p| p.neg())
                .unwrap_or_else(|| Poly::zero(self.n)),
        }
    }

    /// `{f, g} = sum_{i<j} pi_ij (d_i f d_j g - d_j f d_i g)`.
    pub fn bracket(&self, f: &Poly, g: &Poly) -> Poly {
        assert_eq!(f.nvars(), self.n, "variable count mismatch");
        assert_eq!(g.nvars(), self.n, "variable count mismatch");
        let mut out = Poly::zero(self.n);
        for (&(i, j), p) in &self.pi {
            let mixed = &(&f.partial(i) * &g.partial(j)) - &(&f.partial(j) * &g.partial(i));
            if !mixed.is_zero() {
                out = &out + &(p * &mixed);
            }
        }
        out
    }

    /// `{x_i, g}`, the anchor of the exact generator `dx_i`.
    pub fn bracket_var(&self, i: usize, g: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for j in 0..self.n {
            let p = self.pi(i, j);
            if !p.is_zero() {
                out = &out + &(&p * &g.partial(j));
            }
        }
        out
    }

    /// Jacobi identity on all generator triples `i < j < k`. Failures
    /// carry the residual of the cyclic sum `{x_i,{x_j,x_k}} + ...`.
    pub fn jacobi_check(&self) -> CheckReport<Poly> {
        let mut report = CheckReport::new("base Jacobi");
        for i in 0..self.n {
            for j in i + 1..self.n {
                for k in j + 1..self.n {
                    let residual = self.jacobiator_vars(i, j, k);
                    if !residual.is_zero() {
                        report.push(
                            "Jacobi identity",
                            format!("(x{},x{},x{})", i + 1, j + 1, k + 1),
                            residual,
                        );
                    }
                }
            }
        }
        report
    }

    fn jacobiator_vars(&self, i: usize, j: usize, k: usize) -> Poly {
        let a = self.bracket_var(i, &self.pi(j, k));
        let b = self.bracket_var(j, &self.pi(k, i));
        let c = self.bracket_var(k, &self.pi(i, j));
        &(&a + &b) + &c
    }

    /// The exterior derivative `df = (d_1 f, ..., d_n f)`.
    pub fn differential(&self, f: &Poly) -> OneForm {
        OneForm::new((0..self.n).map(|i| f.partial(i)).collect())
    }

    /// Anchor action `rho(alpha)(g) = sum_{i,j} a_i pi_ij d_j g`.
    pub fn anchor(&self, alpha: &OneForm, g: &Poly) -> Poly {
        assert_eq!(alpha.nvars(), self.n);
        let mut out = Poly::zero(self.n);
        for (i, a) in alpha.comps.iter().enumerate() {
            if !a.is_zero() {
                out = &out + &(a * &self.bracket_var(i, g));
            }
        }
        out
    }

    /// The Lie bracket of 1-forms. On exact generators it returns
    /// `[[dx_i, dx_j]] = d pi_ij`; in general, component `k` is
    /// `rho(alpha)(b_k) - rho(beta)(a_k) + sum_{i<j} d_k(pi_ij)(a_i b_j - a_j b_i)`.
    pub fn koszul(&self, alpha: &OneForm, beta: &OneForm) -> OneForm {
        assert_eq!(alpha.nvars(), self.n);
        assert_eq!(beta.nvars(), self.n);
        let mut comps = Vec::with_capacity(self.n);
        for k in 0..self.n {
            let mut c = &self.anchor(alpha, beta.comp(k)) - &self.anchor(beta, alpha.comp(k));
            for (&(i, j), p) in &self.pi {
                let pair = &(alpha.comp(i) * beta.comp(j)) - &(alpha.comp(j) * beta.comp(i));
                if !pair.is_zero() {
                    c = &c + &(&p.partial(k) * &pair);
                }
            }
            comps.push(c);
        }
        OneForm::new(comps)
    }
}
