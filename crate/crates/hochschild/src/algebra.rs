//! Concrete k-algebras with a distinguished monomial basis.
//!
//! Three presentations are supported: polynomial rings k[x_1,…,x_n],
//! truncated polynomial rings `k[x]/(x^m)`, and finite-dimensional algebras
//! given by structure constants. Each carries a fixed ordered monomial basis:
//! for polynomial algebras the order is x_1 < x_2 < ⋯ < x_n extended
//! degree-lexicographically, and all "ordered monomial" logic in the Koszul
//! instance depends on it.

use crate::scalar::{Field, Scalar};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("operands live in different algebras")]
    MixedAlgebras,
    #[error("monomial is not valid for this algebra: {0}")]
    InvalidMonomial(String),
    #[error("partial derivatives require a polynomial algebra")]
    NotPolynomialAlgebra,
    #[error("structure constants are not associative: e{0}·(e{1}·e{2}) ≠ (e{0}·e{1})·e{2}")]
    NotAssociative(usize, usize, usize),
    #[error("designated unit index {0} is not a two-sided unit")]
    NotUnital(usize),
    #[error("structure-constant table has wrong shape")]
    MalformedTable,
}

/// A basis monomial: an exponent vector (polynomial and truncated algebras)
/// or a basis index (structure-constant algebras).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Monomial {
    Exps(Vec<u32>),
    Basis(usize),
}

impl Monomial {
    pub fn one_exps(nvars: usize) -> Monomial {
        Monomial::Exps(vec![0; nvars])
    }

    /// The single variable x_{index+1} among `nvars` variables.
    pub fn var(index: usize, nvars: usize) -> Monomial {
        let mut e = vec![0u32; nvars];
        e[index] = 1;
        Monomial::Exps(e)
    }

    pub fn total_degree(&self) -> u32 {
        match self {
            Monomial::Exps(e) => e.iter().sum(),
            Monomial::Basis(_) => 0,
        }
    }

    pub fn is_unit_exps(&self) -> bool {
        matches!(self, Monomial::Exps(e) if e.iter().all(|&x| x == 0))
    }

    /// Variable indices with multiplicity, ascending: x_1^2 x_3 ↦ [0, 0, 2].
    pub fn occurrences(&self) -> Vec<usize> {
        match self {
            Monomial::Exps(e) => {
                let mut out = Vec::new();
                for (i, &p) in e.iter().enumerate() {
                    for _ in 0..p {
                        out.push(i);
                    }
                }
                out
            }
            Monomial::Basis(_) => Vec::new(),
        }
    }

    pub fn from_occurrences(occ: &[usize], nvars: usize) -> Monomial {
        let mut e = vec![0u32; nvars];
        for &i in occ {
            e[i] += 1;
        }
        Monomial::Exps(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Monomial::Basis(a), Monomial::Basis(b)) => a.cmp(b),
            (Monomial::Exps(a), Monomial::Exps(b)) => {
                let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
                // degree first, then x_1 < x_2 < ⋯ (so x_1^2 < x_1x_2 < x_2^2)
                da.cmp(&db).then_with(|| b.cmp(a))
            }
            (Monomial::Exps(_), Monomial::Basis(_)) => Ordering::Less,
            (Monomial::Basis(_), Monomial::Exps(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    /// k[x_1,…,x_n]
    Polynomial { nvars: usize },
    /// `k[x]/(x^m)`
    TruncatedPoly { exponent: u32 },
    /// Finite-dimensional algebra on `labels` with sparse multiplication table:
    /// `table[i][j]` lists (k, c) with e_i·e_j = Σ c·e_k.
    StructureConstants { labels: Vec<String>, unit: usize, table: Vec<Vec<Vec<(usize, Scalar)>>> },
}

/// A k-algebra with a distinguished ordered monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    field: Field,
    kind: AlgebraKind,
}

pub type ARef = Arc<Algebra>;

impl Algebra {
    pub fn polynomial(field: Field, nvars: usize) -> ARef {
        assert!(nvars >= 1, "polynomial algebra needs at least one variable");
        Arc::new(Algebra { field, kind: AlgebraKind::Polynomial { nvars } })
    }

    /// `k[x]/(x^m)`; any field is allowed, m ≥ 2.
    pub fn truncated(field: Field, exponent: u32) -> ARef {
        assert!(exponent >= 2, "truncation exponent must be at least 2");
        Arc::new(Algebra { field, kind: AlgebraKind::TruncatedPoly { exponent } })
    }

    /// Build from a multiplication table, checking associativity and the unit
    /// law exhaustively on the basis.
    pub fn structure_constants(
        field: Field,
        labels: Vec<String>,
        unit: usize,
        table: Vec<Vec<Vec<(usize, Scalar)>>>,
    ) -> Result<ARef, AlgebraError> {
        let dim = labels.len();
        if unit >= dim || table.len() != dim || table.iter().any(|row| row.len() != dim) {
            return Err(AlgebraError::MalformedTable);
        }
        let alg = Arc::new(Algebra {
            field,
            kind: AlgebraKind::StructureConstants { labels, unit, table },
        });
        for i in 0..dim {
            let ei = AlgebraElement::monomial(&alg, Monomial::Basis(i));
            let u = AlgebraElement::monomial(&alg, Monomial::Basis(unit));
            if &u * &ei != ei || &ei * &u != ei {
                return Err(AlgebraError::NotUnital(unit));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let (ei, ej, ek) = (
                        AlgebraElement::monomial(&alg, Monomial::Basis(i)),
                        AlgebraElement::monomial(&alg, Monomial::Basis(j)),
                        AlgebraElement::monomial(&alg, Monomial::Basis(k)),
                    );
                    if &(&ei * &ej) * &ek != &ei * &(&ej * &ek) {
                        return Err(AlgebraError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn nvars(&self) -> usize {
        match &self.kind {
            AlgebraKind::Polynomial { nvars } => *nvars,
            AlgebraKind::TruncatedPoly { .. } => 1,
            AlgebraKind::StructureConstants { .. } => 0,
        }
    }

    pub fn is_finite_dimensional(&self) -> bool {
        !matches!(self.kind, AlgebraKind::Polynomial { .. })
    }

    pub fn is_commutative(&self) -> bool {
        match &self.kind {
            AlgebraKind::Polynomial { .. } | AlgebraKind::TruncatedPoly { .. } => true,
            AlgebraKind::StructureConstants { labels, .. } => {
                let dim = labels.len();
                (0..dim).all(|i| {
                    (0..dim).all(|j| {
                        self.mul_basis_indices(i, j) == self.mul_basis_indices(j, i)
                    })
                })
            }
        }
    }

    fn mul_basis_indices(&self, i: usize, j: usize) -> Vec<(usize, Scalar)> {
        match &self.kind {
            AlgebraKind::StructureConstants { table, .. } => table[i][j].clone(),
            _ => unreachable!(),
        }
    }

    pub fn unit_monomial(&self) -> Monomial {
        match &self.kind {
            AlgebraKind::Polynomial { nvars } => Monomial::one_exps(*nvars),
            AlgebraKind::TruncatedPoly { .. } => Monomial::one_exps(1),
            AlgebraKind::StructureConstants { unit, .. } => Monomial::Basis(*unit),
        }
    }

    pub fn monomial_valid(&self, m: &Monomial) -> bool {
        match (&self.kind, m) {
            (AlgebraKind::Polynomial { nvars }, Monomial::Exps(e)) => e.len() == *nvars,
            (AlgebraKind::TruncatedPoly { exponent }, Monomial::Exps(e)) => {
                e.len() == 1 && e[0] < *exponent
            }
            (AlgebraKind::StructureConstants { labels, .. }, Monomial::Basis(i)) => {
                *i < labels.len()
            }
            _ => false,
        }
    }

    /// Product of two basis monomials as an element (may be zero or a sum).
    pub fn mul_monomials(self: &ARef, a: &Monomial, b: &Monomial) -> AlgebraElement {
        debug_assert!(self.monomial_valid(a) && self.monomial_valid(b));
        match (&self.kind, a, b) {
            (AlgebraKind::Polynomial { .. }, Monomial::Exps(ea), Monomial::Exps(eb)) => {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                AlgebraElement::monomial(self, Monomial::Exps(e))
            }
            (AlgebraKind::TruncatedPoly { exponent }, Monomial::Exps(ea), Monomial::Exps(eb)) => {
                let e = ea[0] + eb[0];
                if e >= *exponent {
                    AlgebraElement::zero(self)
                } else {
                    AlgebraElement::monomial(self, Monomial::Exps(vec![e]))
                }
            }
            (AlgebraKind::StructureConstants { table, .. }, Monomial::Basis(i), Monomial::Basis(j)) => {
                let mut out = AlgebraElement::zero(self);
                for (k, c) in &table[*i][*j] {
                    out.add_term(Monomial::Basis(*k), c.clone());
                }
                out
            }
            _ => unreachable!("monomial kind matches algebra kind"),
        }
    }

    /// All basis monomials of total degree ≤ `bound`, in the fixed order.
    /// Finite-dimensional algebras return their full basis regardless of `bound`.
    pub fn basis_up_to(&self, bound: u32) -> Vec<Monomial> {
        match &self.kind {
            AlgebraKind::Polynomial { nvars } => {
                let mut out = Vec::new();
                let mut current = vec![0u32; *nvars];
                enumerate_exps(&mut current, 0, bound, &mut out);
                out.sort();
                out
            }
            AlgebraKind::TruncatedPoly { exponent } => {
                (0..*exponent).map(|e| Monomial::Exps(vec![e])).collect()
            }
            AlgebraKind::StructureConstants { labels, .. } => {
                (0..labels.len()).map(Monomial::Basis).collect()
            }
        }
    }

    pub fn dimension(&self) -> Option<usize> {
        match &self.kind {
            AlgebraKind::Polynomial { .. } => None,
            AlgebraKind::TruncatedPoly { exponent } => Some(*exponent as usize),
            AlgebraKind::StructureConstants { labels, .. } => Some(labels.len()),
        }
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        match (&self.kind, m) {
            (AlgebraKind::StructureConstants { labels, .. }, Monomial::Basis(i)) => {
                labels[*i].clone()
            }
            (AlgebraKind::TruncatedPoly { .. }, Monomial::Exps(e)) => match e[0] {
                0 => "1".to_string(),
                1 => "x".to_string(),
                p => format!("x^{p}"),
            },
            (AlgebraKind::Polynomial { .. }, Monomial::Exps(e)) => {
                let parts: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0)
                    .map(|(i, &p)| {
                        if p == 1 {
                            format!("x{}", i + 1)
                        } else {
                            format!("x{}^{}", i + 1, p)
                        }
                    })
                    .collect();
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("*")
                }
            }
            _ => unreachable!("monomial kind matches algebra kind"),
        }
    }
}

fn enumerate_exps(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos == current.len() {
        out.push(Monomial::Exps(current.clone()));
        return;
    }
    for e in 0..=remaining {
        current[pos] = e;
        enumerate_exps(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

/// A sparse linear combination of basis monomials. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    algebra: ARef,
    terms: BTreeMap<Monomial, Scalar>,
}

impl AlgebraElement {
    pub fn zero(algebra: &ARef) -> AlgebraElement {
        AlgebraElement { algebra: algebra.clone(), terms: BTreeMap::new() }
    }

    pub fn one(algebra: &ARef) -> AlgebraElement {
        AlgebraElement::monomial(algebra, algebra.unit_monomial())
    }

    pub fn monomial(algebra: &ARef, m: Monomial) -> AlgebraElement {
        AlgebraElement::term(algebra, m, Scalar::one(algebra.field()))
    }

    pub fn term(algebra: &ARef, m: Monomial, c: Scalar) -> AlgebraElement {
        assert!(algebra.monomial_valid(&m), "invalid monomial for algebra");
        let mut e = AlgebraElement::zero(algebra);
        e.add_term(m, c);
        e
    }

    pub fn algebra(&self) -> &ARef {
        &self.algebra
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| Scalar::zero(self.algebra.field()))
    }

    /// Largest total degree among stored terms (0 for the zero element).
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.algebra);
        for (m, s) in &self.terms {
            out.add_term(m.clone(), s * c);
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> AlgebraElement {
        self.scale(&Scalar::from_integer(self.algebra.field(), n))
    }

    pub fn neg(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.algebra);
        for (m, s) in &self.terms {
            out.add_term(m.clone(), s.neg());
        }
        out
    }

    /// Product, rejecting operands from different algebras.
    pub fn checked_mul(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if self.algebra != other.algebra {
            return Err(AlgebraError::MixedAlgebras);
        }
        let mut out = AlgebraElement::zero(&self.algebra);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = self.algebra.mul_monomials(ma, mb);
                for (m, c) in prod.terms {
                    out.add_term(m, &(ca * cb) * &c);
                }
            }
        }
        Ok(out)
    }

    /// Formal partial derivative ∂/∂x_{index+1}; polynomial algebras only.
    pub fn partial_derivative(&self, index: usize) -> Result<AlgebraElement, AlgebraError> {
        let AlgebraKind::Polynomial { nvars } = self.algebra.kind() else {
            return Err(AlgebraError::NotPolynomialAlgebra);
        };
        assert!(index < *nvars);
        let mut out = AlgebraElement::zero(&self.algebra);
        for (m, c) in &self.terms {
            let Monomial::Exps(e) = m else { unreachable!() };
            if e[index] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[index] -= 1;
            out.add_term(Monomial::Exps(e2), c.scale_int(e[index] as i64));
        }
        Ok(out)
    }
}

impl std::ops::Add<&AlgebraElement> for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert!(self.algebra == rhs.algebra, "algebras must agree");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub<&AlgebraElement> for &AlgebraElement {
    type Output = AlgebraElement;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self + &rhs.neg()
    }
}

impl std::ops::Mul<&AlgebraElement> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.checked_mul(rhs).expect("algebras must agree")
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let mono = self.algebra.render_monomial(m);
            let (sign, mag) = if crate::scalar::is_negative_for_display(c) {
                ("-", c.neg())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = mag.render_short();
            if mag == "1" {
                write!(f, "{mono}")?;
            } else if mono == "1" {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}
