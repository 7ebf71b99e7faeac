//! Cochains Hom_{A^e}(K_n, A), the Hom differential, and the coboundary
//! solver.
//!
//! A cochain is stored sparsely as generator → value; evaluation extends
//! A^e-linearly, so `f(a·w·a') = a·f(w)·a'`. The differential is
//! δf := f∘d, which on the bar resolution is the classical Hochschild
//! coboundary. Whether a cochain is a coboundary is decided by exact
//! Gaussian elimination on the flattened generator/value tables; a witness
//! ψ with δψ = c is always re-verified before being returned.

use crate::algebra::{AlgebraElement, Monomial};
use crate::complex::{BimoduleElement, CRef, ChainError, ComplexOps, Generator};
use crate::linear::LinearSystem;
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// An element of Hom_{A^e}(K_n, A), given by its values on free generators.
/// Generators absent from the table have value 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    complex: CRef,
    degree: usize,
    values: BTreeMap<Generator, AlgebraElement>,
}

impl Cochain {
    pub fn zero(complex: &CRef, degree: usize) -> Cochain {
        Cochain { complex: complex.clone(), degree, values: BTreeMap::new() }
    }

    pub fn from_values(
        complex: &CRef,
        degree: usize,
        values: impl IntoIterator<Item = (Generator, AlgebraElement)>,
    ) -> Cochain {
        let mut c = Cochain::zero(complex, degree);
        for (g, v) in values {
            c.set_value(g, v);
        }
        c
    }

    pub fn complex(&self) -> &CRef {
        &self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn set_value(&mut self, gen: Generator, value: AlgebraElement) {
        assert_eq!(gen.degree(), self.degree, "generator degree mismatch");
        if value.is_zero() {
            self.values.remove(&gen);
        } else {
            self.values.insert(gen, value);
        }
    }

    pub fn value(&self, gen: &Generator) -> AlgebraElement {
        self.values
            .get(gen)
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(self.complex.algebra()))
    }

    pub fn values(&self) -> impl Iterator<Item = (&Generator, &AlgebraElement)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// A^e-linear evaluation on an element of the same degree.
    pub fn evaluate(&self, elem: &BimoduleElement) -> AlgebraElement {
        let alg = self.complex.algebra();
        let mut out = AlgebraElement::zero(alg);
        if elem.is_zero() {
            return out;
        }
        assert_eq!(elem.degree(), self.degree, "cochain evaluated in wrong degree");
        for ((a, w, b), c) in elem.terms() {
            let v = self.value(w);
            if v.is_zero() {
                continue;
            }
            let am = AlgebraElement::monomial(alg, a.clone());
            let bm = AlgebraElement::monomial(alg, b.clone());
            out = &out + &(&(&am * &v) * &bm).scale(c);
        }
        out
    }

    /// δf = f∘d as a cochain of degree n+1, materialized on the enumerated
    /// generators.
    pub fn delta(&self) -> Result<Cochain, ChainError> {
        let n = self.degree;
        self.complex.check_degree(n as isize + 1)?;
        let mut out = Cochain::zero(&self.complex, n + 1);
        for gen in self.complex.generators(n + 1) {
            let v = self.evaluate(&self.complex.differential(&gen));
            out.set_value(gen, v);
        }
        Ok(out)
    }

    pub fn is_cocycle(&self) -> Result<bool, ChainError> {
        Ok(self.delta()?.is_zero())
    }

    pub fn scale(&self, c: &Scalar) -> Cochain {
        let mut out = Cochain::zero(&self.complex, self.degree);
        for (g, v) in &self.values {
            out.set_value(g.clone(), v.scale(c));
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Cochain {
        self.scale(&Scalar::from_integer(self.complex.algebra().field(), n))
    }

    pub fn neg(&self) -> Cochain {
        self.scale_int(-1)
    }
}

impl std::ops::Add<&Cochain> for &Cochain {
    type Output = Cochain;
    fn add(self, rhs: &Cochain) -> Cochain {
        assert_eq!(self.degree, rhs.degree);
        let mut out = self.clone();
        for (g, v) in &rhs.values {
            let sum = &out.value(g) + v;
            out.set_value(g.clone(), sum);
        }
        out
    }
}

impl std::ops::Sub<&Cochain> for &Cochain {
    type Output = Cochain;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: &Cochain) -> Cochain {
        self + &rhs.neg()
    }
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (g, v) in &self.values {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{} ↦ {}", self.complex.render_generator(g), v)?;
        }
        Ok(())
    }
}

/// Outcome of comparing two cochains up to coboundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CohomologyRelation {
    Equal,
    EqualModBoundary,
    Distinct,
    Inconclusive,
}

/// Search for ψ with δψ = c by exact Gaussian elimination.
///
/// `Ok(Some(ψ))` is always re-verified. `Ok(None)` is a definitive negative:
/// either the algebra is finite-dimensional (so the flattened system is the
/// whole story) or the Hom differential into this degree is provably zero.
/// Otherwise the truncated failure is reported as `TruncationInconclusive`.
pub fn coboundary_witness(c: &Cochain) -> Result<Option<Cochain>, ChainError> {
    let n = c.degree();
    assert!(n >= 1, "coboundary witnesses live in degree ≥ 1");
    let complex = c.complex();
    let alg = complex.algebra();
    if c.is_zero() {
        return Ok(Some(Cochain::zero(complex, n - 1)));
    }

    let sources = complex.generators(n - 1);
    let targets = complex.generators(n);

    // Value-degree bounds. Finite-dimensional algebras use their full basis;
    // polynomial algebras bound ψ by the degrees visible in c and pad the
    // equation side by the coefficient degrees of d.
    let (unknown_basis, equation_basis) = if alg.is_finite_dimensional() {
        let b = alg.basis_up_to(0);
        (b.clone(), b)
    } else {
        let c_deg = c.values().map(|(_, v)| v.max_degree()).max().unwrap_or(0);
        let mut d_coeff = 0u32;
        for t in &targets {
            for ((a, _, b), _) in complex.differential(t).terms() {
                d_coeff = d_coeff.max(a.total_degree() + b.total_degree());
            }
        }
        (alg.basis_up_to(c_deg), alg.basis_up_to(c_deg + d_coeff))
    };

    let col_of = |w_idx: usize, m_idx: usize| w_idx * unknown_basis.len() + m_idx;
    let row_of = |t_idx: usize, m_idx: usize| t_idx * equation_basis.len() + m_idx;
    let eq_index: BTreeMap<&Monomial, usize> =
        equation_basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let src_index: BTreeMap<&Generator, usize> =
        sources.iter().enumerate().map(|(i, g)| (g, i)).collect();

    let rows = targets.len() * equation_basis.len();
    let cols = sources.len() * unknown_basis.len();
    let mut sys = LinearSystem::new(alg.field(), rows, cols);
    let mut rhs = vec![Scalar::zero(alg.field()); rows];

    for (ti, t) in targets.iter().enumerate() {
        for ((a, w, b), coeff) in complex.differential(t).terms() {
            let Some(&wi) = src_index.get(w) else {
                return Err(ChainError::Other(format!(
                    "differential leaves the enumerated generator set at {}",
                    complex.render_generator(w)
                )));
            };
            for (mi, m) in unknown_basis.iter().enumerate() {
                // contribution of ψ(w) = m to δψ(t): coeff · a·m·b
                let amb = &complex.sandwich(a, m, b);
                for (mono, s) in amb.terms() {
                    let Some(&ri) = eq_index.get(mono) else {
                        return Err(ChainError::Other(
                            "equation basis too small for coefficient products".into(),
                        ));
                    };
                    sys.add_to(row_of(ti, ri), col_of(wi, mi), &(coeff * s));
                }
            }
        }
        let target_value = c.value(t);
        for (mono, s) in target_value.terms() {
            let Some(&ri) = eq_index.get(mono) else {
                // c has a value outside the equation basis: no ψ bounded by
                // c's degrees can reach it, and for graded differentials no
                // bounded enlargement changes that. Report honestly.
                return inconclusive_or_definitive(c, n);
            };
            rhs[row_of(ti, ri)] = s.clone();
        }
    }

    match sys.solve(&rhs) {
        Some(solution) => {
            let mut psi = Cochain::zero(complex, n - 1);
            for (wi, w) in sources.iter().enumerate() {
                let mut v = AlgebraElement::zero(alg);
                for (mi, m) in unknown_basis.iter().enumerate() {
                    let s = &solution[col_of(wi, mi)];
                    if !s.is_zero() {
                        v = &v + &AlgebraElement::term(alg, m.clone(), s.clone());
                    }
                }
                psi.set_value(w.clone(), v);
            }
            // exactness is non-negotiable: re-apply δ
            let check = psi.delta()?;
            if &check != c {
                return Err(ChainError::Other(
                    "internal error: solver witness failed re-verification".into(),
                ));
            }
            Ok(Some(psi))
        }
        None => inconclusive_or_definitive(c, n),
    }
}

fn inconclusive_or_definitive(
    c: &Cochain,
    n: usize,
) -> Result<Option<Cochain>, ChainError> {
    let complex = c.complex();
    if complex.algebra().is_finite_dimensional() || hom_delta_is_zero(complex, n) {
        Ok(None)
    } else {
        Err(ChainError::TruncationInconclusive)
    }
}

/// Certificate that δ: Hom(K_{n−1}, A) → Hom(K_n, A) is the zero map.
///
/// For a commutative algebra the operator induced on a value by a
/// differential term a·w·a' is multiplication by a·a', so δ vanishes exactly
/// when those products cancel per target generator. This is independent of
/// any value-degree truncation.
pub fn hom_delta_is_zero(complex: &CRef, n: usize) -> bool {
    if n == 0 || n > complex.max_degree() {
        return false;
    }
    if !complex.algebra().is_commutative() {
        // finite-dimensional noncommutative: test the operator on the basis
        if !complex.algebra().is_finite_dimensional() {
            return false;
        }
        let basis = complex.algebra().basis_up_to(0);
        for t in complex.generators(n) {
            let mut per_gen: BTreeMap<&Generator, Vec<(&Monomial, &Monomial, &Scalar)>> =
                BTreeMap::new();
            let d = complex.differential(&t);
            for ((a, w, b), c) in d.terms() {
                per_gen.entry(w).or_default().push((a, b, c));
            }
            for (_, terms) in per_gen {
                for m in &basis {
                    let mut acc = AlgebraElement::zero(complex.algebra());
                    for (a, b, c) in &terms {
                        acc = &acc + &complex.sandwich(a, m, b).scale(c);
                    }
                    if !acc.is_zero() {
                        return false;
                    }
                }
            }
        }
        return true;
    }
    for t in complex.generators(n) {
        let mut per_gen: BTreeMap<Generator, AlgebraElement> = BTreeMap::new();
        for ((a, w, b), c) in complex.differential(&t).terms() {
            let prod = complex.algebra().mul_monomials(a, b).scale(c);
            match per_gen.entry(w.clone()) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(prod);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let sum = o.get() + &prod;
                    o.insert(sum);
                }
            }
        }
        if per_gen.values().any(|v| !v.is_zero()) {
            return false;
        }
    }
    true
}

/// Classify f − g: equal, equal modulo a coboundary, distinct, or
/// undecidable at the current truncation.
pub fn cohomology_equal(f: &Cochain, g: &Cochain) -> Result<CohomologyRelation, ChainError> {
    if f.complex() != g.complex() || f.degree() != g.degree() {
        return Err(ChainError::MixedComplexes);
    }
    let diff = f - g;
    if diff.is_zero() {
        return Ok(CohomologyRelation::Equal);
    }
    if f.degree() == 0 {
        return Ok(CohomologyRelation::Distinct);
    }
    match coboundary_witness(&diff) {
        Ok(Some(_)) => Ok(CohomologyRelation::EqualModBoundary),
        Ok(None) => Ok(CohomologyRelation::Distinct),
        Err(ChainError::TruncationInconclusive) => Ok(CohomologyRelation::Inconclusive),
        Err(e) => Err(e),
    }
}

/// A basis of the space of cocycles in one degree, flattened over the given
/// value basis (the full basis for finite-dimensional algebras).
pub fn cocycle_basis(
    complex: &CRef,
    degree: usize,
    value_bound: Option<u32>,
) -> Result<Vec<Cochain>, ChainError> {
    complex.check_degree(degree as isize + 1)?;
    let alg = complex.algebra();
    let value_basis = if alg.is_finite_dimensional() {
        alg.basis_up_to(0)
    } else {
        alg.basis_up_to(value_bound.unwrap_or(complex.internal_bound().unwrap_or(0)))
    };
    let sources = complex.generators(degree);
    let targets = complex.generators(degree + 1);

    let eq_monos: Vec<Monomial> = if alg.is_finite_dimensional() {
        alg.basis_up_to(0)
    } else {
        let vb = value_basis.iter().map(Monomial::total_degree).max().unwrap_or(0);
        let mut d_coeff = 0u32;
        for t in &targets {
            for ((a, _, b), _) in complex.differential(t).terms() {
                d_coeff = d_coeff.max(a.total_degree() + b.total_degree());
            }
        }
        alg.basis_up_to(vb + d_coeff)
    };
    let eq_index: BTreeMap<&Monomial, usize> =
        eq_monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let src_index: BTreeMap<&Generator, usize> =
        sources.iter().enumerate().map(|(i, g)| (g, i)).collect();

    let rows = targets.len() * eq_monos.len();
    let cols = sources.len() * value_basis.len();
    let mut sys = LinearSystem::new(alg.field(), rows, cols);
    for (ti, t) in targets.iter().enumerate() {
        for ((a, w, b), coeff) in complex.differential(t).terms() {
            let Some(&wi) = src_index.get(w) else {
                return Err(ChainError::Other("differential leaves generator set".into()));
            };
            for (mi, m) in value_basis.iter().enumerate() {
                for (mono, s) in complex.sandwich(a, m, b).terms() {
                    let ri = eq_index[&mono];
                    sys.add_to(ti * eq_monos.len() + ri, wi * value_basis.len() + mi, &(coeff * s));
                }
            }
        }
    }
    let kernel = sys.kernel();
    let mut out = Vec::with_capacity(kernel.len());
    for v in kernel {
        let mut f = Cochain::zero(complex, degree);
        for (wi, w) in sources.iter().enumerate() {
            let mut val = AlgebraElement::zero(alg);
            for (mi, m) in value_basis.iter().enumerate() {
                let s = &v[wi * value_basis.len() + mi];
                if !s.is_zero() {
                    val = &val + &AlgebraElement::term(alg, m.clone(), s.clone());
                }
            }
            f.set_value(w.clone(), val);
        }
        out.push(f);
    }
    Ok(out)
}
