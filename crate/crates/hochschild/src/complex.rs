//! Graded free A-bimodule complexes and their elements.
//!
//! One [`Complex`] type covers the bar resolution B, the Koszul complex of a
//! polynomial ring, the 2-periodic minimal resolution of `k[x]/(x^p)`, and
//! tensor products of these over A. A complex in degree n is free on an
//! enumerable set of [`Generator`]s, elements are sparse sums of monomials
//! `a·w·a'`, and the differential is given per generator:
//!
//!  * bar words:  d(a_0⊗⋯⊗a_{r+1}) = Σ_i (−1)^i a_0⊗⋯⊗a_i a_{i+1}⊗⋯⊗a_{r+1}
//!  * orbit sums: d(o(v_1,…,v_i)) = Σ_l (−1)^{l+1} (v_l·o(…v̂_l…) − o(…v̂_l…)·v_l)
//!  * cyclic:     d alternates right multiplication by u = x⊗1−1⊗x and
//!    v = Σ x^{p−1−m}⊗x^m
//!  * tensors:    d(x⊗y) = d(x)⊗y + (−1)^{|x|} x⊗d(y)
//!
//! Truncation is two-dimensional: a maximal homological degree N and, for
//! polynomial algebras, an internal degree bound D on enumerated generators.
//! Enumeration past N is a hard error, never a silent empty answer.

use crate::algebra::{ARef, AlgebraElement, AlgebraKind, Monomial};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("degree {degree} out of range for complex truncated at {max}")]
    DegreeOutOfRange { degree: isize, max: usize },
    #[error("operands belong to different complexes")]
    MixedComplexes,
    #[error("tensor factors must share one algebra")]
    MixedAlgebras,
    #[error("map has no value for generator {0} (past its table)")]
    MissingValue(String),
    #[error("map {0} is not a contracting homotopy: defect ≠ target on {1}")]
    NotAHomotopy(String, String),
    #[error("map {0} is not a chain map: mismatch on {1}")]
    NotAChainMap(String, String),
    #[error("package is missing comparison maps (ι and π are required)")]
    MissingComparisonMaps,
    #[error("truncated system is unsolvable; enlarging the truncation might change the answer")]
    TruncationInconclusive,
    #[error("{0} is not prime")]
    NonPrimeP(u64),
    #[error("cyclic instance requires characteristic {expected}, got {got}")]
    WrongCharacteristic { expected: u64, got: u64 },
    #[error("{0}")]
    Other(String),
}

/// A free generator of some degree of a complex.
///
/// Tensor generators are kept flat: `factors` interleaved with `middles`
/// (the A-coefficients sitting between consecutive factors), so the two
/// bracketings of a triple product are identified by construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    /// Bar word of length r = homological degree; entries are basis monomials.
    Bar(Vec<Monomial>),
    /// Orbit sum o(x_I) for a strictly increasing index set I (0-based).
    Orbit(Vec<usize>),
    /// ξ_n of the cyclic minimal resolution.
    Xi(usize),
    Tensor { factors: Vec<Generator>, middles: Vec<Monomial> },
}

impl Generator {
    pub fn degree(&self) -> usize {
        match self {
            Generator::Bar(w) => w.len(),
            Generator::Orbit(i) => i.len(),
            Generator::Xi(n) => *n,
            Generator::Tensor { factors, .. } => factors.iter().map(Generator::degree).sum(),
        }
    }

    /// Total polynomial degree of all entries and middles (0 where not graded).
    pub fn internal_degree(&self) -> u32 {
        match self {
            Generator::Bar(w) => w.iter().map(Monomial::total_degree).sum(),
            Generator::Orbit(i) => i.len() as u32,
            Generator::Xi(_) => 0,
            Generator::Tensor { factors, middles } => {
                factors.iter().map(Generator::internal_degree).sum::<u32>()
                    + middles.iter().map(Monomial::total_degree).sum::<u32>()
            }
        }
    }

    pub fn pair(left: Generator, middle: Monomial, right: Generator) -> Generator {
        Generator::flatten(vec![left, right], vec![middle])
    }

    /// Flatten nested tensor generators into one flat factor list.
    pub fn flatten(factors: Vec<Generator>, middles: Vec<Monomial>) -> Generator {
        assert_eq!(factors.len(), middles.len() + 1);
        let mut fs = Vec::new();
        let mut ms = Vec::new();
        let mut pending: Option<Monomial> = None;
        for (i, f) in factors.into_iter().enumerate() {
            if let Some(m) = pending.take() {
                ms.push(m);
            }
            match f {
                Generator::Tensor { factors: inner_f, middles: inner_m } => {
                    let n = inner_f.len();
                    for (j, g) in inner_f.into_iter().enumerate() {
                        fs.push(g);
                        if j + 1 < n {
                            ms.push(inner_m[j].clone());
                        }
                    }
                }
                g => fs.push(g),
            }
            if i < middles.len() {
                pending = Some(middles[i].clone());
            }
        }
        Generator::Tensor { factors: fs, middles: ms }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexKind {
    Bar,
    Koszul,
    Cyclic { p: u64 },
    Tensor { factors: Vec<Arc<Complex>> },
}

/// A truncated free A-bimodule complex with enumerable generators per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    algebra: ARef,
    kind: ComplexKind,
    max_degree: usize,
    internal_bound: Option<u32>,
}

pub type CRef = Arc<Complex>;

impl Complex {
    /// The bar resolution B = A⊗TA⊗A truncated at homological degree `n`.
    /// Polynomial algebras additionally need an internal degree bound `d`;
    /// their enumerated words have entries of positive degree.
    pub fn bar(algebra: &ARef, n: usize, d: Option<u32>) -> CRef {
        assert!(
            algebra.is_finite_dimensional() || d.is_some(),
            "bar over a polynomial algebra needs an internal degree bound"
        );
        Arc::new(Complex {
            algebra: algebra.clone(),
            kind: ComplexKind::Bar,
            max_degree: n,
            internal_bound: d,
        })
    }

    /// The Koszul complex of a polynomial ring, free on orbit sums o(x_I).
    pub fn koszul(algebra: &ARef, n: usize, d: u32) -> CRef {
        assert!(
            matches!(algebra.kind(), AlgebraKind::Polynomial { .. }),
            "Koszul complex is built over a polynomial algebra"
        );
        Arc::new(Complex {
            algebra: algebra.clone(),
            kind: ComplexKind::Koszul,
            max_degree: n,
            internal_bound: Some(d),
        })
    }

    /// The 2-periodic minimal resolution of `A = k[x]/(x^p)` in characteristic p.
    pub fn cyclic(algebra: &ARef, p: u64, n: usize) -> CRef {
        Arc::new(Complex {
            algebra: algebra.clone(),
            kind: ComplexKind::Cyclic { p },
            max_degree: n,
            internal_bound: None,
        })
    }

    /// X ⊗_A Y (and longer products); nested tensors are flattened so the
    /// two bracketings of X⊗Y⊗Z coincide.
    pub fn tensor(factors: &[&CRef]) -> Result<CRef, ChainError> {
        assert!(factors.len() >= 2);
        let algebra = factors[0].algebra.clone();
        if factors.iter().any(|f| f.algebra != algebra) {
            return Err(ChainError::MixedAlgebras);
        }
        let mut flat: Vec<Arc<Complex>> = Vec::new();
        for f in factors {
            match &f.kind {
                ComplexKind::Tensor { factors: inner } => flat.extend(inner.iter().cloned()),
                _ => flat.push((*f).clone()),
            }
        }
        let max_degree = flat.iter().map(|f| f.max_degree).sum();
        let internal_bound = flat.iter().filter_map(|f| f.internal_bound).max();
        Ok(Arc::new(Complex {
            algebra,
            kind: ComplexKind::Tensor { factors: flat },
            max_degree,
            internal_bound,
        }))
    }

    pub fn algebra(&self) -> &ARef {
        &self.algebra
    }

    pub fn kind(&self) -> &ComplexKind {
        &self.kind
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn internal_bound(&self) -> Option<u32> {
        self.internal_bound
    }

    pub fn check_degree(&self, degree: isize) -> Result<usize, ChainError> {
        if degree < 0 || degree as usize > self.max_degree {
            return Err(ChainError::DegreeOutOfRange { degree, max: self.max_degree });
        }
        Ok(degree as usize)
    }

    /// True when the complex is exactly zero in this degree — not merely
    /// truncated there. The Koszul complex vanishes above the variable
    /// count; bar and cyclic complexes never vanish.
    pub fn vanishes_in(&self, degree: isize) -> bool {
        match &self.kind {
            ComplexKind::Koszul => degree > self.algebra.nvars() as isize,
            _ => false,
        }
    }

    /// The enumerated free generators in one homological degree.
    ///
    /// Panics past the truncation bound — callers must stay within it.
    /// (Degrees where the complex vanishes exactly return an empty set.)
    pub fn generators(&self, degree: usize) -> Vec<Generator> {
        if self.vanishes_in(degree as isize) {
            return Vec::new();
        }
        assert!(
            degree <= self.max_degree,
            "generator enumeration past truncation (degree {degree} > N = {})",
            self.max_degree
        );
        match &self.kind {
            ComplexKind::Bar => self.bar_words(degree),
            ComplexKind::Koszul => {
                let nvars = self.algebra.nvars();
                if degree > nvars {
                    return Vec::new();
                }
                combinations(nvars, degree).into_iter().map(Generator::Orbit).collect()
            }
            ComplexKind::Cyclic { .. } => vec![Generator::Xi(degree)],
            ComplexKind::Tensor { factors } => {
                let middles = self.middle_basis();
                let mut out = Vec::new();
                let mut chosen = Vec::new();
                tensor_generators(factors, degree, &middles, &mut chosen, &mut out);
                out
            }
        }
    }

    fn bar_words(&self, degree: usize) -> Vec<Generator> {
        match self.algebra.kind() {
            AlgebraKind::Polynomial { .. } => {
                let d = self.internal_bound.expect("polynomial bar carries a bound");
                // entries of positive degree, total internal degree ≤ D
                let entries: Vec<Monomial> = self
                    .algebra
                    .basis_up_to(d)
                    .into_iter()
                    .filter(|m| m.total_degree() >= 1)
                    .collect();
                let mut out = Vec::new();
                let mut word = Vec::new();
                fn rec(
                    entries: &[Monomial],
                    len: usize,
                    budget: u32,
                    word: &mut Vec<Monomial>,
                    out: &mut Vec<Generator>,
                ) {
                    if word.len() == len {
                        out.push(Generator::Bar(word.clone()));
                        return;
                    }
                    for e in entries {
                        let deg = e.total_degree();
                        if deg <= budget {
                            word.push(e.clone());
                            rec(entries, len, budget - deg, word, out);
                            word.pop();
                        }
                    }
                }
                rec(&entries, degree, d, &mut word, &mut out);
                out
            }
            _ => {
                let basis = self.algebra.basis_up_to(0);
                let mut out = Vec::new();
                let mut word = Vec::new();
                fn rec(
                    basis: &[Monomial],
                    len: usize,
                    word: &mut Vec<Monomial>,
                    out: &mut Vec<Generator>,
                ) {
                    if word.len() == len {
                        out.push(Generator::Bar(word.clone()));
                        return;
                    }
                    for b in basis {
                        word.push(b.clone());
                        rec(basis, len, word, out);
                        word.pop();
                    }
                }
                rec(&basis, degree, &mut word, &mut out);
                out
            }
        }
    }

    /// Basis monomials allowed as tensor middles (full basis when finite).
    pub fn middle_basis(&self) -> Vec<Monomial> {
        self.algebra.basis_up_to(self.internal_bound.unwrap_or(0))
    }

    pub fn generator_count(&self, degree: usize) -> usize {
        self.generators(degree).len()
    }

    fn generators_up_to_max(&self, degree: usize) -> Vec<Generator> {
        if degree > self.max_degree {
            return Vec::new();
        }
        self.generators(degree)
    }

    /// The augmentation μ on a degree-0 generator.
    pub fn augmentation_gen(&self, gen: &Generator) -> AlgebraElement {
        assert_eq!(gen.degree(), 0);
        match gen {
            Generator::Bar(_) | Generator::Orbit(_) | Generator::Xi(_) => {
                AlgebraElement::one(&self.algebra)
            }
            Generator::Tensor { middles, .. } => {
                let mut out = AlgebraElement::one(&self.algebra);
                for m in middles {
                    out = &out * &AlgebraElement::monomial(&self.algebra, m.clone());
                }
                out
            }
        }
    }

    /// μ extended to degree-0 elements.
    pub fn augmentation(&self, elem: &BimoduleElement) -> AlgebraElement {
        assert_eq!(elem.degree, 0);
        let mut out = AlgebraElement::zero(&self.algebra);
        for ((a, w, b), c) in &elem.terms {
            let am = AlgebraElement::monomial(&self.algebra, a.clone());
            let bm = AlgebraElement::monomial(&self.algebra, b.clone());
            let v = &(&am * &self.augmentation_gen(w)) * &bm;
            out = &out + &v.scale(c);
        }
        out
    }

    /// The two-sided product a·m·b in A.
    pub fn sandwich(&self, a: &Monomial, m: &Monomial, b: &Monomial) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.algebra);
        for (am, c) in self.algebra.mul_monomials(a, m).terms() {
            let full = self.algebra.mul_monomials(am, b);
            out = &out + &full.scale(c);
        }
        out
    }

    fn one_scalar(&self) -> Scalar {
        Scalar::one(self.algebra.field())
    }

    fn int_scalar(&self, n: i64) -> Scalar {
        Scalar::from_integer(self.algebra.field(), n)
    }

    pub fn render_generator(&self, gen: &Generator) -> String {
        match gen {
            Generator::Bar(w) => {
                let parts: Vec<String> =
                    w.iter().map(|m| self.algebra.render_monomial(m)).collect();
                format!("[{}]", parts.join("|"))
            }
            Generator::Orbit(idx) => {
                let parts: Vec<String> = idx.iter().map(|i| format!("x{}", i + 1)).collect();
                format!("o({})", parts.join(","))
            }
            Generator::Xi(n) => format!("xi{n}"),
            Generator::Tensor { factors, middles } => {
                let subs = match &self.kind {
                    ComplexKind::Tensor { factors: fs } => fs.clone(),
                    _ => vec![],
                };
                let mut s = String::new();
                for (i, f) in factors.iter().enumerate() {
                    let rendered = if i < subs.len() {
                        subs[i].render_generator(f)
                    } else {
                        format!("{f:?}")
                    };
                    s.push_str(&rendered);
                    if i < middles.len() {
                        s.push_str(&format!("⊗{}⊗", self.algebra.render_monomial(&middles[i])));
                    }
                }
                s
            }
        }
    }
}

/// Element-producing operations; implemented on `Arc<Complex>` so results
/// share the complex handle.
pub trait ComplexOps {
    /// d of a single generator (zero in degree 0).
    fn differential(&self, gen: &Generator) -> BimoduleElement;
    /// Bimodule-linear extension of d to elements.
    fn apply_differential(&self, elem: &BimoduleElement) -> BimoduleElement;
    /// The element 1·w·1.
    fn gen_elem(&self, gen: Generator) -> BimoduleElement;
    /// d∘d = 0 on every enumerated generator, μ∘d_1 = 0 where applicable.
    fn verify_d_squared(&self) -> Result<(), ChainError>;
}

impl ComplexOps for CRef {
    fn differential(&self, gen: &Generator) -> BimoduleElement {
        let degree = gen.degree();
        if degree == 0 {
            return BimoduleElement::zero(self, 0);
        }
        let mut out = BimoduleElement::zero(self, degree - 1);
        match (&self.kind, gen) {
            (ComplexKind::Bar, Generator::Bar(word)) => {
                let r = word.len();
                let one = self.algebra.unit_monomial();
                // i = 0: first entry moves to the left coefficient
                out.add_term(
                    word[0].clone(),
                    Generator::Bar(word[1..].to_vec()),
                    one.clone(),
                    self.one_scalar(),
                );
                // 0 < i < r: merge adjacent entries
                for i in 1..r {
                    let prod = self.algebra.mul_monomials(&word[i - 1], &word[i]);
                    for (m, c) in prod.terms() {
                        let mut w = Vec::with_capacity(r - 1);
                        w.extend_from_slice(&word[..i - 1]);
                        w.push(m.clone());
                        w.extend_from_slice(&word[i + 1..]);
                        out.add_term(one.clone(), Generator::Bar(w), one.clone(), c.scale_int(sign(i)));
                    }
                }
                // i = r: last entry moves to the right coefficient
                out.add_term(
                    one.clone(),
                    Generator::Bar(word[..r - 1].to_vec()),
                    word[r - 1].clone(),
                    self.int_scalar(sign(r)),
                );
            }
            (ComplexKind::Koszul, Generator::Orbit(idx)) => {
                let n = self.algebra.nvars();
                let one = self.algebra.unit_monomial();
                for (l, &v) in idx.iter().enumerate() {
                    let mut rest = idx.clone();
                    rest.remove(l);
                    let s = sign(l); // (−1)^{l+1} with 1-based l
                    let var = Monomial::var(v, n);
                    out.add_term(var.clone(), Generator::Orbit(rest.clone()), one.clone(), self.int_scalar(s));
                    out.add_term(one.clone(), Generator::Orbit(rest), var, self.int_scalar(-s));
                }
            }
            (ComplexKind::Cyclic { p }, Generator::Xi(nn)) => {
                let x = |e: u32| Monomial::Exps(vec![e]);
                if nn % 2 == 1 {
                    // ·u with u = x⊗1 − 1⊗x
                    out.add_term(x(1), Generator::Xi(nn - 1), x(0), self.one_scalar());
                    out.add_term(x(0), Generator::Xi(nn - 1), x(1), self.int_scalar(-1));
                } else {
                    // ·v with v = Σ_m x^{p−1−m}⊗x^m
                    for m in 0..*p as u32 {
                        out.add_term(x(*p as u32 - 1 - m), Generator::Xi(nn - 1), x(m), self.one_scalar());
                    }
                }
            }
            (ComplexKind::Tensor { factors }, Generator::Tensor { factors: gens, middles }) => {
                let mut deg_before = 0usize;
                for (k, g) in gens.iter().enumerate() {
                    let dg = factors[k].differential(g);
                    let leibniz = sign(deg_before);
                    for ((a, w, b), c) in dg.terms.iter() {
                        // reassemble: a merges left (into middle k−1 or the global
                        // left coefficient), b merges right symmetrically
                        let mut new_factors = gens.clone();
                        new_factors[k] = w.clone();
                        let coeff = c.scale_int(leibniz);
                        distribute_tensor_term(self, &mut out, &new_factors, middles, k, a, b, &coeff);
                    }
                    deg_before += g.degree();
                }
            }
            _ => panic!("generator does not belong to this complex kind"),
        }
        out
    }

    fn apply_differential(&self, elem: &BimoduleElement) -> BimoduleElement {
        assert!(elem.complex == *self, "element belongs to another complex");
        if elem.degree == 0 {
            return BimoduleElement::zero(self, 0);
        }
        let mut out = BimoduleElement::zero(self, elem.degree - 1);
        for ((a, w, b), c) in &elem.terms {
            let dw = self.differential(w).left_mul_monomial(a).right_mul_monomial(b);
            out.accumulate(&dw, c);
        }
        out
    }

    fn gen_elem(&self, gen: Generator) -> BimoduleElement {
        BimoduleElement::generator(self, gen)
    }

    fn verify_d_squared(&self) -> Result<(), ChainError> {
        for n in 1..=self.max_degree {
            for gen in self.generators(n) {
                let d1 = self.differential(&gen);
                if n >= 2 {
                    let d2 = self.apply_differential(&d1);
                    if !d2.is_zero() {
                        return Err(ChainError::Other(format!(
                            "d² ≠ 0 on {}",
                            self.render_generator(&gen)
                        )));
                    }
                } else if !matches!(self.kind, ComplexKind::Tensor { .. }) {
                    let mu = self.augmentation(&d1);
                    if !mu.is_zero() {
                        return Err(ChainError::Other(format!(
                            "μ∘d ≠ 0 on {}",
                            self.render_generator(&gen)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Distribute a factor-differential term, multiplying its boundary
/// coefficients into the neighboring middles (or the outer coefficients).
#[allow(clippy::too_many_arguments)]
fn distribute_tensor_term(
    cx: &CRef,
    out: &mut BimoduleElement,
    factors: &[Generator],
    middles: &[Monomial],
    k: usize,
    a: &Monomial,
    b: &Monomial,
    coeff: &Scalar,
) {
    let alg = cx.algebra();
    let one = alg.unit_monomial();
    // left side: a lands in middles[k−1] (as middle·a) or the outer left coeff
    let left_products: Vec<(Option<Monomial>, Monomial, Scalar)> = if k == 0 {
        vec![(None, a.clone(), Scalar::one(alg.field()))]
    } else {
        alg.mul_monomials(&middles[k - 1], a)
            .terms()
            .map(|(m, c)| (Some(m.clone()), one.clone(), c.clone()))
            .collect()
    };
    // right side: b lands in middles[k] (as b·middle) or the outer right coeff
    let right_products: Vec<(Option<Monomial>, Monomial, Scalar)> = if k == factors.len() - 1 {
        vec![(None, b.clone(), Scalar::one(alg.field()))]
    } else {
        alg.mul_monomials(b, &middles[k])
            .terms()
            .map(|(m, c)| (Some(m.clone()), one.clone(), c.clone()))
            .collect()
    };
    for (lm, outer_l, lc) in &left_products {
        for (rm, outer_r, rc) in &right_products {
            let mut ms = middles.to_vec();
            if let Some(m) = lm {
                ms[k - 1] = m.clone();
            }
            if let Some(m) = rm {
                ms[k] = m.clone();
            }
            let gen = Generator::Tensor { factors: factors.to_vec(), middles: ms };
            out.add_term(outer_l.clone(), gen, outer_r.clone(), &(coeff * lc) * rc);
        }
    }
}

fn tensor_generators(
    factors: &[Arc<Complex>],
    degree: usize,
    middles: &[Monomial],
    chosen: &mut Vec<(Generator, Option<Monomial>)>,
    out: &mut Vec<Generator>,
) {
    if factors.len() == 1 {
        for g in factors[0].generators_up_to_max(degree) {
            let mut fs = Vec::new();
            let mut ms = Vec::new();
            for (f, m) in chosen.iter() {
                fs.push(f.clone());
                ms.push(m.clone().expect("middle recorded for every earlier factor"));
            }
            fs.push(g);
            out.push(Generator::Tensor { factors: fs, middles: ms });
        }
        return;
    }
    for d in 0..=degree {
        for g in factors[0].generators_up_to_max(d) {
            for m in middles {
                chosen.push((g.clone(), Some(m.clone())));
                tensor_generators(&factors[1..], degree - d, middles, chosen, out);
                chosen.pop();
            }
        }
    }
}

fn sign(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All strictly increasing `size`-subsets of {0,…,n−1}.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, size, 0, &mut cur, &mut out);
    out
}

/// A sparse element Σ c·(a ⊗ w ⊗ a') of one homological degree.
///
/// Equality ignores the degree tag when both sides are zero: the zero element
/// is shared by all degrees, and degree-shifting maps applied to zero cannot
/// always tag their output meaningfully.
#[derive(Clone, Debug, Eq)]
pub struct BimoduleElement {
    complex: CRef,
    degree: usize,
    terms: BTreeMap<(Monomial, Generator, Monomial), Scalar>,
}

impl PartialEq for BimoduleElement {
    fn eq(&self, other: &Self) -> bool {
        if self.terms.is_empty() && other.terms.is_empty() {
            return true;
        }
        self.degree == other.degree && self.terms == other.terms && self.complex == other.complex
    }
}

impl BimoduleElement {
    pub fn zero(complex: &CRef, degree: usize) -> BimoduleElement {
        BimoduleElement { complex: complex.clone(), degree, terms: BTreeMap::new() }
    }

    pub fn generator(complex: &CRef, gen: Generator) -> BimoduleElement {
        let one = complex.algebra().unit_monomial();
        let degree = gen.degree();
        let mut e = BimoduleElement::zero(complex, degree);
        e.add_term(one.clone(), gen, one, Scalar::one(complex.algebra().field()));
        e
    }

    pub fn complex(&self) -> &CRef {
        &self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Generator, Monomial), &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, left: Monomial, gen: Generator, right: Monomial, c: Scalar) {
        debug_assert_eq!(gen.degree(), self.degree, "term degree mismatch");
        debug_assert!(self.complex.algebra().monomial_valid(&left));
        debug_assert!(self.complex.algebra().monomial_valid(&right));
        if c.is_zero() {
            return;
        }
        match self.terms.entry((left, gen, right)) {
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

    pub fn accumulate(&mut self, other: &BimoduleElement, scale: &Scalar) {
        assert!(other.is_zero() || self.degree == other.degree, "degree mismatch");
        for ((a, w, b), c) in &other.terms {
            self.add_term(a.clone(), w.clone(), b.clone(), c * scale);
        }
    }

    pub fn scale(&self, c: &Scalar) -> BimoduleElement {
        let mut out = BimoduleElement::zero(&self.complex, self.degree);
        out.accumulate(self, c);
        out
    }

    pub fn scale_int(&self, n: i64) -> BimoduleElement {
        self.scale(&Scalar::from_integer(self.complex.algebra().field(), n))
    }

    pub fn neg(&self) -> BimoduleElement {
        self.scale_int(-1)
    }

    /// a·self for a basis monomial a.
    pub fn left_mul_monomial(&self, a: &Monomial) -> BimoduleElement {
        if a == &self.complex.algebra().unit_monomial() {
            return self.clone();
        }
        let alg = self.complex.algebra().clone();
        let mut out = BimoduleElement::zero(&self.complex, self.degree);
        for ((l, w, r), c) in &self.terms {
            for (m, mc) in alg.mul_monomials(a, l).terms() {
                out.add_term(m.clone(), w.clone(), r.clone(), c * mc);
            }
        }
        out
    }

    pub fn right_mul_monomial(&self, b: &Monomial) -> BimoduleElement {
        if b == &self.complex.algebra().unit_monomial() {
            return self.clone();
        }
        let alg = self.complex.algebra().clone();
        let mut out = BimoduleElement::zero(&self.complex, self.degree);
        for ((l, w, r), c) in &self.terms {
            for (m, mc) in alg.mul_monomials(r, b).terms() {
                out.add_term(l.clone(), w.clone(), m.clone(), c * mc);
            }
        }
        out
    }

    pub fn left_mul(&self, a: &AlgebraElement) -> BimoduleElement {
        let mut out = BimoduleElement::zero(&self.complex, self.degree);
        for (m, c) in a.terms() {
            out.accumulate(&self.left_mul_monomial(m), c);
        }
        out
    }

    pub fn right_mul(&self, b: &AlgebraElement) -> BimoduleElement {
        let mut out = BimoduleElement::zero(&self.complex, self.degree);
        for (m, c) in b.terms() {
            out.accumulate(&self.right_mul_monomial(m), c);
        }
        out
    }
}

impl std::ops::Add<&BimoduleElement> for &BimoduleElement {
    type Output = BimoduleElement;
    fn add(self, rhs: &BimoduleElement) -> BimoduleElement {
        let mut out = self.clone();
        out.accumulate(rhs, &Scalar::one(self.complex.algebra().field()));
        out
    }
}

impl std::ops::Sub<&BimoduleElement> for &BimoduleElement {
    type Output = BimoduleElement;
    fn sub(self, rhs: &BimoduleElement) -> BimoduleElement {
        let mut out = self.clone();
        out.accumulate(rhs, &Scalar::from_integer(self.complex.algebra().field(), -1));
        out
    }
}

impl fmt::Display for BimoduleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let alg = self.complex.algebra();
        let mut first = true;
        for ((a, w, b), c) in &self.terms {
            let (sgn, mag) = if crate::scalar::is_negative_for_display(c) {
                ("-", c.neg())
            } else {
                ("+", c.clone())
            };
            if first {
                if sgn == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sgn} ")?;
            }
            if !mag.is_one() {
                write!(f, "{mag}·")?;
            }
            let la = alg.render_monomial(a);
            let rb = alg.render_monomial(b);
            if la != "1" {
                write!(f, "{la}·")?;
            }
            write!(f, "{}", self.complex.render_generator(w))?;
            if rb != "1" {
                write!(f, "·{rb}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::scalar::Field;

    fn poly2() -> ARef {
        Algebra::polynomial(Field::Rationals, 2)
    }

    #[test]
    fn bar_differential_examples() {
        // d(1⊗x⊗1) = x⊗1 − 1⊗x over k[x,y]
        let a = poly2();
        let b = Complex::bar(&a, 3, Some(3));
        let x = Monomial::var(0, 2);
        let y = Monomial::var(1, 2);
        let d = b.differential(&Generator::Bar(vec![x.clone()]));
        let one = a.unit_monomial();
        let mut expected = BimoduleElement::zero(&b, 0);
        expected.add_term(x.clone(), Generator::Bar(vec![]), one.clone(), Scalar::one(a.field()));
        expected.add_term(
            one.clone(),
            Generator::Bar(vec![]),
            x.clone(),
            Scalar::from_integer(a.field(), -1),
        );
        assert_eq!(d, expected);

        // d(1⊗x⊗y⊗1) = x⊗y⊗1 − 1⊗xy⊗1 + 1⊗x⊗y
        let d2 = b.differential(&Generator::Bar(vec![x.clone(), y.clone()]));
        let xy = Monomial::Exps(vec![1, 1]);
        let mut expected2 = BimoduleElement::zero(&b, 1);
        expected2.add_term(
            x.clone(),
            Generator::Bar(vec![y.clone()]),
            one.clone(),
            Scalar::one(a.field()),
        );
        expected2.add_term(
            one.clone(),
            Generator::Bar(vec![xy]),
            one.clone(),
            Scalar::from_integer(a.field(), -1),
        );
        expected2.add_term(
            one.clone(),
            Generator::Bar(vec![x.clone()]),
            y.clone(),
            Scalar::one(a.field()),
        );
        assert_eq!(d2, expected2);
    }

    #[test]
    fn bar_word_counts() {
        // k[x]/(x^2) has basis {1, x}: 2^r words in degree r
        let a = Algebra::truncated(Field::Rationals, 2);
        let b = Complex::bar(&a, 3, None);
        assert_eq!(b.generator_count(0), 1);
        assert_eq!(b.generator_count(1), 2);
        assert_eq!(b.generator_count(2), 4);
        assert_eq!(b.generator_count(3), 8);
    }

    #[test]
    fn koszul_counts_are_binomial() {
        let a = poly2();
        let k = Complex::koszul(&a, 2, 2);
        assert_eq!(k.generator_count(0), 1);
        assert_eq!(k.generator_count(1), 2);
        assert_eq!(k.generator_count(2), 1);
    }

    #[test]
    fn koszul_differential_example() {
        // d(1⊗o(x1,x2)⊗1) = x1⊗o(x2)⊗1 − 1⊗o(x2)⊗x1 − x2⊗o(x1)⊗1 + 1⊗o(x1)⊗x2
        let a = poly2();
        let k = Complex::koszul(&a, 2, 2);
        let d = k.differential(&Generator::Orbit(vec![0, 1]));
        let one = a.unit_monomial();
        let x1 = Monomial::var(0, 2);
        let x2 = Monomial::var(1, 2);
        let mut expected = BimoduleElement::zero(&k, 1);
        let pos = Scalar::one(a.field());
        let neg = Scalar::from_integer(a.field(), -1);
        expected.add_term(x1.clone(), Generator::Orbit(vec![1]), one.clone(), pos.clone());
        expected.add_term(one.clone(), Generator::Orbit(vec![1]), x1.clone(), neg.clone());
        expected.add_term(x2.clone(), Generator::Orbit(vec![0]), one.clone(), neg.clone());
        expected.add_term(one.clone(), Generator::Orbit(vec![0]), x2.clone(), pos.clone());
        assert_eq!(d, expected);
    }

    #[test]
    fn d_squared_zero_everywhere() {
        // bar over k[x]/(x^2)
        let a = Algebra::truncated(Field::Rationals, 2);
        Complex::bar(&a, 4, None).verify_d_squared().unwrap();
        // bar over F_3[x]/(x^3)
        let a3 = Algebra::truncated(Field::prime(3).unwrap(), 3);
        Complex::bar(&a3, 4, None).verify_d_squared().unwrap();
        // Koszul for n ≤ 3
        for n in 1..=3 {
            let p = Algebra::polynomial(Field::Rationals, n);
            Complex::koszul(&p, n, 3).verify_d_squared().unwrap();
        }
        // cyclic p = 3
        let f3 = Field::prime(3).unwrap();
        let c = Algebra::truncated(f3, 3);
        Complex::cyclic(&c, 3, 5).verify_d_squared().unwrap();
    }

    #[test]
    fn tensor_differential_matches_leibniz_expansion() {
        // over k[x1..x4], the element (a0)⊗(a1)⊗(a2⊗a3) — left factor in B_0,
        // middle coefficient a1, right factor with word (a2) and coefficient
        // a3 — maps to (a0)⊗(a1a2)⊗(a3) − (a0)⊗(a1)⊗(a2a3)
        let a = Algebra::polynomial(Field::Rationals, 4);
        let b = Complex::bar(&a, 2, Some(4));
        let bb = Complex::tensor(&[&b, &b]).unwrap();
        let v = |i: usize| Monomial::var(i, 4);
        let gen = Generator::Tensor {
            factors: vec![Generator::Bar(vec![]), Generator::Bar(vec![v(2)])],
            middles: vec![v(1)],
        };
        let elem = BimoduleElement::generator(&bb, gen)
            .left_mul_monomial(&v(0))
            .right_mul_monomial(&v(3));
        let d = bb.apply_differential(&elem);

        let mut expected = BimoduleElement::zero(&bb, 0);
        let empty_pair = |m: Monomial| Generator::Tensor {
            factors: vec![Generator::Bar(vec![]), Generator::Bar(vec![])],
            middles: vec![m],
        };
        expected.add_term(
            v(0),
            empty_pair(Monomial::Exps(vec![0, 1, 1, 0])),
            v(3),
            Scalar::one(a.field()),
        );
        expected.add_term(
            v(0),
            empty_pair(v(1)),
            Monomial::Exps(vec![0, 0, 1, 1]),
            Scalar::from_integer(a.field(), -1),
        );
        assert_eq!(d, expected);
    }

    #[test]
    fn tensor_differential_left_factor_word() {
        // (a0⊗a1)⊗(a2)⊗(a3): degree-1 left factor, degree-0 right factor.
        // d = (a0a1)⊗(a2)⊗(a3) − (a0)⊗(a1a2)⊗(a3); the right factor is rigid.
        let a = Algebra::polynomial(Field::Rationals, 4);
        let b = Complex::bar(&a, 2, Some(4));
        let bb = Complex::tensor(&[&b, &b]).unwrap();
        let v = |i: usize| Monomial::var(i, 4);
        let gen = Generator::Tensor {
            factors: vec![Generator::Bar(vec![v(1)]), Generator::Bar(vec![])],
            middles: vec![v(2)],
        };
        let elem = BimoduleElement::generator(&bb, gen)
            .left_mul_monomial(&v(0))
            .right_mul_monomial(&v(3));
        let d = bb.apply_differential(&elem);

        let empty_pair = |m: Monomial| Generator::Tensor {
            factors: vec![Generator::Bar(vec![]), Generator::Bar(vec![])],
            middles: vec![m],
        };
        let mut expected = BimoduleElement::zero(&bb, 0);
        expected.add_term(
            Monomial::Exps(vec![1, 1, 0, 0]),
            empty_pair(v(2)),
            v(3),
            Scalar::one(a.field()),
        );
        expected.add_term(
            v(0),
            empty_pair(Monomial::Exps(vec![0, 1, 1, 0])),
            v(3),
            Scalar::from_integer(a.field(), -1),
        );
        assert_eq!(d, expected);
    }

    #[test]
    fn tensor_d_squared_cyclic() {
        // d∘d = 0 on (cyclic K)⊗(cyclic K), p = 3, degrees ≤ 4
        let f3 = Field::prime(3).unwrap();
        let a = Algebra::truncated(f3, 3);
        let k = Complex::cyclic(&a, 3, 4);
        let kk = Complex::tensor(&[&k, &k]).unwrap();
        for n in 2..=4 {
            for gen in kk.generators(n) {
                let dd = kk.apply_differential(&kk.differential(&gen));
                assert!(dd.is_zero(), "d² ≠ 0 on {}", kk.render_generator(&gen));
            }
        }
    }

    #[test]
    fn triple_tensor_degree_and_relabeling() {
        let f3 = Field::prime(3).unwrap();
        let a = Algebra::truncated(f3, 3);
        let k = Complex::cyclic(&a, 3, 2);
        let kk = Complex::tensor(&[&k, &k]).unwrap();
        let left = Complex::tensor(&[&kk, &k]).unwrap();
        let right = Complex::tensor(&[&k, &kk]).unwrap();
        assert_eq!(left, right);
        for n in 0..=3 {
            let gens = left.generators(n);
            assert_eq!(gens, right.generators(n));
            for g in &gens {
                assert_eq!(g.degree(), n);
            }
        }
        // d² on the triple tensor at low degrees
        for n in 2..=3 {
            for gen in left.generators(n) {
                assert!(left.apply_differential(&left.differential(&gen)).is_zero());
            }
        }
    }

    #[test]
    fn cyclic_mu_d1_zero() {
        let f5 = Field::prime(5).unwrap();
        let a = Algebra::truncated(f5, 5);
        let k = Complex::cyclic(&a, 5, 3);
        let d1 = k.differential(&Generator::Xi(1));
        assert!(k.augmentation(&d1).is_zero());
    }

    #[test]
    fn generators_past_truncation_panic() {
        let a = Algebra::truncated(Field::Rationals, 2);
        let b = Complex::bar(&a, 2, None);
        let result = std::panic::catch_unwind(|| b.generators(3));
        assert!(result.is_err());
    }
}
