//! Graded A-bimodule maps between complexes.
//!
//! A map is determined by its values on free generators and extended
//! A^e-linearly. Values come either from an explicit per-generator table
//! (constructed homotopies, random perturbations) or from a closed-form rule
//! (differentials, diagonals, comparison maps). Applying a table map outside
//! its stored domain is an error, never a silent zero.
//!
//! Sign discipline: the only signed operations here are the Hom-complex
//! differential d(ψ) = d∘ψ − (−1)^{|ψ|} ψ∘d and the Koszul sign
//! (−1)^{|x||g|} of [`apply_middle_cochain`]. Every other sign in the engine
//! is stored in generator values.

use crate::algebra::{AlgebraElement, Monomial};
use crate::cochain::Cochain;
use crate::complex::{BimoduleElement, CRef, ChainError, Complex, ComplexKind, ComplexOps, Generator};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::sync::Arc;

type Rule = Arc<dyn Fn(&Generator) -> Result<BimoduleElement, ChainError> + Send + Sync>;

#[derive(Clone)]
enum MapKernel {
    Table(Arc<BTreeMap<Generator, BimoduleElement>>),
    Rule(Rule),
}

/// A graded bimodule map `source → target` of homological degree `shift`.
#[derive(Clone)]
pub struct BimoduleMap {
    name: String,
    source: CRef,
    target: CRef,
    shift: isize,
    kernel: MapKernel,
}

impl std::fmt::Debug for BimoduleMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BimoduleMap({}, shift {})", self.name, self.shift)
    }
}

impl BimoduleMap {
    pub fn table(
        name: impl Into<String>,
        source: &CRef,
        target: &CRef,
        shift: isize,
        values: BTreeMap<Generator, BimoduleElement>,
    ) -> BimoduleMap {
        BimoduleMap {
            name: name.into(),
            source: source.clone(),
            target: target.clone(),
            shift,
            kernel: MapKernel::Table(Arc::new(values)),
        }
    }

    pub fn rule(
        name: impl Into<String>,
        source: &CRef,
        target: &CRef,
        shift: isize,
        f: impl Fn(&Generator) -> Result<BimoduleElement, ChainError> + Send + Sync + 'static,
    ) -> BimoduleMap {
        BimoduleMap {
            name: name.into(),
            source: source.clone(),
            target: target.clone(),
            shift,
            kernel: MapKernel::Rule(Arc::new(f)),
        }
    }

    pub fn identity(complex: &CRef) -> BimoduleMap {
        let c = complex.clone();
        BimoduleMap::rule("id", complex, complex, 0, move |g| Ok(c.gen_elem(g.clone())))
    }

    pub fn zero_map(source: &CRef, target: &CRef, shift: isize) -> BimoduleMap {
        let t = target.clone();
        BimoduleMap::rule("0", source, target, shift, move |g| {
            let d = (g.degree() as isize + shift).max(0) as usize;
            Ok(BimoduleElement::zero(&t, d))
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn named(mut self, name: impl Into<String>) -> BimoduleMap {
        self.name = name.into();
        self
    }

    pub fn source(&self) -> &CRef {
        &self.source
    }

    pub fn target(&self) -> &CRef {
        &self.target
    }

    pub fn shift(&self) -> isize {
        self.shift
    }

    /// The value on a single free generator.
    pub fn value_on(&self, gen: &Generator) -> Result<BimoduleElement, ChainError> {
        let td = gen.degree() as isize + self.shift;
        if td < 0 {
            return Ok(BimoduleElement::zero(&self.target, 0));
        }
        match &self.kernel {
            MapKernel::Table(t) => t.get(gen).cloned().ok_or_else(|| {
                ChainError::MissingValue(format!(
                    "{} on {}",
                    self.name,
                    self.source.render_generator(gen)
                ))
            }),
            MapKernel::Rule(f) => f(gen),
        }
    }

    /// A^e-linear extension to elements.
    pub fn apply(&self, elem: &BimoduleElement) -> Result<BimoduleElement, ChainError> {
        if elem.complex() != &self.source {
            return Err(ChainError::MixedComplexes);
        }
        let td = elem.degree() as isize + self.shift;
        if elem.is_zero() || td < 0 {
            return Ok(BimoduleElement::zero(&self.target, td.max(0) as usize));
        }
        let td = td as usize;
        if td > self.target.max_degree() {
            return Err(ChainError::DegreeOutOfRange {
                degree: td as isize,
                max: self.target.max_degree(),
            });
        }
        let mut out = BimoduleElement::zero(&self.target, td);
        for ((a, w, b), c) in elem.terms() {
            let v = self.value_on(w)?.left_mul_monomial(a).right_mul_monomial(b);
            out.accumulate(&v, c);
        }
        Ok(out)
    }

    /// outer ∘ inner.
    pub fn compose(outer: &BimoduleMap, inner: &BimoduleMap) -> BimoduleMap {
        assert!(inner.target == outer.source, "composition needs matching middle complex");
        let o = outer.clone();
        let i = inner.clone();
        BimoduleMap::rule(
            format!("{}∘{}", outer.name, inner.name),
            &inner.source,
            &outer.target,
            inner.shift + outer.shift,
            move |g| o.apply(&i.value_on(g)?),
        )
    }

    pub fn sum(a: &BimoduleMap, b: &BimoduleMap) -> BimoduleMap {
        assert!(a.source == b.source && a.target == b.target && a.shift == b.shift);
        let (ac, bc) = (a.clone(), b.clone());
        BimoduleMap::rule(
            format!("{}+{}", a.name, b.name),
            &a.source,
            &a.target,
            a.shift,
            move |g| Ok(&ac.value_on(g)? + &bc.value_on(g)?),
        )
    }

    pub fn scale(&self, c: Scalar) -> BimoduleMap {
        let m = self.clone();
        BimoduleMap::rule(
            format!("{}·{}", c, self.name),
            &self.source,
            &self.target,
            self.shift,
            move |g| Ok(m.value_on(g)?.scale(&c)),
        )
    }

    /// The Hom-complex differential d(ψ) = d_Y∘ψ − (−1)^{|ψ|} ψ∘d_X.
    ///
    /// For a degree +1 map this is the homotopy defect d∘ψ + ψ∘d.
    pub fn hom_differential(&self) -> BimoduleMap {
        let m = self.clone();
        let parity = if self.shift.rem_euclid(2) == 0 { 1 } else { -1 };
        BimoduleMap::rule(
            format!("d({})", self.name),
            &self.source,
            &self.target,
            self.shift - 1,
            move |g| {
                let first = m.target.apply_differential(&m.value_on(g)?);
                let second = m.apply(&m.source.differential(g))?;
                Ok(&first - &second.scale_int(parity))
            },
        )
    }

    /// d∘φ + φ∘d for a degree +1 map φ.
    pub fn homotopy_defect(&self) -> BimoduleMap {
        assert_eq!(self.shift, 1, "homotopy defect is defined for degree +1 maps");
        self.hom_differential().named(format!("defect({})", self.name))
    }

    /// Memoize values per generator. Worthwhile for maps that get re-applied
    /// across many evaluations (diagonals, homotopies) and whose rule does
    /// real work.
    pub fn cached(&self) -> BimoduleMap {
        let inner = self.clone();
        let cache: std::sync::Mutex<BTreeMap<Generator, BimoduleElement>> =
            std::sync::Mutex::new(BTreeMap::new());
        BimoduleMap::rule(
            self.name.clone(),
            &self.source,
            &self.target,
            self.shift,
            move |gen| {
                if let Some(v) = cache.lock().unwrap().get(gen) {
                    return Ok(v.clone());
                }
                let v = inner.value_on(gen)?;
                cache.lock().unwrap().insert(gen.clone(), v.clone());
                Ok(v)
            },
        )
    }

    /// Materialize as a table over the enumerated generators of degrees
    /// 0..=max_degree.
    pub fn to_table(&self, max_degree: usize) -> Result<BimoduleMap, ChainError> {
        let mut values = BTreeMap::new();
        for n in 0..=max_degree {
            for g in self.source.generators(n) {
                values.insert(g.clone(), self.value_on(&g)?);
            }
        }
        Ok(BimoduleMap::table(self.name.clone(), &self.source, &self.target, self.shift, values))
    }

    /// Check this map agrees with `other` on all enumerated generators of the
    /// given degrees.
    pub fn verify_equal(&self, other: &BimoduleMap, degrees: impl Iterator<Item = usize>) -> Result<(), ChainError> {
        for n in degrees {
            for g in self.source.generators(n) {
                let lhs = self.value_on(&g)?;
                let rhs = other.value_on(&g)?;
                if lhs != rhs {
                    return Err(ChainError::Other(format!(
                        "{} ≠ {} on {}: {} vs {}",
                        self.name,
                        other.name,
                        self.source.render_generator(&g),
                        lhs,
                        rhs
                    )));
                }
            }
        }
        Ok(())
    }

    /// For a degree-0 map: f∘d = d∘f on generators of degrees 1..=max_n.
    pub fn verify_chain_map(&self, max_n: usize) -> Result<(), ChainError> {
        assert_eq!(self.shift, 0, "chain-map verification targets degree-0 maps");
        for n in 1..=max_n {
            for g in self.source.generators(n) {
                let lhs = self.apply(&self.source.differential(&g))?;
                let rhs = self.target.apply_differential(&self.value_on(&g)?);
                if lhs != rhs {
                    return Err(ChainError::NotAChainMap(
                        self.name.clone(),
                        self.source.render_generator(&g),
                    ));
                }
            }
        }
        Ok(())
    }

    /// For a degree +1 map φ: d∘φ + φ∘d = `target_map` on generators of
    /// degrees 0..=max_n.
    pub fn verify_defect_is(&self, target_map: &BimoduleMap, max_n: usize) -> Result<(), ChainError> {
        let defect = self.homotopy_defect();
        for n in 0..=max_n {
            for g in self.source.generators(n) {
                let lhs = defect.value_on(&g)?;
                let rhs = target_map.value_on(&g)?;
                if lhs != rhs {
                    return Err(ChainError::NotAHomotopy(
                        self.name.clone(),
                        format!(
                            "{}: defect {} vs {}",
                            self.source.render_generator(&g),
                            lhs,
                            rhs
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Apply a degree-0 map to one tensor factor, leaving the middles alone.
/// The image complex replaces that factor (flattening nested tensors).
pub fn apply_at_factor(
    elem: &BimoduleElement,
    k: usize,
    f: &BimoduleMap,
) -> Result<BimoduleElement, ChainError> {
    assert_eq!(f.shift(), 0, "factor application is for degree-0 maps");
    let ComplexKind::Tensor { factors } = elem.complex().kind() else {
        panic!("apply_at_factor needs a tensor-complex element");
    };
    assert!(k < factors.len());
    if factors[k] != *f.source() {
        return Err(ChainError::MixedComplexes);
    }
    let mut target_factors: Vec<&CRef> = factors.iter().collect();
    target_factors[k] = f.target();
    let target = Complex::tensor(&target_factors)?;

    let alg = elem.complex().algebra().clone();
    let mut out = BimoduleElement::zero(&target, elem.degree());
    for ((a, gen, b), c) in elem.terms() {
        let Generator::Tensor { factors: gs, middles: ms } = gen else {
            panic!("tensor-complex element with non-tensor generator");
        };
        let img = f.value_on(&gs[k])?;
        for ((ia, iw, ib), ic) in img.terms() {
            // ia sits between middles[k−1] (or the outer left coefficient)
            // and the image factor; ib symmetrically on the right
            let lefts: Vec<(Monomial, Option<Monomial>, Scalar)> = if k == 0 {
                alg.mul_monomials(a, ia).terms().map(|(m, s)| (m.clone(), None, s.clone())).collect()
            } else {
                alg.mul_monomials(&ms[k - 1], ia)
                    .terms()
                    .map(|(m, s)| (a.clone(), Some(m.clone()), s.clone()))
                    .collect()
            };
            let rights: Vec<(Monomial, Option<Monomial>, Scalar)> = if k == gs.len() - 1 {
                alg.mul_monomials(ib, b).terms().map(|(m, s)| (m.clone(), None, s.clone())).collect()
            } else {
                alg.mul_monomials(ib, &ms[k])
                    .terms()
                    .map(|(m, s)| (b.clone(), Some(m.clone()), s.clone()))
                    .collect()
            };
            for (la, lmid, lc) in &lefts {
                for (rb, rmid, rc) in &rights {
                    let mut new_factors = gs.clone();
                    new_factors[k] = iw.clone();
                    let mut new_middles = ms.clone();
                    if let Some(m) = lmid {
                        new_middles[k - 1] = m.clone();
                    }
                    if let Some(m) = rmid {
                        new_middles[k] = m.clone();
                    }
                    let flat = Generator::flatten(new_factors, new_middles);
                    let coeff = &(&(c * ic) * lc) * rc;
                    out.add_term(la.clone(), flat, rb.clone(), coeff);
                }
            }
        }
    }
    Ok(out)
}

/// f_1 ⊗ ⋯ ⊗ f_m for degree-0 maps with non-tensor targets
/// (no Koszul signs arise).
pub fn tensor_map(name: impl Into<String>, parts: &[BimoduleMap]) -> Result<BimoduleMap, ChainError> {
    assert!(parts.len() >= 2);
    for p in parts {
        assert_eq!(p.shift(), 0);
        assert!(
            !matches!(p.target().kind(), ComplexKind::Tensor { .. }),
            "tensor_map expects simple target complexes"
        );
    }
    let sources: Vec<&CRef> = parts.iter().map(|p| p.source()).collect();
    let targets: Vec<&CRef> = parts.iter().map(|p| p.target()).collect();
    let source = Complex::tensor(&sources)?;
    let target = Complex::tensor(&targets)?;
    let parts: Vec<BimoduleMap> = parts.to_vec();
    let src = source.clone();
    Ok(BimoduleMap::rule(name, &source, &target, 0, move |g| {
        let mut elem = src.gen_elem(g.clone());
        for (k, f) in parts.iter().enumerate() {
            elem = apply_at_factor(&elem, k, f)?;
        }
        Ok(elem)
    }))
}

/// F = (μ⊗id − id⊗μ) : X⊗_A Y → K on a two-factor tensor complex, with the
/// canonical identifications A⊗_A K ≅ K ≅ K⊗_A A applied. On generators it
/// is the elementwise piecewise map: zero when both factors have positive
/// degree, and the A-action on the surviving factor otherwise.
pub fn augmentation_difference(pair: &CRef, k: &CRef) -> BimoduleMap {
    let ComplexKind::Tensor { factors } = pair.kind() else {
        panic!("augmentation difference needs a tensor complex");
    };
    assert_eq!(factors.len(), 2, "F is defined on two-factor tensors");
    let (x, y) = (factors[0].clone(), factors[1].clone());
    let kk = k.clone();
    BimoduleMap::rule("F", pair, k, 0, move |g| {
        let Generator::Tensor { factors: gs, middles: ms } = g else {
            panic!("tensor generator expected");
        };
        let (w1, w2, m) = (&gs[0], &gs[1], &ms[0]);
        let alg = kk.algebra();
        let m_elem = AlgebraElement::monomial(alg, m.clone());
        let mut out = BimoduleElement::zero(&kk, g.degree());
        if w1.degree() == 0 {
            let mu1 = x.augmentation_gen(w1);
            out = &out + &kk.gen_elem(w2.clone()).left_mul(&(&mu1 * &m_elem));
        }
        if w2.degree() == 0 {
            let mu2 = y.augmentation_gen(w2);
            out = &out - &kk.gen_elem(w1.clone()).right_mul(&(&m_elem * &mu2));
        }
        Ok(out)
    })
}

/// (id ⊗_A g ⊗_A id) with the Koszul sign: on x⊗y⊗z with y in g's degree,
/// the image is (−1)^{|x||g|} x ⊗ g(y) ⊗ z collapsed into the pair complex.
pub fn apply_middle_cochain(
    g: &Cochain,
    elem: &BimoduleElement,
) -> Result<BimoduleElement, ChainError> {
    let ComplexKind::Tensor { factors } = elem.complex().kind() else {
        panic!("middle application needs a three-factor tensor element");
    };
    assert_eq!(factors.len(), 3);
    if factors[1] != *g.complex() {
        return Err(ChainError::MixedComplexes);
    }
    let pair = Complex::tensor(&[&factors[0], &factors[2]])?;
    let gd = g.degree();
    let out_degree = match (elem.degree() as isize - gd as isize).try_into() {
        Ok(d) => d,
        Err(_) => return Ok(BimoduleElement::zero(&pair, 0)),
    };
    let alg = elem.complex().algebra().clone();
    let mut out = BimoduleElement::zero(&pair, out_degree);
    for ((a, gen, b), c) in elem.terms() {
        let Generator::Tensor { factors: gs, middles: ms } = gen else {
            panic!("tensor generator expected");
        };
        if gs[1].degree() != gd {
            continue;
        }
        let val = g.value(&gs[1]);
        if val.is_zero() {
            continue;
        }
        let sign = if (gs[0].degree() * gd).is_multiple_of(2) { 1 } else { -1 };
        // new middle coefficient m1·g(y)·m2
        let m1 = AlgebraElement::monomial(&alg, ms[0].clone());
        let m2 = AlgebraElement::monomial(&alg, ms[1].clone());
        let middle = &(&m1 * &val) * &m2;
        for (mono, s) in middle.terms() {
            let gen2 = Generator::Tensor {
                factors: vec![gs[0].clone(), gs[2].clone()],
                middles: vec![mono.clone()],
            };
            out.add_term(a.clone(), gen2, b.clone(), &c.scale_int(sign) * s);
        }
    }
    Ok(out)
}

/// The middle application packaged as a bimodule map X⊗Y⊗Z → X⊗Z of degree −|g|.
pub fn middle_map(g: &Cochain, triple: &CRef) -> Result<BimoduleMap, ChainError> {
    let ComplexKind::Tensor { factors } = triple.kind() else {
        panic!("middle_map needs a three-factor tensor complex");
    };
    assert_eq!(factors.len(), 3);
    let pair = Complex::tensor(&[&factors[0], &factors[2]])?;
    let g = g.clone();
    let t = triple.clone();
    Ok(BimoduleMap::rule(
        format!("id⊗{}⊗id", "g"),
        triple,
        &pair,
        -(g.degree() as isize),
        move |gen| apply_middle_cochain(&g, &t.gen_elem(gen.clone())),
    ))
}

/// Cup product through a diagonal: (f ⌣ g)(w) = Σ f(x₁)·m·g(x₂) over the
/// terms x₁⊗m⊗x₂ of Δ(w), matching degrees.
pub fn cup(f: &Cochain, g: &Cochain, diagonal: &BimoduleMap) -> Result<Cochain, ChainError> {
    let complex = f.complex();
    if g.complex() != complex || diagonal.source() != complex {
        return Err(ChainError::MixedComplexes);
    }
    let degree = f.degree() + g.degree();
    if complex.vanishes_in(degree as isize) {
        return Ok(Cochain::zero(complex, degree));
    }
    complex.check_degree(degree as isize)?;
    let alg = complex.algebra();
    let mut out = Cochain::zero(complex, degree);
    for w in complex.generators(degree) {
        let dw = diagonal.value_on(&w)?;
        let mut v = AlgebraElement::zero(alg);
        for ((a, gen, b), c) in dw.terms() {
            let Generator::Tensor { factors: gs, middles: ms } = gen else {
                panic!("diagonal must land in a two-factor tensor complex");
            };
            if gs[0].degree() != f.degree() || gs[1].degree() != g.degree() {
                continue;
            }
            let fv = f.value(&gs[0]);
            let gv = g.value(&gs[1]);
            if fv.is_zero() || gv.is_zero() {
                continue;
            }
            let am = AlgebraElement::monomial(alg, a.clone());
            let mm = AlgebraElement::monomial(alg, ms[0].clone());
            let bm = AlgebraElement::monomial(alg, b.clone());
            let term = &(&(&(&am * &fv) * &mm) * &gv) * &bm;
            v = &v + &term.scale(c);
        }
        out.set_value(w, v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::scalar::Field;

    fn setup() -> (crate::algebra::ARef, CRef, CRef) {
        let a = Algebra::truncated(Field::Rationals, 2);
        let b = Complex::bar(&a, 4, None);
        let bb = Complex::tensor(&[&b, &b]).unwrap();
        (a, b, bb)
    }

    #[test]
    fn identity_and_linearity() {
        let (a, b, _) = setup();
        let id = BimoduleMap::identity(&b);
        let x = Monomial::Exps(vec![1]);
        let gen = Generator::Bar(vec![x.clone(), x.clone()]);
        let elem = b.gen_elem(gen).left_mul_monomial(&x);
        assert_eq!(id.apply(&elem).unwrap(), elem);
        // f(a·m·a') = a·f(m)·a' for the differential-as-map
        let d = BimoduleMap::rule("d", &b, &b, -1, {
            let b2 = b.clone();
            move |g| Ok(b2.differential(g))
        });
        let lhs = d.apply(&elem).unwrap();
        let rhs = b.differential(&Generator::Bar(vec![x.clone(), x.clone()])).left_mul_monomial(&x);
        assert_eq!(lhs, rhs);
        let _ = a;
    }

    #[test]
    fn apply_zero_is_zero() {
        let (_, b, _) = setup();
        let id = BimoduleMap::identity(&b);
        let z = BimoduleElement::zero(&b, 2);
        assert!(id.apply(&z).unwrap().is_zero());
    }

    #[test]
    fn table_misses_loudly() {
        let (_, b, _) = setup();
        let empty = BimoduleMap::table("empty", &b, &b, 0, BTreeMap::new());
        let err = empty.value_on(&Generator::Bar(vec![])).unwrap_err();
        assert!(matches!(err, ChainError::MissingValue(_)));
    }

    #[test]
    fn degree_out_of_range_is_loud() {
        let (_, b, _) = setup();
        let up = BimoduleMap::rule("up", &b, &b, 1, {
            let b2 = b.clone();
            move |g| {
                let mut w = match g {
                    Generator::Bar(w) => w.clone(),
                    _ => unreachable!(),
                };
                w.push(Monomial::Exps(vec![0]));
                Ok(b2.gen_elem(Generator::Bar(w)))
            }
        });
        let top = b.gen_elem(Generator::Bar(vec![Monomial::Exps(vec![1]); 4]));
        assert!(matches!(up.apply(&top), Err(ChainError::DegreeOutOfRange { .. })));
    }

    #[test]
    fn composition_respects_apply() {
        let (_, b, _) = setup();
        let d = BimoduleMap::rule("d", &b, &b, -1, {
            let b2 = b.clone();
            move |g| Ok(b2.differential(g))
        });
        let dd = BimoduleMap::compose(&d, &d);
        for n in 2..=4 {
            for g in b.generators(n) {
                assert!(dd.value_on(&g).unwrap().is_zero());
            }
        }
        // apply(f∘g, x) = apply(f, apply(g, x)) on a sample
        let x = Monomial::Exps(vec![1]);
        let sample = b
            .gen_elem(Generator::Bar(vec![x.clone(), x.clone(), x.clone()]))
            .right_mul_monomial(&x);
        let lhs = dd.apply(&sample).unwrap();
        let rhs = d.apply(&d.apply(&sample).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn defect_of_zero_map_is_zero() {
        let (_, b, bb) = setup();
        let zero = BimoduleMap::zero_map(&bb, &b, 1);
        let defect = zero.homotopy_defect();
        for n in 0..=2 {
            for g in bb.generators(n) {
                assert!(defect.value_on(&g).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn defect_linear_in_phi() {
        // defect(φ1+φ2) = defect(φ1) + defect(φ2) on samples
        let (_, b, bb) = setup();
        let mk = |flip: bool| {
            let b2 = b.clone();
            BimoduleMap::rule("phi", &bb, &b, 1, move |g| {
                // toy degree+1 assignment: send every generator to a fixed word
                let n = g.degree() + 1;
                let x = Monomial::Exps(vec![1]);
                let w = Generator::Bar(vec![x; n]);
                let e = b2.gen_elem(w);
                Ok(if flip { e.scale_int(-3) } else { e })
            })
        };
        let p1 = mk(false);
        let p2 = mk(true);
        let sum = BimoduleMap::sum(&p1, &p2);
        let lhs = sum.homotopy_defect();
        let rhs = BimoduleMap::sum(&p1.homotopy_defect(), &p2.homotopy_defect());
        for n in 0..=2 {
            for g in bb.generators(n) {
                assert_eq!(lhs.value_on(&g).unwrap(), rhs.value_on(&g).unwrap());
            }
        }
    }

    #[test]
    fn middle_cochain_sign_rule() {
        // (ξ1)⊗(ξ1)⊗(ξ0) with |g| = 1 picks up the sign (−1)^{1·1} = −1
        let f3 = Field::prime(3).unwrap();
        let a = Algebra::truncated(f3, 3);
        let k = Complex::cyclic(&a, 3, 3);
        let kkk = Complex::tensor(&[&k, &k, &k]).unwrap();
        let one = a.unit_monomial();
        let mut g = Cochain::zero(&k, 1);
        g.set_value(Generator::Xi(1), AlgebraElement::one(&a));
        let gen = Generator::Tensor {
            factors: vec![Generator::Xi(1), Generator::Xi(1), Generator::Xi(0)],
            middles: vec![one.clone(), one.clone()],
        };
        let out = apply_middle_cochain(&g, &kkk.gen_elem(gen)).unwrap();
        let kk = Complex::tensor(&[&k, &k]).unwrap();
        let expected = kk
            .gen_elem(Generator::Tensor {
                factors: vec![Generator::Xi(1), Generator::Xi(0)],
                middles: vec![one.clone()],
            })
            .scale_int(-1);
        assert_eq!(out, expected);
    }

    #[test]
    fn middle_map_wrapper_matches_direct_application() {
        let f3 = Field::prime(3).unwrap();
        let a = Algebra::truncated(f3, 3);
        let k = Complex::cyclic(&a, 3, 3);
        let kkk = Complex::tensor(&[&k, &k, &k]).unwrap();
        let mut g = Cochain::zero(&k, 1);
        g.set_value(Generator::Xi(1), AlgebraElement::monomial(&a, Monomial::Exps(vec![1])));
        let map = middle_map(&g, &kkk).unwrap();
        assert_eq!(map.shift(), -1);
        for n in 1..=3usize {
            for gen in kkk.generators(n) {
                let direct = apply_middle_cochain(&g, &kkk.gen_elem(gen.clone())).unwrap();
                assert_eq!(map.value_on(&gen).unwrap(), direct);
            }
        }
    }

    #[test]
    fn middle_cochain_skips_wrong_degree() {
        // if g vanishes in the middle degree the composite vanishes
        let f3 = Field::prime(3).unwrap();
        let a = Algebra::truncated(f3, 3);
        let k = Complex::cyclic(&a, 3, 3);
        let kkk = Complex::tensor(&[&k, &k, &k]).unwrap();
        let one = a.unit_monomial();
        let g = Cochain::zero(&k, 1); // zero cochain of degree 1
        let gen = Generator::Tensor {
            factors: vec![Generator::Xi(0), Generator::Xi(1), Generator::Xi(0)],
            middles: vec![one.clone(), one.clone()],
        };
        assert!(apply_middle_cochain(&g, &kkk.gen_elem(gen)).unwrap().is_zero());
    }

    #[test]
    fn augmentation_difference_cases() {
        let f3 = Field::prime(3).unwrap();
        let a = Algebra::truncated(f3, 3);
        let k = Complex::cyclic(&a, 3, 3);
        let kk = Complex::tensor(&[&k, &k]).unwrap();
        let f = augmentation_difference(&kk, &k);
        let x = Monomial::Exps(vec![1]);
        let one = a.unit_monomial();
        // F(ξ0 ⊗ x·ξ0) = x·ξ0 − ξ0·x
        let gen = Generator::Tensor {
            factors: vec![Generator::Xi(0), Generator::Xi(0)],
            middles: vec![x.clone()],
        };
        let v = f.value_on(&gen).unwrap();
        let mut expected = BimoduleElement::zero(&k, 0);
        expected.add_term(x.clone(), Generator::Xi(0), one.clone(), Scalar::one(f3));
        expected.add_term(one.clone(), Generator::Xi(0), x.clone(), Scalar::from_integer(f3, -1));
        assert_eq!(v, expected);
        // both factors positive: zero
        let gen2 = Generator::Tensor {
            factors: vec![Generator::Xi(1), Generator::Xi(2)],
            middles: vec![one.clone()],
        };
        assert!(f.value_on(&gen2).unwrap().is_zero());
    }

    #[test]
    fn apply_at_factor_diagonal_shape() {
        // applying a K → K⊗K rule at factor 0 of K⊗K produces a flat triple
        let f3 = Field::prime(3).unwrap();
        let a = Algebra::truncated(f3, 3);
        let k = Complex::cyclic(&a, 3, 3);
        let kk = Complex::tensor(&[&k, &k]).unwrap();
        let one = a.unit_monomial();
        let diag = BimoduleMap::rule("split", &k, &kk, 0, {
            let kk2 = kk.clone();
            let one2 = one.clone();
            move |g| {
                // toy diagonal ξ_n ↦ ξ_n⊗ξ_0 + ξ_0⊗ξ_n
                let n = g.degree();
                let mk = |a_: usize, b_: usize| Generator::Tensor {
                    factors: vec![Generator::Xi(a_), Generator::Xi(b_)],
                    middles: vec![one2.clone()],
                };
                let mut e = kk2.gen_elem(mk(n, 0));
                if n > 0 {
                    e = &e + &kk2.gen_elem(mk(0, n));
                }
                Ok(e)
            }
        });
        let gen = Generator::Tensor {
            factors: vec![Generator::Xi(1), Generator::Xi(2)],
            middles: vec![one.clone()],
        };
        let elem = kk.gen_elem(gen);
        let out = apply_at_factor(&elem, 0, &diag).unwrap();
        assert_eq!(out.degree(), 3);
        for ((_, g, _), _) in out.terms() {
            let Generator::Tensor { factors, middles } = g else { panic!() };
            assert_eq!(factors.len(), 3);
            assert_eq!(middles.len(), 2);
        }
        assert_eq!(out.num_terms(), 2);
    }
}
