//! Parsing and rendering for the CLI surface.
//!
//! Grammar (documented in the README):
//!
//! ```text
//! element   ::= signed-term (("+" | "-") signed-term)*
//! term      ::= [scalar "*"] monomial | scalar
//! scalar    ::= integer | integer "/" integer
//! monomial  ::= "1" | factor ("*" factor)*
//! factor    ::= var ["^" integer]
//! var       ::= "x" | "x" index        (single- vs multi-variable algebras)
//! cochain   ::= cterm (("+" | "-") cterm)*         (cyclic: cterm = [element] "xi" n)
//! field     ::= cterm (("+" | "-") cterm)*         (koszul: cterm = [element] dlist)
//! dlist     ::= ("d" index)+
//! algebra   ::= ("Q" | "k" | "F" p) "[" vars "]" ["/(x^" m ")"]
//! ```

use crate::algebra::{ARef, Algebra, AlgebraElement, AlgebraKind, Monomial};
use crate::cochain::Cochain;
use crate::complex::{CRef, Generator};
use crate::koszul::PolyVectorField;
use crate::scalar::{Field, Scalar};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error: {0}")]
pub struct ParseError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

/// `"F3[x]/(x^3)"`, `"Q[x,y]"`, `"k[x1,x2,x3]"`, `"Q[x]/(x^2)"`.
pub fn parse_algebra_spec(spec: &str) -> Result<ARef, ParseError> {
    let s = spec.trim();
    let bracket = s.find('[').ok_or_else(|| ParseError(format!("missing '[' in {spec:?}")))?;
    let field_part = &s[..bracket];
    let field = match field_part {
        "Q" | "k" | "" => Field::Rationals,
        f if f.starts_with('F') => {
            let p: u64 =
                f[1..].parse().map_err(|_| ParseError(format!("bad prime in {spec:?}")))?;
            Field::prime(p).map_err(|e| ParseError(e.to_string()))?
        }
        _ => return err(format!("unknown field {field_part:?}")),
    };
    let close = s.find(']').ok_or_else(|| ParseError(format!("missing ']' in {spec:?}")))?;
    let vars: Vec<&str> = s[bracket + 1..close].split(',').map(str::trim).collect();
    let rest = s[close + 1..].trim();
    if rest.is_empty() {
        return Ok(Algebra::polynomial(field, vars.len()));
    }
    // quotient: /(x^m)
    let rest = rest
        .strip_prefix("/(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ParseError(format!("bad quotient in {spec:?}")))?;
    if vars.len() != 1 {
        return err("quotients are supported for one variable only");
    }
    let m: u32 = rest
        .trim()
        .strip_prefix("x^")
        .and_then(|e| e.trim().parse().ok())
        .ok_or_else(|| ParseError(format!("bad quotient exponent in {spec:?}")))?;
    if m < 2 {
        return err("quotient exponent must be at least 2");
    }
    Ok(Algebra::truncated(field, m))
}

/// One monomial: "1", "x", "x^2", "x1^2*x2".
pub fn parse_monomial(algebra: &ARef, s: &str) -> Result<Monomial, ParseError> {
    let s = s.trim();
    if s == "1" {
        return Ok(algebra.unit_monomial());
    }
    let nvars = algebra.nvars();
    if nvars == 0 {
        // structure-constant algebras use basis labels
        let AlgebraKind::StructureConstants { labels, .. } = algebra.kind() else {
            return err("monomials need a polynomial-type algebra");
        };
        return match labels.iter().position(|l| l == s) {
            Some(i) => Ok(Monomial::Basis(i)),
            None => err(format!("unknown basis label {s:?}")),
        };
    }
    let mut exps = vec![0u32; nvars];
    for factor in s.split('*') {
        let factor = factor.trim();
        let (var, exp) = match factor.split_once('^') {
            Some((v, e)) => {
                (v.trim(), e.trim().parse::<u32>().map_err(|_| ParseError(format!("bad exponent in {factor:?}")))?)
            }
            None => (factor, 1),
        };
        let idx = if var == "x" && nvars == 1 {
            0
        } else {
            let i: usize = var
                .strip_prefix('x')
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| ParseError(format!("bad variable {var:?}")))?;
            if i == 0 || i > nvars {
                return err(format!("variable index {i} out of range 1..={nvars}"));
            }
            i - 1
        };
        exps[idx] += exp;
    }
    let m = Monomial::Exps(exps);
    if !algebra.monomial_valid(&m) {
        return err(format!("monomial {s:?} is not valid in this algebra"));
    }
    Ok(m)
}

/// Split "a + b - c" into signed chunks at top level.
fn signed_chunks(s: &str) -> Result<Vec<(i64, String)>, ParseError> {
    let mut out = Vec::new();
    let mut sign = 1i64;
    let mut cur = String::new();
    let mut started = false;
    for ch in s.chars() {
        match ch {
            '+' | '-' if started && !cur.trim().is_empty() => {
                out.push((sign, cur.trim().to_string()));
                cur = String::new();
                sign = if ch == '-' { -1 } else { 1 };
            }
            '-' if !started || cur.trim().is_empty() => {
                sign = -sign;
                started = true;
            }
            '+' if cur.trim().is_empty() => {
                started = true;
            }
            _ => {
                cur.push(ch);
                started = true;
            }
        }
    }
    if cur.trim().is_empty() {
        return err("empty term");
    }
    out.push((sign, cur.trim().to_string()));
    Ok(out)
}

/// A sum of scalar-weighted monomials: "2*x^2 + 1 - 1/3*x".
pub fn parse_element(algebra: &ARef, s: &str) -> Result<AlgebraElement, ParseError> {
    let mut out = AlgebraElement::zero(algebra);
    for (sign, chunk) in signed_chunks(s)? {
        let (scalar, mono) = split_scalar_prefix(algebra, &chunk)?;
        let m = match mono {
            Some(m) => parse_monomial(algebra, &m)?,
            None => algebra.unit_monomial(),
        };
        out = &out + &AlgebraElement::term(algebra, m, scalar.scale_int(sign));
    }
    Ok(out)
}

/// Split "3*x^2" / "1/2*x1" / "x" / "5" into scalar and monomial text.
fn split_scalar_prefix(
    algebra: &ARef,
    chunk: &str,
) -> Result<(Scalar, Option<String>), ParseError> {
    let field = algebra.field();
    let chunk = chunk.trim();
    // find a leading numeric (int or int/int) prefix
    let mut idx = 0;
    let bytes = chunk.as_bytes();
    while idx < bytes.len() && (bytes[idx].is_ascii_digit() || bytes[idx] == b'/') {
        idx += 1;
    }
    let (num_part, rest) = chunk.split_at(idx);
    let rest = rest.trim();
    if num_part.is_empty() {
        return Ok((Scalar::one(field), Some(chunk.to_string())));
    }
    // "1" alone could be the unit monomial; treat pure numerals as scalars
    let scalar = if let Some((n, d)) = num_part.split_once('/') {
        if field != Field::Rationals {
            return err("fractional coefficients need the rational field");
        }
        let n: i64 = n.parse().map_err(|_| ParseError(format!("bad numerator {n:?}")))?;
        let d: i64 = d.parse().map_err(|_| ParseError(format!("bad denominator {d:?}")))?;
        if d == 0 {
            return err("zero denominator");
        }
        Scalar::rational(n, d)
    } else {
        let n: i64 = num_part.parse().map_err(|_| ParseError(format!("bad integer {num_part:?}")))?;
        Scalar::from_integer(field, n)
    };
    if rest.is_empty() {
        return Ok((scalar, None));
    }
    let rest = rest.strip_prefix('*').unwrap_or(rest).trim();
    Ok((scalar, Some(rest.to_string())))
}

/// Cyclic cochain: "x^2 xi1 + x xi1", "xi2", "2*x xi1". All terms must share
/// one ξ-degree.
pub fn parse_cyclic_cochain(complex: &CRef, s: &str) -> Result<Cochain, ParseError> {
    let algebra = complex.algebra().clone();
    let mut degree: Option<usize> = None;
    let mut pieces: Vec<(usize, AlgebraElement)> = Vec::new();
    for (sign, chunk) in signed_chunks(s)? {
        let xi_pos = chunk
            .rfind("xi")
            .ok_or_else(|| ParseError(format!("missing ξ generator in {chunk:?}")))?;
        let n: usize = chunk[xi_pos + 2..]
            .trim()
            .parse()
            .map_err(|_| ParseError(format!("bad ξ index in {chunk:?}")))?;
        let coeff_text = chunk[..xi_pos].trim();
        let coeff = if coeff_text.is_empty() {
            AlgebraElement::one(&algebra)
        } else {
            let (scalar, mono) = split_scalar_prefix(&algebra, coeff_text)?;
            let m = match mono {
                Some(m) => parse_monomial(&algebra, &m)?,
                None => algebra.unit_monomial(),
            };
            AlgebraElement::term(&algebra, m, scalar)
        };
        match degree {
            None => degree = Some(n),
            Some(d) if d != n => return err("cochain terms must share one degree"),
            _ => {}
        }
        pieces.push((n, coeff.scale_int(sign)));
    }
    let degree = degree.ok_or_else(|| ParseError("empty cochain".into()))?;
    let mut out = Cochain::zero(complex, degree);
    let mut total = AlgebraElement::zero(&algebra);
    for (_, coeff) in pieces {
        total = &total + &coeff;
    }
    out.set_value(Generator::Xi(degree), total);
    Ok(out)
}

/// Vector field: "x1^2*x2 d1 d3 + 2 d2", "d1". Homogeneous in ∂-degree.
pub fn parse_vector_field(algebra: &ARef, s: &str) -> Result<PolyVectorField, ParseError> {
    let mut out = PolyVectorField::zero(algebra);
    let nvars = algebra.nvars();
    for (sign, chunk) in signed_chunks(s)? {
        let mut parts = chunk.split_whitespace().peekable();
        let mut coeff_text = String::new();
        while let Some(tok) = parts.peek() {
            if tok.starts_with('d') && tok[1..].chars().all(|c| c.is_ascii_digit()) && tok.len() > 1
            {
                break;
            }
            coeff_text.push_str(parts.next().unwrap());
        }
        let coeff = if coeff_text.is_empty() {
            AlgebraElement::one(algebra)
        } else {
            let (scalar, mono) = split_scalar_prefix(algebra, &coeff_text)?;
            let m = match mono {
                Some(m) => parse_monomial(algebra, &m)?,
                None => algebra.unit_monomial(),
            };
            AlgebraElement::term(algebra, m, scalar)
        };
        let mut indices = Vec::new();
        for tok in parts {
            let i: usize = tok
                .strip_prefix('d')
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| ParseError(format!("bad derivative token {tok:?}")))?;
            if i == 0 || i > nvars {
                return err(format!("derivative index {i} out of range 1..={nvars}"));
            }
            indices.push(i - 1);
        }
        out.add_term(indices, coeff.scale_int(sign));
    }
    Ok(out)
}

/// Render a cyclic cochain back in the input grammar.
pub fn render_cyclic_cochain(c: &Cochain) -> String {
    if c.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (gen, val) in c.values() {
        let Generator::Xi(n) = gen else { unreachable!() };
        for (m, s) in val.terms() {
            let mono = c.complex().algebra().render_monomial(m);
            let short = s.render_short();
            let coeff = if short == "1" {
                if mono == "1" {
                    String::new()
                } else {
                    format!("{mono} ")
                }
            } else if mono == "1" {
                format!("{short} ")
            } else {
                format!("{short}*{mono} ")
            };
            parts.push(format!("{coeff}xi{n}"));
        }
    }
    parts.join(" + ")
}

/// Generator as JSON: {"bar": [...]}, {"orbit": [...]}, {"xi": n}, tensors
/// recursively.
pub fn generator_json(complex: &CRef, gen: &Generator) -> Value {
    let alg = complex.algebra();
    match gen {
        Generator::Bar(w) => {
            json!({"bar": w.iter().map(|m| alg.render_monomial(m)).collect::<Vec<_>>()})
        }
        Generator::Orbit(i) => json!({"orbit": i.iter().map(|k| k + 1).collect::<Vec<_>>()}),
        Generator::Xi(n) => json!({"xi": n}),
        Generator::Tensor { factors, middles } => json!({
            "factors": factors.iter().map(|f| generator_json(complex, f)).collect::<Vec<_>>(),
            "middles": middles.iter().map(|m| alg.render_monomial(m)).collect::<Vec<_>>(),
        }),
    }
}

/// Cochain as {degree, terms: [{generator, value}]}.
pub fn cochain_json(c: &Cochain) -> Value {
    let terms: Vec<Value> = c
        .values()
        .map(|(g, v)| {
            json!({
                "generator": generator_json(c.complex(), g),
                "value": element_json(v),
            })
        })
        .collect();
    json!({"degree": c.degree(), "terms": terms})
}

/// Element as [{monomial, coeff}].
pub fn element_json(e: &AlgebraElement) -> Value {
    let terms: Vec<Value> = e
        .terms()
        .map(|(m, c)| {
            json!({
                "monomial": e.algebra().render_monomial(m),
                "coeff": serde_json::to_value(c).expect("scalar serializes"),
            })
        })
        .collect();
    Value::Array(terms)
}

/// Bimodule element as [{left, generator, right, coeff}].
pub fn bimodule_element_json(e: &crate::complex::BimoduleElement) -> Value {
    let alg = e.complex().algebra();
    let terms: Vec<Value> = e
        .terms()
        .map(|((a, w, b), c)| {
            json!({
                "left": alg.render_monomial(a),
                "generator": generator_json(e.complex(), w),
                "right": alg.render_monomial(b),
                "coeff": serde_json::to_value(c).expect("scalar serializes"),
            })
        })
        .collect();
    json!({"degree": e.degree(), "terms": terms})
}

/// A graded map as its degree-indexed generator table, materialized over the
/// enumerated generators of degrees 0..=max_degree.
pub fn map_json(map: &crate::map::BimoduleMap, max_degree: usize) -> Result<Value, ParseError> {
    let mut table = Vec::new();
    for n in 0..=max_degree {
        for gen in map.source().generators(n) {
            let v = map.value_on(&gen).map_err(|e| ParseError(e.to_string()))?;
            table.push(json!({
                "degree": n,
                "generator": generator_json(map.source(), &gen),
                "value": bimodule_element_json(&v),
            }));
        }
    }
    Ok(json!({"name": map.name(), "shift": map.shift(), "values": table}))
}

/// Structural summary of a complex: kind, truncation, generators per degree.
pub fn complex_json(complex: &CRef) -> Value {
    let kind = match complex.kind() {
        crate::complex::ComplexKind::Bar => "bar".to_string(),
        crate::complex::ComplexKind::Koszul => "koszul".to_string(),
        crate::complex::ComplexKind::Cyclic { p } => format!("cyclic(p={p})"),
        crate::complex::ComplexKind::Tensor { factors } => format!("tensor({})", factors.len()),
    };
    let generators: Vec<Value> = (0..=complex.max_degree())
        .map(|n| {
            let gens: Vec<Value> =
                complex.generators(n).iter().map(|g| generator_json(complex, g)).collect();
            json!({"degree": n, "generators": gens})
        })
        .collect();
    json!({
        "kind": kind,
        "field": complex.algebra().field().to_string(),
        "max_degree": complex.max_degree(),
        "internal_bound": complex.internal_bound(),
        "generators": generators,
    })
}

/// Parse an element back from [`element_json`] output.
pub fn element_from_json(algebra: &ARef, v: &Value) -> Result<AlgebraElement, ParseError> {
    let arr = v.as_array().ok_or_else(|| ParseError("element must be an array".into()))?;
    let mut out = AlgebraElement::zero(algebra);
    for t in arr {
        let mono = t
            .get("monomial")
            .and_then(Value::as_str)
            .ok_or_else(|| ParseError("missing monomial".into()))?;
        let coeff: Scalar = serde_json::from_value(
            t.get("coeff").cloned().ok_or_else(|| ParseError("missing coeff".into()))?,
        )
        .map_err(|e| ParseError(e.to_string()))?;
        out = &out + &AlgebraElement::term(algebra, parse_monomial(algebra, mono)?, coeff);
    }
    Ok(out)
}
