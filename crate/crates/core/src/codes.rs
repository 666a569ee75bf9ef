//! Reed-Solomon, interleaved, folded and multiplicity codes: parameters,
//! encoders, symbol distance and the interleaved-to-extension-field map.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field, SubfieldEmbedding};
use crate::poly::{PointSet, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "RS")]
    Rs,
    #[serde(rename = "IRS")]
    Irs,
    #[serde(rename = "FRS")]
    Frs,
    #[serde(rename = "MULT")]
    Mult,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Rs => "RS",
            Family::Irs => "IRS",
            Family::Frs => "FRS",
            Family::Mult => "MULT",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_uppercase().as_str() {
            "RS" => Ok(Family::Rs),
            "IRS" => Ok(Family::Irs),
            "FRS" => Ok(Family::Frs),
            "MULT" => Ok(Family::Mult),
            _ => Err(Error::InvalidParameters(format!("unknown code family {s:?}"))),
        }
    }
}

/// A validated code: family, length, dimension, field, symbol width and
/// evaluation points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    family: Family,
    n: usize,
    k: usize,
    field: Field,
    s: usize,
    gamma: Option<Fe>,
    alphas: Vec<Fe>,
}

impl CodeSpec {
    /// Validate parameters, generating evaluation points when `alphas` is absent.
    ///
    /// Default points are `g^1, .., g^n` for a multiplicative generator `g`;
    /// FRS uses `alpha_i = gamma^{(i-1)s}` so the folded blocks are disjoint
    /// runs of powers of `gamma`.
    pub fn new(
        family: Family,
        n: usize,
        k: usize,
        field: &Field,
        s: usize,
        gamma: Option<Fe>,
        alphas: Option<Vec<Fe>>,
    ) -> Result<CodeSpec> {
        let bad = |m: String| Err(Error::InvalidParameters(m));
        if n == 0 || k == 0 || k > n {
            return bad(format!("need 1 <= k <= n, got n={n}, k={k}"));
        }
        if s == 0 {
            return bad("symbol width s must be at least 1".into());
        }
        if family == Family::Rs && s != 1 {
            return bad(format!("RS has s = 1, got s={s}"));
        }
        if family == Family::Mult && field.characteristic() <= s as u64 {
            return bad(format!("MULT needs char(F) = {} > s = {s}", field.characteristic()));
        }
        let q = field.order();
        let gamma = match family {
            Family::Frs => {
                let g = match gamma {
                    Some(g) => g,
                    None => field.find_generator()?,
                };
                if !field.contains(g) || !field.is_generator(g) {
                    return bad(format!("gamma = {} is not a multiplicative generator", g.0));
                }
                Some(g)
            }
            _ => None,
        };
        let alphas = match alphas {
            Some(a) => a,
            None => {
                let needed = if family == Family::Frs { (n as u128) * (s as u128) } else { n as u128 };
                if needed > (q - 1) as u128 {
                    return bad(format!("field of order {q} too small for {needed} distinct nonzero points"));
                }
                match family {
                    Family::Frs => {
                        let g = gamma.expect("set above");
                        let step = field.pow(g, s as u64);
                        successive_powers(field, Fe::ONE, step, n)
                    }
                    _ => {
                        let g = field.find_generator()?;
                        successive_powers(field, g, g, n)
                    }
                }
            }
        };
        if alphas.len() != n {
            return bad(format!("expected {n} evaluation points, got {}", alphas.len()));
        }
        if let Some(a) = alphas.iter().find(|a| !field.contains(**a)) {
            return bad(format!("evaluation point {} is not a field element", a.0));
        }
        let mut seen = HashSet::new();
        if !alphas.iter().all(|a| seen.insert(a.0)) {
            return bad("evaluation points must be pairwise distinct".into());
        }
        if matches!(family, Family::Rs | Family::Irs | Family::Mult) && alphas.iter().any(|a| a.is_zero()) {
            return bad("evaluation points must be nonzero".into());
        }
        let spec = CodeSpec { family, n, k, field: field.clone(), s, gamma, alphas };
        if family == Family::Frs {
            let mut seen = HashSet::new();
            if !spec.frs_points().iter().all(|a| seen.insert(a.0)) {
                return bad("the s*n folded evaluation points are not pairwise distinct".into());
            }
        }
        Ok(spec)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Components per symbol.
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn gamma(&self) -> Option<Fe> {
        self.gamma
    }

    pub fn alphas(&self) -> &[Fe] {
        &self.alphas
    }

    /// Number of message polynomials: `s` for IRS, one otherwise.
    pub fn message_polys(&self) -> usize {
        if self.family == Family::Irs {
            self.s
        } else {
            1
        }
    }

    /// `gamma^j alpha_i` at index `i * s + j`.
    pub fn frs_points(&self) -> Vec<Fe> {
        let f = &self.field;
        let g = self.gamma.unwrap_or(Fe::ONE);
        let mut out = Vec::with_capacity(self.n * self.s);
        for &a in &self.alphas {
            let mut x = a;
            for _ in 0..self.s {
                out.push(x);
                x = f.mul(x, g);
            }
        }
        out
    }

    pub fn random_message<R: Rng + ?Sized>(&self, rng: &mut R) -> Message {
        let f = &self.field;
        Message::new(
            (0..self.message_polys()).map(|_| Poly::new(f, (0..self.k).map(|_| f.random(rng)).collect())).collect(),
        )
    }

    pub fn check_message(&self, msg: &Message) -> Result<()> {
        if msg.polys.len() != self.message_polys() {
            return Err(Error::ShapeMismatch(format!(
                "{} code expects {} message polynomials, got {}",
                self.family,
                self.message_polys(),
                msg.polys.len()
            )));
        }
        for p in &msg.polys {
            if p.field() != &self.field {
                return Err(Error::FieldMismatch);
            }
            if p.len() > self.k {
                return Err(Error::ShapeMismatch(format!("message degree {} not below k={}", p.degree(), self.k)));
            }
        }
        Ok(())
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        if w.n != self.n || w.s != self.s {
            return Err(Error::ShapeMismatch(format!(
                "word shape {}x{} does not match code shape {}x{}",
                w.n, w.s, self.n, self.s
            )));
        }
        if let Some(x) = w.data.iter().find(|x| !self.field.contains(**x)) {
            return Err(Error::ShapeMismatch(format!("word entry {} is not a field element", x.0)));
        }
        Ok(())
    }

    pub fn encode(&self, msg: &Message) -> Result<Word> {
        self.check_message(msg)?;
        let points = match self.family {
            Family::Frs => PointSet::new(&self.field, &self.frs_points())?,
            _ => PointSet::new(&self.field, &self.alphas)?,
        };
        self.encode_on(msg, &points)
    }

    /// Encode using a prebuilt tree over the code's evaluation points.
    pub(crate) fn encode_on(&self, msg: &Message, points: &PointSet) -> Result<Word> {
        self.check_message(msg)?;
        let mut w = Word::zeros(self.n, self.s);
        match self.family {
            Family::Rs | Family::Irs => {
                for (h, p) in msg.polys.iter().enumerate() {
                    for (i, v) in points.evaluate(p).into_iter().enumerate() {
                        w.set(i, h, v);
                    }
                }
            }
            Family::Frs => w.data = points.evaluate(&msg.polys[0]),
            Family::Mult => {
                for j in 0..self.s {
                    for (i, v) in points.evaluate(&msg.polys[0].hasse(j)).into_iter().enumerate() {
                        w.set(i, j, v);
                    }
                }
            }
        }
        Ok(w)
    }
}

fn successive_powers(f: &Field, start: Fe, step: Fe, n: usize) -> Vec<Fe> {
    let mut out = Vec::with_capacity(n);
    let mut x = start;
    for _ in 0..n {
        out.push(x);
        x = f.mul(x, step);
    }
    out
}

/// Message polynomials, each of degree below `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub polys: Vec<Poly>,
}

impl Message {
    pub fn new(polys: Vec<Poly>) -> Message {
        Message { polys }
    }
}

/// `n` symbols of `s` field elements each, stored symbol by symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    n: usize,
    s: usize,
    data: Vec<Fe>,
}

impl Word {
    pub fn zeros(n: usize, s: usize) -> Word {
        Word { n, s, data: vec![Fe::ZERO; n * s] }
    }

    pub fn from_symbols(symbols: Vec<Vec<Fe>>) -> Result<Word> {
        let n = symbols.len();
        let s = symbols.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(n * s);
        for (i, sym) in symbols.into_iter().enumerate() {
            if sym.len() != s {
                return Err(Error::ShapeMismatch(format!("symbol {i} has {} components, expected {s}", sym.len())));
            }
            data.extend(sym);
        }
        Ok(Word { n, s, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn symbol(&self, i: usize) -> &[Fe] {
        &self.data[i * self.s..(i + 1) * self.s]
    }

    pub fn set_symbol(&mut self, i: usize, sym: &[Fe]) {
        assert_eq!(sym.len(), self.s);
        self.data[i * self.s..(i + 1) * self.s].copy_from_slice(sym);
    }

    pub fn symbols(&self) -> impl Iterator<Item = &[Fe]> {
        self.data.chunks(self.s.max(1)).take(self.n)
    }

    #[inline]
    pub fn get(&self, i: usize, h: usize) -> Fe {
        self.data[i * self.s + h]
    }

    #[inline]
    pub fn set(&mut self, i: usize, h: usize, v: Fe) {
        self.data[i * self.s + h] = v;
    }

    /// Component `h` of every symbol.
    pub fn column(&self, h: usize) -> Vec<Fe> {
        (0..self.n).map(|i| self.get(i, h)).collect()
    }
}

/// Number of positions whose full symbols differ.
pub fn distance(a: &Word, b: &Word) -> Result<usize> {
    if a.n != b.n || a.s != b.s {
        return Err(Error::ShapeMismatch(format!("cannot compare {}x{} with {}x{}", a.n, a.s, b.n, b.s)));
    }
    Ok((0..a.n).filter(|&i| a.symbol(i) != b.symbol(i)).count())
}

/// View of an interleaved code over a prime field `F_q` as a Reed-Solomon
/// code over `F_{q^s}` with evaluation points in the subfield.
#[derive(Clone, Debug)]
pub struct SubfieldView {
    irs: CodeSpec,
    rs: CodeSpec,
    emb: SubfieldEmbedding,
}

impl SubfieldView {
    pub fn new(irs: &CodeSpec, emb: SubfieldEmbedding) -> Result<SubfieldView> {
        if irs.family != Family::Irs {
            return Err(Error::InvalidParameters("subfield view needs an IRS code".into()));
        }
        if emb.base() != &irs.field || emb.s() != irs.s {
            return Err(Error::FieldMismatch);
        }
        let alphas = irs.alphas.iter().map(|&a| emb.lift(a)).collect();
        let rs = CodeSpec::new(Family::Irs, irs.n, irs.k, emb.ext(), 1, None, Some(alphas))?;
        Ok(SubfieldView { irs: irs.clone(), rs, emb })
    }

    /// The code over the extension field (an interleaved code with `s = 1`).
    pub fn rs(&self) -> &CodeSpec {
        &self.rs
    }

    pub fn embedding(&self) -> &SubfieldEmbedding {
        &self.emb
    }

    pub fn to_ext(&self, w: &Word) -> Result<Word> {
        self.irs.check_word(w)?;
        let syms = w.symbols().map(|sym| Ok(vec![self.emb.embed(sym)?])).collect::<Result<Vec<_>>>()?;
        Word::from_symbols(syms)
    }

    pub fn from_ext(&self, v: &Word) -> Result<Word> {
        self.rs.check_word(v)?;
        let syms = v.symbols().map(|sym| Ok(self.emb.inverse(sym[0])?)).collect::<Result<Vec<_>>>()?;
        Word::from_symbols(syms)
    }

    /// `f_1 + gamma f_2 + .. + gamma^{s-1} f_s` over the extension field.
    pub fn combine(&self, msg: &Message) -> Result<Message> {
        self.irs.check_message(msg)?;
        let ext = self.emb.ext();
        let k = self.irs.k;
        let mut c = vec![Fe::ZERO; k];
        for (j, slot) in c.iter_mut().enumerate() {
            let comps: Vec<Fe> = msg.polys.iter().map(|p| p.coeff(j)).collect();
            *slot = self.emb.embed(&comps)?;
        }
        Ok(Message::new(vec![Poly::new(ext, c)]))
    }

    pub fn split(&self, msg: &Message) -> Result<Message> {
        self.rs.check_message(msg)?;
        let base = &self.irs.field;
        let s = self.irs.s;
        let mut cols = vec![Vec::with_capacity(self.irs.k); s];
        for j in 0..self.irs.k {
            let parts = self.emb.inverse(msg.polys[0].coeff(j))?;
            for (h, v) in parts.into_iter().enumerate() {
                cols[h].push(v);
            }
        }
        Ok(Message::new(cols.into_iter().map(|c| Poly::new(base, c)).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frs_default_points_are_appropriate() {
        let f = make_field(65537, 1).unwrap();
        let spec = CodeSpec::new(Family::Frs, 32, 20, &f, 8, None, None).unwrap();
        let pts = spec.frs_points();
        let set: HashSet<u64> = pts.iter().map(|x| x.0).collect();
        assert_eq!(set.len(), 256);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let f4 = make_field(2, 2).unwrap();
        assert!(matches!(CodeSpec::new(Family::Mult, 3, 1, &f4, 4, None, None), Err(Error::InvalidParameters(_))));
        let f = make_field(13, 1).unwrap();
        let pts = vec![Fe(0), Fe(1), Fe(2)];
        assert!(matches!(CodeSpec::new(Family::Irs, 3, 1, &f, 2, None, Some(pts)), Err(Error::InvalidParameters(_))));
        let dup = vec![Fe(1), Fe(1), Fe(2)];
        assert!(CodeSpec::new(Family::Rs, 3, 1, &f, 1, None, Some(dup)).is_err());
        assert!(CodeSpec::new(Family::Rs, 3, 4, &f, 1, None, None).is_err());
    }

    #[test]
    fn encoders_on_small_messages() {
        let f = make_field(13, 1).unwrap();
        let rs = CodeSpec::new(Family::Rs, 5, 2, &f, 1, None, None).unwrap();
        let w = rs.encode(&Message::new(vec![Poly::constant(&f, Fe(7))])).unwrap();
        assert!(w.symbols().all(|s| s == [Fe(7)]));

        let frs = CodeSpec::new(Family::Frs, 4, 2, &f, 2, None, None).unwrap();
        let g = frs.gamma().unwrap();
        let w = frs.encode(&Message::new(vec![Poly::x(&f)])).unwrap();
        for (i, &a) in frs.alphas().iter().enumerate() {
            assert_eq!(w.symbol(i), [a, f.mul(g, a)]);
        }

        let mult = CodeSpec::new(Family::Mult, 4, 3, &f, 2, None, None).unwrap();
        let w = mult.encode(&Message::new(vec![Poly::monomial(&f, Fe::ONE, 2)])).unwrap();
        for (i, &a) in mult.alphas().iter().enumerate() {
            assert_eq!(w.symbol(i), [f.mul(a, a), f.mul(Fe(2), a)]);
        }
    }

    #[test]
    fn encoding_is_linear() {
        let f = make_field(257, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for fam in [Family::Rs, Family::Irs, Family::Frs, Family::Mult] {
            let s = if fam == Family::Rs { 1 } else { 3 };
            let spec = CodeSpec::new(fam, 10, 4, &f, s, None, None).unwrap();
            let a = spec.random_message(&mut rng);
            let b = spec.random_message(&mut rng);
            let sum = Message::new(a.polys.iter().zip(&b.polys).map(|(x, y)| x.add(y)).collect());
            let (wa, wb, ws) = (spec.encode(&a).unwrap(), spec.encode(&b).unwrap(), spec.encode(&sum).unwrap());
            for i in 0..10 {
                for h in 0..s {
                    assert_eq!(ws.get(i, h), f.add(wa.get(i, h), wb.get(i, h)));
                }
            }
        }
    }

    #[test]
    fn distance_counts_symbols() {
        let mut a = Word::zeros(4, 3);
        let b = a.clone();
        assert_eq!(distance(&a, &b).unwrap(), 0);
        a.set(2, 1, Fe(5));
        assert_eq!(distance(&a, &b).unwrap(), 1);
        assert!(distance(&a, &Word::zeros(4, 2)).is_err());
    }

    #[test]
    fn subfield_view_commutes_with_encoding() {
        let f = make_field(257, 1).unwrap();
        let ext = make_field(257, 2).unwrap();
        let spec = CodeSpec::new(Family::Irs, 12, 5, &f, 2, None, None).unwrap();
        let view = SubfieldView::new(&spec, SubfieldEmbedding::new(&f, &ext).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let m = spec.random_message(&mut rng);
            let lhs = view.to_ext(&spec.encode(&m).unwrap()).unwrap();
            let combined = view.combine(&m).unwrap();
            assert_eq!(lhs, view.rs().encode(&combined).unwrap());
            assert_eq!(view.split(&combined).unwrap(), m);
            assert_eq!(view.from_ext(&lhs).unwrap(), spec.encode(&m).unwrap());
        }
    }
}
