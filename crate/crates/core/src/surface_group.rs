//! Surface-group presentations, words in the generators and Fox calculus.
//!
//! Generators are ordered `a1, b1, a2, b2, ..., ag, bg`, i.e. `a_i` has index
//! `2(i-1)` and `b_i` has index `2(i-1)+1`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie;
use crate::linalg::{self, CMatrix};
use crate::rep::Representation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn exponent(&self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverted(&self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }
}

/// An unreduced word in the free group on `2g` generators.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn generator(index: usize) -> Self {
        Self(alloc::vec![Letter::new(index, false)])
    }

    /// Parses the signed-integer encoding: generator index plus one, negated
    /// for inverse letters.
    pub fn from_signed(code: &[i64]) -> Result<Self> {
        code.iter()
            .map(|&s| {
                if s == 0 {
                    Err(Error::InvalidWord("letter code 0 is not a generator".into()))
                } else {
                    Ok(Letter::new((s.unsigned_abs() - 1) as usize, s < 0))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.0.iter().map(|l| (l.generator as i64 + 1) * l.exponent()).collect()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inverted).collect())
    }

    /// Free reduction; never applied implicitly.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last().is_some_and(|last| *last == l.inverted()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn validate(&self, genus: usize) -> Result<()> {
        match self.0.iter().find(|l| l.generator >= 2 * genus) {
            Some(l) => Err(Error::GeneratorOutOfRange { index: l.generator, genus }),
            None => Ok(()),
        }
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut sums = alloc::vec![0; generators];
        for l in &self.0 {
            sums[l.generator] += l.exponent();
        }
        sums
    }
}

/// Human-readable generator label (`a1`, `b1`, ...).
pub fn generator_label(index: usize) -> String {
    let kind = if index.is_multiple_of(2) { 'a' } else { 'b' };
    format!("{kind}{}", index / 2 + 1)
}

/// `a1 b1 a1^-1 b1^-1 ... ag bg ag^-1 bg^-1`.
pub fn relator(genus: usize) -> Result<Word> {
    if genus < 2 {
        return Err(Error::GenusTooSmall(genus));
    }
    let mut letters = Vec::with_capacity(4 * genus);
    for i in 0..genus {
        let (a, b) = (2 * i, 2 * i + 1);
        letters.push(Letter::new(a, false));
        letters.push(Letter::new(b, false));
        letters.push(Letter::new(a, true));
        letters.push(Letter::new(b, true));
    }
    Ok(Word(letters))
}

/// The one-relator presentation of the closed orientable surface group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceGroupPresentation {
    genus: usize,
    relator: Word,
}

impl SurfaceGroupPresentation {
    pub fn new(genus: usize) -> Result<Self> {
        Ok(Self { genus, relator: relator(genus)? })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn generator_count(&self) -> usize {
        2 * self.genus
    }

    pub fn relator(&self) -> &Word {
        &self.relator
    }
}

/// An element of the integral group ring of the free group, kept as an
/// unsimplified list of `(word, coefficient)` terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    pub terms: Vec<(Word, i64)>,
}

impl GroupRingElement {
    /// Sum of coefficients.
    pub fn augmentation(&self) -> i64 {
        self.terms.iter().map(|(_, c)| c).sum()
    }

    /// Terms after freely reducing each word and merging equal words.
    pub fn simplified(&self) -> Vec<(Word, i64)> {
        let mut merged: Vec<(Word, i64)> = Vec::new();
        for (w, c) in &self.terms {
            let r = w.free_reduce();
            match merged.iter_mut().find(|(m, _)| *m == r) {
                Some(entry) => entry.1 += c,
                None => merged.push((r, *c)),
            }
        }
        merged.retain(|(_, c)| *c != 0);
        merged.sort();
        merged
    }
}

/// Formal Fox derivative `∂w/∂x_j` in the free group ring.
pub fn fox_derivative_formal(w: &Word, generator: usize) -> GroupRingElement {
    let mut terms = Vec::new();
    let mut prefix = Word::identity();
    for &l in w.letters() {
        if l.generator == generator {
            if l.inverse {
                let mut p = prefix.clone();
                p.push(l);
                terms.push((p, -1));
            } else {
                terms.push((prefix.clone(), 1));
            }
        }
        prefix.push(l);
    }
    GroupRingElement { terms }
}

/// `ρ(w)`: the ordered product of generator matrices and inverses. On the
/// torus the word is evaluated through its exponent sums, so commutators
/// evaluate to exactly 1.
pub fn evaluate_word(rep: &Representation, w: &Word) -> Result<CMatrix> {
    w.validate(rep.genus())?;
    let n = rep.spec().n();
    if rep.spec().is_abelian() {
        let mut value = linalg::complex_one();
        for (j, &e) in w.exponent_sums(2 * rep.genus()).iter().enumerate() {
            let z = rep.generator(j)[(0, 0)];
            value *= z.powi(e as i32);
        }
        return Ok(CMatrix::from_element(1, 1, value));
    }
    let mut acc = linalg::identity(n);
    for l in w.letters() {
        let m = if l.inverse { rep.generator_inverse(l.generator) } else { rep.generator(l.generator) };
        acc *= m;
    }
    Ok(acc)
}

/// `(ρ(w), ρ(w)^-1)`.
pub fn evaluate_word_with_inverse(rep: &Representation, w: &Word) -> Result<(CMatrix, CMatrix)> {
    let n = rep.spec().n();
    let mut acc = linalg::identity(n);
    let mut inv = linalg::identity(n);
    for l in w.letters() {
        if l.generator >= 2 * rep.genus() {
            return Err(Error::GeneratorOutOfRange { index: l.generator, genus: rep.genus() });
        }
        let (m, m_inv) = if l.inverse {
            (rep.generator_inverse(l.generator), rep.generator(l.generator))
        } else {
            (rep.generator(l.generator), rep.generator_inverse(l.generator))
        };
        acc *= m;
        inv = m_inv * inv;
    }
    Ok((acc, inv))
}

/// All Fox derivatives of `w` evaluated through `Ad∘ρ`, one `dim × dim`
/// matrix per generator, in a single left-to-right pass over `w`.
///
/// Block `j` maps `u(x_j)` to its contribution to `u(w)` for a crossed
/// homomorphism `u(xy) = u(x) + Ad(ρ(x)) u(y)`.
pub fn fox_jacobian(rep: &Representation, w: &Word) -> Result<Vec<CMatrix>> {
    w.validate(rep.genus())?;
    let spec = rep.spec();
    let dim = spec.dim();
    let n = spec.n();
    let mut blocks = alloc::vec![CMatrix::zeros(dim, dim); 2 * rep.genus()];
    if spec.is_abelian() {
        for l in w.letters() {
            blocks[l.generator][(0, 0)] += l.exponent() as f64;
        }
        return Ok(blocks);
    }
    let mut prefix = linalg::identity(n);
    let mut prefix_inv = linalg::identity(n);
    for l in w.letters() {
        let j = l.generator;
        if l.inverse {
            prefix *= rep.generator_inverse(j);
            prefix_inv = rep.generator(j) * prefix_inv;
            blocks[j] -= lie::ad_matrix_with_inverse(spec, &prefix, &prefix_inv);
        } else {
            blocks[j] += lie::ad_matrix_with_inverse(spec, &prefix, &prefix_inv);
            prefix *= rep.generator(j);
            prefix_inv = rep.generator_inverse(j) * prefix_inv;
        }
    }
    Ok(blocks)
}

/// `∂w/∂x_j` evaluated through `Ad∘ρ`, as an endomorphism of the Lie algebra
/// in basis coordinates.
pub fn fox_derivative(rep: &Representation, w: &Word, generator: usize) -> Result<CMatrix> {
    if generator >= 2 * rep.genus() {
        return Err(Error::GeneratorOutOfRange { index: generator, genus: rep.genus() });
    }
    Ok(fox_jacobian(rep, w)?.swap_remove(generator))
}

/// The Fox jacobian laid out as one `dim × 2g·dim` matrix, i.e. the linear map
/// `u ↦ u(w)` on cochain coordinates.
pub fn word_extension_matrix(rep: &Representation, w: &Word) -> Result<CMatrix> {
    let blocks = fox_jacobian(rep, w)?;
    let dim = rep.spec().dim();
    let mut m = CMatrix::zeros(dim, dim * blocks.len());
    for (j, b) in blocks.iter().enumerate() {
        m.view_mut((0, j * dim), (dim, dim)).copy_from(b);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieGroupSpec;
    use crate::linalg::c;
    use crate::rep;

    #[test]
    fn genus_two_relator() {
        let r = relator(2).unwrap();
        assert_eq!(r.len(), 8);
        assert_eq!(r.to_signed(), alloc::vec![1, 2, -1, -2, 3, 4, -3, -4]);
        assert_eq!(relator(3).unwrap().len(), 12);
        assert_eq!(relator(1), Err(Error::GenusTooSmall(1)));
    }

    #[test]
    fn each_generator_occurs_once_with_each_sign() {
        for g in 2..6 {
            let r = relator(g).unwrap();
            for j in 0..2 * g {
                let plus = r.letters().iter().filter(|l| **l == Letter::new(j, false)).count();
                let minus = r.letters().iter().filter(|l| **l == Letter::new(j, true)).count();
                assert_eq!((plus, minus), (1, 1));
            }
        }
    }

    #[test]
    fn signed_encoding_round_trips() {
        let w = Word::from_signed(&[3, -1, 2, 2, -4]).unwrap();
        assert_eq!(w.to_signed(), alloc::vec![3, -1, 2, 2, -4]);
        assert!(Word::from_signed(&[1, 0]).is_err());
        assert!(w.validate(1).is_err());
        assert!(w.validate(2).is_ok());
    }

    #[test]
    fn free_reduction_is_explicit() {
        let w = Word::from_signed(&[1, 2, -2, -1, 3]).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w.free_reduce().to_signed(), alloc::vec![3]);
        assert!(w.concat(&w.inverse()).free_reduce().is_empty());
    }

    #[test]
    fn labels() {
        assert_eq!(generator_label(0), "a1");
        assert_eq!(generator_label(3), "b2");
    }

    #[test]
    fn formal_fox_derivative_of_commutator() {
        // ∂(a b a⁻¹ b⁻¹)/∂a = 1 − a b a⁻¹, expanded by hand from the rules.
        let w = Word::from_signed(&[1, 2, -1, -2]).unwrap();
        let d = fox_derivative_formal(&w, 0);
        let expected = alloc::vec![(Word::identity(), 1), (Word::from_signed(&[1, 2, -1]).unwrap(), -1),];
        assert_eq!(d.terms, expected);
        // ∂/∂b = a − a b a⁻¹ b⁻¹
        let db = fox_derivative_formal(&w, 1);
        assert_eq!(
            db.terms,
            alloc::vec![(Word::from_signed(&[1]).unwrap(), 1), (Word::from_signed(&[1, 2, -1, -2]).unwrap(), -1),]
        );
    }

    #[test]
    fn relator_derivatives_have_zero_augmentation() {
        let r = relator(3).unwrap();
        for j in 0..6 {
            assert_eq!(fox_derivative_formal(&r, j).augmentation(), 0);
        }
    }

    #[test]
    fn derivatives_vanish_at_trivial_representation() {
        let spec = LieGroupSpec::sl(2);
        let triv = rep::Representation::trivial(spec, 2);
        let r = relator(2).unwrap();
        for j in 0..4 {
            let d = fox_derivative(&triv, &r, j).unwrap();
            assert!(linalg::frobenius(&d) == 0.0);
        }
    }

    #[test]
    fn derivative_of_generator_is_identity() {
        let spec = LieGroupSpec::sl(2);
        let rep = rep::random_representation(spec, 2, 7, 0.7).unwrap();
        let x = Word::generator(2);
        assert_eq!(fox_derivative(&rep, &x, 2).unwrap(), linalg::identity(3));
        assert_eq!(linalg::frobenius(&fox_derivative(&rep, &x, 1).unwrap()), 0.0);
        assert!(fox_derivative(&rep, &x, 4).is_err());
    }

    #[test]
    fn empty_word_evaluates_to_identity() {
        let spec = LieGroupSpec::gl(3);
        let rep = rep::random_representation(spec, 2, 1, 0.5).unwrap();
        assert_eq!(evaluate_word(&rep, &Word::identity()).unwrap(), linalg::identity(3));
    }

    #[test]
    fn relator_is_identity_on_diagonal_representations() {
        let spec = LieGroupSpec::sl(2);
        let mats = (0..4)
            .map(|k| {
                let z = c(0.3 * k as f64 + 0.5, 0.2);
                let mut m = CMatrix::zeros(2, 2);
                m[(0, 0)] = z;
                m[(1, 1)] = z.inv();
                m
            })
            .collect();
        let rep = rep::Representation::new(spec, 2, mats).unwrap();
        let r = evaluate_word(&rep, &relator(2).unwrap()).unwrap();
        assert!(linalg::is_identity(&r, 1e-14));
    }

    #[test]
    fn relator_is_not_identity_at_random_point() {
        let rep = rep::random_representation(LieGroupSpec::sl(2), 2, 42, 1.0).unwrap();
        let r = evaluate_word(&rep, &relator(2).unwrap()).unwrap();
        assert!(!linalg::is_identity(&r, 1e-3));
    }

    #[test]
    fn fox_jacobian_matches_formal_expansion() {
        let spec = LieGroupSpec::sl(2);
        let rep = rep::random_representation(spec, 2, 9, 0.6).unwrap();
        let w = Word::from_signed(&[1, 3, -2, 1, -1, 4, -3, 2]).unwrap();
        for j in 0..4 {
            let fast = fox_derivative(&rep, &w, j).unwrap();
            let mut slow = CMatrix::zeros(3, 3);
            for (word, coef) in fox_derivative_formal(&w, j).terms {
                let g = evaluate_word(&rep, &word).unwrap();
                slow += lie::ad_matrix(&spec, &g).unwrap() * c(coef as f64, 0.0);
            }
            assert!(linalg::frobenius(&(fast - slow)) < 1e-12);
        }
    }
}
