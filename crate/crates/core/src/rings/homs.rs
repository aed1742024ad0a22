use serde::Serialize;

use super::algebra::{conj_component, AlgebraicInt, EtaleAlgebra};
use super::field::FieldSpec;
use super::prime::{split_prime, PrimeIdeal, Splitting};
use crate::scalar::Scalar;

/// How a source component lands in a target component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Embedding {
    /// ℚ into any field.
    Inclusion,
    Identity,
    Conjugation,
}

/// A ℚ-algebra homomorphism between products of fields. Each target
/// component L_j receives a field embedding of one source component.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AlgebraHom {
    pub source: EtaleAlgebra,
    pub target: EtaleAlgebra,
    /// Per target component: (source component, embedding).
    pub parts: Vec<(usize, Embedding)>,
}

fn embeddings(from: FieldSpec, to: FieldSpec) -> Vec<Embedding> {
    match (from, to) {
        (FieldSpec::Rational, _) => vec![Embedding::Inclusion],
        (FieldSpec::Quadratic(a), FieldSpec::Quadratic(b)) if a == b => {
            vec![Embedding::Identity, Embedding::Conjugation]
        }
        _ => vec![],
    }
}

/// Every ℚ-algebra homomorphism K → L.
pub fn algebra_homs(k: &EtaleAlgebra, l: &EtaleAlgebra) -> Vec<AlgebraHom> {
    let mut acc: Vec<Vec<(usize, Embedding)>> = vec![vec![]];
    for tf in l.components() {
        let mut next = Vec::new();
        for prefix in &acc {
            for (si, sf) in k.components().iter().enumerate() {
                for e in embeddings(*sf, *tf) {
                    let mut v = prefix.clone();
                    v.push((si, e));
                    next.push(v);
                }
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|parts| AlgebraHom {
            source: k.clone(),
            target: l.clone(),
            parts,
        })
        .collect()
}

impl AlgebraHom {
    pub fn identity(k: &EtaleAlgebra) -> Self {
        AlgebraHom {
            source: k.clone(),
            target: k.clone(),
            parts: k
                .components()
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let e = match f {
                        FieldSpec::Rational => Embedding::Inclusion,
                        FieldSpec::Quadratic(_) => Embedding::Identity,
                    };
                    (i, e)
                })
                .collect(),
        }
    }

    pub fn apply<T: Scalar>(&self, x: &AlgebraicInt<T>) -> AlgebraicInt<T> {
        let mut out = Vec::with_capacity(self.target.degree());
        for (j, &(si, e)) in self.parts.iter().enumerate() {
            let src = self.source.component_coords(x, si);
            let tdeg = self.target.component(j).degree();
            match e {
                Embedding::Inclusion => {
                    out.push(src[0].clone());
                    if tdeg == 2 {
                        out.push(T::zero());
                    }
                }
                Embedding::Identity => out.extend(src.iter().cloned()),
                Embedding::Conjugation => {
                    out.extend(conj_component(self.source.component(si), src))
                }
            }
        }
        AlgebraicInt::new(out)
    }

    /// Bijective: a permutation of components with field isomorphisms.
    pub fn is_isomorphism(&self) -> bool {
        if self.source.num_components() != self.target.num_components() {
            return false;
        }
        let mut seen = vec![false; self.parts.len()];
        for (j, &(si, _)) in self.parts.iter().enumerate() {
            if seen[si] || self.source.component(si) != self.target.component(j) {
                return false;
            }
            seen[si] = true;
        }
        true
    }

    pub fn describe(&self) -> String {
        self.parts
            .iter()
            .map(|(si, e)| {
                let e = match e {
                    Embedding::Inclusion => "incl",
                    Embedding::Identity => "id",
                    Embedding::Conjugation => "conj",
                };
                format!("{e}(c{si})")
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// τ(𝔭) for an isomorphism τ and a prime 𝔭 of the source.
    pub fn map_prime(&self, q: &PrimeIdeal) -> Option<PrimeIdeal> {
        let (j, &(_, e)) = self
            .parts
            .iter()
            .enumerate()
            .find(|(_, (si, _))| *si == q.component)?;
        let candidates: Vec<PrimeIdeal> = split_prime(&self.target, q.p)
            .ok()?
            .into_iter()
            .filter(|c| c.component == j)
            .collect();
        let (t, _) = q.field.omega_relation();
        let want = match (q.splitting, e) {
            (Splitting::Split { root }, Embedding::Conjugation) => {
                Some((t as i128 - root as i128).rem_euclid(q.p as i128) as u64)
            }
            (Splitting::Split { root }, _) => Some(root),
            _ => None,
        };
        candidates.into_iter().find(|c| match (c.splitting, want) {
            (Splitting::Split { root }, Some(w)) => root == w,
            (_, None) => true,
            _ => false,
        })
    }

    /// The prime 𝔭 of the source with τ(𝔭) = 𝔮.
    pub fn preimage_prime(&self, target_prime: &PrimeIdeal) -> Option<PrimeIdeal> {
        split_prime(&self.source, target_prime.p)
            .ok()?
            .into_iter()
            .find(|q| self.map_prime(q).as_ref() == Some(target_prime))
    }
}
