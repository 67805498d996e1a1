//! Buchberger's algorithm with the sugar selection strategy and
//! Gebauer–Möller pair elimination.
//!
//! Polynomials are held as term vectors sorted ascending under the active
//! monomial order, so the leading term is the last entry. Every basis
//! element is kept monic.

use std::cmp::Ordering;

use super::field::CoeffField;
use crate::polyring::{Monomial, MonomialOrder};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SPoly<E> {
    pub terms: Vec<(Monomial, E)>,
}

impl<E: Clone> SPoly<E> {
    pub fn new(mut terms: Vec<(Monomial, E)>, order: MonomialOrder) -> Self {
        terms.sort_by(|a, b| order.cmp(&a.0, &b.0));
        SPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms.last().expect("nonzero polynomial").0
    }

    fn lc(&self) -> &E {
        &self.terms.last().expect("nonzero polynomial").1
    }

    fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }
}

fn make_monic<K: CoeffField>(p: &mut SPoly<K::Elem>, k: &K) {
    if p.is_zero() {
        return;
    }
    let inv = k.inv(p.lc());
    for (_, c) in p.terms.iter_mut() {
        *c = k.mul(c, &inv);
    }
}

/// `p - c * m * g`, merging two ascending term lists.
fn sub_mul<K: CoeffField>(
    p: &SPoly<K::Elem>,
    c: &K::Elem,
    m: &Monomial,
    g: &SPoly<K::Elem>,
    order: MonomialOrder,
    k: &K,
) -> SPoly<K::Elem> {
    let mut out = Vec::with_capacity(p.terms.len() + g.terms.len());
    let mut a = p.terms.iter().peekable();
    let mut b = g
        .terms
        .iter()
        .map(|(gm, gc)| (gm.mul(m), k.mul(gc, c)))
        .peekable();
    loop {
        let ord = match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (Some(x), Some(y)) => order.cmp(&x.0, &y.0),
        };
        match ord {
            Ordering::Less => out.push(a.next().expect("peeked").clone()),
            Ordering::Greater => {
                let (bm, bc) = b.next().expect("peeked");
                out.push((bm, k.sub(&k.zero(), &bc)));
            }
            Ordering::Equal => {
                let (am, ac) = a.next().expect("peeked");
                let (_, bc) = b.next().expect("peeked");
                let v = k.sub(ac, &bc);
                if !k.is_zero(&v) {
                    out.push((am.clone(), v));
                }
            }
        }
    }
    SPoly { terms: out }
}

/// Full reduction of `p` by monic `basis`; returns the remainder and the
/// sugar accumulated along the way.
fn reduce<K: CoeffField>(
    p: SPoly<K::Elem>,
    sugar: u32,
    basis: &[(&SPoly<K::Elem>, u32)],
    order: MonomialOrder,
    k: &K,
) -> (SPoly<K::Elem>, u32) {
    let mut p = p;
    let mut sugar = sugar;
    let mut rem_desc = Vec::new();
    while let Some((m, c)) = p.terms.last() {
        let hit = basis.iter().find(|(g, _)| g.lm().divides(m));
        match hit {
            Some((g, gs)) => {
                let q = g.lm().quotient_of(m).expect("divides");
                let c = c.clone();
                sugar = sugar.max(q.degree() + gs);
                p = sub_mul(&p, &c, &q, g, order, k);
            }
            None => rem_desc.push(p.terms.pop().expect("nonempty")),
        }
    }
    rem_desc.reverse();
    (SPoly { terms: rem_desc }, sugar)
}

pub(crate) fn normal_form<K: CoeffField>(
    p: SPoly<K::Elem>,
    basis: &[SPoly<K::Elem>],
    order: MonomialOrder,
    k: &K,
) -> SPoly<K::Elem> {
    let refs: Vec<(&SPoly<K::Elem>, u32)> = basis.iter().map(|g| (g, 0)).collect();
    reduce(p, 0, &refs, order, k).0
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub max_basis: Option<usize>,
    pub max_coeff_bits: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Exhausted {
    pub resource: &'static str,
    pub limit: u64,
    pub reached: u64,
    pub basis_len: usize,
    pub pairs_left: usize,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

struct Engine<'a, K: CoeffField> {
    k: &'a K,
    order: MonomialOrder,
    polys: Vec<SPoly<K::Elem>>,
    sugars: Vec<u32>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
}

impl<K: CoeffField> Engine<'_, K> {
    fn pair_sugar(&self, i: usize, j: usize, lcm: &Monomial) -> u32 {
        let si = self.sugars[i] + lcm.degree() - self.polys[i].lm().degree();
        let sj = self.sugars[j] + lcm.degree() - self.polys[j].lm().degree();
        si.max(sj)
    }

    /// Gebauer–Möller installation of a new basis element.
    fn update(&mut self, h: usize) {
        let hlm = self.polys[h].lm().clone();
        let mut candidates: Vec<(usize, Monomial)> = self
            .active
            .iter()
            .map(|&g| (g, self.polys[g].lm().lcm(&hlm)))
            .collect();
        let mut kept: Vec<(usize, Monomial)> = Vec::new();
        while let Some((g1, l1)) = candidates.pop() {
            let coprime = self.polys[g1].lm().is_coprime(&hlm);
            let dominated = candidates
                .iter()
                .chain(kept.iter())
                .any(|(_, l2)| l2.divides(&l1));
            if coprime || !dominated {
                kept.push((g1, l1));
            }
        }
        let polys = &self.polys;
        self.pairs.retain(|p| {
            !(hlm.divides(&p.lcm)
                && polys[p.i].lm().lcm(&hlm) != p.lcm
                && polys[p.j].lm().lcm(&hlm) != p.lcm)
        });
        for (g, l) in kept {
            if self.polys[g].lm().is_coprime(&hlm) {
                continue;
            }
            let sugar = self.pair_sugar(g, h, &l);
            self.pairs.push(Pair {
                i: g,
                j: h,
                lcm: l,
                sugar,
            });
        }
        let polys = &self.polys;
        self.active.retain(|&g| !hlm.divides(polys[g].lm()));
        self.active.push(h);
    }

    fn take_pair(&mut self) -> Option<Pair> {
        let order = self.order;
        let best = self
            .pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.sugar
                    .cmp(&b.sugar)
                    .then_with(|| order.cmp(&a.lcm, &b.lcm))
                    .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
            })
            .map(|(idx, _)| idx)?;
        Some(self.pairs.swap_remove(best))
    }

    fn s_poly(&self, p: &Pair) -> SPoly<K::Elem> {
        let (f, g) = (&self.polys[p.i], &self.polys[p.j]);
        let mf = f.lm().quotient_of(&p.lcm).expect("lcm");
        let mg = g.lm().quotient_of(&p.lcm).expect("lcm");
        let one = self.k.one();
        let zero = SPoly { terms: vec![] };
        let lhs = sub_mul(&zero, &self.k.sub(&self.k.zero(), &one), &mf, f, self.order, self.k);
        sub_mul(&lhs, &one, &mg, g, self.order, self.k)
    }

    fn active_refs(&self) -> Vec<(&SPoly<K::Elem>, u32)> {
        self.active
            .iter()
            .map(|&g| (&self.polys[g], self.sugars[g]))
            .collect()
    }

    fn check(&self, limits: &Limits, newest: &SPoly<K::Elem>) -> Result<(), Exhausted> {
        if let Some(max) = limits.max_basis {
            if self.active.len() > max {
                return Err(Exhausted {
                    resource: "basis size",
                    limit: max as u64,
                    reached: self.active.len() as u64,
                    basis_len: self.active.len(),
                    pairs_left: self.pairs.len(),
                });
            }
        }
        if let Some(max) = limits.max_coeff_bits {
            let bits = newest
                .terms
                .iter()
                .map(|(_, c)| self.k.bits(c))
                .max()
                .unwrap_or(0);
            if bits > max {
                return Err(Exhausted {
                    resource: "coefficient bits",
                    limit: max,
                    reached: bits,
                    basis_len: self.active.len(),
                    pairs_left: self.pairs.len(),
                });
            }
        }
        Ok(())
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens`, sorted by
/// descending leading monomial. The zero ideal yields an empty basis.
pub(crate) fn reduced_basis<K: CoeffField>(
    gens: Vec<SPoly<K::Elem>>,
    order: MonomialOrder,
    k: &K,
    limits: &Limits,
) -> Result<Vec<SPoly<K::Elem>>, Exhausted> {
    let mut eng = Engine {
        k,
        order,
        polys: Vec::new(),
        sugars: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
    };
    for mut g in gens.into_iter().filter(|g| !g.is_zero()) {
        make_monic(&mut g, k);
        if g.lm().is_one() {
            return Ok(vec![g]);
        }
        eng.sugars.push(g.degree());
        eng.polys.push(g);
        eng.update(eng.polys.len() - 1);
        let newest = eng.polys.last().expect("just pushed");
        eng.check(limits, newest)?;
    }
    while let Some(pair) = eng.take_pair() {
        let s = eng.s_poly(&pair);
        let (mut h, sugar) = reduce(s, pair.sugar, &eng.active_refs(), order, k);
        if h.is_zero() {
            continue;
        }
        make_monic(&mut h, k);
        if h.lm().is_one() {
            return Ok(vec![h]);
        }
        eng.check(limits, &h)?;
        eng.sugars.push(sugar);
        eng.polys.push(h);
        eng.update(eng.polys.len() - 1);
        let newest = eng.polys.last().expect("just pushed");
        eng.check(limits, newest)?;
    }

    // minimalize, then interreduce tails
    let mut minimal: Vec<SPoly<K::Elem>> = Vec::new();
    let mut candidates: Vec<&SPoly<K::Elem>> = eng.active.iter().map(|&g| &eng.polys[g]).collect();
    candidates.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    for (idx, g) in candidates.iter().enumerate() {
        let redundant = candidates
            .iter()
            .enumerate()
            .any(|(j, o)| j != idx && o.lm().divides(g.lm()) && (o.lm() != g.lm() || j < idx));
        if !redundant {
            minimal.push((*g).clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for idx in 0..minimal.len() {
        let others: Vec<(&SPoly<K::Elem>, u32)> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, g)| (g, 0))
            .collect();
        let mut r = reduce(minimal[idx].clone(), 0, &others, order, k).0;
        make_monic(&mut r, k);
        reduced.push(r);
    }
    reduced.sort_by(|a, b| order.cmp(b.lm(), a.lm()));
    Ok(reduced)
}

/// Monomials outside the leading-term ideal, when there are finitely many.
/// Returns `None` once more than `cap` are found.
pub(crate) fn standard_monomials(lms: &[Monomial], num_vars: usize, cap: usize) -> Option<Vec<Monomial>> {
    let in_ideal = |m: &Monomial| lms.iter().any(|l| l.divides(m));
    let start = Monomial::one(num_vars);
    if in_ideal(&start) {
        return Some(vec![]);
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut frontier = vec![start.clone()];
    seen.insert(start);
    while let Some(m) = frontier.pop() {
        for i in 0..num_vars {
            let next = m.mul(&Monomial::var(num_vars, i));
            if !in_ideal(&next) && seen.insert(next.clone()) {
                if seen.len() > cap {
                    return None;
                }
                frontier.push(next);
            }
        }
    }
    Some(seen.into_iter().collect())
}
