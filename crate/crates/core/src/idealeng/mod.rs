//! Gröbner-basis ideal engine.
//!
//! An [`Ideal`] carries its generators, the engine configuration (monomial
//! order, resource budgets, modular probe) and a write-once cache of its
//! reduced Gröbner basis. Derived ideals inherit the configuration.

pub mod field;
mod groebner;
mod hilbert;
mod points;

use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::polyring::{parse_poly, Monomial, MonomialOrder, PolyError, Polynomial, Scalar};
use field::{next_prime, PrimeField, Rationals};
use groebner::{reduced_basis, Exhausted, SPoly};

pub use groebner::Limits;
pub use points::{PointCount, RationalPoints};
pub(crate) use points::normalize;

/// How many fresh seeds a "general position" choice may consume.
pub const MAX_RESEEDS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(
        "budget exhausted: {resource} reached {reached} (limit {limit}) during {stage}; \
         {basis_len} basis elements, {pairs_left} pairs pending"
    )]
    Budget {
        stage: &'static str,
        resource: &'static str,
        limit: u64,
        reached: u64,
        basis_len: usize,
        pairs_left: usize,
    },
    #[error("generators are not homogeneous")]
    Inhomogeneous,
    #[error("expected a zero-dimensional projective scheme, found dimension {dimension}")]
    PositiveDimensional { dimension: i64 },
    #[error("no general coordinate change found after {attempts} attempts (seed {seed})")]
    Degenerate { seed: u64, attempts: u32 },
    #[error("ideals live in different rings ({left} vs {right} variables)")]
    RingMismatch { left: usize, right: usize },
}

impl IdealError {
    pub fn is_budget(&self) -> bool {
        matches!(self, IdealError::Budget { .. })
    }

    fn budget(stage: &'static str, e: Exhausted) -> Self {
        IdealError::Budget {
            stage,
            resource: e.resource,
            limit: e.limit,
            reached: e.reached,
            basis_len: e.basis_len,
            pairs_left: e.pairs_left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EngineConfig {
    pub order: MonomialOrder,
    pub limits: Limits,
    /// Seed for the prime of the modular probe; `None` disables the probe.
    pub modular_probe: Option<u64>,
}

/// Outcome of running Buchberger modulo a word-sized prime before the
/// exact computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub prime: u64,
    pub predicted_size: usize,
    /// Whether the exact basis has the predicted leading monomials.
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis {
    pub order: MonomialOrder,
    /// Reduced, monic, sorted by descending leading monomial. The zero
    /// ideal is represented by the single polynomial 0.
    pub polys: Vec<Polynomial>,
    pub probe: Option<ProbeReport>,
}

impl GroebnerBasis {
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_constant() && !self.polys[0].is_zero()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys
            .iter()
            .filter_map(|p| p.leading_term(self.order).map(|(m, _)| m.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProjectiveProfile {
    /// Projective dimension; -1 for the empty set.
    pub dimension: i64,
    /// Degree of the top-dimensional part; 0 when empty.
    pub degree: u64,
}

impl ProjectiveProfile {
    pub fn is_empty(&self) -> bool {
        self.dimension < 0
    }
}

#[derive(Debug, Clone)]
pub struct Ideal {
    num_vars: usize,
    generators: Vec<Polynomial>,
    config: EngineConfig,
    cache: OnceLock<Arc<GroebnerBasis>>,
}

pub(crate) fn to_spoly(p: &Polynomial, order: MonomialOrder) -> SPoly<Scalar> {
    SPoly::new(p.terms().map(|(m, c)| (m.clone(), c.clone())).collect(), order)
}

pub(crate) fn from_spoly(num_vars: usize, p: SPoly<Scalar>) -> Polynomial {
    Polynomial::from_terms(num_vars, p.terms)
}

impl Ideal {
    /// The ideal generated by `generators`; an empty list means the zero ideal.
    pub fn new(num_vars: usize, generators: Vec<Polynomial>) -> Self {
        assert!(
            generators.iter().all(|g| g.num_vars() == num_vars),
            "generator arity mismatch"
        );
        let generators = if generators.is_empty() {
            vec![Polynomial::zero(num_vars)]
        } else {
            generators
        };
        Ideal {
            num_vars,
            generators,
            config: EngineConfig::default(),
            cache: OnceLock::new(),
        }
    }

    pub fn parse(generators: &[&str], num_vars: usize) -> Result<Self, PolyError> {
        let gens = generators
            .iter()
            .map(|s| parse_poly(s, num_vars))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ideal::new(num_vars, gens))
    }

    pub fn unit(num_vars: usize) -> Self {
        Ideal::new(num_vars, vec![Polynomial::one(num_vars)])
    }

    /// `(X0, ..., X_{n})`.
    pub fn irrelevant(num_vars: usize) -> Self {
        Ideal::new(
            num_vars,
            (0..num_vars).map(|i| Polynomial::var(num_vars, i)).collect(),
        )
    }

    pub fn with_config(mut self, config: EngineConfig) -> Self {
        if config != self.config {
            self.config = config;
            self.cache = OnceLock::new();
        }
        self
    }

    /// A new ideal in the same ring sharing this ideal's configuration.
    pub fn derived(&self, generators: Vec<Polynomial>) -> Ideal {
        Ideal::new(self.num_vars, generators).with_config(self.config)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn is_homogeneous(&self) -> bool {
        self.generators
            .iter()
            .all(|g| g.is_zero() || g.is_homogeneous().is_some())
    }

    /// `I + J`.
    pub fn sum(&self, other: &Ideal) -> Result<Ideal, IdealError> {
        self.same_ring(other)?;
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Ok(self.derived(gens))
    }

    pub fn with_generators(&self, extra: impl IntoIterator<Item = Polynomial>) -> Ideal {
        let mut gens = self.generators.clone();
        gens.extend(extra);
        self.derived(gens)
    }

    /// The ideal generated by `g ∘ maps` for each generator `g`.
    pub fn compose(&self, maps: &[Polynomial]) -> Result<Ideal, IdealError> {
        let target = maps.first().map_or(self.num_vars, Polynomial::num_vars);
        let gens = self
            .generators
            .iter()
            .map(|g| g.compose(maps))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ideal::new(target, gens).with_config(self.config))
    }

    fn same_ring(&self, other: &Ideal) -> Result<(), IdealError> {
        if self.num_vars != other.num_vars {
            return Err(IdealError::RingMismatch {
                left: self.num_vars,
                right: other.num_vars,
            });
        }
        Ok(())
    }

    /// Reduced Gröbner basis under the configured order (cached).
    pub fn groebner_basis(&self) -> Result<Arc<GroebnerBasis>, IdealError> {
        if let Some(b) = self.cache.get() {
            return Ok(Arc::clone(b));
        }
        let computed = Arc::new(self.compute_basis(self.config.order)?);
        // a concurrent writer may have won; either value is the same basis
        let _ = self.cache.set(Arc::clone(&computed));
        Ok(computed)
    }

    /// Reduced Gröbner basis under an explicit order. Uses the cache only
    /// when the order matches the configured one.
    pub fn groebner_basis_in(&self, order: MonomialOrder) -> Result<Arc<GroebnerBasis>, IdealError> {
        if order == self.config.order {
            return self.groebner_basis();
        }
        Ok(Arc::new(self.compute_basis(order)?))
    }

    fn compute_basis(&self, order: MonomialOrder) -> Result<GroebnerBasis, IdealError> {
        let probe = match self.config.modular_probe {
            Some(seed) => Some(self.modular_probe(order, seed)?),
            None => None,
        };
        let gens: Vec<SPoly<Scalar>> = self.generators.iter().map(|g| to_spoly(g, order)).collect();
        let basis = reduced_basis(gens, order, &Rationals, &self.config.limits)
            .map_err(|e| IdealError::budget("groebner basis", e))?;
        let polys: Vec<Polynomial> = if basis.is_empty() {
            vec![Polynomial::zero(self.num_vars)]
        } else {
            basis
                .into_iter()
                .map(|p| from_spoly(self.num_vars, p))
                .collect()
        };
        let mut gb = GroebnerBasis {
            order,
            polys,
            probe: None,
        };
        if let Some((prime, predicted)) = probe {
            let exact = gb.leading_monomials();
            gb.probe = Some(ProbeReport {
                prime,
                predicted_size: predicted.len(),
                agrees: exact == predicted,
            });
        }
        Ok(gb)
    }

    /// Runs the engine over a random word-sized prime field and returns the
    /// prime with the predicted leading monomials. A predicted basis larger
    /// than the budget fails before the exact run starts.
    fn modular_probe(&self, order: MonomialOrder, seed: u64) -> Result<(u64, Vec<Monomial>), IdealError> {
        let mut rng = crate::random::seeded(seed);
        loop {
            let field = PrimeField::new(next_prime(rng.gen_range(1u64 << 61..1u64 << 62)));
            let images: Option<Vec<SPoly<u64>>> = self
                .generators
                .iter()
                .map(|g| {
                    let terms = g
                        .terms()
                        .map(|(m, c)| field.reduce(c).map(|v| (m.clone(), v)))
                        .collect::<Option<Vec<_>>>()?;
                    Some(SPoly::new(
                        terms.into_iter().filter(|(_, v)| *v != 0).collect(),
                        order,
                    ))
                })
                .collect();
            // a denominator divisible by the prime: draw another prime
            let Some(images) = images else { continue };
            let basis = reduced_basis(images, order, &field, &self.config.limits)
                .map_err(|e| IdealError::budget("modular probe", e))?;
            return Ok((field.modulus(), basis.iter().map(|p| p.lm().clone()).collect()));
        }
    }

    pub fn is_unit(&self) -> Result<bool, IdealError> {
        Ok(self.groebner_basis()?.is_unit())
    }

    /// Remainder of `p` under full reduction by the reduced basis; zero iff
    /// `p` lies in the ideal.
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial, IdealError> {
        let gb = self.groebner_basis()?;
        let order = gb.order;
        let basis: Vec<SPoly<Scalar>> = gb
            .polys
            .iter()
            .filter(|g| !g.is_zero())
            .map(|g| to_spoly(g, order))
            .collect();
        let r = groebner::normal_form(to_spoly(p, order), &basis, order, &Rationals);
        Ok(from_spoly(self.num_vars, r))
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool, IdealError> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// Mutual containment of generators.
    pub fn same_ideal(&self, other: &Ideal) -> Result<bool, IdealError> {
        self.same_ring(other)?;
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        for g in self.generators() {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Generators of the ideal obtained by eliminating `extra` leading
    /// variables from the ideal generated by `gens` (a block order run).
    fn eliminate(&self, gens: Vec<Polynomial>, extra: usize, stage: &'static str) -> Result<Vec<Polynomial>, IdealError> {
        let order = MonomialOrder::Block { split: extra };
        let sp: Vec<SPoly<Scalar>> = gens.iter().map(|g| to_spoly(g, order)).collect();
        let basis = reduced_basis(sp, order, &Rationals, &self.config.limits)
            .map_err(|e| IdealError::budget(stage, e))?;
        Ok(basis
            .into_iter()
            .map(|p| from_spoly(self.num_vars + extra, p))
            .filter(|p| {
                p.terms()
                    .all(|(m, _)| m.exponents()[..extra].iter().all(|&e| e == 0))
            })
            .map(|p| p.drop_leading_vars(extra))
            .collect())
    }

    /// `(I : g^∞)`, by eliminating `t` from `I + (1 - t*g)`.
    pub fn saturate_by(&self, g: &Polynomial) -> Result<Ideal, IdealError> {
        if g.is_zero() {
            return Ok(self.derived(vec![Polynomial::one(self.num_vars)]));
        }
        if g.is_constant() {
            return Ok(self.clone());
        }
        let nv = self.num_vars + 1;
        let mut gens: Vec<Polynomial> = self.generators.iter().map(|f| f.prepend_vars(1)).collect();
        let t = Polynomial::var(nv, 0);
        gens.push(&Polynomial::one(nv) - &(&t * &g.prepend_vars(1)));
        let elim = self.eliminate(gens, 1, "saturation")?;
        Ok(self.derived(elim))
    }

    /// `I ∩ J`, by eliminating `t` from `t*I + (1 - t)*J`.
    pub fn intersect(&self, other: &Ideal) -> Result<Ideal, IdealError> {
        self.same_ring(other)?;
        let nv = self.num_vars + 1;
        let t = Polynomial::var(nv, 0);
        let one_minus_t = &Polynomial::one(nv) - &t;
        let mut gens: Vec<Polynomial> = self
            .generators
            .iter()
            .map(|f| &t * &f.prepend_vars(1))
            .collect();
        gens.extend(
            other
                .generators
                .iter()
                .map(|g| &one_minus_t * &g.prepend_vars(1)),
        );
        let elim = self.eliminate(gens, 1, "intersection")?;
        Ok(self.derived(elim))
    }

    /// `(I : J^∞) = ∩_g (I : g^∞)` over the generators `g` of `J`.
    pub fn saturate(&self, other: &Ideal) -> Result<Ideal, IdealError> {
        self.same_ring(other)?;
        let nonzero: Vec<&Polynomial> = other.generators.iter().filter(|g| !g.is_zero()).collect();
        if nonzero.is_empty() {
            return Ok(self.derived(vec![Polynomial::one(self.num_vars)]));
        }
        let mut acc: Option<Ideal> = None;
        for g in nonzero {
            let sat = self.saturate_by(g)?;
            acc = Some(match acc {
                None => sat,
                Some(a) => a.intersect(&sat)?,
            });
        }
        let result = acc.expect("at least one generator");
        let gb = result.groebner_basis()?;
        Ok(self.derived(gb.polys.clone()))
    }

    /// Whether `p` vanishes on the affine zero set of the ideal: `1 - t*p`
    /// together with the ideal generates the unit ideal.
    pub fn radical_member(&self, p: &Polynomial) -> Result<bool, IdealError> {
        if p.is_zero() {
            return Ok(true);
        }
        let nv = self.num_vars + 1;
        let mut gens: Vec<Polynomial> = self.generators.iter().map(|f| f.prepend_vars(1)).collect();
        let t = Polynomial::var(nv, 0);
        gens.push(&Polynomial::one(nv) - &(&t * &p.prepend_vars(1)));
        let sp: Vec<SPoly<Scalar>> = gens
            .iter()
            .map(|g| to_spoly(g, MonomialOrder::Grevlex))
            .collect();
        let basis = reduced_basis(sp, MonomialOrder::Grevlex, &Rationals, &self.config.limits)
            .map_err(|e| IdealError::budget("radical membership", e))?;
        Ok(basis.len() == 1 && basis[0].lm().is_one())
    }

    /// Projective dimension and degree from the Hilbert series of the
    /// initial ideal.
    pub fn proj_profile(&self) -> Result<ProjectiveProfile, IdealError> {
        if !self.is_homogeneous() {
            return Err(IdealError::Inhomogeneous);
        }
        let gb = self.groebner_basis()?;
        let lms: Vec<Monomial> = if gb.polys.iter().all(Polynomial::is_zero) {
            vec![]
        } else {
            gb.leading_monomials()
        };
        let (dimension, degree) = hilbert::profile(&lms, self.num_vars);
        Ok(ProjectiveProfile { dimension, degree })
    }

    /// Number of distinct points of a zero-dimensional projective scheme.
    pub fn count_distinct_points(&self, seed: u64) -> Result<PointCount, IdealError> {
        points::count_distinct_points(self, seed)
    }

    /// Rational points of a zero-dimensional projective scheme, plus the
    /// number of points that are not rational.
    pub fn rational_points(&self, seed: u64) -> Result<RationalPoints, IdealError> {
        points::rational_points(self, seed)
    }
}

impl PartialEq for Ideal {
    /// Syntactic equality of generators (use [`Ideal::same_ideal`] for
    /// ideal equality).
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.generators == other.generators
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_poly;

    fn ideal(gens: &[&str], n: usize) -> Ideal {
        Ideal::parse(gens, n).unwrap()
    }

    fn p(s: &str, n: usize) -> Polynomial {
        parse_poly(s, n).unwrap()
    }

    #[test]
    fn basis_examples() {
        let i = ideal(&["X0", "X1"], 3);
        assert_eq!(i.groebner_basis().unwrap().polys, vec![p("X0", 3), p("X1", 3)]);

        let i = ideal(&["X0*X1", "X0*X2", "X1*X2 - X1*X2"], 3);
        assert_eq!(
            i.groebner_basis().unwrap().polys,
            vec![p("X0*X1", 3), p("X0*X2", 3)]
        );

        let zero = Ideal::new(3, vec![]);
        assert_eq!(zero.groebner_basis().unwrap().polys, vec![Polynomial::zero(3)]);
    }

    #[test]
    fn basis_is_reduced_and_cached() {
        let i = ideal(&["X0^2 - X1*X2", "X1^2 - X0*X2", "X2^2 - X0*X1"], 3);
        let gb = i.groebner_basis().unwrap();
        // every S-polynomial reduces to zero
        for (a, f) in gb.polys.iter().enumerate() {
            for g in &gb.polys[a + 1..] {
                let (lf, _) = f.leading_term(MonomialOrder::Grevlex).unwrap();
                let (lg, _) = g.leading_term(MonomialOrder::Grevlex).unwrap();
                let l = lf.lcm(lg);
                let s = &(f * &Polynomial::monomial(lf.quotient_of(&l).unwrap(), Scalar::from_integer(1.into())))
                    - &(g * &Polynomial::monomial(lg.quotient_of(&l).unwrap(), Scalar::from_integer(1.into())));
                assert!(i.normal_form(&s).unwrap().is_zero());
            }
        }
        // same Arc on second access
        assert!(Arc::ptr_eq(&gb, &i.groebner_basis().unwrap()));
        // cached basis generates the same ideal
        let back = i.derived(gb.polys.clone());
        assert!(back.same_ideal(&i).unwrap());
    }

    #[test]
    fn normal_form_examples() {
        let x0 = ideal(&["X0"], 3);
        assert!(x0.normal_form(&p("X0^2", 3)).unwrap().is_zero());
        assert_eq!(x0.normal_form(&p("X1", 3)).unwrap(), p("X1", 3));
        let conic = ideal(&["X0*X2 - X1^2"], 3);
        assert_eq!(
            conic.normal_form(&p("X0*X2 + X1^2", 3)).unwrap(),
            p("2*X0*X2", 3)
        );
    }

    #[test]
    fn saturation_examples() {
        let i = ideal(&["X0*X1", "X0*X2"], 3);
        let j = ideal(&["X1", "X2"], 3);
        let sat = i.saturate(&j).unwrap();
        assert!(sat.same_ideal(&ideal(&["X0"], 3)).unwrap());

        let sat = ideal(&["X0"], 3).saturate(&ideal(&["X1"], 3)).unwrap();
        assert!(sat.same_ideal(&ideal(&["X0"], 3)).unwrap());

        let sat = ideal(&["X0^2"], 3).saturate(&ideal(&["X0"], 3)).unwrap();
        assert!(sat.is_unit().unwrap());

        let sat = ideal(&["X0"], 3).saturate(&Ideal::unit(3)).unwrap();
        assert!(sat.same_ideal(&ideal(&["X0"], 3)).unwrap());
    }

    #[test]
    fn radical_examples() {
        assert!(ideal(&["X0^2"], 3).radical_member(&p("X0", 3)).unwrap());
        assert!(!ideal(&["X0^2"], 3).radical_member(&p("X1", 3)).unwrap());
        // X0*X2 + X1^2 lies in (X0, X1) itself
        assert!(ideal(&["X0", "X1"], 3)
            .radical_member(&p("X0*X2 + X1^2", 3))
            .unwrap());
        // witness (1:0:0) lies on V(I) but X0 does not vanish there
        assert!(!ideal(&["X0*X1", "X0*X2", "X1*X2"], 3)
            .radical_member(&p("X0", 3))
            .unwrap());
    }

    #[test]
    fn profile_examples() {
        assert_eq!(
            ideal(&["X0", "X1"], 4).proj_profile().unwrap(),
            ProjectiveProfile { dimension: 1, degree: 1 }
        );
        assert_eq!(
            ideal(&["X0^2*X3 - X1^2*X2 + X2^3"], 4).proj_profile().unwrap(),
            ProjectiveProfile { dimension: 2, degree: 3 }
        );
        assert!(Ideal::irrelevant(4).proj_profile().unwrap().is_empty());
        assert_eq!(
            ideal(&["X0 + X1^2"], 2).proj_profile(),
            Err(IdealError::Inhomogeneous)
        );
    }

    #[test]
    fn lex_profile_agrees_with_grevlex() {
        let i = ideal(&["X0*X3 - X1*X2", "X0*X2 - X1^2", "X1*X3 - X2^2"], 4);
        let lex = i.clone().with_config(EngineConfig {
            order: MonomialOrder::Lex,
            ..Default::default()
        });
        assert_eq!(i.proj_profile().unwrap(), lex.proj_profile().unwrap());
        assert_eq!(i.proj_profile().unwrap(), ProjectiveProfile { dimension: 1, degree: 3 });
    }

    #[test]
    fn budgets_are_reported() {
        let i = ideal(&["X0^2 - X1*X2", "X1^2 - X0*X2", "X2^2 - X0*X1"], 3).with_config(EngineConfig {
            limits: Limits {
                max_basis: Some(1),
                max_coeff_bits: None,
            },
            ..Default::default()
        });
        let err = i.groebner_basis().unwrap_err();
        assert!(err.is_budget(), "{err}");
    }

    #[test]
    fn modular_probe_predicts_shape() {
        let i = ideal(&["X0^2 - 3*X1*X2", "1/2*X1^2 - X0*X2", "X2^2 - 5*X0*X1"], 3).with_config(EngineConfig {
            modular_probe: Some(7),
            ..Default::default()
        });
        let gb = i.groebner_basis().unwrap();
        let probe = gb.probe.as_ref().unwrap();
        assert!(probe.agrees);
        assert_eq!(probe.predicted_size, gb.polys.len());
        assert!(field::is_prime(probe.prime));
    }
}
