//! Rational functions of the spectral parameter ζ.

use std::fmt;

use num::complex::Complex64;

use super::poly::Poly;
use super::scalar::{int, ComplexScalar, GaussianRational, Rational, Scalar};
use crate::error::{Error, Result};
use crate::series::BaseTag;

/// An exact rational function p(ζ)/q(ζ).
///
/// Normal form: `q` monic, `gcd(p, q) = 1`, and the zero function is `0/1`.
/// Two values are equal iff their normal forms are identical.
///
/// When `q` is known to split into linear factors the factorization is
/// carried along, and sums and products cancel by trial division at those
/// roots instead of a polynomial gcd.
#[derive(Clone, Debug)]
pub struct ZetaRational {
    num: Poly,
    den: Poly,
    roots: Option<Vec<(GaussianRational, usize)>>,
}

impl PartialEq for ZetaRational {
    fn eq(&self, o: &Self) -> bool {
        self.num == o.num && self.den == o.den
    }
}

type Roots = Vec<(GaussianRational, usize)>;

fn merge_roots(a: &Roots, b: &Roots, combine: impl Fn(usize, usize) -> usize) -> Roots {
    let mut out: Roots = a.iter().map(|(r, m)| (r.clone(), combine(*m, 0))).collect();
    for (r, m) in b {
        match out.iter_mut().find(|(s, _)| s == r) {
            Some(e) => e.1 = combine(a.iter().find(|(s, _)| s == r).map_or(0, |x| x.1), *m),
            None => out.push((r.clone(), combine(0, *m))),
        }
    }
    out
}

/// p · ∏ (ζ − r)^{target − have}.
fn lift(p: &Poly, have: &Roots, target: &Roots) -> Poly {
    let extra: Roots = target
        .iter()
        .map(|(r, m)| (r.clone(), m - have.iter().find(|(s, _)| s == r).map_or(0, |x| x.1)))
        .filter(|(_, m)| *m > 0)
        .collect();
    if extra.is_empty() {
        p.clone()
    } else {
        p.mul(&Poly::from_roots(&extra))
    }
}

/// Laurent data of a rational function at a point ζ0.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentData {
    /// Pole order; 0 when the function is regular at ζ0.
    pub order: usize,
    /// `coefficients[i]` multiplies (ζ-ζ0)^(i - order).
    pub coefficients: Vec<GaussianRational>,
}

impl LaurentData {
    /// Coefficient of (ζ-ζ0)^(-order), i.e. [(ζ-ζ0)^order f] at ζ0.
    pub fn leading(&self) -> &GaussianRational {
        &self.coefficients[0]
    }

    /// Coefficient of (ζ-ζ0)^power.
    pub fn coefficient(&self, power: i64) -> GaussianRational {
        let idx = power + self.order as i64;
        if idx < 0 {
            return GaussianRational::zero();
        }
        self.coefficients
            .get(idx as usize)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    /// Residue: coefficient of (ζ-ζ0)^-1.
    pub fn residue(&self) -> GaussianRational {
        self.coefficient(-1)
    }
}

impl ZetaRational {
    /// Builds and reduces `num/den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    /// num / ∏(ζ − r)^m with common roots cancelled.
    fn from_split(mut num: Poly, mut roots: Roots) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        for (r, m) in roots.iter_mut() {
            while *m > 0 {
                match num.div_linear(r) {
                    Some(q) => {
                        num = q;
                        *m -= 1;
                    }
                    None => break,
                }
            }
        }
        roots.retain(|(_, m)| *m > 0);
        let den = Poly::from_roots(&roots);
        ZetaRational {
            num,
            den,
            roots: Some(roots),
        }
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let lead = den.leading().unwrap().clone();
        let (num, den) = if lead.is_one() {
            (num, den)
        } else {
            let inv = lead.inverse().unwrap();
            (num.scale(&inv), den.scale(&inv))
        };
        let roots = den.is_constant().then(Vec::new);
        ZetaRational { num, den, roots }
    }

    pub fn from_poly(p: Poly) -> Self {
        ZetaRational {
            num: p,
            den: Poly::one(),
            roots: Some(Vec::new()),
        }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The indeterminate ζ.
    pub fn zeta() -> Self {
        Self::from_poly(Poly::zeta())
    }

    /// a + bζ with rational a, b.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::from_poly(Poly::linear(GaussianRational::real(a), GaussianRational::real(b)))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// True when the function does not depend on ζ.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let inv = o.inverse().ok_or(Error::DivisionByZero)?;
        Ok(self.mul(&inv))
    }

    /// Exact evaluation; fails at a pole.
    pub fn eval(&self, z: &GaussianRational) -> Result<GaussianRational> {
        let d = self.den.eval(z);
        let inv = d.inverse().ok_or(Error::DivisionByZero)?;
        Ok(self.num.eval(z).mul(&inv))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }

    /// Substitutes ζ ↦ a + bζ (used for the ζ ↦ n-ζ reflection).
    pub fn substitute_linear(&self, a: &GaussianRational, b: &GaussianRational) -> Self {
        if let (Some(roots), Some(binv)) = (&self.roots, b.inverse()) {
            // a + bζ − r = b(ζ − (r − a)/b)
            let deg = roots.iter().map(|(_, m)| *m).sum::<usize>();
            let scale = (0..deg).fold(GaussianRational::one(), |acc, _| acc.mul(&binv));
            let moved: Roots = roots.iter().map(|(r, m)| (r.sub(a).mul(&binv), *m)).collect();
            return Self::from_split(self.num.compose_linear(a, b).scale(&scale), moved);
        }
        Self::reduce(self.num.compose_linear(a, b), self.den.compose_linear(a, b))
    }

    /// Pole order and the first `terms` Laurent coefficients at ζ0.
    ///
    /// A regular point (including a zero of the function) reports order 0 and
    /// its Taylor coefficients.
    pub fn pole_data(&self, z0: &GaussianRational, terms: usize) -> LaurentData {
        if self.num.is_zero() {
            return LaurentData {
                order: 0,
                coefficients: vec![GaussianRational::zero(); terms.max(1)],
            };
        }
        let order = self.den.root_multiplicity(z0);
        let zeros = self.num.root_multiplicity(z0);
        // after reduction at most one of the multiplicities is nonzero
        let num_t = self.num.shift(z0);
        let den_t = self.den.shift(z0);
        let den_c = &den_t.coeffs()[order..];
        let num_c = num_t.coeffs();
        let terms = terms.max(1);
        // power-series division num(t) / (den(t) / t^order)
        let inv0 = den_c[0].inverse().expect("nonzero after stripping root");
        let mut out: Vec<GaussianRational> = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut acc = num_c.get(k).cloned().unwrap_or_else(GaussianRational::zero);
            for (i, c) in out.iter().enumerate() {
                if let Some(d) = den_c.get(k - i) {
                    acc = acc.sub(&c.mul(d));
                }
            }
            out.push(acc.mul(&inv0));
        }
        debug_assert!(order == 0 || zeros == 0);
        LaurentData {
            order,
            coefficients: out,
        }
    }

    /// Roots of the denominator among the given candidates, with multiplicity.
    pub fn poles_among(&self, candidates: &[GaussianRational]) -> Vec<(GaussianRational, usize)> {
        candidates
            .iter()
            .filter_map(|c| {
                let m = self.den.root_multiplicity(c);
                (m > 0).then(|| (c.clone(), m))
            })
            .collect()
    }

    /// True when the denominator factors completely over the candidates.
    pub fn denominator_splits_over(&self, candidates: &[GaussianRational]) -> bool {
        let mut rest = self.den.clone();
        for c in candidates {
            let lin = Poly::linear(c.neg(), GaussianRational::one());
            loop {
                if rest.is_constant() {
                    return true;
                }
                let (q, r) = rest.div_rem(&lin);
                if r.is_zero() {
                    rest = q;
                } else {
                    break;
                }
            }
        }
        rest.is_constant()
    }
}

impl Scalar for ZetaRational {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (&self.roots, &o.roots) {
            let l = merge_roots(a, b, usize::max);
            return Self::from_split(lift(&self.num, a, &l).add(&lift(&o.num, b, &l)), l);
        }
        if self.den == o.den {
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        Self::reduce(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return Self::zero();
        }
        if self.den.is_constant() && o.den.is_constant() {
            return Self::from_poly(self.num.mul(&o.num));
        }
        if let (Some(a), Some(b)) = (&self.roots, &o.roots) {
            return Self::from_split(self.num.mul(&o.num), merge_roots(a, b, |x, y| x + y));
        }
        Self::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }
    fn neg(&self) -> Self {
        ZetaRational {
            num: self.num.neg(),
            den: self.den.clone(),
            roots: self.roots.clone(),
        }
    }
    fn inverse(&self) -> Option<Self> {
        let lead = self.num.leading()?.inverse()?;
        match self.num.degree() {
            Some(0) => Some(Self::from_poly(self.den.scale(&lead))),
            Some(1) if self.roots.is_some() => {
                let r = self.num.coeff(0).mul(&lead).neg();
                Some(Self::from_split(self.den.scale(&lead), vec![(r, 1)]))
            }
            _ => Some(Self::reduce(self.den.clone(), self.num.clone())),
        }
    }
    fn from_rational(r: &Rational) -> Self {
        Self::constant(GaussianRational::real(r.clone()))
    }
    fn base_value(tag: BaseTag, n: usize) -> Option<Self> {
        Some(match tag {
            BaseTag::Zero => Self::zero(),
            BaseTag::Zeta => Self::zeta(),
            BaseTag::NMinusZeta => Self::linear(int(n as i64), int(-1)),
        })
    }
}

impl ComplexScalar for ZetaRational {
    fn from_gaussian(g: &GaussianRational) -> Self {
        Self::constant(g.clone())
    }
    fn conj(&self) -> Self {
        // conjugates the coefficients; ζ is treated as a real indeterminate
        let c = |p: &Poly| Poly::from_coeffs(p.coeffs().iter().map(|a| a.conj()).collect());
        match &self.roots {
            Some(roots) => ZetaRational {
                num: c(&self.num),
                den: c(&self.den),
                roots: Some(roots.iter().map(|(r, m)| (r.conj(), *m)).collect()),
            },
            None => Self::reduce(c(&self.num), c(&self.den)),
        }
    }
}

impl From<GaussianRational> for ZetaRational {
    fn from(g: GaussianRational) -> Self {
        Self::constant(g)
    }
}

impl fmt::Display for ZetaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &Poly| {
            let terms = p.coeffs().iter().filter(|c| !c.is_zero()).count();
            let real = p.coeffs().iter().all(|c| c.is_real());
            if terms <= 1 && real {
                p.to_string()
            } else {
                format!("({p})")
            }
        };
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{gr, rat};

    fn lin(a: i64, b: i64) -> ZetaRational {
        ZetaRational::linear(int(a), int(b))
    }

    fn c(v: i64, d: i64) -> ZetaRational {
        ZetaRational::from_rational(&rat(v, d))
    }

    #[test]
    fn like_terms_add() {
        let a = lin(-3, 2).inverse().unwrap();
        let sum = a.add(&a);
        assert_eq!(sum, c(2, 1).mul(&lin(-3, 2).inverse().unwrap()));
        assert_eq!(sum.to_string(), "1/(ζ - 3/2)");
    }

    #[test]
    fn gcd_cancellation() {
        // (ζ-2)/(ζ^2-4) = 1/(ζ+2)
        let num = Poly::from_coeffs(vec![gr(-2, 1), gr(1, 1)]);
        let den = Poly::from_coeffs(vec![gr(-4, 1), gr(0, 1), gr(1, 1)]);
        let f = ZetaRational::new(num, den).unwrap();
        assert_eq!(f, lin(2, 1).inverse().unwrap());
    }

    #[test]
    fn product_cancels_to_constant() {
        // -1/(2(2ζ-4)) * (2ζ-4) = -1/2
        let f = c(-1, 1).div(&c(2, 1).mul(&lin(-4, 2))).unwrap();
        assert_eq!(f.mul(&lin(-4, 2)), c(-1, 2));
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(c(1, 1).div(&ZetaRational::zero()), Err(Error::DivisionByZero));
        assert!(ZetaRational::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn pole_data_linear_denominator() {
        let f = lin(-4, 2).inverse().unwrap();
        let d = f.pole_data(&gr(2, 1), 3);
        assert_eq!(d.order, 1);
        assert_eq!(d.leading(), &gr(1, 2));
    }

    #[test]
    fn pole_data_at_zero_of_function() {
        let f = lin(-2, 1).mul(&lin(-2, 1));
        let d = f.pole_data(&gr(2, 1), 3);
        assert_eq!(d.order, 0);
        assert_eq!(d.coefficients, vec![gr(0, 1), gr(0, 1), gr(1, 1)]);
    }

    #[test]
    fn pole_data_matches_hand_laurent_expansion() {
        // -1/(2(2ζ-4)) = -1/(4(ζ-2)): residue -1/4, regular part 0
        let f = c(-1, 1).div(&c(2, 1).mul(&lin(-4, 2))).unwrap();
        let d = f.pole_data(&gr(2, 1), 3);
        assert_eq!(d.order, 1);
        assert_eq!(d.residue(), gr(-1, 4));
        assert_eq!(d.coefficient(0), gr(0, 1));
    }

    #[test]
    fn pole_data_double_pole_with_regular_part() {
        // ζ/(ζ-1)^2 = 1/(ζ-1)^2 + 1/(ζ-1)
        let den = lin(-1, 1).mul(&lin(-1, 1));
        let f = ZetaRational::zeta().div(&den).unwrap();
        let d = f.pole_data(&gr(1, 1), 4);
        assert_eq!(d.order, 2);
        assert_eq!(d.coefficients, vec![gr(1, 1), gr(1, 1), gr(0, 1), gr(0, 1)]);
    }

    #[test]
    fn split_path_agrees_with_gcd_path() {
        // build the same values through factored and unfactored routes
        let a = lin(-3, 2).inverse().unwrap().mul(&lin(1, 1));
        let b = lin(-4, 2).mul(&lin(-4, 2)).inverse().unwrap().mul(&c(3, 1));
        let fast = a.add(&b).mul(&lin(-4, 2));
        // (1+ζ)(2ζ−4)² + 3(2ζ−3) over (2ζ−3)(2ζ−4)
        let l4 = Poly::from_coeffs(vec![gr(-4, 1), gr(2, 1)]);
        let num = Poly::from_coeffs(vec![gr(1, 1), gr(1, 1)])
            .mul(&l4)
            .mul(&l4)
            .add(&Poly::constant(gr(3, 1)).mul(&Poly::from_coeffs(vec![gr(-3, 1), gr(2, 1)])));
        let den = Poly::from_coeffs(vec![gr(-3, 1), gr(2, 1)]).mul(&Poly::from_coeffs(vec![gr(-4, 1), gr(2, 1)]));
        let slow = ZetaRational::new(num, den).unwrap();
        assert_eq!(fast, slow);
        assert_eq!(fast.denominator(), slow.denominator());
        assert_eq!(fast.sub(&slow), ZetaRational::zero());
    }

    #[test]
    fn reflection_substitution() {
        // f(ζ) = 1/(2ζ-3), f(3-ζ) = 1/(3-2ζ)
        let f = lin(-3, 2).inverse().unwrap();
        let g = f.substitute_linear(&gr(3, 1), &gr(-1, 1));
        assert_eq!(g, lin(3, -2).inverse().unwrap());
    }
}
