use super::*;
use alloc::string::ToString;
use alloc::vec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const Q: FieldSpec = FieldSpec::Rational;

fn x(v: usize) -> SparsePoly {
    SparsePoly::var(Q, 3, v)
}

fn c(v: i64) -> SparsePoly {
    SparsePoly::constant(Q, 3, Q.int(v))
}

fn q(n: i64, d: i64) -> FieldElement {
    FieldElement::from_ratio(Q, n, d).unwrap()
}

/// Interpolation by literally summing f(1_T)·∏_{T} x_i·∏_{not T}(1 − x_i).
fn interpolation_oracle(spec: FieldSpec, n: usize, values: &[FieldElement]) -> SparsePoly {
    let mut acc = SparsePoly::zero(spec, n);
    for (t, val) in values.iter().enumerate() {
        let mut term = SparsePoly::constant(spec, n, val.clone());
        for i in 0..n {
            let xi = SparsePoly::var(spec, n, i);
            let f = if t >> i & 1 == 1 { xi } else { &SparsePoly::one(spec, n) - &xi };
            term = &term * &f;
        }
        acc = &acc + &term;
    }
    acc
}

#[test]
fn arithmetic_examples() {
    let p = &(&x(0) + &c(1)) * &(&x(0) - &c(1));
    assert_eq!(p, &x(0).pow(2) - &c(1));
    let sq = x(0).pow(2);
    let yz = &x(1) * &x(2);
    assert_eq!(sq.substitute(&[(0, yz)]).unwrap(), &x(1).pow(2) * &x(2).pow(2));
    assert!((&p * &c(0)).terms().is_empty());
}

#[test]
fn multilinearize_examples() {
    assert_eq!(x(0).pow(2).multilinearize(), x(0));
    let f = &(&x(0).pow(3) * &x(1).pow(2)) - &(&x(0) * &x(1));
    assert!(f.multilinearize().is_zero());
    let g = (&x(0) + &c(1)).pow(2).multilinearize();
    assert_eq!(g, &x(0).scale(&Q.int(3)) + &c(1));
}

#[test]
fn extremal_examples() {
    let lex = MonomialOrder::lex_n(3);
    let f = &(&x(0) * &x(1)) + &x(0);
    assert_eq!(f.leading_monomial(&lex).unwrap(), Monomial::from_vars(&[0, 1]));
    assert_eq!(c(5).leading_monomial(&lex).unwrap(), Monomial::one());
    assert_eq!(c(5).leading_coeff(&lex).unwrap(), Q.int(5));
    let g = &(&x(0) + &c(1)) * &(&x(1) + &c(1));
    assert_eq!(g.leading_monomial(&lex).unwrap(), Monomial::from_vars(&[0, 1]));
    assert_eq!(g.trailing_monomial(&lex).unwrap(), Monomial::one());
    assert_eq!(SparsePoly::zero(Q, 2).leading_monomial(&lex), Err(Error::ZeroPolynomial));
}

#[test]
fn elementary_symmetric_examples() {
    assert_eq!(elementary_symmetric(2, 1, Q).unwrap(), &x(0) + &x(1));
    assert_eq!(elementary_symmetric(3, 3, Q).unwrap(), &(&x(0) * &x(1)) * &x(2));
    assert_eq!(elementary_symmetric(3, 0, Q).unwrap(), c(1));
    assert_eq!(elementary_symmetric(6, 3, Q).unwrap().sparsity(), 20);
    assert!(elementary_symmetric(2, 3, Q).is_err());
}

#[test]
fn coeff_in_subring_examples() {
    // variables: x = 0, y = 1
    let f = &(&x(0).pow(2) * &x(1)) + &x(1).pow(2);
    assert_eq!(f.coeff_in_subring(&[1], &Monomial::var(1)).unwrap(), x(0).pow(2));
    let yg = &x(1) * &(&x(0) + &c(2));
    assert!(yg.coeff_in_subring(&[1], &Monomial::one()).unwrap().is_zero());
    // Σ x_i y_i with x1,x2 = 0,1 and y1,y2 = 2,3
    let s = SparsePoly::var(Q, 4, 0) * SparsePoly::var(Q, 4, 2) + SparsePoly::var(Q, 4, 1) * SparsePoly::var(Q, 4, 3);
    assert_eq!(s.coeff_in_subring(&[2, 3], &Monomial::var(2)).unwrap(), SparsePoly::var(Q, 4, 0));
    assert!(s.coeff_in_subring(&[2, 3], &Monomial::var(0)).is_err());
}

#[test]
fn interpolation_examples() {
    let and = [Q.int(0), Q.int(0), Q.int(0), Q.int(1)];
    assert_eq!(interpolate_multilinear(Q, 2, &and).unwrap(), &x(0) * &x(1));
    assert_eq!(interpolate_multilinear(Q, 2, &[Q.int(1), Q.int(1), Q.int(1), Q.int(1)]).unwrap(), c(1));
    // 1/(x - 2) at 0 and 1, solved by hand: a = -1/2, a + b = -1
    let f = interpolate_multilinear(Q, 1, &[q(-1, 2), Q.int(-1)]).unwrap();
    let expect = SparsePoly::from_terms(Q, 1, [(Monomial::one(), q(-1, 2)), (Monomial::var(0), q(-1, 2))]);
    assert_eq!(f, expect);
    assert!(interpolate_multilinear(Q, 2, &and[..3]).is_err());
}

#[test]
fn restriction_examples() {
    let f = &x(0) * &x(1);
    // keep probability 0 kills everything, keep probability 1 keeps everything
    assert!(random_restriction(&f, 0, 1, 7).unwrap().0.is_zero());
    let (g, kept) = random_restriction(&f, 1, 1, 7).unwrap();
    assert_eq!(g, f);
    assert_eq!(kept, vec![0, 1, 2]);
}

/// Monte-Carlo: after a 1/2 restriction, every surviving monomial of a
/// 2^10-term multilinear polynomial in 20 variables has at most 11 variables,
/// in at least half of the runs.
#[test]
fn restriction_statistics() {
    let spec = FieldSpec::Prime(101);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut f = SparsePoly::zero(spec, 20);
    while f.sparsity() < 1024 {
        let vars: Vec<usize> = (0..20).filter(|_| rand::Rng::gen_bool(&mut rng, 0.5)).collect();
        f.add_term(Monomial::from_vars(&vars), spec.one());
    }
    let good = (0..1000u64)
        .filter(|&s| {
            let (g, _) = random_restriction(&f, 1, 2, s).unwrap();
            g.terms().keys().all(|m| m.support_size() <= 11)
        })
        .count();
    assert!(good >= 500, "only {good} of 1000 runs");
}

#[test]
fn interpolation_matches_oracle() {
    let spec = FieldSpec::Prime(101);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 0..5 {
        let vals: Vec<FieldElement> = (0..1 << n).map(|_| FieldElement::random(spec, &mut rng, 0)).collect();
        assert_eq!(interpolate_multilinear(spec, n, &vals).unwrap(), interpolation_oracle(spec, n, &vals));
    }
}

#[test]
fn display() {
    let f = &(&x(0).pow(2).scale(&Q.int(3)) - &x(1)) + &c(-2);
    assert_eq!(f.to_string(), "3*x1^2 - x2 - 2");
    assert_eq!(SparsePoly::zero(Q, 1).to_string(), "0");
    let l = VarLayout::new(2, 1, 2);
    assert_eq!(l.name(2), "y1");
    assert_eq!(l.name(4), "z2");
    assert_eq!(l.id("z2").unwrap(), 4);
    assert!(l.id("y2").is_err());
}

#[test]
fn exact_division() {
    let f = &(&x(0) + &x(1)) * &(&x(0) * &x(2) - &c(3));
    assert_eq!(f.divide_exact(&(&x(0) + &x(1))).unwrap(), &x(0) * &x(2) - &c(3));
    assert!(f.divide_exact(&(&x(0) + &c(1))).is_err());
}

#[test]
fn budget_is_enforced() {
    let f = (&x(0) + &x(1)).pow(4);
    let mut b = Budget::new(10);
    assert!(matches!(f.mul_budgeted(&f, &mut b), Err(Error::Budget { .. })));
}

fn arb_poly(spec: FieldSpec, nvars: usize, maxideg: u16) -> impl Strategy<Value = SparsePoly> {
    any::<u64>().prop_map(move |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        random_poly(spec, nvars, 6, 5, maxideg, &mut rng)
    })
}

fn arb_order() -> impl Strategy<Value = MonomialOrder> {
    (any::<bool>(), Just(vec![0usize, 1, 2, 3]).prop_shuffle())
        .prop_map(|(g, perm)| if g { MonomialOrder::graded_lex(perm) } else { MonomialOrder::lex(perm) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ml_identities(f in arb_poly(FieldSpec::Prime(101), 4, 3), g in arb_poly(FieldSpec::Prime(101), 4, 3), a in 0u64..101, b in 0u64..101) {
        let spec = FieldSpec::Prime(101);
        let (a, b) = (FieldElement::from_u64(spec, a), FieldElement::from_u64(spec, b));
        let mf = f.multilinearize();
        prop_assert!(mf.is_multilinear());
        prop_assert!(mf.degree() <= f.degree());
        prop_assert!(mf.sparsity() <= f.sparsity());
        prop_assert_eq!((&f * &g).multilinearize(), (&mf * &g.multilinearize()).multilinearize());
        prop_assert_eq!((&f.scale(&a) + &g.scale(&b)).multilinearize(), &mf.scale(&a) + &g.multilinearize().scale(&b));
        let tf = cube_table(spec, 4, |p| f.eval(p)).unwrap();
        let tm = cube_table(spec, 4, |p| mf.eval(p)).unwrap();
        prop_assert_eq!(&tf, &tm);
        prop_assert_eq!(interpolate_multilinear(spec, 4, &tf).unwrap(), mf);
    }

    #[test]
    fn lm_tm_multiplicative(f in arb_poly(FieldSpec::Rational, 4, 3), g in arb_poly(FieldSpec::Rational, 4, 3), ord in arb_order()) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let h = &f * &g;
        let (lf, lg, lh) = (f.leading_term(&ord).unwrap(), g.leading_term(&ord).unwrap(), h.leading_term(&ord).unwrap());
        prop_assert_eq!(lh.0, lf.0.mul(&lg.0));
        prop_assert_eq!(lh.1, &lf.1 * &lg.1);
        let (tf, tg, th) = (f.trailing_term(&ord).unwrap(), g.trailing_term(&ord).unwrap(), h.trailing_term(&ord).unwrap());
        prop_assert_eq!(th.0, tf.0.mul(&tg.0));
        prop_assert_eq!(th.1, &tf.1 * &tg.1);
    }

    #[test]
    fn order_is_monomial_order(a in proptest::collection::vec(0u16..4, 4), b in proptest::collection::vec(0u16..4, 4), c in proptest::collection::vec(0u16..4, 4), ord in arb_order()) {
        let (a, b, c) = (Monomial::new(a), Monomial::new(b), Monomial::new(c));
        prop_assert_eq!(ord.cmp(&a, &b), ord.cmp(&a.mul(&c), &b.mul(&c)));
        if !a.is_one() {
            prop_assert!(ord.cmp(&Monomial::one(), &a).is_lt());
        }
    }

    #[test]
    fn substitution_commutes_with_eval(f in arb_poly(FieldSpec::Prime(101), 3, 3), g in arb_poly(FieldSpec::Prime(101), 3, 2), pt in proptest::collection::vec(0u64..101, 3)) {
        let spec = FieldSpec::Prime(101);
        let pt: Vec<FieldElement> = pt.into_iter().map(|v| FieldElement::from_u64(spec, v)).collect();
        let h = f.substitute(&[(1, g.clone())]).unwrap();
        let mut pt2 = pt.clone();
        pt2[1] = g.eval(&pt).unwrap();
        prop_assert_eq!(h.eval(&pt).unwrap(), f.eval(&pt2).unwrap());
    }
}
