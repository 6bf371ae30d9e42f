//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Values marked as oracles are recomputed here independently of the
//! library code under test.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ips_core::circuit::{
    divide_by_var_circuit, random_dag, random_ml_formula, random_roabp, AffineForm, Circuit, CircuitDag, LowDegPoweringFormula,
    MultilinearFormula, PoweringFormula,
};
use ips_core::hardness::{
    certify_multiple_roabp, certify_multiple_sps, check_any_partition, check_degree_bound, check_eval_dim_xy, check_sparsity_bound,
    determinant_poly, extract_multiple_from_ips, min_multiple_sparsity_bruteforce, svb_build, svb_check, svb_sample,
};
use ips_core::ips::{
    appendix_inverse_poly, build_mlformula_refutation, build_roabp_refutation, certificate_from_multipliers,
    exhaustive_multilinear_linips, ips_to_linear, multilinear_linips_exists, simulate_sparse_linips, AxiomSystem, IpsCertificate,
    Linearity,
};
use ips_core::measure::{coeff_dim, leading_diagonal, trailing_diagonal, PartitionSpec};
use ips_core::poly::{random_poly, Budget};
use ips_core::{FieldElement, FieldSpec, Monomial, MonomialOrder, SparsePoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Q: FieldSpec = FieldSpec::Rational;
const F3: FieldSpec = FieldSpec::Prime(3);
const F101: FieldSpec = FieldSpec::Prime(101);
const F10007: FieldSpec = FieldSpec::Prime(10007);

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn big() -> Budget {
    Budget::new(1 << 28)
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

fn var(spec: FieldSpec, n: usize, v: usize) -> SparsePoly {
    SparsePoly::var(spec, n, v)
}

fn cst(spec: FieldSpec, n: usize, c: i64) -> SparsePoly {
    SparsePoly::constant(spec, n, spec.int(c))
}

/// Oracle: multilinear coefficients of `1/(Σx − β)` by Möbius inversion of
/// the cube table, indexed by support bitmask.
fn inverse_oracle(spec: FieldSpec, n: usize, beta: &FieldElement) -> Vec<FieldElement> {
    let mut a: Vec<FieldElement> = (0..1usize << n).map(|m| (&spec.int(m.count_ones() as i64) - beta).inv().unwrap()).collect();
    for i in 0..n {
        for m in 0..1usize << n {
            if m >> i & 1 == 1 {
                let lower = a[m ^ (1 << i)].clone();
                a[m] -= &lower;
            }
        }
    }
    a
}

fn mask_monomial(n: usize, m: usize) -> Monomial {
    Monomial::from_vars(&(0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
}

fn admissible_betas(spec: FieldSpec, n: usize) -> Vec<FieldElement> {
    match spec {
        FieldSpec::Prime(p) => ((n as u64 + 1)..p).map(|b| FieldElement::from_u64(spec, b)).collect(),
        FieldSpec::Rational => {
            let mut v: Vec<FieldElement> = (1..=5).map(|k| spec.int((n + k) as i64)).collect();
            for t in ["-1", "-2", "-7", "1/2", "7/3", "100"] {
                v.push(spec.parse(t).unwrap());
            }
            v
        }
    }
}

fn c1_appendix_identity() -> Outcome {
    let mut count = 0;
    for spec in [Q, F101] {
        for n in 1..=8 {
            for beta in admissible_betas(spec, n) {
                let f = ok(appendix_inverse_poly(n, &beta), "appendix form")?;
                let oracle = inverse_oracle(spec, n, &beta);
                for (m, c) in oracle.iter().enumerate() {
                    ensure!(f.coeff(&mask_monomial(n, m)) == *c, "n={n} beta={beta} over {spec}: coefficient of mask {m} differs");
                }
                ensure!(f.sparsity() == 1 << n, "n={n} beta={beta}: sparsity {}", f.sparsity());
                ensure!(f.degree() as usize == n, "n={n} beta={beta}: degree {}", f.degree());
                count += 1;
            }
        }
    }
    Ok(format!("{count} (n, beta, field) instances coefficient-exact, degree n, 2^n terms"))
}

fn c2_roabp_refutation() -> Outcome {
    let c = 4usize;
    let mut widths = Vec::new();
    for n in 2..=8 {
        let r = ok(build_roabp_refutation(&vec![F10007.one(); n], &F10007.int(n as i64 + 1), &(0..n).collect::<Vec<_>>()), "build")?;
        ensure!(ok(r.cert.verify_exact(&mut big()), "verify")?.is_valid(), "n={n}: refutation does not verify");
        let Circuit::Roabp(abp) = &r.cert.proof else {
            return Err("proof is not an roABP".into());
        };
        ensure!(abp.layers().iter().all(|l| l.degree() <= 2), "n={n}: a layer has degree above 2");
        let p = ok(r.cert.proof.expand(&mut big()), "expand")?;
        ensure!(p.ideg() <= 2, "n={n}: individual degree {}", p.ideg());
        ensure!(r.width <= c * (n + 2) * (n + 2), "n={n}: width {} exceeds {c}(n+2)^2", r.width);
        widths.push(r.width);
    }
    Ok(format!("n=2..8 verify, individual degree <= 2, widths {widths:?} <= {c}(n+2)^2"))
}

fn c3_mlformula_refutation() -> Outcome {
    for spec in [Q, F10007] {
        for n in 1..=5 {
            let need = ((n * (n + 1) + 1) * (n + 2)) as u128;
            ensure!(spec.has_elements(need), "{spec} too small for n={n}");
            let cert = ok(build_mlformula_refutation(&vec![spec.one(); n], &spec.int(n as i64 + 1)), "build")?;
            ensure!(ok(cert.verify_exact(&mut big()), "verify")?.is_valid(), "n={n} over {spec}: does not verify");
            let Circuit::Multilinear(m) = &cert.proof else {
                return Err("proof is not a multilinear formula".into());
            };
            ensure!(m.check().is_ok(), "n={n}: a product gate joins overlapping supports");
            ensure!(m.product_depth() <= 1 && m.to_dag().depth() <= 3, "n={n}: depth {} is not depth-3", m.to_dag().depth());
        }
    }
    Ok("n=1..5 over rational and p=10007: valid, multilinear, depth 3".into())
}

/// A known linear certificate padded with `r·(p − a)·p` terms, which vanish
/// both at `p = 0` and at `p = a` but make the proof non-linear.
fn random_toy_certificate(rng: &mut ChaCha8Rng, k: usize) -> Result<IpsCertificate, String> {
    let spec = if k % 2 == 0 { Q } else { F101 };
    let (sys, base) = if k % 4 < 2 {
        let n = 2;
        let xy1 = &(&var(spec, n, 0) * &var(spec, n, 1)) + &cst(spec, n, 1);
        let sys = ok(AxiomSystem::new(spec, n, vec![xy1], true), "system")?;
        let g = &cst(spec, n, 1) - &(&var(spec, n, 0) * &var(spec, n, 1)).scale(&spec.int(2).inv().unwrap());
        let c = ok(certificate_from_multipliers(&sys, &[g]), "multipliers")?;
        (sys, c)
    } else {
        let n = rng.gen_range(1..=3);
        let c = ok(build_mlformula_refutation(&vec![spec.one(); n], &spec.int(n as i64 + 1)), "mlf")?;
        (c.system.clone(), c)
    };
    let total = sys.layout().total();
    let mut c = ok(base.proof.expand(&mut big()), "expand")?.with_nvars(total);
    let placeholders = sys.placeholders();
    for _ in 0..rng.gen_range(1..=2) {
        let (p, a) = &placeholders[rng.gen_range(0..placeholders.len())];
        let mut r = random_poly(spec, total, 3, 1, 1, rng);
        if r.is_zero() {
            r = cst(spec, total, 1);
        }
        let pv = var(spec, total, *p);
        c = &c + &(&r * &(&(&pv - &a.clone().with_nvars(total)) * &pv));
    }
    ok(IpsCertificate::new(sys, Circuit::Dag(CircuitDag::from_poly(&c)), Linearity::General), "certificate")
}

fn c4_linearize() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..50 {
        let cert = random_toy_certificate(&mut rng, k)?;
        ensure!(cert.system.nvars <= 3, "toy {k} too large");
        let c = ok(cert.proof.expand(&mut big()), "expand")?;
        ensure!(c.degree() <= 6, "toy {k}: degree {}", c.degree());
        let l = cert.layout();
        ensure!((l.nx..l.total()).any(|v| c.var_degree(v) >= 2), "toy {k} is already linear");
        ensure!(ok(cert.verify_exact(&mut big()), "verify")?.is_valid(), "toy {k} is not a valid certificate");
        let (lin, _) = ok(ips_to_linear(&cert, &mut big()), "ips_to_linear")?;
        ensure!(ok(lin.verify_exact(&mut big()), "verify linear")?.is_valid(), "toy {k}: linearised certificate invalid");
        let p = ok(lin.proof.expand(&mut big()), "expand linear")?;
        let ll = lin.layout();
        ensure!((ll.nx..ll.nx + ll.ny).all(|v| p.var_degree(v) <= 1), "toy {k}: y-degree above 1");
    }
    Ok("50 random non-linear toys linearised and verified".into())
}

fn c5_division() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0f64;
    for k in 0..100 {
        let spec = if k % 2 == 0 { F101 } else { Q };
        let nv = rng.gen_range(1..=3);
        let c = random_dag(spec, nv, 40, 6, &mut rng);
        ensure!(c.size() <= 40, "circuit {k} has {} wires", c.size());
        let y = rng.gen_range(0..nv);
        let a: u32 = rng.gen_range(1..=3);
        let f = ok(c.expand(&mut big()), "expand")?.with_nvars(nv);
        let d = ok(divide_by_var_circuit(&c, y, a), "divide")?;
        let outs = ok(d.expand_outputs(&mut big()), "expand outputs")?;
        ensure!(outs.len() == a as usize + 1, "circuit {k}: {} outputs", outs.len());
        let mut rebuilt = SparsePoly::zero(spec, nv);
        for (i, o) in outs.iter().enumerate() {
            if i < a as usize {
                ensure!(o.var_degree(y) == 0, "circuit {k}: output {i} depends on y");
            }
            rebuilt = &rebuilt + &(&o.clone().with_nvars(nv) * &var(spec, nv, y).pow(i as u32));
        }
        ensure!(rebuilt == f, "circuit {k}: reconstruction differs");
        let bound = 4 * (a as usize).pow(2) * c.size();
        ensure!(d.size() <= bound, "circuit {k}: {} wires > {bound}", d.size());
        worst = worst.max(d.size() as f64 / (a as f64 * a as f64 * c.size().max(1) as f64));
    }
    Ok(format!("100 random circuits reconstructed; max wires/(a^2 s) = {worst:.2} <= 4"))
}

fn c6_functional() -> Outcome {
    for n in 1..=8 {
        for (spec, beta) in [(Q, Q.int(n as i64 + 1)), (F101, F101.int(-1))] {
            let d = ok(check_degree_bound(n, &beta), "degree")?;
            ensure!(d.is_confirmed() && d.measured == n as u128, "degree n={n} over {spec}: {d:?}");
            let s = ok(check_sparsity_bound(n, &beta), "sparsity")?;
            ensure!(s.is_confirmed() && s.measured == 1 << n, "sparsity n={n} over {spec}: measured {}", s.measured);
        }
    }
    for n in 1..=6 {
        let r = ok(check_eval_dim_xy(n, &F10007.int(n as i64 + 1)), "eval dim")?;
        ensure!(r.measured == 1 << n, "eval dim n={n}: {}", r.measured);
    }
    let parts: [(&[usize], &[usize]); 3] = [(&[0, 1], &[2, 3]), (&[0, 2], &[1, 3]), (&[0, 3], &[1, 2])];
    for (u, v) in parts {
        let r = ok(check_any_partition(2, &Q.int(3), u, v), "any partition")?;
        ensure!(r.is_confirmed(), "partition {u:?}|{v:?}: {r:?}");
    }
    Ok("degree and sparsity n<=8, eval dim 2^n for n<=6, 3 balanced partitions".into())
}

fn c7_multiples() -> Outcome {
    for n in 1..=10 {
        let m = SparsePoly::monomial(Q, n, Monomial::from_vars(&(0..n).collect::<Vec<_>>()), Q.one());
        ensure!(ok(certify_multiple_sps(&m, &MonomialOrder::graded_lex_n(n)), "sps")? == 1 << n, "sps n={n}");
    }
    let f = &(&var(F3, 2, 0) + &cst(F3, 2, 1)) * &(&var(F3, 2, 1) + &cst(F3, 2, 1));
    ensure!(ok(min_multiple_sparsity_bruteforce(&f), "bruteforce")?.0 == 4, "(x+1)(y+1) over F_3");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tried = 0;
    while tried < 20 {
        let n = rng.gen_range(1..=2);
        let f = random_poly(F3, n, 4, 2, 1, &mut rng);
        if f.is_zero() {
            continue;
        }
        tried += 1;
        let (s, g) = ok(min_multiple_sparsity_bruteforce(&f), "bruteforce")?;
        ensure!(s >= f.sparsity(), "{f}: multiple {g} has sparsity {s}");
    }
    for n in 1..=8 {
        let mut h = SparsePoly::one(Q, 2 * n);
        for i in 0..n {
            h = &h * &(&(&var(Q, 2 * n, i) + &var(Q, 2 * n, n + i)) + &cst(Q, 2 * n, 1));
        }
        let part = ok(PartitionSpec::split((0..n).collect(), (n..2 * n).collect()), "partition")?;
        let b = ok(certify_multiple_roabp(&h, &part, &MonomialOrder::graded_lex_n(n)), "roabp")?;
        ensure!(b == 1 << n, "roabp n={n}: {b}");
        if n <= 3 {
            ensure!(ok(coeff_dim(&h, &part), "coeff dim")? == 1 << n, "coeff dim n={n}");
        }
    }
    Ok("sps 2^n for n<=10, bruteforce on 21 instances, roABP 2^n for n<=8".into())
}

fn c8_generator() -> Outcome {
    let g2 = ok(svb_build(2, 1, F10007), "build")?;
    let det2 = ok(determinant_poly(2, F10007), "det")?;
    ensure!(ok(g2.compose(&det2, &mut big()), "compose")?.is_zero(), "det_2 survives l=1");
    let g3 = ok(svb_build(3, 2, F10007), "build")?;
    let det3 = ok(determinant_poly(3, F10007), "det")?;
    let s = ok(svb_sample(&det3, &g3, 200, 8), "sample")?;
    ensure!(s.vanishes, "det_3 nonzero at a seed");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tried = 0;
    while tried < 20 {
        let f = random_poly(F10007, 9, rng.gen_range(1..=4), 3, 2, &mut rng);
        if f.is_zero() {
            continue;
        }
        tried += 1;
        ensure!(f.sparsity() <= 4, "sparsity {}", f.sparsity());
        let c = ok(svb_check(&f, &g3, 50, tried as u64, &mut big()), "check")?;
        ensure!(!c.vanishes, "{f} vanishes under the generator");
    }
    Ok(format!("det_2 o G(1) = 0 exactly; det_3 o G(2) zero on 200 seeds (error <= 10^{:.0}); 20 sparse survivors", s.log10_error_bound))
}

fn c9_extraction() -> Outcome {
    let n = 2;
    let f = &var(Q, n, 0) * &var(Q, n, 1);
    let g = &(&var(Q, n, 0) + &var(Q, n, 1)) - &cst(Q, n, 2);
    let sys = ok(AxiomSystem::new(Q, n, vec![f.clone(), g], true), "system")?;
    let half = FieldElement::from_ratio(Q, -1, 2).unwrap();
    let b = SparsePoly::from_terms(
        Q,
        n,
        [
            (Monomial::one(), half.clone()),
            (Monomial::var(0), half.clone()),
            (Monomial::var(1), half),
            (Monomial::from_vars(&[0, 1]), FieldElement::from_ratio(Q, 3, 2).unwrap()),
        ],
    );
    let cert = ok(certificate_from_multipliers(&sys, &[f.clone(), b]), "certificate")?;
    ensure!(ok(cert.verify_exact(&mut big()), "verify")?.is_valid(), "certificate invalid");
    let e = ok(extract_multiple_from_ips(&cert, &[Q.int(1), Q.int(1)], &mut big()), "extract")?;
    ensure!(!e.multiple.is_zero(), "extracted zero");
    ensure!(&e.quotient * &f == e.multiple, "not a multiple of x1x2");
    let b = ok(certify_multiple_sps(&e.multiple, &MonomialOrder::graded_lex_n(n)), "sps")?;
    ensure!(b >= 4, "sps bound {b}");
    Ok(format!("extracted {} (sps bound {b})", e.multiple))
}

fn c10_negative_controls() -> Outcome {
    let system = |spec: FieldSpec| {
        let xy1 = &(&var(spec, 2, 0) * &var(spec, 2, 1)) + &cst(spec, 2, 1);
        AxiomSystem::new(spec, 2, vec![xy1], true).unwrap()
    };
    ensure!(!ok(multilinear_linips_exists(&system(Q)), "rank test")?, "rank test found a multilinear refutation");
    ensure!(ok(exhaustive_multilinear_linips(&system(F3), 1 << 20), "exhaustive")?.is_none(), "exhaustive search found one");
    let g = &cst(Q, 2, 1) - &(&var(Q, 2, 0) * &var(Q, 2, 1)).scale(&Q.int(2).inv().unwrap());
    let cert = ok(simulate_sparse_linips(&system(Q), &[g], &mut big()), "simulate")?;
    ensure!(ok(cert.verify_exact(&mut big()), "verify")?.is_valid(), "simulated refutation invalid");
    let mut bad = cert.clone();
    bad.system.axioms[0] = &bad.system.axioms[0] + &cst(Q, 2, 1);
    ensure!(!ok(bad.verify_exact(&mut big()), "verify")?.is_valid(), "exact mode accepted a corrupted certificate");
    ensure!(!ok(bad.verify_pit(20, 0), "pit")?.probably_valid(), "PIT mode accepted a corrupted certificate");
    Ok("no multilinear linear refutation (rank and 3^12 search); sparse simulation valid; corruption caught".into())
}

fn c11_property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ord = MonomialOrder::graded_lex_n(4);
    let part = PartitionSpec::split(vec![0, 1], vec![2, 3]).unwrap();
    let pord = MonomialOrder::graded_lex_n(2);
    let mut pairs = 0;
    while pairs < 500 {
        let f = random_poly(F101, 4, 4, 3, 2, &mut rng);
        let g = random_poly(F101, 4, 4, 3, 2, &mut rng);
        if f.is_zero() || g.is_zero() {
            continue;
        }
        pairs += 1;
        let fg = &f * &g;
        let lm = |p: &SparsePoly| p.leading_monomial(&ord).unwrap();
        let tm = |p: &SparsePoly| p.trailing_monomial(&ord).unwrap();
        ensure!(lm(&fg) == lm(&f).mul(&lm(&g)), "LM");
        ensure!(tm(&fg) == tm(&f).mul(&tm(&g)), "TM");
        ensure!(fg.leading_coeff(&ord).unwrap() == &f.leading_coeff(&ord).unwrap() * &g.leading_coeff(&ord).unwrap(), "LC");
        ensure!(fg.trailing_coeff(&ord).unwrap() == &f.trailing_coeff(&ord).unwrap() * &g.trailing_coeff(&ord).unwrap(), "TC");
        let ld = |p: &SparsePoly| leading_diagonal(p, &part, &pord).unwrap();
        let td = |p: &SparsePoly| trailing_diagonal(p, &part, &pord).unwrap();
        ensure!(ld(&fg) == &ld(&f) * &ld(&g), "LD");
        ensure!(td(&fg) == &td(&f) * &td(&g), "TD");
    }
    for _ in 0..500 {
        let f = random_poly(F101, 3, 5, 4, 3, &mut rng);
        let g = random_poly(F101, 3, 5, 4, 3, &mut rng);
        let ml = f.multilinearize();
        ensure!(ml.is_multilinear() && ml.multilinearize() == ml, "ml idempotence");
        for m in 0..8usize {
            let pt: Vec<FieldElement> = (0..3).map(|i| F101.int((m >> i & 1) as i64)).collect();
            ensure!(ml.eval(&pt).unwrap() == f.eval(&pt).unwrap(), "ml agrees on the cube");
        }
        ensure!((&f * &g).multilinearize() == (&ml * &g.multilinearize()).multilinearize(), "ml of products");
    }
    let nv = 3;
    let point = |rng: &mut ChaCha8Rng| -> Vec<FieldElement> { (0..nv).map(|_| FieldElement::random(F101, rng, 0)).collect() };
    let mut checked = 0;
    for _ in 0..100 {
        let mut pf = PoweringFormula::new(F101, nv);
        for _ in 0..3 {
            let coeffs = (0..nv).map(|_| F101.int(rng.gen_range(-3..=3))).collect();
            pf.push_scaled(F101.int(rng.gen_range(1..5)), AffineForm::new(coeffs, F101.int(rng.gen_range(-3..=3))), rng.gen_range(0..6));
        }
        let terms = (0..2).map(|_| (random_poly(F101, nv, 3, 2, 2, &mut rng), rng.gen_range(0..4))).collect();
        let vars: Vec<usize> = (0..nv).collect();
        let mut order = vars.clone();
        order.rotate_left(rng.gen_range(0..nv));
        let classes = [
            Circuit::Dag(random_dag(F101, nv, 30, 6, &mut rng)),
            Circuit::Powering(pf),
            Circuit::LowDeg(LowDegPoweringFormula::new(F101, nv, 2, terms).unwrap()),
            Circuit::Roabp(random_roabp(F101, nv, &order, 3, 2, &mut rng)),
            Circuit::Multilinear(MultilinearFormula::new(F101, nv, random_ml_formula(F101, &vars, 3, &mut rng))),
        ];
        for c in &classes {
            let p = c.expand(&mut big()).unwrap();
            for _ in 0..3 {
                let pt = point(&mut rng);
                ensure!(c.eval(&pt).unwrap() == p.eval(&pt).unwrap(), "eval/expand disagree for {c:?}");
            }
            checked += 1;
        }
    }
    Ok(format!("500 pairs x 6 multiplicativity laws, 500 ml identities, {checked} circuits across 5 classes"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "inverse closed form", limit: Duration::from_secs(10), run: c1_appendix_identity },
        Criterion { id: 2, name: "roABP refutation", limit: Duration::from_secs(30), run: c2_roabp_refutation },
        Criterion { id: 3, name: "multilinear-formula refutation", limit: Duration::from_secs(30), run: c3_mlformula_refutation },
        Criterion { id: 4, name: "IPS to linear IPS", limit: Duration::from_secs(60), run: c4_linearize },
        Criterion { id: 5, name: "division by a variable", limit: Duration::from_secs(30), run: c5_division },
        Criterion { id: 6, name: "functional lower bounds", limit: Duration::from_secs(120), run: c6_functional },
        Criterion { id: 7, name: "multiples hardness", limit: Duration::from_secs(120), run: c7_multiples },
        Criterion { id: 8, name: "rank generator", limit: Duration::from_secs(30), run: c8_generator },
        Criterion { id: 9, name: "multiple extraction", limit: Duration::from_secs(10), run: c9_extraction },
        Criterion { id: 10, name: "negative controls", limit: Duration::from_secs(10), run: c10_negative_controls },
        Criterion { id: 11, name: "property suites", limit: Duration::from_secs(120), run: c11_property_suites },
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_none_or(|f| f == c.id)) {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let res = match res {
            Ok(_) if took > c.limit => Err(format!("took {took:.1?}, limit {:?}", c.limit)),
            r => r,
        };
        let (tag, detail) = match &res {
            Ok(d) => ("PASS", d),
            Err(e) => {
                failed += 1;
                ("FAIL", e)
            }
        };
        println!("criterion {:>2} {tag} {} [{:.2} s]: {detail}", c.id, c.name, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
