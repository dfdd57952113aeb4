//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use avme_core::certify::{
    check_gavme_classic, check_gavme_spectral, check_instance, check_sylvester_max,
    check_sylvester_min_corrected, check_sylvester_min_flawed, Certificate, CheckOptions, ConditionId, Verdict,
};
use avme_core::combinat::{check_gavme_dd_conditions, check_gavme_w_conditions};
use avme_core::harness::{gen_instance, GenSpec};
use avme_core::instances::{
    gavme_columns, lift_gavme, lift_sylvester, GaveInstance, GavmeInstance, Instance, InstanceKind, NgavmeInstance,
    SylvesterInstance,
};
use avme_core::matcore::{abs_elementwise, inverse_of, sigma_max, sigma_min, spectral_radius, DEFAULT_KRON_CAP};
use avme_core::solve::{
    oracle_gave, solve_gave_picard, solve_gavme, solve_ngavme, SolutionCount, SolveOptions, DEFAULT_ORACLE_CAP,
};
use avme_core::{Matrix, Vector};
use common::Draws;

struct Outcome {
    failures: Vec<String>,
    info: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { failures: Vec::new(), info: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn close(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.check(ok, format!("{name} = {got:.6}, expected {want} ± {tol:e}"));
        if ok {
            self.info.push(format!("{name}={got:.5}"));
        }
    }

    fn verdict(&mut self, certs: &[Certificate], id: ConditionId, want: Verdict) {
        let cert = find(certs, id);
        let witnesses: Vec<String> = cert.witnesses.iter().map(|(k, v)| format!("{k}={v:.5}")).collect();
        self.check(cert.verdict == want, format!("{id} is {} ({}), expected {want}", cert.verdict, witnesses.join(" ")));
    }
}

fn find(certs: &[Certificate], id: ConditionId) -> &Certificate {
    certs.iter().find(|c| c.condition_id == id).unwrap_or_else(|| panic!("no {id} certificate"))
}

fn m<const N: usize>(rows: &[[f64; N]]) -> Matrix {
    Matrix::from_rows(rows).unwrap()
}

fn scalar(v: f64) -> Matrix {
    m(&[[v]])
}

fn rho_abs(a_inv_b: &Matrix) -> f64 {
    spectral_radius(&abs_elementwise(a_inv_b)).unwrap()
}

fn golden_pair(o: &mut Outcome) {
    let a = m(&[[5.0, -1.0], [-4.0, 4.0]]);
    let b = m(&[[-0.5, 1.0], [0.5, -2.0]]);
    let a_inv = inverse_of(&a, "A").unwrap();
    o.close("rho(|A^-1 B|)", rho_abs(&a_inv.matmul(&b)), 0.38826, 1e-4);
    o.close("rho(|A^-1||B|)", spectral_radius(&abs_elementwise(&a_inv).matmul(&abs_elementwise(&b))).unwrap(), 1.0, 1e-4);
    o.close("sigma_max(B)", sigma_max(&b).unwrap(), 2.3354, 1e-3);
    o.close("sigma_max(|B|)", sigma_max(&abs_elementwise(&b)).unwrap(), 2.3354, 1e-3);
    o.close("sigma_min(A)", sigma_min(&a).unwrap(), 2.1939, 1e-3);
    let opts = CheckOptions::default();
    o.verdict(&[check_gavme_spectral(&a, &b, &opts)], ConditionId::Spectral, Verdict::Certified);
    let classic = check_gavme_classic(&a, &b, &opts);
    for id in [ConditionId::ClassicI, ConditionId::ClassicII, ConditionId::ClassicIII, ConditionId::ClassicIV] {
        o.verdict(&classic, id, Verdict::NotCertified);
    }
}

fn golden_gavme(o: &mut Outcome) {
    let a = m(&[[2.0, -4.0, 0.0], [0.0, 1.2, 1.1], [-2.0, 0.8, 0.0]]);
    let b = m(&[[1.0, -1.0, 0.0], [0.0, 1.0, 1.0], [-1.0, 0.0, 0.0]]);
    let f = m(&[[-5.5, 9.0, 1.0], [0.8, 3.8, 1.8], [3.4, -4.6, -5.2]]);
    let x = m(&[[-3.0, 1.0, 2.0], [0.5, -2.0, 1.0], [-3.0, 2.0, -4.0]]);
    let a_inv_b = inverse_of(&a, "A").unwrap().matmul(&b);
    o.close("rho(|A^-1 B|)", rho_abs(&a_inv_b), 0.9091, 1e-4);
    o.close("sigma_max(A^-1 B)", sigma_max(&a_inv_b).unwrap(), 1.0885, 1e-3);
    o.close("sigma_max(|B|)", sigma_max(&abs_elementwise(&b)).unwrap(), 1.8019, 1e-3);
    o.close("sigma_max(B)", sigma_max(&b).unwrap(), 1.8019, 1e-3);
    o.close("sigma_min(A)", sigma_min(&a).unwrap(), 0.9038, 1e-3);
    let inst = GavmeInstance::new(a, b, Some(f)).unwrap();
    match solve_gavme(&inst, &SolveOptions::default()) {
        Ok(r) => {
            let err = r.solution.sub(&x).max_abs();
            o.check(err <= 1e-8, format!("solution off by {err:e}"));
            o.check(r.final_residual <= 1e-8, format!("residual {:e}", r.final_residual));
        }
        Err(e) => o.check(false, format!("solve failed: {e}")),
    }
    for (j, col) in gavme_columns(&inst).unwrap().iter().enumerate() {
        let count = oracle_gave(col, DEFAULT_ORACLE_CAP).unwrap().solution_count;
        o.check(count == SolutionCount::Finite(1), format!("column {} oracle count {count}", j + 1));
    }
}

fn golden_ngavme(o: &mut Outcome) {
    let a = m(&[[-5.0, 2.0, 8.0], [1.0, 2.0, 3.0], [7.0, -5.0, 0.0]]);
    let b = m(&[[1.0, 2.0, 0.0], [0.0, 1.0, -1.0], [-1.0, 2.0, 0.0]]);
    let c = m(&[[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]);
    let f = m(&[[14.0, -7.0, 19.0], [12.0, 4.0, 3.0], [1.0, 39.0, -12.0]]);
    let x = m(&[[2.0, 5.0, -1.0], [3.0, -2.0, 1.0], [1.0, 1.0, 1.0]]);
    let c_a_inv_b = c.matmul(&inverse_of(&a, "A").unwrap()).matmul(&b);
    o.close("sigma_max(C A^-1 B)", sigma_max(&c_a_inv_b).unwrap(), 0.90873, 1e-3);
    o.close("rho(|C A^-1 B|)", rho_abs(&c_a_inv_b), 0.70285, 1e-3);
    let b_inv_a_c_inv = inverse_of(&b, "B").unwrap().matmul(&a).matmul(&inverse_of(&c, "C").unwrap());
    o.close("sigma_min(B^-1 A C^-1)", sigma_min(&b_inv_a_c_inv).unwrap(), 1.1004, 1e-3);
    let inst = NgavmeInstance::new(a, b, c, Some(f)).unwrap();
    match solve_ngavme(&inst, &SolveOptions::default()) {
        Ok(r) => {
            let err = r.solution.sub(&x).max_abs();
            o.check(err <= 1e-8, format!("solution off by {err:e}"));
            let res = inst.residual(&r.solution).unwrap();
            o.check(res <= 1e-8, format!("residual {res:e}"));
        }
        Err(e) => o.check(false, format!("solve failed: {e}")),
    }
}

fn scalar_counterexample(o: &mut Outcome) {
    let (a, b, k, l) = (scalar(1.0), scalar(2.0), scalar(1.0), scalar(1.0));
    let opts = CheckOptions::default();
    let flawed = check_sylvester_min_flawed(&a, &b, &k, &l, &opts);
    o.check(flawed.verdict == Verdict::UnsoundConditionHolds, format!("flawed verdict {}", flawed.verdict));
    o.check(flawed.witness("product") == Some(2.0), format!("flawed product {:?}", flawed.witness("product")));
    let corrected = check_sylvester_min_corrected(&a, &b, &k, &l, &opts);
    o.check(corrected.verdict == Verdict::NotCertified, format!("corrected verdict {}", corrected.verdict));
    o.check(corrected.witness("product") == Some(0.5), format!("corrected product {:?}", corrected.witness("product")));

    let lifted = |f: f64| {
        let syl = SylvesterInstance::new(a.clone(), b.clone(), k.clone(), l.clone(), Some(scalar(f))).unwrap();
        oracle_gave(&lift_sylvester(&syl, DEFAULT_KRON_CAP).unwrap(), DEFAULT_ORACLE_CAP).unwrap()
    };
    let plus = lifted(1.0);
    o.check(plus.solution_count == SolutionCount::Finite(2), format!("f=1 count {}", plus.solution_count));
    let mut xs: Vec<f64> = plus.solutions.iter().map(|x| x.as_slice()[0]).collect();
    xs.sort_by(f64::total_cmp);
    let expected = [-1.0, 1.0 / 3.0];
    o.check(
        xs.len() == 2 && xs.iter().zip(expected).all(|(x, e)| (x - e).abs() <= 1e-12),
        format!("f=1 solutions {xs:?}"),
    );
    let minus = lifted(-1.0);
    o.check(minus.solution_count == SolutionCount::Finite(0), format!("f=-1 count {}", minus.solution_count));
    o.info.push(format!("f=1: {}; f=-1: {}", plus.census(), minus.census()));
}

fn dominance_suite(o: &mut Outcome) {
    let mut draws = Draws::new(0xd0);
    let opts = CheckOptions::default();
    let (mut pairs, mut bound_violations, mut implication_violations, mut classic_certified) = (0, 0, 0, 0);
    while pairs < 1000 {
        let a = draws.matrix(3, 3);
        let Ok(a_inv) = inverse_of(&a, "A") else { continue };
        // spread ρ(|A⁻¹B|) across both sides of 1
        let b = draws.matrix(3, 3).scale(0.05 + 2.0 * (draws.next_f64() + 1.0) / 2.0);
        pairs += 1;
        let rho = rho_abs(&a_inv.matmul(&b));
        let rho_iii = spectral_radius(&abs_elementwise(&a_inv).matmul(&abs_elementwise(&b))).unwrap();
        if rho > rho_iii + 1e-9 {
            bound_violations += 1;
        }
        let spectral = check_gavme_spectral(&a, &b, &opts);
        let classic = check_gavme_classic(&a, &b, &opts);
        if find(&classic, ConditionId::ClassicIII).is_certified() {
            classic_certified += 1;
            if !spectral.is_certified() {
                implication_violations += 1;
            }
        }
    }
    o.check(bound_violations == 0, format!("{bound_violations} dominance violations"));
    o.check(implication_violations == 0, format!("{implication_violations} CLASSIC_III => SPECTRAL violations"));
    o.info.push(format!("{pairs} pairs, CLASSIC_III certified on {classic_certified}"));
}

fn picard_matches(inst: &GaveInstance, exact: &Vector) -> bool {
    match solve_gave_picard(inst, &SolveOptions::default()) {
        Ok(r) => r.converged && r.solution.col(0).sub(exact).norm_inf() <= 1e-8,
        Err(_) => false,
    }
}

fn gave_of(spec: &GenSpec) -> GaveInstance {
    match gen_instance(spec).unwrap().instance {
        Instance::Gave(g) => g,
        _ => unreachable!(),
    }
}

fn oracle_soundness(o: &mut Outcome) {
    let base = GenSpec { target_rho: Some(0.9), ..GenSpec::new(3, InstanceKind::Gave, 0x0_5a1e) };
    let mut bad = 0;
    for t in 0..500u64 {
        let spec = GenSpec { n: 1 + (t % 3) as usize, ..base.for_trial(t) };
        let inst = gave_of(&spec);
        let report = oracle_gave(&inst, DEFAULT_ORACLE_CAP).unwrap();
        let ok = match report.unique_solution() {
            Some(x) => picard_matches(&inst, x),
            None => false,
        };
        if !ok {
            bad += 1;
            if bad == 1 {
                o.failures.push(format!("trial {t}: oracle {}", report.census()));
            }
        }
    }
    o.check(bad == 0, format!("{bad} of 500 rho=0.9 instances failed"));

    let base = GenSpec { target_rho: Some(1.5), ..base };
    let mut witnesses = 0;
    for t in 0..100u64 {
        let spec = GenSpec { n: 1 + (t % 3) as usize, ..base.for_trial(t) };
        let inst = gave_of(&spec);
        let report = oracle_gave(&inst, DEFAULT_ORACLE_CAP).unwrap();
        let regular = match report.unique_solution() {
            Some(x) => picard_matches(&inst, x),
            None => false,
        };
        if !regular {
            witnesses += 1;
        }
    }
    o.check(witnesses >= 1, "no regime-violation witness among 100 rho=1.5 instances");
    o.info.push(format!("{witnesses}/100 rho=1.5 witnesses"));
}

fn combinatorial_consistency(o: &mut Outcome) {
    let mut draws = Draws::new(0xc0b);
    let opts = CheckOptions::default();
    let (mut contradictions, mut certified_pairs) = (0, 0);
    for _ in 0..100 {
        // a random diagonal shift makes some pairs dominant and some not
        let shift = 3.0 * (draws.next_f64() + 1.0) / 2.0;
        let a = draws.matrix(2, 2).add(&Matrix::identity(2).scale(shift));
        let b = draws.matrix(2, 2);
        let mut certs = check_gavme_w_conditions(&a, &b, 2, &opts).unwrap();
        certs.extend(check_gavme_dd_conditions(&a, &b, 2, &opts).unwrap());
        let who: Vec<&str> = certs.iter().filter(|c| c.is_certified()).map(|c| c.condition_id.as_str()).collect();
        if who.is_empty() {
            continue;
        }
        certified_pairs += 1;
        for _ in 0..10 {
            let f = draws.matrix(2, 2).scale(5.0);
            let lifted = lift_gavme(&GavmeInstance::new(a.clone(), b.clone(), Some(f)).unwrap()).unwrap();
            let count = oracle_gave(&lifted, DEFAULT_ORACLE_CAP).unwrap().solution_count;
            if count != SolutionCount::Finite(1) {
                contradictions += 1;
                if contradictions == 1 {
                    o.failures.push(format!("{who:?} certified but oracle count {count}"));
                }
            }
        }
    }
    o.check(contradictions == 0, format!("{contradictions} contradictions"));
    o.check(certified_pairs > 0, "no pair was certified, the check is vacuous");
    o.info.push(format!("{certified_pairs}/100 pairs certified"));
}

fn reduction_identities(o: &mut Outcome) {
    let mut draws = Draws::new(0x1d);
    let opts = CheckOptions::default();
    use ConditionId::*;
    let pairs = [
        (NgavmeI, ClassicI),
        (NgavmeII, ClassicII),
        (NgavmeIII, ClassicIII),
        (NgavmeIV, ClassicIV),
        (NgavmeRho, Spectral),
        (IntervalSpectral, IntervalSpectral),
        (NgavmeWI, GavmeWI),
        (NgavmeWII, GavmeWII),
        (NgavmeWIII, GavmeWIII),
        (NgavmeWIV, GavmeWIV),
        (NgavmeDdI, GavmeDdI),
        (NgavmeDdII, GavmeDdII),
    ];
    let mut compared = 0;
    for t in 0..50 {
        let n = 1 + t % 3;
        let a = draws.matrix(n, n).add(&Matrix::identity(n).scale(1.5 * (t % 2) as f64));
        let b = draws.matrix(n, n).scale(0.8);
        let eye = Matrix::identity(n);
        let ng = check_instance(&Instance::Ngavme(NgavmeInstance::new(a.clone(), b.clone(), eye.clone(), None).unwrap()), &opts);
        let gv = check_instance(&Instance::Gavme(GavmeInstance::new(a.clone(), b.clone(), None).unwrap()), &opts);
        for (n_id, g_id) in pairs {
            let (x, y) = (find(&ng, n_id), find(&gv, g_id));
            compared += 1;
            o.check(x.verdict == y.verdict, format!("trial {t}: {n_id} {} vs {g_id} {}", x.verdict, y.verdict));
            let xs: Vec<f64> = x.witnesses.values().copied().collect();
            let ys: Vec<f64> = y.witnesses.values().copied().collect();
            let same = xs.len() == ys.len() && xs.iter().zip(&ys).all(|(p, q)| (p - q).abs() <= 1e-12 * (1.0 + q.abs()));
            o.check(same, format!("trial {t}: {n_id} witnesses {xs:?} vs {g_id} {ys:?}"));
        }
        if let Ok(a_inv) = inverse_of(&a, "A") {
            let cert = check_sylvester_max(&a, &b, &eye, &eye, &opts);
            let expected = sigma_max(&a_inv.matmul(&b)).unwrap();
            let got = cert.witness("product").unwrap_or(f64::NAN);
            o.check((got - expected).abs() <= 1e-12 * (1.0 + expected), format!("trial {t}: Sylvester max {got} vs {expected}"));
        }
    }
    o.info.push(format!("{compared} certificate pairs compared"));
}

struct Criterion {
    name: &'static str,
    limit: Option<Duration>,
    run: fn(&mut Outcome),
}

fn main() -> ExitCode {
    let ms = Duration::from_millis;
    let criteria = [
        Criterion { name: "golden 2x2", limit: Some(ms(100)), run: golden_pair },
        Criterion { name: "golden 3x3 GAVME", limit: Some(ms(500)), run: golden_gavme },
        Criterion { name: "golden 3x3 NGAVME", limit: Some(ms(500)), run: golden_ngavme },
        Criterion { name: "scalar counterexample", limit: None, run: scalar_counterexample },
        Criterion { name: "dominance suite", limit: Some(ms(10_000)), run: dominance_suite },
        Criterion { name: "oracle soundness", limit: Some(ms(30_000)), run: oracle_soundness },
        Criterion { name: "combinatorial consistency", limit: Some(ms(30_000)), run: combinatorial_consistency },
        Criterion { name: "reduction identities", limit: None, run: reduction_identities },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let mut o = Outcome::new();
        let start = Instant::now();
        (c.run)(&mut o);
        let elapsed = start.elapsed();
        if let Some(limit) = c.limit {
            o.check(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"));
        }
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        let detail = if o.failures.is_empty() { o.info.join(", ") } else { o.failures.join("; ") };
        println!("{status} {} {} ({:.1} ms): {detail}", i + 1, c.name, elapsed.as_secs_f64() * 1e3);
        if !o.failures.is_empty() {
            failed += 1;
        }
    }
    println!("{}/{} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
