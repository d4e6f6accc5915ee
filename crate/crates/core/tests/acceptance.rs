//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Deserialize;

use defect_charges::defects::{
    conservation_with_defect, defect_charges, defect_sum_rule_gt, defect_table, eliminate_boundary, DefectTable,
};
use defect_charges::models::{check_defect_gauge, check_zero_curvature, inject_fault, Fault};
use defect_charges::numsim::{run, FarBoundary, InitialCondition, LatticeConfig, SimModel};
use defect_charges::riccati::{
    check_sum_rule_gt, combine_charges, conserved_density, solve_riccati, Branch, DensityTable, RiccatiSolution,
};
use defect_charges::sampling::{self, euler_error, fill, GENERATORS};
use defect_charges::symexpr::calculus::ibp_normal;
use defect_charges::symexpr::{eval, Assignment};
use defect_charges::{build_model, ModelName, ModelSpec, ParamValues, SymExpr};

const GOLDEN: &str = include_str!("fixtures/golden.json");

#[derive(Deserialize)]
struct GammaRow {
    model: ModelName,
    column: usize,
    branch: Branch,
    row: usize,
    order: i32,
    expr: String,
}

#[derive(Deserialize)]
struct AuxRow {
    model: ModelName,
    column: usize,
    branch: Branch,
    symbol: String,
    dx: String,
}

#[derive(Deserialize)]
struct DensityRow {
    model: ModelName,
    column: usize,
    branch: Branch,
    order: i32,
    expr: String,
    mod_td: bool,
}

#[derive(Deserialize)]
struct ChargeRow {
    model: ModelName,
    name: String,
    expr: String,
    mod_td: bool,
}

#[derive(Deserialize)]
struct DefectRow {
    model: ModelName,
    column: usize,
    branch: Branch,
    order: i32,
    expr: String,
}

#[derive(Deserialize)]
struct DefectChargeRow {
    model: ModelName,
    name: String,
    x_form: String,
    eliminated: Option<String>,
}

#[derive(Deserialize)]
struct Golden {
    gamma: Vec<GammaRow>,
    aux: Vec<AuxRow>,
    densities: Vec<DensityRow>,
    charges: Vec<ChargeRow>,
    defects: Vec<DefectRow>,
    defect_charges: Vec<DefectChargeRow>,
}

/// Everything derived once and shared by the criteria.
struct Derived {
    models: BTreeMap<ModelName, ModelSpec>,
    sols: BTreeMap<(ModelName, usize, Branch), RiccatiSolution>,
    densities: BTreeMap<ModelName, DensityTable>,
    defects: BTreeMap<ModelName, DefectTable>,
}

impl Derived {
    fn model(&self, n: ModelName) -> &ModelSpec {
        &self.models[&n]
    }

    fn parse(&self, n: ModelName, s: &str) -> SymExpr {
        self.model(n).parse(s).unwrap_or_else(|e| panic!("golden `{}`: {}", s, e))
    }

    fn charge(&self, n: ModelName, name: &str) -> SymExpr {
        let t = &self.densities[&n];
        let c = combine_charges(n, &|j, b, k| t.get(&(j, b, k)).map(|d| d.density.clone())).unwrap();
        pick(c, name)
    }

    fn defect_charge(&self, n: ModelName, name: &str) -> SymExpr {
        let c = defect_charges(self.model(n), &self.defects[&n]).unwrap();
        pick(c, name.trim_end_matches("_D"))
    }
}

fn pick(c: defect_charges::riccati::Charges, name: &str) -> SymExpr {
    match name {
        "N" => c.n.expect("number charge"),
        "E" => c.e,
        "P" => c.p,
        _ => panic!("unknown charge {}", name),
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn first_failure(fails: &[String], total: usize, what: &str) -> Outcome {
    match fails.first() {
        None => outcome(true, format!("{} {} match", total, what)),
        Some(f) => outcome(false, format!("{} of {} {} differ; first: {}", fails.len(), total, what, f)),
    }
}

fn criterion_1(g: &Golden, d: &Derived, elapsed: Duration) -> Outcome {
    let mut fails = Vec::new();
    for r in &g.gamma {
        let want = d.parse(r.model, &r.expr);
        let sol = &d.sols[&(r.model, r.column, r.branch)];
        let got = sol.coeff(r.row, r.order).cloned().unwrap_or_else(SymExpr::zero);
        if got != want {
            fails.push(format!("{} G{}{}^({}) [{}]: {}", r.model, r.row, r.column, r.order, r.branch, got));
        }
    }
    for r in &g.aux {
        let want = d.parse(r.model, &r.dx);
        let sol = &d.sols[&(r.model, r.column, r.branch)];
        match sol.aux.iter().find(|a| a.name() == r.symbol) {
            Some(a) if a.dx_rule == want => {}
            Some(a) => fails.push(format!("d_x {}: {}", r.symbol, a.dx_rule)),
            None => fails.push(format!("no symbol {}", r.symbol)),
        }
    }
    let mut o = first_failure(&fails, g.gamma.len() + g.aux.len(), "coefficients and aux rules");
    o.detail = format!("{}, derivation {:.2} s", o.detail, elapsed.as_secs_f64());
    o.passed &= elapsed < Duration::from_secs(10);
    o
}

fn criterion_2(d: &Derived) -> Outcome {
    let t = Instant::now();
    let mut fails = Vec::new();
    for m in d.models.values() {
        if let Err(e) = check_zero_curvature(m) {
            fails.push(e.to_string());
        }
        if let Err(e) = check_defect_gauge(m) {
            fails.push(e.to_string());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let mut o = first_failure(&fails, 2 * d.models.len(), "residual sets (all zero)");
    o.detail = format!("{}, {:.2} s", o.detail, secs);
    o.passed &= secs < 10.0;
    o
}

fn same(got: &SymExpr, want: &SymExpr, mod_td: bool) -> bool {
    if mod_td {
        ibp_normal(got) == ibp_normal(want)
    } else {
        got == want
    }
}

fn criterion_3(g: &Golden, d: &Derived) -> Outcome {
    let mut fails = Vec::new();
    for r in &g.densities {
        let want = d.parse(r.model, &r.expr);
        let got = &d.densities[&r.model][&(r.column, r.branch, r.order)].density;
        if !same(got, &want, r.mod_td) {
            fails.push(format!("{} I{}^({}) [{}]: {}", r.model, r.column, r.order, r.branch, got));
        }
    }
    for r in &g.charges {
        let want = d.parse(r.model, &r.expr);
        let got = d.charge(r.model, &r.name);
        if !same(&got, &want, r.mod_td) {
            fails.push(format!("{} {}: {}", r.model, r.name, ibp_normal(&got)));
        }
    }
    first_failure(&fails, g.densities.len() + g.charges.len(), "densities and charges")
}

fn criterion_4(g: &Golden, d: &Derived) -> Outcome {
    let mut fails = Vec::new();
    for r in &g.defects {
        let want = d.parse(r.model, &r.expr);
        let got = &d.defects[&r.model][&(r.column, r.branch, r.order)];
        if *got != want {
            fails.push(format!("{} D{}^({}) [{}]: {}", r.model, r.column, r.order, r.branch, got));
        }
    }
    let mut n = g.defects.len();
    for r in &g.defect_charges {
        let got = d.defect_charge(r.model, &r.name);
        if got != d.parse(r.model, &r.x_form) {
            fails.push(format!("{} {}: {}", r.model, r.name, got));
        }
        n += 1;
        if let Some(e) = &r.eliminated {
            let el = eliminate_boundary(d.model(r.model), &got).unwrap();
            if el != d.parse(r.model, e) {
                fails.push(format!("{} {} eliminated: {}", r.model, r.name, el));
            }
            n += 1;
        }
    }
    first_failure(&fails, n, "defect terms and closed forms")
}

fn criterion_5(d: &Derived) -> Outcome {
    let bulk = check_sum_rule_gt(&d.densities[&ModelName::Gt]);
    let defect = defect_sum_rule_gt(&d.defects[&ModelName::Gt]);
    let mut checked = 0;
    let mut fails = Vec::new();
    for r in bulk.iter().chain(&defect) {
        if r.order == 0 || r.order == 2 {
            checked += 1;
            if !r.holds {
                fails.push(format!("order {} [{}]: {}", r.order, r.branch, r.discrepancy));
            }
        }
    }
    let ok = checked == 8 && fails.is_empty();
    let mut o = first_failure(&fails, checked, "sum rules (I and D, orders 0 and 2, both branches)");
    o.passed = ok;
    o
}

/// Every Grassmannian identity of criteria 1 to 5 evaluated at random points.
fn criterion_6(g: &Golden, d: &Derived) -> Outcome {
    const SAMPLES: usize = 100;
    let gt = ModelName::Gt;
    let m = d.model(gt);
    let mut rng = StdRng::seed_from_u64(2024);
    let sweep = match sampling::sweep(m, SAMPLES, &mut rng) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut worst = sweep.errors.clone();

    let mut pairs: Vec<(&str, SymExpr, SymExpr, bool)> = Vec::new();
    for r in g.gamma.iter().filter(|r| r.model == gt) {
        let got = d.sols[&(gt, r.column, r.branch)].coeff(r.row, r.order).cloned().unwrap_or_else(SymExpr::zero);
        pairs.push(("golden_gamma", got, d.parse(gt, &r.expr), false));
    }
    for r in g.aux.iter().filter(|r| r.model == gt) {
        let sol = &d.sols[&(gt, r.column, r.branch)];
        let a = sol.aux.iter().find(|a| a.name() == r.symbol).expect("aux symbol");
        pairs.push(("golden_aux", a.dx_rule.clone(), d.parse(gt, &r.dx), false));
    }
    for r in g.densities.iter().filter(|r| r.model == gt) {
        let got = d.densities[&gt][&(r.column, r.branch, r.order)].density.clone();
        pairs.push(("golden_density", got, d.parse(gt, &r.expr), r.mod_td));
    }
    for r in g.charges.iter().filter(|r| r.model == gt) {
        pairs.push(("golden_charge", d.charge(gt, &r.name), d.parse(gt, &r.expr), r.mod_td));
    }
    for r in g.defects.iter().filter(|r| r.model == gt) {
        let got = d.defects[&gt][&(r.column, r.branch, r.order)].clone();
        pairs.push(("golden_defect", got, d.parse(gt, &r.expr), false));
    }
    for r in g.defect_charges.iter().filter(|r| r.model == gt) {
        let got = d.defect_charge(gt, &r.name);
        if let Some(e) = &r.eliminated {
            let el = eliminate_boundary(m, &got).unwrap();
            pairs.push(("golden_defect_charge", el, d.parse(gt, e), false));
        }
        pairs.push(("golden_defect_charge", got, d.parse(gt, &r.x_form), false));
    }

    for _ in 0..SAMPLES {
        let mut asg = Assignment::random(GENERATORS, [], m.params, &mut rng);
        for (label, got, want, mod_td) in &pairs {
            let e = if *mod_td {
                euler_error(got, want, &mut asg, &mut rng)
            } else {
                fill(&mut asg, [got, want], &mut rng);
                eval(got, &asg).and_then(|a| eval(want, &asg).map(|b| sampling::distance(&a, &b)))
            };
            let e = match e {
                Ok(e) => e,
                Err(err) => return outcome(false, format!("{}: {}", label, err)),
            };
            let slot = worst.entry(label.to_string()).or_insert(0.0);
            if e.is_nan() || e > *slot {
                *slot = e;
            }
        }
    }
    let max = worst.values().fold(0.0f64, |a, &b| if b.is_nan() { f64::NAN } else { a.max(b) });
    let ok = max < sampling::TOLERANCE;
    let names = worst.keys().cloned().collect::<Vec<_>>().join(", ");
    outcome(
        ok,
        format!(
            "{} assignments, N = {}, {} identity groups ({}), max error {:.2e}",
            SAMPLES,
            GENERATORS,
            worst.len(),
            names,
            max
        ),
    )
}

fn criterion_7(d: &Derived) -> Outcome {
    let cases: [(ModelName, &[usize], &[i32]); 3] =
        [(ModelName::Sg, &[1, 2], &[1]), (ModelName::Bt, &[1, 2], &[2]), (ModelName::Gt, &[1, 2, 3], &[0, 2])];
    let mut fails = Vec::new();
    let mut n = 0;
    for (name, cols, orders) in cases {
        for &j in cols {
            for b in Branch::BOTH {
                for &k in orders {
                    n += 1;
                    match conservation_with_defect(d.model(name), j, b, k) {
                        Ok(r) if r.is_zero() => {}
                        Ok(r) => fails.push(format!("{} j={} [{}] order {}: {}", name, j, b, k, r)),
                        Err(e) => fails.push(format!("{} j={} [{}] order {}: {}", name, j, b, k, e)),
                    }
                }
            }
        }
    }
    first_failure(&fails, n, "modified conservation identities (residual exactly zero)")
}

fn sg_config(n: usize, sigma: f64) -> LatticeConfig {
    LatticeConfig {
        model: SimModel::Sg,
        length: 40.0,
        n,
        dt: None,
        t_end: 40.0,
        measure_every: 8,
        params: ParamValues { sigma, ..ParamValues::default() },
        defect: true,
        potential: true,
        far_boundary: FarBoundary::Absorbing,
        initial_condition: InitialCondition::SgKink { v: 0.5, x0: -10.0 },
    }
}

fn bt_config(n: usize) -> LatticeConfig {
    LatticeConfig {
        model: SimModel::Bt,
        t_end: 20.0,
        initial_condition: InitialCondition::BtPulse { amplitude: 0.3, width: 4.0, x0: -8.0, wavenumber: 2.0 },
        ..sg_config(n, 1.0)
    }
}

struct Numerics {
    /// `(sigma, n) -> (E_tot, P_tot, E_bulk drift, seconds)`
    sg: BTreeMap<(u32, usize), (f64, f64, f64, f64)>,
    /// `(N_tot, E_tot, P_tot, N_bulk drift, seconds)`
    bt: (f64, f64, f64, f64, f64),
}

fn numerics() -> defect_charges::Result<Numerics> {
    let mut sg = BTreeMap::new();
    for sigma in [0.5, 1.0, 2.0] {
        for n in [256, 512, 1024] {
            let t = Instant::now();
            let d = run(&sg_config(n, sigma))?.drift();
            sg.insert(((sigma * 100.0) as u32, n), (d.e_total, d.p_total, d.e_bulk, t.elapsed().as_secs_f64()));
        }
    }
    let t = Instant::now();
    let r = run(&bt_config(1024))?;
    let d = r.drift();
    Ok(Numerics { sg, bt: (d.n_total, d.e_total, d.p_total, d.n_bulk, t.elapsed().as_secs_f64()) })
}

fn criterion_8(num: &Numerics) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut slowest: f64 = 0.0;
    for s in [50, 100, 200] {
        let (e, p, bulk, _) = num.sg[&(s, 1024)];
        let pass = e < 1e-4 && p < 1e-4 && bulk >= 100.0 * e;
        let mut slopes = Vec::new();
        for (label, pick) in [("E", 0usize), ("P", 1usize)] {
            let v = |n| {
                let r = num.sg[&(s, n)];
                [r.0, r.1][pick]
            };
            let finest = (v(512) / v(1024)).log2();
            let x = [256f64.ln(), 512f64.ln(), 1024f64.ln()];
            let y = [v(256).ln(), v(512).ln(), v(1024).ln()];
            let (xm, ym) = (x.iter().sum::<f64>() / 3.0, y.iter().sum::<f64>() / 3.0);
            let fit = -x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum::<f64>()
                / x.iter().map(|a| (a - xm) * (a - xm)).sum::<f64>();
            ok &= (3.5..=4.5).contains(&finest);
            slopes.push(format!("{} slope {:.2} (fit {:.2})", label, finest, fit));
        }
        ok &= pass;
        parts.push(format!(
            "sigma={}: E {:.1e} P {:.1e} E_bulk {:.1e}, {}",
            s as f64 / 100.0,
            e,
            p,
            bulk,
            slopes.join(", ")
        ));
    }
    for &(_, _, _, t) in num.sg.values() {
        slowest = slowest.max(t);
    }
    let (n, e, p, nb, t) = num.bt;
    slowest = slowest.max(t);
    ok &= n < 1e-4 && e < 1e-4 && p < 1e-4 && slowest < 60.0;
    parts.push(format!("BT pulse: N {:.1e} E {:.1e} P {:.1e} (N_bulk {:.1e})", n, e, p, nb));
    parts.push(format!("slowest run {:.1} s", slowest));
    outcome(ok, parts.join("; "))
}

fn criterion_9(d: &Derived, num: &Numerics) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for m in d.models.values() {
        let bad = inject_fault(m, Fault::KSign);
        let caught = check_zero_curvature(&bad).is_ok() && check_defect_gauge(&bad).is_err();
        ok &= caught;
        parts.push(format!("{} k-sign {}", m.name, if caught { "caught" } else { "MISSED" }));
    }
    for s in [50, 100, 200] {
        let (e, _, bulk, _) = num.sg[&(s, 1024)];
        let ratio = bulk / e;
        ok &= ratio >= 100.0;
        parts.push(format!("sigma={} without E_D drift x{:.0}", s as f64 / 100.0, ratio));
    }
    let ratio = num.bt.3 / num.bt.0;
    ok &= ratio >= 100.0;
    parts.push(format!("BT without N_D drift x{:.0}", ratio));
    outcome(ok, parts.join(", "))
}

fn derive_all() -> defect_charges::Result<(Derived, Duration)> {
    let t = Instant::now();
    let mut models = BTreeMap::new();
    let mut sols = BTreeMap::new();
    let mut densities = BTreeMap::new();
    let mut defects = BTreeMap::new();
    for n in ModelName::ALL {
        let m = build_model(n, ParamValues::default())?;
        let mut table = DensityTable::new();
        for j in 1..=m.size {
            for b in Branch::BOTH {
                let sol = solve_riccati(&m, j, b, 4)?;
                for k in 0..=2 {
                    table.insert((j, b, k), conserved_density(&m, &sol, k)?);
                }
                sols.insert((n, j, b), sol);
            }
        }
        densities.insert(n, table);
        defects.insert(n, defect_table(&m, 2)?);
        models.insert(n, m);
    }
    Ok((Derived { models, sols, densities, defects }, t.elapsed()))
}

fn main() {
    let golden: Golden = serde_json::from_str(GOLDEN).expect("golden fixture");
    let (derived, elapsed) = derive_all().expect("derivation");
    let num = numerics().expect("simulation");

    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "Riccati coefficients", criterion_1(&golden, &derived, elapsed)),
        (2, "zero curvature and defect gauge", criterion_2(&derived)),
        (3, "densities and charges", criterion_3(&golden, &derived)),
        (4, "defect contributions", criterion_4(&golden, &derived)),
        (5, "Grassmannian sum rules", criterion_5(&derived)),
        (6, "Grassmann evaluation oracle", criterion_6(&golden, &derived)),
        (7, "modified conservation", criterion_7(&derived)),
        (8, "numerical conservation", criterion_8(&num)),
        (9, "negative controls", criterion_9(&derived, &num)),
    ];
    let mut failed = 0;
    for (id, name, o) in &results {
        if !o.passed {
            failed += 1;
        }
        println!("criterion {}: {} {}: {}", id, if o.passed { "PASS" } else { "FAIL" }, name, o.detail);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
