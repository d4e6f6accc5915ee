use super::*;
use crate::models::{build_model, expr};
use crate::scalar::ParamValues;
use crate::symexpr::calculus::{equal_mod_total_derivative, ibp_normal};

fn model(n: ModelName) -> ModelSpec {
    build_model(n, ParamValues::default()).unwrap()
}

fn bosonic(s: &str) -> SymExpr {
    expr(s, false)
}

fn assert_coeff(sol: &RiccatiSolution, row: usize, k: i32, want: &SymExpr) {
    let got = sol.coeff(row, k).unwrap_or_else(|| panic!("missing G{}{}^({})", row, sol.j, k));
    assert_eq!(got, want, "G{}{}^({}) [{}]: got {}, want {}", row, sol.j, k, sol.branch, got, want);
}

fn aux_dx(sol: &RiccatiSolution, name: &str) -> SymExpr {
    sol.aux.iter().find(|a| a.name() == name).unwrap_or_else(|| panic!("no aux symbol {}", name)).dx_rule.clone()
}

const RG: &str = "g^(1/2)*m^(-1/2)";

#[test]
fn bt_gamma_lists() {
    let m = model(ModelName::Bt);
    let cases: [(usize, Branch, usize, [String; 3]); 4] = [
        (
            1,
            Branch::Infinity,
            2,
            [format!("{RG}*phi1'"), "0".into(), format!("{RG}*(-2*i*m^-1*phi1'_x + phi2' + g*m^-1*phi2'*phi2*phi1')")],
        ),
        (
            1,
            Branch::Zero,
            2,
            [format!("-{RG}*phi2'"), "0".into(), format!("{RG}*(-2*i*m^-1*phi2'_x - phi1' - g*m^-1*phi1'*phi1*phi2')")],
        ),
        (
            2,
            Branch::Infinity,
            1,
            [format!("{RG}*phi1"), "0".into(), format!("{RG}*(2*i*m^-1*phi1_x + phi2 + g*m^-1*phi2'*phi2*phi1)")],
        ),
        (
            2,
            Branch::Zero,
            1,
            [format!("-{RG}*phi2"), "0".into(), format!("{RG}*(2*i*m^-1*phi2_x - phi1 - g*m^-1*phi1'*phi1*phi2)")],
        ),
    ];
    for (j, b, row, want) in cases {
        let sol = solve_riccati(&m, j, b, 4).unwrap();
        assert!(sol.aux.is_empty());
        for (k, w) in want.iter().enumerate() {
            assert_coeff(&sol, row, k as i32 + 1, &bosonic(w));
        }
    }
}

#[test]
fn sg_gamma_lists() {
    let m = model(ModelName::Sg);
    let sin = "(-1/2*i*(exp(i*phi) - exp(-i*phi)))";
    // (j, branch, row, half-angle sign, light-cone sign, derivative sign, sine sign)
    let cases = [
        (1, Branch::Infinity, 2, "-", "+", "-", "+"),
        (1, Branch::Zero, 2, "", "-", "-", "-"),
        (2, Branch::Infinity, 1, "", "+", "", "-"),
        (2, Branch::Zero, 1, "-", "-", "", "+"),
    ];
    for (j, b, row, ph, lc, dsign, sign) in cases {
        let sol = solve_riccati(&m, j, b, 4).unwrap();
        let e = format!("exp({ph}1/2*i*phi)");
        let w = format!("(phit {lc} phi_x)");
        let wx = format!("(phit_x {lc} phi_xx)");
        let pre1 = if b == Branch::Infinity { "-" } else { "" };
        assert_coeff(&sol, row, 0, &bosonic(&format!("i*{e}")));
        assert_coeff(&sol, row, 1, &bosonic(&format!("{pre1}i*m^-1*{w}*{e}")));
        assert_coeff(&sol, row, 2, &bosonic(&format!("{e}*({dsign}2*m^-2*{wx} + 1/2*i*m^-2*{w}^2 {sign} {sin})")));
    }
}

#[test]
fn gt_gamma_lists() {
    let m = model(ModelName::Gt);
    let gt = |s: &str| expr(s, true);
    let r = "sqrt2*g^(1/2)*m^(-1/2)";
    let s = "1/2*sqrt2*m^(1/2)*g^(1/2)";
    let rho = "(psi2'*psi2 + psi1'*psi1)";

    let sol = solve_riccati(&m, 1, Branch::Infinity, 4).unwrap();
    assert_coeff(&sol, 3, 1, &gt(&format!("{r}*psi1'")));
    assert_coeff(&sol, 3, 2, &gt(&format!("-{r}*psi1*G21_1")));
    assert_coeff(
        &sol,
        3,
        3,
        &gt(&format!("-2*i*m^-1*({r}*psi1'_x + i*{s}*(psi2' - psi1*G21_2) + 1/2*i*g*{r}*psi2'*psi2*psi1')")),
    );
    assert_eq!(aux_dx(&sol, "G21_1"), gt(&format!("-i*g*{rho}*G21_1")));
    assert_eq!(aux_dx(&sol, "G21_2"), gt(&format!("-i*g*{rho}*G21_2 + 2*g*m^-1*psi1'*psi1'_x + 2*i*g*psi1'*psi2'")));

    let sol = solve_riccati(&m, 1, Branch::Zero, 4).unwrap();
    assert_coeff(&sol, 3, 1, &gt(&format!("-{r}*psi2'")));
    assert_coeff(&sol, 3, 2, &gt(&format!("-{r}*psi2*G21h_1")));
    assert_coeff(
        &sol,
        3,
        3,
        &gt(&format!("-2*i*m^-1*({r}*psi2'_x - i*{s}*(psi1' + psi2*G21h_2) - 1/2*i*g*{r}*psi1'*psi1*psi2')")),
    );
    assert_eq!(aux_dx(&sol, "G21h_1"), gt(&format!("i*g*{rho}*G21h_1")));
    assert_eq!(aux_dx(&sol, "G21h_2"), gt(&format!("i*g*{rho}*G21h_2 - 2*g*m^-1*psi2'*psi2'_x - 2*i*g*psi1'*psi2'")));

    let sol = solve_riccati(&m, 2, Branch::Infinity, 4).unwrap();
    assert_coeff(&sol, 3, 1, &gt(&format!("-{r}*psi1")));
    assert_coeff(&sol, 3, 2, &gt(&format!("{r}*psi1'*G12_1")));
    assert_coeff(
        &sol,
        3,
        3,
        &gt(&format!("2*m^-1*(i*{r}*psi1_x + {s}*(psi2 + psi1'*G12_2) + 1/2*g*{r}*psi2'*psi2*psi1)")),
    );
    assert_eq!(aux_dx(&sol, "G12_1"), gt(&format!("i*g*{rho}*G12_1")));
    assert_eq!(aux_dx(&sol, "G12_2"), gt(&format!("i*g*{rho}*G12_2 + 2*g*m^-1*psi1*psi1_x - 2*i*g*psi1*psi2")));

    let sol = solve_riccati(&m, 2, Branch::Zero, 4).unwrap();
    assert_coeff(&sol, 3, 1, &gt(&format!("-{r}*psi2")));
    assert_coeff(&sol, 3, 2, &gt(&format!("-{r}*psi2'*G12h_1")));
    assert_coeff(
        &sol,
        3,
        3,
        &gt(&format!("2*m^-1*(-i*{r}*psi2_x + {s}*(psi1 - psi2'*G12h_2) + 1/2*g*{r}*psi1'*psi1*psi2)")),
    );
    assert_eq!(aux_dx(&sol, "G12h_1"), gt(&format!("-i*g*{rho}*G12h_1")));
    assert_eq!(aux_dx(&sol, "G12h_2"), gt(&format!("-i*g*{rho}*G12h_2 - 2*g*m^-1*psi2*psi2_x + 2*i*g*psi1*psi2")));

    let sol = solve_riccati(&m, 3, Branch::Infinity, 4).unwrap();
    assert!(sol.aux.is_empty());
    assert_coeff(&sol, 1, 1, &gt(&format!("-{r}*psi1")));
    assert_coeff(&sol, 2, 1, &gt(&format!("{r}*psi1'")));
    assert_coeff(&sol, 1, 2, &SymExpr::zero());
    assert_coeff(&sol, 2, 2, &SymExpr::zero());
    assert_coeff(&sol, 1, 3, &gt(&format!("2*m^-1*(-i*{r}*psi1_x - {s}*psi2 - 1/2*g*{r}*psi2'*psi2*psi1)")));
    assert_coeff(&sol, 2, 3, &gt(&format!("2*m^-1*(i*{r}*psi1'_x - {s}*psi2' - 1/2*g*{r}*psi2'*psi2*psi1')")));

    let sol = solve_riccati(&m, 3, Branch::Zero, 4).unwrap();
    assert_coeff(&sol, 1, 1, &gt(&format!("{r}*psi2")));
    assert_coeff(&sol, 2, 1, &gt(&format!("{r}*psi2'")));
    assert_coeff(&sol, 1, 2, &SymExpr::zero());
    assert_coeff(&sol, 2, 2, &SymExpr::zero());
    assert_coeff(&sol, 1, 3, &gt(&format!("2*m^-1*(-i*{r}*psi2_x + {s}*psi1 + 1/2*g*{r}*psi1'*psi1*psi2)")));
    assert_coeff(&sol, 2, 3, &gt(&format!("2*m^-1*(-i*{r}*psi2'_x - {s}*psi1' - 1/2*g*{r}*psi1'*psi1*psi2')")));
}

/// Forward substitution of a truncated series into the x-equation of
/// `Gamma_21`, one power of `lambda` at a time.
fn bt_gamma21_by_substitution(m: &ModelSpec, degree: i32) -> Vec<SymExpr> {
    let u = &m.u;
    let diag = &u[1][1] - &u[0][0];
    let lead = diag.laurent_coeff(2);
    let inv = lead.invert_unit().expect("invertible leading coefficient");
    let mut c: Vec<SymExpr> = Vec::new();
    for k in 0..=degree {
        let mut g = SymExpr::zero();
        for (n, ck) in c.iter().enumerate() {
            g += &ck.times_lambda(-(n as i32));
        }
        let rhs = &(&(&u[1][0] + &(&diag * &g)) - &(&(&u[0][1] * &g) * &g)) - &d_x_free(&g);
        c.push(-&(&rhs.laurent_coeff(2 - k) * &inv));
    }
    c
}

#[test]
fn bt_fourth_order_matches_substitution() {
    let m = model(ModelName::Bt);
    let sol = solve_riccati(&m, 1, Branch::Infinity, 6).unwrap();
    let oracle = bt_gamma21_by_substitution(&m, 6);
    for k in 0..=6 {
        let got = sol.coeff(2, k).cloned().unwrap_or_else(SymExpr::zero);
        assert_eq!(got, oracle[k as usize], "order {}", k);
    }
    for (k, golden) in [
        (4, include_str!("../../tests/fixtures/bt_gamma21_order4.txt")),
        (5, include_str!("../../tests/fixtures/bt_gamma21_order5.txt")),
    ] {
        assert_eq!(sol.coeff(2, k).unwrap(), &bosonic(golden.trim()), "order {}", k);
    }
}

#[test]
fn truncated_series_satisfies_both_equations() {
    for n in ModelName::ALL {
        let m = model(n);
        for j in 1..=m.size {
            for b in Branch::BOTH {
                let sol = solve_riccati(&m, j, b, 4).unwrap();
                for upto in 1..=4 {
                    for (eq, row, p, r) in series_residuals(&m, &sol, upto).unwrap() {
                        assert!(
                            r.is_zero(),
                            "{} j={} {} upto {}: {}-equation row {} at power {}: {}",
                            n,
                            j,
                            b,
                            upto,
                            eq,
                            row,
                            p,
                            r
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn aux_rules_have_matching_parity() {
    let m = model(ModelName::Gt);
    for j in 1..=2 {
        for b in Branch::BOTH {
            let sol = solve_riccati(&m, j, b, 4).unwrap();
            assert!(!sol.aux.is_empty());
            for a in &sol.aux {
                assert_eq!(a.dx_rule.parity_odd(), Some(a.atom.is_odd()));
                assert!(a.dt_rule.is_some());
            }
        }
    }
}

#[test]
fn order_zero_is_rejected() {
    let m = model(ModelName::Bt);
    assert!(solve_riccati(&m, 1, Branch::Infinity, 0).is_err());
    assert!(solve_riccati(&m, 3, Branch::Infinity, 2).is_err());
}

fn density_table(m: &ModelSpec) -> DensityTable {
    let mut table = DensityTable::new();
    for j in 1..=m.size {
        for b in Branch::BOTH {
            let sol = solve_riccati(m, j, b, 4).unwrap();
            for k in 0..=2 {
                let cd = conserved_density(m, &sol, k).unwrap();
                table.insert((j, b, k), cd);
            }
        }
    }
    table
}

fn density(t: &DensityTable, j: usize, b: Branch, k: i32) -> SymExpr {
    t[&(j, b, k)].density.clone()
}

#[test]
fn printed_densities() {
    let bt = model(ModelName::Bt);
    let t = density_table(&bt);
    assert_eq!(density(&t, 1, Branch::Infinity, 0), bosonic("1/4*i*g*(phi1'*phi1 + phi2'*phi2)"));
    assert_eq!(density(&t, 1, Branch::Zero, 0), bosonic("-1/4*i*g*(phi1'*phi1 + phi2'*phi2)"));
    assert_eq!(
        density(&t, 1, Branch::Zero, 2),
        bosonic("-i*g*m^-1*(i*phi2*phi2'_x + 1/2*m*(phi2'*phi1 + phi1'*phi2) + 1/2*g*phi1'*phi1*phi2'*phi2)")
    );

    let gt_m = model(ModelName::Gt);
    let gt = |s: &str| expr(s, true);
    let t = density_table(&gt_m);
    let rho = "(psi2'*psi2 + psi1'*psi1)";
    let mix = "(psi2'*psi1 + psi1'*psi2)";
    let quartic = "psi2'*psi2*psi1'*psi1";
    assert_eq!(density(&t, 1, Branch::Infinity, 0), gt(&format!("1/2*i*g*{rho}")));
    assert_eq!(density(&t, 1, Branch::Zero, 0), gt(&format!("-1/2*i*g*{rho}")));
    assert_eq!(density(&t, 2, Branch::Infinity, 0), gt(&format!("-1/2*i*g*{rho}")));
    assert_eq!(density(&t, 3, Branch::Infinity, 0), SymExpr::zero());
    assert_eq!(density(&t, 3, Branch::Zero, 0), SymExpr::zero());
    assert_eq!(
        density(&t, 1, Branch::Infinity, 2),
        gt(&format!("-2*g*m^-1*psi1*psi1'_x + i*g*{mix} + i*g^2*m^-1*{quartic}"))
    );
    assert_eq!(
        density(&t, 1, Branch::Zero, 2),
        gt(&format!("-2*g*m^-1*psi2*psi2'_x - i*g*{mix} - i*g^2*m^-1*{quartic}"))
    );
    assert_eq!(
        density(&t, 2, Branch::Infinity, 2),
        gt(&format!("-2*g*m^-1*psi1'*psi1_x + i*g*{mix} + i*g^2*m^-1*{quartic}"))
    );
    assert_eq!(
        density(&t, 2, Branch::Zero, 2),
        gt(&format!("-2*g*m^-1*psi2'*psi2_x - i*g*{mix} - i*g^2*m^-1*{quartic}"))
    );
    assert_eq!(
        density(&t, 3, Branch::Infinity, 2),
        gt(&format!("-2*g*m^-1*(psi1'*psi1_x + psi1*psi1'_x) + 2*i*g*{mix} + 2*i*g^2*m^-1*{quartic}"))
    );
    assert_eq!(
        density(&t, 3, Branch::Zero, 2),
        gt(&format!("-2*g*m^-1*(psi2'*psi2_x + psi2*psi2'_x) - 2*i*g*{mix} - 2*i*g^2*m^-1*{quartic}"))
    );

    let sg = model(ModelName::Sg);
    let t = density_table(&sg);
    let cos = "1/2*(exp(i*phi) + exp(-i*phi))";
    let cases = [
        (1, Branch::Infinity, "-1/4*i*m^-1", "+"),
        (1, Branch::Zero, "1/4*i*m^-1", "-"),
        (2, Branch::Infinity, "1/4*i*m^-1", "+"),
        (2, Branch::Zero, "-1/4*i*m^-1", "-"),
    ];
    for (j, b, pre, lc) in cases {
        let want = bosonic(&format!("{pre}*(1/2*(phit {lc} phi_x)^2 - m^2*{cos})"));
        let got = density(&t, j, b, 1);
        assert!(equal_mod_total_derivative(&got, &want), "SG I{}^(1) [{}]: {}", j, b, got);
    }
}

fn charges_of(m: &ModelSpec) -> Charges {
    let t = density_table(m);
    combine_charges(m.name, &|j, b, k| t.get(&(j, b, k)).map(|d| d.density.clone())).unwrap()
}

fn assert_mod_td(got: &SymExpr, want: &SymExpr, what: &str) {
    assert!(
        equal_mod_total_derivative(got, want),
        "{}: got {} (normal form {}), want {}",
        what,
        got,
        ibp_normal(got),
        want
    );
}

#[test]
fn bulk_charges() {
    let c = charges_of(&model(ModelName::Bt));
    assert_eq!(c.n.unwrap(), bosonic("phi1'*phi1 + phi2'*phi2"));
    assert_mod_td(
        &c.e,
        &bosonic(
            "1/2*i*(phi1*phi1'_x - phi1'*phi1_x - phi2*phi2'_x + phi2'*phi2_x) \
             - m*(phi2'*phi1 + phi1'*phi2) - g*phi1'*phi1*phi2'*phi2",
        ),
        "BT E",
    );
    assert_mod_td(&c.p, &bosonic("1/2*i*(phi1*phi1'_x - phi1'*phi1_x + phi2*phi2'_x - phi2'*phi2_x)"), "BT P");

    let gt = |s: &str| expr(s, true);
    let c = charges_of(&model(ModelName::Gt));
    assert_eq!(c.n.unwrap(), gt("psi2'*psi2 + psi1'*psi1"));
    assert_mod_td(
        &c.e,
        &gt("1/2*i*(psi1*psi1'_x + psi1'*psi1_x - psi2*psi2'_x - psi2'*psi2_x) \
             + m*(psi2'*psi1 + psi1'*psi2) + g*psi2'*psi2*psi1'*psi1"),
        "GT E",
    );
    assert_mod_td(&c.p, &gt("1/2*i*(psi1*psi1'_x + psi1'*psi1_x + psi2*psi2'_x + psi2'*psi2_x)"), "GT P");

    let c = charges_of(&model(ModelName::Sg));
    assert!(c.n.is_none());
    assert_mod_td(&c.e, &bosonic("1/2*(phit^2 + phi_x^2) - 1/2*m^2*(exp(i*phi) + exp(-i*phi))"), "SG E");
    assert_mod_td(&c.p, &bosonic("phit*phi_x"), "SG P");
}

#[test]
fn gt_sum_rules() {
    let t = density_table(&model(ModelName::Gt));
    let reports = check_sum_rule_gt(&t);
    assert_eq!(reports.len(), 6);
    for r in reports {
        assert!(r.holds, "order {} [{}]: {}", r.order, r.branch, r.discrepancy);
    }
}

#[test]
fn broken_sum_rule_is_reported() {
    let mut t = density_table(&model(ModelName::Gt));
    let cd = t.get_mut(&(3, Branch::Infinity, 2)).unwrap();
    cd.density = &cd.density + &expr("psi1'*psi1", true);
    let bad: Vec<_> = check_sum_rule_gt(&t).into_iter().filter(|r| !r.holds).collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].order, 2);
}

#[test]
fn missing_order_is_an_error() {
    let m = model(ModelName::Bt);
    let sol = solve_riccati(&m, 1, Branch::Infinity, 2).unwrap();
    assert!(matches!(conserved_density(&m, &sol, 6), Err(Error::Missing(_))));
}
