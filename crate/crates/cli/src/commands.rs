//! The four subcommands. Each returns the report text and whether every item succeeded.

use std::fmt::Write as _;

use hermkr_core::intersect::total_and_prediction;
use hermkr_core::{
    CuspChart, CuspLabel, Error, FElem, FracIdealF, GreenParams, HermLattice, KElem, NormalDecomposition,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{to_kmatrix, RunConfig};
use crate::CliError;

pub struct Output {
    pub text: String,
    pub all_ok: bool,
}

fn numeric(e: Error) -> CliError {
    match e {
        Error::InvalidDiscriminant { .. }
        | Error::InvalidPolynomial(_)
        | Error::Incompatible(_)
        | Error::InvalidArgument(_)
        | Error::InvalidLattice(_) => CliError::Config(e.to_string()),
        _ => CliError::Numeric(e.to_string()),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn intersect(cfg: &RunConfig) -> Result<Output, CliError> {
    let pair = cfg.pair()?;
    if cfg.m_range.is_empty() || cfg.v_list.is_empty() {
        return Err(CliError::Config("intersect needs nonempty m_range and v_list".into()));
    }
    let mut reports = Vec::new();
    for &m in &cfg.m_range {
        for &v in &cfg.v_list {
            reports.push(total_and_prediction(&pair, m, v, cfg.tol).map_err(numeric)?);
        }
    }
    let value = serde_json::to_value(&reports).expect("reports serialize");
    Ok(Output { text: pretty(&value), all_ok: true })
}

fn fmt_f(x: f64) -> String {
    format!("{x:e}")
}

pub fn green_probe(cfg: &RunConfig) -> Result<Output, CliError> {
    let g = cfg.green.as_ref().ok_or_else(|| CliError::Config("green section is required".into()))?;
    let k = cfg.field()?;
    let chart = CuspChart::new(k, to_kmatrix(&g.a)).map_err(numeric)?;
    let m = g.m.or(cfg.m_range.first().copied()).ok_or_else(|| CliError::Config("green: no m given".into()))?;
    let v = g.v.or(cfg.v_list.first().copied()).unwrap_or(1.0);
    let params = GreenParams { m, v, tol: cfg.tol, max_radius: g.max_radius };
    params.validate().map_err(numeric)?;
    let u: Vec<Complex64> = g.u.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let decades = (g.q_start / g.q_end).log10();
    let steps = (decades * g.points_per_decade as f64).round().max(1.0) as usize;
    let ray: Vec<_> = (0..=steps)
        .map(|i| {
            let q = g.q_start * (g.q_end / g.q_start).powf(i as f64 / steps as f64);
            chart.point_from_q(g.x, q, u.clone())
        })
        .collect();
    let report = chart.boundary_diagnostics(&params, &ray, g.window).map_err(numeric)?;

    let mut out = String::from("|q|,xi,E_int,E_bnd,tail_bound\n");
    for row in &report.rows {
        writeln!(out, "{},{},{},{},{}", fmt_f(row.abs_q), fmt_f(row.xi), fmt_f(row.e_int), fmt_f(row.e_bnd), fmt_f(row.tail_bound))
            .unwrap();
    }
    for (i, row) in report.rows.iter().enumerate() {
        if let Some(e) = &row.error {
            writeln!(out, "# error,row {i},{e}").unwrap();
        }
    }
    writeln!(out, "# ind,{}", report.ind).unwrap();
    writeln!(out, "# psi_factors,{}", report.psi_factors).unwrap();
    let exponent = report.decay_exponent;
    writeln!(out, "# decay_exponent,{}", exponent.map_or("none".into(), fmt_f)).unwrap();
    writeln!(out, "# bnd_variation_final_decade,{}", fmt_f(report.bnd_variation_final_decade)).unwrap();
    writeln!(out, "# tail_sum_final_decade,{}", fmt_f(report.tail_sum_final_decade)).unwrap();
    writeln!(out, "# max_abs_gr,{}", fmt_f(report.max_abs_gr)).unwrap();
    let int_verdict = match exponent {
        Some(e) if e > 0.5 => "vanishing",
        Some(_) => "not vanishing",
        // every sample below its tail bound: E_int is numerically zero along the ray
        None => "vanishing (below tail bounds)",
    };
    writeln!(out, "# verdict,E_int,{int_verdict}").unwrap();
    let bnd_ok = report.bnd_variation_final_decade < 10.0 * report.tail_sum_final_decade;
    writeln!(out, "# verdict,E_bnd,{}", if bnd_ok { "bounded" } else { "varying" }).unwrap();
    if report.ind == 0 {
        let bounded = report.max_abs_gr.is_finite();
        writeln!(out, "# verdict,Gr,{}", if bounded { "bounded" } else { "unbounded" }).unwrap();
    } else {
        writeln!(out, "# verdict,Gr,log-singular (Ind = {})", report.ind).unwrap();
    }
    let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
    if failed == report.rows.len() {
        return Err(CliError::Numeric(format!("all {failed} rows failed; first: {}", report.rows[0].error.as_deref().unwrap_or(""))));
    }
    Ok(Output { text: out, all_ok: true })
}

fn kvec(v: &[KElem]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn kmat(m: &[Vec<KElem>]) -> Value {
    Value::Array(m.iter().map(|r| kvec(r)).collect())
}

fn item<T>(r: Result<T, Error>, ok: &mut bool, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(x) => f(x),
        Err(e) => {
            *ok = false;
            json!({ "error": e.to_string() })
        }
    }
}

pub fn lattice(cfg: &RunConfig) -> Result<Output, CliError> {
    let l = cfg.lattice.as_ref().ok_or_else(|| CliError::Config("lattice section is required".into()))?;
    let k = cfg.field()?;
    let lat = HermLattice::new(k, to_kmatrix(&l.gram)).map_err(|e| CliError::Config(format!("lattice.gram: {e}")))?;
    let mut ok = true;
    let counts: Vec<i64> = l.counts.clone().unwrap_or_else(|| cfg.m_range.iter().copied().filter(|&m| m > 0).collect());

    let signature = item(lat.signature(), &mut ok, |s| json!({ "pos": s.pos, "neg": s.neg }));
    let count_items: Vec<Value> = counts
        .iter()
        .map(|&m| {
            let c = item(lat.count_vectors(m), &mut ok, |c| json!(c));
            json!({ "m": m, "count": c })
        })
        .collect();

    let isotropic = lat.find_isotropic(l.isotropic_bound);
    let isotropic_value = match &isotropic {
        Ok(vs) => json!({ "bound": l.isotropic_bound, "vectors": vs.iter().map(|v| kvec(v)).collect::<Vec<_>>() }),
        Err(e) => {
            ok = false;
            json!({ "bound": l.isotropic_bound, "error": e.to_string() })
        }
    };

    let e: Option<Vec<KElem>> = match (&l.e, &isotropic) {
        (Some(e), _) => Some(e.iter().map(|x| KElem::from_ints(x[0], x[1])).collect()),
        (None, Ok(vs)) => vs.first().cloned(),
        (None, Err(_)) => None,
    };
    let mut label = None;
    let decomposition = match e {
        None => {
            ok = false;
            json!({ "error": "no isotropic vector available" })
        }
        Some(e) => item(lat.normal_decomposition(&e), &mut ok, |nd: NormalDecomposition| {
            label = Some(CuspLabel::from_decomposition(&nd));
            json!({
                "e": kvec(nd.e()),
                "basis_change": kmat(&nd.basis_change),
                "a_block": kmat(&nd.a_block),
                "block_gram": kmat(&nd.block_gram()),
                "block_sizes": [nd.block_sizes.0, nd.block_sizes.1, nd.block_sizes.2],
            })
        }),
    };
    let v = cfg.v_list.first().copied().unwrap_or(1.0);
    let ind: Value = match &label {
        Some(label) => Value::Array(
            cfg.m_range
                .iter()
                .map(|&m| {
                    let mult = item(label.boundary_multiplicity(m, v), &mut ok, |x| json!(x));
                    json!({ "m": m, "ind": label.boundary_index(m), "v": v, "multiplicity": mult })
                })
                .collect(),
        ),
        None => Value::Null,
    };

    let report = json!({
        "d_k": cfg.d_k,
        "rank": lat.rank(),
        "self_dual": lat.is_self_dual(),
        "signature": signature,
        "counts": count_items,
        "isotropic": isotropic_value,
        "normal_decomposition": decomposition,
        "ind": ind,
    });
    Ok(Output { text: pretty(&report), all_ok: ok })
}

pub fn rho(cfg: &RunConfig) -> Result<Output, CliError> {
    let pair = cfg.pair()?;
    let f = &pair.f;
    let section = cfg.rho.clone().unwrap_or(crate::config::RhoConfig { ideals: None, norm_bound: 100 });
    let mut ideals: Vec<FracIdealF> = Vec::new();
    match &section.ideals {
        Some(list) => {
            for (i, gens) in list.iter().enumerate() {
                if gens.is_empty() || gens.iter().any(|g| g.len() != f.degree()) {
                    return Err(CliError::Config(format!("rho.ideals[{i}]: generators need {} coordinates", f.degree())));
                }
                let gens: Vec<FElem> = gens.iter().map(|g| FElem::from_i64(g)).collect();
                ideals.push(FracIdealF::from_generators(f, &gens));
            }
        }
        None => {
            let mut p = 2u64;
            while p <= section.norm_bound {
                if (2..p).take_while(|q| q * q <= p).all(|q| p % q != 0) {
                    for prime in f.factor_prime(p) {
                        let mut power = prime.ideal.clone();
                        let mut norm = prime.norm();
                        while norm <= section.norm_bound as u128 {
                            ideals.push(power.clone());
                            power = power.mul(f, &prime.ideal);
                            norm *= prime.norm();
                        }
                    }
                }
                p += 1;
            }
        }
    }
    let entries: Vec<Value> = ideals
        .iter()
        .map(|a| {
            let factors: Vec<Value> = pair
                .factor_ideal(a)
                .iter()
                .map(|(p, e)| {
                    json!({
                        "p": p.p,
                        "residue_degree": p.f_deg,
                        "ramification": p.e,
                        "split": pair.split_type(p),
                        "ord": e,
                    })
                })
                .collect();
            json!({
                "ideal": a.to_string(),
                "norm": a.norm().to_string(),
                "integral": a.is_integral(),
                "factors": factors,
                "rho": pair.rho(a),
            })
        })
        .collect();
    let report = json!({ "d_k": cfg.d_k, "F_poly": cfg.f_poly, "entries": entries });
    Ok(Output { text: pretty(&report), all_ok: true })
}
