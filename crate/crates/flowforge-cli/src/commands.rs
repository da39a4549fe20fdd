use std::fmt::Write as _;
use std::path::Path;

use flowforge_core::cumulant::classify_cumulants;
use flowforge_core::flowgen::{build_hierarchy_with, hierarchy_node_count, HierarchyOptions};
use flowforge_core::multiindex::{count_populated_by_order, enumerate, PreMultiIndex};
use flowforge_core::params::fmt_rational;
use flowforge_core::renorm::{enumerate_relevant, CSV_HEADER as COUNTERTERM_HEADER};
use flowforge_core::{Error, Exec};
use flowforge_numerics::estimates::{default_mus, verify_estimates_at, CSV_HEADER as ESTIMATE_HEADER};
use flowforge_numerics::flowcoef::flow_coefficient;
use flowforge_numerics::study::{convergence_study, ConvergenceReport};
use flowforge_numerics::GridSpec;

use crate::config::{model_params, parse_config, parse_list, parse_real};
use crate::output::{csv_bytes, emit, json_bytes, write_atomic};
use crate::{
    CliResult, CoeffArgs, Command, CountertermArgs, CumulantArgs, EnumerateArgs, FlowArgs, Format, KernelArgs,
    ModelArgs, ParamsArgs, SimulateArgs,
};

pub fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Params(a) => params(a),
        Command::Enumerate(a) => enumerate_cmd(a),
        Command::Flow(a) => flow(a),
        Command::Counterterms(a) => counterterms(a),
        Command::Cumulants(a) => cumulants(a),
        Command::KernelsVerify(a) => kernels_verify(a),
        Command::Simulate(a) => simulate(a),
        Command::Coeffs(a) => coeffs(a),
    }
}

fn model(m: &ModelArgs) -> CliResult<flowforge_core::ModelParams> {
    Ok(model_params(&m.alpha, m.n, m.iota.as_deref())?)
}

fn params(a: ParamsArgs) -> CliResult<()> {
    let p = model(&a.model)?;
    let s = p.summary();
    let bytes = if a.json {
        json_bytes(&s)?
    } else {
        let mut t = String::new();
        let _ = writeln!(t, "alpha = {}", s.alpha);
        let _ = writeln!(t, "n = {}", s.n);
        let _ = writeln!(t, "iota = {}", s.iota);
        let _ = writeln!(t, "Gamma = {}", s.gamma);
        let _ = writeln!(t, "delta = {}", s.delta);
        let _ = writeln!(t, "kappa0 = {}", s.kappa0);
        let _ = writeln!(t, "diverging_variance = {}", s.diverging_variance);
        t.into_bytes()
    };
    emit(None, &bytes)
}

fn enumerate_cmd(a: EnumerateArgs) -> CliResult<()> {
    let p = model(&a.model)?;
    let count: u128 = count_populated_by_order(a.k).iter().sum();
    if count > a.cap {
        return Err(
            Error::Resource(format!("{count} populated indices up to order {}, above --cap {}", a.k, a.cap)).into()
        );
    }
    let list = enumerate(&p, a.k);
    let bytes = match a.format {
        Format::Json => {
            let items: Vec<String> = list.iter().map(PreMultiIndex::to_json).collect();
            format!("[{}]\n", items.join(",")).into_bytes()
        }
        Format::Csv => csv_bytes(
            &["a_json", "order", "size", "scaling"],
            list.iter()
                .map(|x| [x.to_json(), x.order().to_string(), x.size().to_string(), fmt_rational(&x.scaling(p.alpha))]),
        )?,
    };
    emit(a.out.as_deref(), &bytes)
}

fn flow(a: FlowArgs) -> CliResult<()> {
    let p = model(&a.model)?;
    let opts = HierarchyOptions { max_order: a.max_order, node_cap: a.node_cap, exec: Exec::default() };
    let max = a.max_order.unwrap_or(p.star_order());
    if hierarchy_node_count(max) > a.node_cap {
        return Err(Error::Resource(format!(
            "hierarchy up to order {max} has {} nodes, above --node-cap {}",
            hierarchy_node_count(max),
            a.node_cap
        ))
        .into());
    }
    let h = build_hierarchy_with(&p, opts)?;
    let problems = h.check_structure();
    if !problems.is_empty() {
        return Err(Error::Contract(format!("hierarchy structure: {}", problems.join("; "))).into());
    }
    emit(a.out.as_deref(), &h.to_json_bytes())
}

fn counterterms(a: CountertermArgs) -> CliResult<()> {
    let p = model(&a.model)?;
    let rows = enumerate_relevant(&p).into_iter().map(|e| e.csv_record());
    emit(a.out.as_deref(), &csv_bytes(&COUNTERTERM_HEADER, rows)?)
}

fn cumulants(a: CumulantArgs) -> CliResult<()> {
    let p = model(&a.model)?;
    let rep = classify_cumulants(&p, a.pmax, a.order_cap, Exec::default())?;
    emit(a.out.as_deref(), &json_bytes(&rep)?)
}

fn kernels_verify(a: KernelArgs) -> CliResult<()> {
    let p = model(&a.model)?;
    let dt = match &a.dt {
        Some(s) => parse_real(s)?,
        None => 0.25 / (a.grid * a.grid) as f64,
    };
    let grid = GridSpec::new(a.model.n, a.grid, 0.0, 0.0, dt)?;
    let mus = match &a.mus {
        Some(s) => parse_list(s)?,
        None => default_mus(),
    };
    if mus.len() < 2 {
        return Err(Error::Domain("need at least two scales mu to fit a slope".into()).into());
    }
    let rep = verify_estimates_at(&p, &grid, &mus)?;
    if let Some(path) = &a.summary {
        write_atomic(path, &json_bytes(&rep)?)?;
    }
    let rows = rep.rows.iter().map(|r| r.csv_record());
    emit(a.out.as_deref(), &csv_bytes(&ESTIMATE_HEADER, rows)?)
}

fn simulate(a: SimulateArgs) -> CliResult<()> {
    let text =
        std::fs::read_to_string(&a.config).map_err(|e| crate::CliError::Io(format!("{}: {e}", a.config.display())))?;
    let (cfg, nl) = parse_config(&text)?;
    let rep = convergence_study(&cfg, &nl)?;
    write_simulation(&a.out, &rep)?;
    let ok = |b: bool| if b { "yes" } else { "no" };
    let on: Vec<f64> = rep.renormalized.pairs.iter().map(|p| p.median_sup_diff).collect();
    let off: Vec<f64> = rep.unrenormalized.per_eps.iter().map(|e| e.median_abs_drift).collect();
    println!("wrote {}", a.out.join("report.json").display());
    println!("sup differences decreasing with counterterm: {}", ok(on.windows(2).all(|w| w[1] < w[0])));
    println!("|drift| increasing without counterterm: {}", ok(off.windows(2).all(|w| w[1] > w[0])));
    Ok(())
}

pub fn write_simulation(dir: &Path, rep: &ConvergenceReport) -> CliResult<()> {
    let tables = dir.join("tables");
    let mode = |r: &flowforge_numerics::study::LadderRun| r.counterterm.to_string();
    let runs = [&rep.renormalized, &rep.unrenormalized];
    let per_eps = csv_bytes(
        &["mode", "eps", "median_sup", "mean_l2", "mean_displacement", "mean_drift", "median_abs_drift", "blown_up"],
        runs.iter().flat_map(|r| {
            r.per_eps.iter().map(move |e| {
                [
                    mode(r),
                    e.eps.to_string(),
                    format!("{:.10e}", e.median_sup),
                    format!("{:.10e}", e.mean_l2),
                    format!("{:.10e}", e.mean_displacement),
                    format!("{:.10e}", e.mean_drift),
                    format!("{:.10e}", e.median_abs_drift),
                    e.blown_up.to_string(),
                ]
            })
        }),
    )?;
    let pairs = csv_bytes(
        &["mode", "eps", "eps_next", "median_sup_diff", "median_holder_diff", "blown_up"],
        runs.iter().flat_map(|r| {
            r.pairs.iter().map(move |p| {
                [
                    mode(r),
                    p.eps.to_string(),
                    p.eps_next.to_string(),
                    format!("{:.10e}", p.median_sup_diff),
                    format!("{:.10e}", p.median_holder_diff),
                    p.blown_up.to_string(),
                ]
            })
        }),
    )?;
    let constants = csv_bytes(
        &["eps", "c", "c2", "c_continuum"],
        rep.renormalized.constants.iter().map(|c| {
            [c.eps.to_string(), format!("{:.10e}", c.c), format!("{:.10e}", c.c2), format!("{:.10e}", c.c_continuum)]
        }),
    )?;
    write_atomic(&tables.join("per_eps.csv"), &per_eps)?;
    write_atomic(&tables.join("pairs.csv"), &pairs)?;
    write_atomic(&tables.join("constants.csv"), &constants)?;
    write_atomic(&dir.join("report.json"), &json_bytes(rep)?)
}

fn coeffs(a: CoeffArgs) -> CliResult<()> {
    let p = model(&a.model)?;
    let idx = PreMultiIndex::from_json(&a.a)?;
    let eps = parse_real(&a.eps)?;
    let dt = match &a.dt {
        Some(s) => parse_real(s)?,
        None => eps * eps / 8.0,
    };
    let grid = GridSpec::new(a.model.n, a.grid, 0.0, 0.0, dt)?;
    let mus = parse_list(&a.mus)?;
    let rep = flow_coefficient(&idx, &p, &grid, eps, &mus, a.seed, a.samples, Exec::default())?;
    emit(a.out.as_deref(), &json_bytes(&rep)?)
}
