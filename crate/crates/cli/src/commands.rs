//! The subcommands. Each returns a [`Table`]; cells that fail numerically
//! become rows with a `Failed` method tag and the error in `status`.

use lambda_fcs::dressed::{
    dark_state_overlap, dressed_eigensystem, effective_hamiltonian, interference_amplitude, normalize_phase,
};
use lambda_fcs::dynamics::steady_state_preferred;
use lambda_fcs::fcs::{cumulants_secular, fano_terms, n_resolved_oracle, OracleOptions};
use lambda_fcs::optics::{tradeoff_curve, C_SI};
use lambda_fcs::{CVec, MediumParams};
use rayon::prelude::*;

use crate::config::{assign, Command, RunConfig, SystemConfig};
use crate::table::{Cell, Table};
use crate::CliError;

type RowResult = Result<Vec<Cell>, String>;

pub fn run_command(cfg: &RunConfig) -> Result<Table, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| match cfg.command {
        Command::Spectrum => spectrum(cfg),
        Command::Tradeoff => tradeoff(cfg),
        Command::FanoMap => fano_map(cfg),
        Command::Fcs => fcs(cfg),
        Command::Oracle => oracle(cfg),
        Command::Dressed => dressed(cfg),
        Command::Presets => presets(),
    }))
}

/// A grid point: the swept values and the settings they produce.
struct GridCell {
    values: Vec<f64>,
    system: SystemConfig,
}

/// Row-major grid over the configured axes (first axis outermost).
fn grid(cfg: &RunConfig) -> Vec<GridCell> {
    let axes: Vec<Vec<f64>> = cfg.sweep.iter().map(|a| a.values()).collect();
    let mut cells = vec![Vec::new()];
    for values in &axes {
        cells = cells
            .into_iter()
            .flat_map(|prefix: Vec<f64>| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    cells
        .into_iter()
        .map(|values| {
            let mut system = cfg.system;
            // xi goes last so it sees a swept omega_p
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by_key(|&k| cfg.sweep[k].var == "xi");
            for k in order {
                assign(&mut system, &cfg.sweep[k].var, values[k]);
            }
            GridCell { values, system }
        })
        .collect()
}

/// Evaluates rows in parallel; the output order is the input order. A failed
/// row keeps its prefix, is `NaN`-padded and ends in `Failed, NaN, message`.
fn evaluate<I: Sync>(
    columns: Vec<String>,
    items: &[I],
    prefix: impl Fn(&I) -> Vec<Cell> + Sync,
    row: impl Fn(&I) -> RowResult + Sync,
) -> Table {
    let width = columns.len();
    let rows: Vec<(Vec<Cell>, bool)> = items
        .par_iter()
        .map(|item| {
            let mut cells = prefix(item);
            match row(item) {
                Ok(rest) => {
                    cells.extend(rest);
                    (cells, true)
                }
                Err(msg) => {
                    cells.resize(width - 3, Cell::Num(f64::NAN));
                    cells.extend([FAILED.into(), f64::NAN.into(), Cell::Text(msg)]);
                    (cells, false)
                }
            }
        })
        .collect();
    let mut table = Table::new(columns);
    for (cells, ok) in rows {
        debug_assert_eq!(cells.len(), width);
        table.failures += usize::from(!ok);
        table.push(cells);
    }
    table
}

const FAILED: &str = "Failed";
const OK: &str = "ok";

/// Columns `prefix…, data…, method, residual, status`.
fn columns(prefix: &[String], data: &[&str]) -> Vec<String> {
    prefix
        .iter()
        .cloned()
        .chain(data.iter().map(|s| s.to_string()))
        .chain(["method", "residual", "status"].map(String::from))
        .collect()
}

fn axis_names(cfg: &RunConfig) -> Vec<String> {
    cfg.sweep.iter().map(|a| a.var.clone()).collect()
}

fn swept(cell: &GridCell) -> Vec<Cell> {
    cell.values.iter().map(|&v| Cell::Num(v)).collect()
}

fn status(warning: &Option<String>) -> Cell {
    match warning {
        Some(w) => Cell::Text(format!("warning: {w}")),
        None => OK.into(),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Steady-state components along one swept parameter.
pub fn spectrum(cfg: &RunConfig) -> Table {
    let prefix = axis_names(cfg);
    let data = [
        "rho11", "rho22", "rho33", "rho12_re", "rho12_im", "rho13_re", "rho13_im", "rho23_re", "rho23_im",
    ];
    let cells = grid(cfg);
    evaluate(columns(&prefix, &data), &cells, swept, |c| {
        let p = c.system.params().map_err(err)?;
        let ss = steady_state_preferred(&p).map_err(err)?;
        let mut row: Vec<Cell> = (0..3).map(|k| Cell::Num(ss.real(k, k))).collect();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            row.push(ss.real(i, j).into());
            row.push(ss.imag(i, j).into());
        }
        row.extend([ss.method.as_str().into(), ss.residual.into(), OK.into()]);
        Ok(row)
    })
}

/// Fano factor against group velocity on both branches `ξ` and `1/ξ`.
pub fn tradeoff(cfg: &RunConfig) -> Table {
    let mut xs = cfg.sweep[0].values();
    if xs[0] != 1.0 {
        xs.insert(0, 1.0);
    }
    let medium = cfg.medium.params(cfg.system.omega_p);
    let gamma = cfg.system.gamma;
    let data = ["xi_upper", "xi_lower", "v_g", "F_upper", "F_lower"];
    evaluate(columns(&[], &data), &xs, |_| Vec::new(), |&xi| {
        medium.validate().map_err(err)?;
        let lower = 1.0 / xi;
        let pts = tradeoff_curve(&medium, gamma, &[xi, lower]);
        let (up, lo) = (pts[0], pts[1]);
        let residual = ((lo.v_g - up.v_g) / up.v_g).abs().max((xi * lower - 1.0).abs());
        if !(up.v_g > 0.0 && up.v_g < C_SI) {
            return Err(format!("group velocity {} m/s out of range", up.v_g));
        }
        Ok(vec![
            xi.into(),
            lower.into(),
            up.v_g.into(),
            up.fano.into(),
            lo.fano.into(),
            "Resonant".into(),
            residual.into(),
            OK.into(),
        ])
    })
}

/// Fano factor and its closed-form pieces over a two-parameter grid.
pub fn fano_map(cfg: &RunConfig) -> Table {
    let prefix = axis_names(cfg);
    let data = ["xi", "fano", "real_part", "imag_part", "q", "fano_closed", "j_ph", "d_ph", "flag"];
    let cells = grid(cfg);
    evaluate(columns(&prefix, &data), &cells, swept, |c| {
        let p = c.system.params().map_err(err)?;
        let res = cumulants_secular(&p).map_err(err)?;
        let ss = steady_state_preferred(&p).map_err(err)?;
        let xi = p.xi().map_err(err)?;
        let terms = fano_terms(&p).ok();
        let flag = match res.method {
            lambda_fcs::CumulantMethod::ClosedFormLimit => "resonance_limit",
            _ => "",
        };
        Ok(vec![
            xi.into(),
            res.fano.into(),
            terms.map(|t| t.real_part).into(),
            terms.map(|t| t.imag_part).into(),
            terms.map(|t| t.q).into(),
            terms.map(|t| t.fano).into(),
            res.j_ph.into(),
            res.d_ph.into(),
            flag.into(),
            res.method.as_str().into(),
            ss.residual.into(),
            status(&res.warning),
        ])
    })
}

fn system_echo(s: &SystemConfig) -> Vec<Cell> {
    vec![s.gamma.into(), s.omega_c.into(), s.omega_p.into(), s.delta_c.into(), s.delta_p.into()]
}

const SYSTEM_COLUMNS: [&str; 5] = ["gamma", "omega_c", "omega_p", "delta_c", "delta_p"];

/// Current, noise and Fano factor at one parameter point.
pub fn fcs(cfg: &RunConfig) -> Table {
    let prefix: Vec<String> = SYSTEM_COLUMNS.map(String::from).to_vec();
    let data = ["xi", "j_ph", "d_ph", "fano", "j12", "j13"];
    evaluate(columns(&prefix, &data), &[cfg.system], system_echo, |s| {
        let p = s.params().map_err(err)?;
        let res = cumulants_secular(&p).map_err(err)?;
        let ss = steady_state_preferred(&p).map_err(err)?;
        Ok(vec![
            p.xi().ok().into(),
            res.j_ph.into(),
            res.d_ph.into(),
            res.fano.into(),
            res.j12.into(),
            res.j13.into(),
            res.method.as_str().into(),
            ss.residual.into(),
            status(&res.warning),
        ])
    })
}

/// n-resolved integration: the moment series, then the fitted slopes and the
/// secular values they are compared against.
pub fn oracle(cfg: &RunConfig) -> Table {
    let cols = columns(
        &["kind".to_string()],
        &[
            "tau", "mean", "variance", "j_ph", "d_ph", "fano", "j_rel_dev", "d_rel_dev",
            "normalization_error", "boundary_mass",
        ],
    );
    let result = (|| -> Result<Table, String> {
        let p = cfg.system.params().map_err(err)?;
        let opts = OracleOptions { samples: cfg.oracle.samples, ..OracleOptions::default() };
        let series = n_resolved_oracle(&p, cfg.oracle.tau_end, cfg.oracle.n_max, &opts).map_err(err)?;
        let reference = cumulants_secular(&p).map_err(err)?;
        let ss = steady_state_preferred(&p).map_err(err)?;
        let found = series.cumulants();
        let mut t = Table::new(cols.clone());
        let (norm, edge) = (series.normalization_error, series.boundary_mass);
        for k in 0..series.tau.len() {
            t.push(vec![
                "series".into(),
                series.tau[k].into(),
                series.mean[k].into(),
                series.variance[k].into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                norm.into(),
                edge.into(),
                found.method.as_str().into(),
                norm.into(),
                OK.into(),
            ]);
        }
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        t.push(vec![
            "oracle".into(),
            cfg.oracle.tau_end.into(),
            Cell::Empty,
            Cell::Empty,
            found.j_ph.into(),
            found.d_ph.into(),
            found.fano.into(),
            rel(found.j_ph, reference.j_ph).into(),
            rel(found.d_ph, reference.d_ph).into(),
            norm.into(),
            edge.into(),
            found.method.as_str().into(),
            norm.into(),
            OK.into(),
        ]);
        t.push(vec![
            "secular".into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            reference.j_ph.into(),
            reference.d_ph.into(),
            reference.fano.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            reference.method.as_str().into(),
            ss.residual.into(),
            status(&reference.warning),
        ]);
        Ok(t)
    })();
    match result {
        Ok(t) => t,
        Err(msg) => {
            let mut row = vec![Cell::text("oracle")];
            row.resize(cols.len() - 3, Cell::Num(f64::NAN));
            row.extend([FAILED.into(), f64::NAN.into(), Cell::Text(msg)]);
            let mut table = Table::new(cols);
            table.push(row);
            table.failures = 1;
            table
        }
    }
}

/// Dressed eigenpairs of the effective Hamiltonian at equal detunings.
pub fn dressed(cfg: &RunConfig) -> Table {
    let prefix = vec!["label".to_string()];
    let data = [
        "eigenvalue", "c1_re", "c1_im", "c2_re", "c2_im", "c3_re", "c3_im", "theta", "phi", "dark_population",
        "interference", "autler_townes",
    ];
    let labels = ["0", "+", "-"];
    let setup = (|| -> Result<_, String> {
        let p = cfg.system.params().map_err(err)?;
        let ds = dressed_eigensystem(&p).map_err(err)?;
        let rho = steady_state_preferred(&p).map_err(err)?.rho;
        let dark = dark_state_overlap(&rho, &p).map_err(err)?;
        let interference = interference_amplitude(&p).map_err(err)?;
        Ok((p, ds, dark, interference))
    })();
    evaluate(columns(&prefix, &data), &labels, |l| vec![Cell::text(*l)], |&label| {
        let (p, ds, dark, interference) = setup.clone()?;
        let k = labels.iter().position(|l| *l == label).unwrap_or(0);
        let (lambda, v) = ds.pairs()[k];
        let h = effective_hamiltonian(&p);
        let hv = h.mul_vec(&v);
        let residual = (0..3).map(|i| (hv[i] - v[i] * lambda).norm_sqr()).sum::<f64>().sqrt();
        let v: CVec<f64, 3> = normalize_phase(&v);
        let mut row = vec![lambda.into()];
        for z in v {
            row.push(z.re.into());
            row.push(z.im.into());
        }
        row.extend([
            ds.theta.into(),
            ds.phi.into(),
            dark.into(),
            interference.into(),
            p.omega_c.into(),
            "ClosedForm".into(),
            residual.into(),
            OK.into(),
        ]);
        Ok(row)
    })
}

/// The pinned atomic presets.
pub fn presets() -> Table {
    let data = [
        "gamma", "omega_p", "n_density", "dipole_13", "gamma13_si", "lambda_p_nm", "n_d", "n_d_physical", "cal_n",
        "v_g_min",
    ];
    let mut table = Table::new(columns(&["name".to_string()], &data));
    for (name, m) in [("na23", MediumParams::<f64>::sodium()), ("cs133", MediumParams::<f64>::caesium())] {
        let v_min = m.v_g_min();
        let residual = (v_min - C_SI / (1.0 + m.cal_n() / 4.0)).abs() / v_min;
        table.push(vec![
            name.into(),
            0.9.into(),
            m.omega_p_rabi.into(),
            m.n_density.into(),
            m.dipole_13.into(),
            m.gamma13_si.into(),
            (m.lambda_p * 1e7).into(),
            m.n_d().into(),
            m.n_d_physical().into(),
            m.cal_n().into(),
            v_min.into(),
            "Pinned".into(),
            residual.into(),
            OK.into(),
        ]);
    }
    table
}
