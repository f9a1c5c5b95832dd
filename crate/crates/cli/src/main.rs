//! `extremal`: CSV front end for the extremal-core models.
//!
//! Exit codes: 0 success, 1 validation or domain error, 2 usage error,
//! 3 numerical non-convergence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{LN_2, PI};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use extremal_core::empirical::{self, eta_hat, eta_hat_curve};
use extremal_core::ht::{boundary_fn, solve_c0, HtParams, HT_KEYS};
use extremal_core::hw::{HwModel, HwParams, HW_KEYS};
use extremal_core::invlogistic::{eta_exact, ht_limit, simulate, LogisticXi, Sample};
use extremal_core::laplace::{families, scaled_integral};
use extremal_core::margins::ProbLevel;
use extremal_core::numerics::Interval;
use extremal_core::params::{fmt17, KeyValues};
use extremal_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "extremal",
    version,
    about = "Tail dependence (chi, eta) for the wave, conditional-extremes and inverted-logistic models"
)]
struct Cli {
    /// Write CSV here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Relative tolerance for the quadratures.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = finite)]
    rel_tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the Laplace-method worked examples against their closed forms.
    LaplaceVerify(LaplaceArgs),
    /// Emit the data behind a figure as CSV.
    Fig(FigArgs),
    /// Print `model,chi,eta,row_or_note` for one model.
    Eta {
        #[command(subcommand)]
        model: EtaModel,
    },
    /// Simulate the inverted logistic on Laplace margins.
    Simulate {
        #[arg(long, value_parser = finite)]
        xi: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Empirical eta(p) curve with Clopper-Pearson bands from a sample CSV.
    Empirical {
        /// Sample CSV as written by `simulate`.
        #[arg(long)]
        input: PathBuf,
        /// Exponential-scale levels u; defaults to 1.0, 1.1, ... up to ln n.
        #[arg(long, value_delimiter = ',', value_parser = finite)]
        u: Vec<f64>,
    },
}

#[derive(Args, Debug)]
struct LaplaceArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    example: u8,
    /// Power in example 1.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=8))]
    p: u32,
    /// Rate beta in example 3 (alpha_n = n).
    #[arg(long, default_value_t = 1.0, value_parser = finite)]
    beta: f64,
    #[arg(long, value_delimiter = ',', default_value = "1e2,1e4,1e6", value_parser = finite)]
    n: Vec<f64>,
    /// Largest accepted abs_err; exit 1 when exceeded.
    #[arg(long, default_value_t = 1e-6, value_parser = finite)]
    tol: f64,
}

#[derive(Args, Debug)]
struct FigArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
    figure: u8,
    /// Seed for the figure 4 simulation (required there).
    #[arg(long)]
    seed: Option<u64>,
    /// Dependence parameter for figure 4.
    #[arg(long, default_value_t = 0.35, value_parser = finite)]
    xi: f64,
    /// Sample size for figure 4.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// gamma values for figures 2 and 3.
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,5", value_parser = finite)]
    gamma: Vec<f64>,
    /// Cells per axis in figure 2.
    #[arg(long, default_value_t = 40)]
    cells: usize,
    /// HW parameters for figure 1: `table_s1` or a key = value file.
    #[arg(long, default_value = "table_s1")]
    params: String,
}

#[derive(Subcommand, Debug)]
enum EtaModel {
    /// Wave height / period model.
    Hw {
        /// `table_s1` or a key = value file.
        #[arg(long, default_value = "table_s1")]
        params: String,
        /// Override a parameter, e.g. `--set sigma1=0.1`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Exact conditional-extremes model; flags override the file.
    Ht {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, value_parser = finite)]
        alpha: Option<f64>,
        #[arg(long, value_parser = finite)]
        beta: Option<f64>,
        #[arg(long, value_parser = finite)]
        gamma: Option<f64>,
        #[arg(long, value_parser = finite)]
        delta: Option<f64>,
        #[arg(long, value_parser = finite)]
        u_thr: Option<f64>,
    },
    /// Inverted logistic.
    Invlog {
        #[arg(long, value_parser = finite)]
        xi: f64,
    },
}

fn finite(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(format!("`{s}` is not finite")),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Fig(FigArgs {
        figure: 4,
        seed: None,
        ..
    }) = cli.command
    {
        Cli::command()
            .error(
                clap::error::ErrorKind::MissingRequiredArgument,
                "figure 4 needs --seed",
            )
            .exit();
    }
    let out: Box<dyn Write> = match &cli.output {
        Some(p) => match File::create(p) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => return fail(&Error::Io(format!("{}: {e}", p.display()))),
        },
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {}: {e}", e.name());
    ExitCode::from(if e.is_convergence_failure() { 3 } else { 1 })
}

fn run(cli: &Cli, mut w: Box<dyn Write>) -> Result<ExitCode> {
    let code = match &cli.command {
        Command::LaplaceVerify(a) => laplace_verify(a, &mut w)?,
        Command::Fig(a) => {
            match a.figure {
                1 => fig1(a, cli.rel_tol, &mut w)?,
                2 => fig2(a, &mut w)?,
                3 => fig3(a, &mut w)?,
                _ => fig4(a, cli.rel_tol, &mut w)?,
            }
            ExitCode::SUCCESS
        }
        Command::Eta { model } => {
            eta(model, &mut w)?;
            ExitCode::SUCCESS
        }
        Command::Simulate { xi, n, seed } => {
            simulate(LogisticXi::new(*xi)?, *n, *seed).write_csv(&mut w)?;
            ExitCode::SUCCESS
        }
        Command::Empirical { input, u } => {
            let f =
                File::open(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            let s = Sample::read_csv(BufReader::new(f))?;
            let grid = if u.is_empty() {
                default_u_grid(s.n())
            } else {
                u.clone()
            };
            let levels = grid
                .into_iter()
                .map(ProbLevel::new)
                .collect::<Result<Vec<_>>>()?;
            empirical::write_csv(&mut w, &eta_hat_curve(&s, &levels))?;
            ExitCode::SUCCESS
        }
    };
    w.flush()?;
    Ok(code)
}

fn default_u_grid(n: usize) -> Vec<f64> {
    let top = (n.max(2) as f64).ln();
    (0..)
        .map(|i| 1.0 + 0.1 * i as f64)
        .take_while(|&u| u <= top)
        .collect()
}

fn laplace_verify(a: &LaplaceArgs, w: &mut dyn Write) -> Result<ExitCode> {
    if a.n.iter().any(|&n| !(n > 0.0)) {
        return Err(Error::invalid(
            "n",
            a.n.iter().copied().fold(f64::INFINITY, f64::min),
            "must be positive",
        ));
    }
    writeln!(w, "example,n,scaled_integral,reference,abs_err")?;
    let mut worst = 0.0f64;
    for &n in &a.n {
        // Example 3 grows like n^n, so it is reported on the log scale.
        let (value, reference) = match a.example {
            1 => {
                let r = scaled_integral(&families::power(a.p), n)?;
                (
                    r.log_rescaled(n.ln() / a.p as f64).exp(),
                    families::power_reference(a.p).exp(),
                )
            }
            2 => {
                let r = scaled_integral(&families::linear_quadratic(Interval::real_line()), n)?;
                (
                    (0.5 * n.ln() + r.log_integral).exp(),
                    PI.sqrt() * (0.25 / n).exp(),
                )
            }
            _ => {
                if !(a.beta > 0.0) {
                    return Err(Error::invalid("beta", a.beta, "must be positive"));
                }
                let r = scaled_integral(&families::gamma_kernel(a.beta), n)?;
                (r.log_integral, families::gamma_kernel_reference(n, a.beta))
            }
        };
        let err = (value - reference).abs();
        worst = worst.max(err);
        writeln!(
            w,
            "{},{},{},{},{}",
            a.example,
            fmt17(n),
            fmt17(value),
            fmt17(reference),
            fmt17(err)
        )?;
    }
    w.flush()?;
    if worst > a.tol {
        eprintln!("abs_err {worst:e} exceeds tolerance {:e}", a.tol);
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn hw_params(source: &str, overrides: &[String]) -> Result<HwParams> {
    let mut kv = if source == "table_s1" {
        let mut kv = KeyValues::default();
        for (k, v) in HwParams::table_s1().to_key_values() {
            kv.set(k, &v.to_string());
        }
        kv
    } else {
        KeyValues::read(source.as_ref())?
    };
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| Error::Parse {
            line: 0,
            what: format!("--set expects KEY=VALUE, got `{o}`"),
        })?;
        kv.set(k.trim(), v.trim());
    }
    kv.reject_unknown(&HW_KEYS)?;
    HwParams::from_key_values(&kv)
}

fn fig1(a: &FigArgs, rel_tol: f64, w: &mut dyn Write) -> Result<()> {
    let m = HwModel::new(hw_params(&a.params, &[])?, false)?.with_rel_tol(rel_tol);
    writeln!(w, "x,y,log_g")?;
    let k = 600;
    for y in [10.0, 20.0, 30.0, 40.0, 50.0, 100.0] {
        for i in 0..=k {
            // log-spaced on [1e-2, 1e3]
            let x = 10f64.powf(-2.0 + 5.0 * i as f64 / k as f64);
            writeln!(
                w,
                "{},{},{}",
                fmt17(x),
                fmt17(y),
                fmt17(m.log_integrand(y, x)?)
            )?;
        }
    }
    Ok(())
}

fn fig2(a: &FigArgs, w: &mut dyn Write) -> Result<()> {
    if a.cells == 0 {
        return Err(Error::invalid("cells", 0.0, "must be positive"));
    }
    writeln!(w, "gamma,alpha,beta,boundary_fn,c0,region")?;
    let mid = |i: usize| (i as f64 + 0.5) / a.cells as f64;
    for &g in &a.gamma {
        for i in 0..a.cells {
            for j in 0..a.cells {
                let (al, be) = (mid(i), mid(j));
                let d = 1.0 / (1.0 - be);
                let b = boundary_fn(al, g, d);
                let c0 = solve_c0(al, g, d)?;
                // region 1: c0 in (0, 1)
                let region = u8::from(c0 < 1.0);
                writeln!(
                    w,
                    "{},{},{},{},{},{region}",
                    fmt17(g),
                    fmt17(al),
                    fmt17(be),
                    fmt17(b),
                    fmt17(c0)
                )?;
            }
        }
    }
    Ok(())
}

fn fig3(a: &FigArgs, w: &mut dyn Write) -> Result<()> {
    writeln!(w, "gamma,alpha,beta,eta")?;
    for &g in &a.gamma {
        for i in 0..20 {
            for j in 0..20 {
                let (al, be) = (i as f64 * 0.05, j as f64 * 0.05);
                let p = HtParams::new(al, be, g, 1.0 / (1.0 - be), 1.0)?;
                let e = p.eta()?.eta.unwrap_or(f64::NAN);
                writeln!(w, "{},{},{},{}", fmt17(g), fmt17(al), fmt17(be), fmt17(e))?;
            }
        }
    }
    Ok(())
}

fn fig4(a: &FigArgs, rel_tol: f64, w: &mut dyn Write) -> Result<()> {
    let seed = a.seed.expect("checked in main");
    let xi = LogisticXi::new(a.xi)?;
    // The curve starts at u = 2; the model threshold is the Laplace quantile there.
    let u_thr = 2.0 - LN_2;
    let ht = ht_limit(xi, Some(u_thr))?;
    let grid: Vec<f64> = (0..=792).map(|i| 2.0 + 0.25 * i as f64).collect();
    let curve = ht.eta_curve(&grid)?;
    let sample = simulate(xi, a.n, seed);
    writeln!(
        w,
        "# xi={}, seed={seed}, n={}, u_thr={}, rel_tol={}",
        fmt17(a.xi),
        a.n,
        fmt17(u_thr),
        fmt17(rel_tol)
    )?;
    writeln!(w, "series,u,value,ci_lo,ci_hi")?;
    let eta = eta_exact(xi).eta.unwrap_or(f64::NAN);
    let eta_ht = ht.eta()?.eta.unwrap_or(f64::NAN);
    for &u in &grid {
        writeln!(w, "eta,{},{},,", fmt17(u), fmt17(eta))?;
    }
    for &u in &grid {
        writeln!(w, "eta_ht,{},{},,", fmt17(u), fmt17(eta_ht))?;
    }
    for (l, v) in &curve {
        writeln!(w, "eta_ht_p,{},{},,", fmt17(l.u()), fmt17(*v))?;
    }
    for &u in &grid {
        if let Ok(e) = eta_hat(&sample, ProbLevel::new(u)?) {
            writeln!(
                w,
                "empirical,{},{},{},{}",
                fmt17(u),
                fmt17(e.eta_hat),
                fmt17(e.ci_lo),
                fmt17(e.ci_hi)
            )?;
        }
    }
    Ok(())
}

fn eta(model: &EtaModel, w: &mut dyn Write) -> Result<()> {
    writeln!(w, "model,chi,eta,row_or_note")?;
    match model {
        EtaModel::Hw { params, set } => {
            let p = hw_params(params, set)?;
            let d = p.validate();
            let note = if d.within_tolerance() {
                "closed form".to_string()
            } else {
                format!(
                    "closed form; splice mass {:.4} density gap {:.2e} outside tolerance",
                    d.mass, d.density_gap_rel
                )
            };
            let s = p.eta_closed()?;
            writeln!(
                w,
                "hw,{},{},{note}",
                fmt17(s.chi),
                fmt17(s.eta.unwrap_or(f64::NAN))
            )?;
        }
        EtaModel::Ht {
            params,
            alpha,
            beta,
            gamma,
            delta,
            u_thr,
        } => {
            let mut kv = match params {
                Some(p) => KeyValues::read(p)?,
                None => KeyValues::default(),
            };
            for (k, v) in HT_KEYS.iter().zip([alpha, beta, gamma, delta, u_thr]) {
                if let Some(v) = v {
                    kv.set(k, &v.to_string());
                }
            }
            let p = HtParams::from_key_values(&kv)?;
            let row = p.classify()?.row;
            match p.eta() {
                Ok(s) => writeln!(
                    w,
                    "ht,{},{},row {row}",
                    fmt17(s.chi),
                    fmt17(s.eta.unwrap_or(f64::NAN))
                )?,
                Err(Error::EtaUndefined) => writeln!(w, "ht,{},undefined,row {row}", fmt17(0.0))?,
                Err(e) => return Err(e),
            }
        }
        EtaModel::Invlog { xi } => {
            let s = eta_exact(LogisticXi::new(*xi)?);
            writeln!(
                w,
                "invlog,{},{},2^-xi",
                fmt17(s.chi),
                fmt17(s.eta.unwrap_or(f64::NAN))
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(
            fail(&Error::NoConvergence { what: "x".into() }),
            ExitCode::from(3)
        );
        assert_eq!(fail(&Error::NonFinite { x: 1.0 }), ExitCode::from(3));
        assert_eq!(fail(&Error::EtaUndefined), ExitCode::from(1));
    }

    #[test]
    fn default_grid_stops_at_log_n() {
        let g = default_u_grid(10_000);
        assert_eq!(g[0], 1.0);
        assert!(*g.last().unwrap() <= 10_000f64.ln());
    }

    #[test]
    fn parser_is_consistent() {
        Cli::command().debug_assert();
    }
}
