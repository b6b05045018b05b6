//! Command-line front end. `main` only parses arguments and calls [`run`].

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::dynamics::{norm_decay, state_evolve, Embedding, GaussianState, WeylCombo};
use crate::error::{Error, Result};
use crate::fock::{build_space, oracle_char_fn, oracle_gap, oracle_kms_trace, Generator};
use crate::gap::{gns_gap, kms_gap, one_dim_closed_forms};
use crate::io::{read_model, LoadedModel};
use crate::linalg::{CVec, RMat};
use crate::model::{build_drift_diffusion, GklsModel};
use crate::report::{render_text, run_report};
use crate::stationary::solve_stationary;

#[derive(Debug, Parser)]
#[command(name = "gaussgap", version, about = "Spectral gaps of Gaussian quantum Markov semigroups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Gns,
    Kms,
    Both,
}

impl ModeArg {
    fn embeddings(self) -> Vec<Embedding> {
        match self {
            ModeArg::Gns => vec![Embedding::Gns],
            ModeArg::Kms => vec![Embedding::Kms],
            ModeArg::Both => vec![Embedding::Gns, Embedding::Kms],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleCheck {
    Char,
    KmsTrace,
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    OneDim,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full analysis report
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Spectral gaps only
    Gap {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
    },
    /// Evolve a Gaussian state; CSV of mean and covariance per time
    Evolve {
        file: PathBuf,
        #[arg(long = "t", value_delimiter = ',', required = true)]
        times: Vec<f64>,
        /// `vacuum`, `stationary` or a JSON file with `mean` and `cov`
        #[arg(long, default_value = "vacuum")]
        s0: String,
    },
    /// Decay of random Weyl combinations against the gap bound; CSV
    Decay {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.2,0.5,1,3")]
        t_grid: Vec<f64>,
        /// Terms per combination
        #[arg(long, default_value_t = 3)]
        terms: usize,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
    },
    /// Closed-form parity over a parameter grid; CSV
    Sweep {
        #[arg(long, value_enum)]
        preset: PresetArg,
        /// `name=start:end:count,…` for mu2, lambda2, omega, kappa
        #[arg(long)]
        grid: String,
        /// Also write a gnuplot script plotting g and g_breve against kappa
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
    /// Compare against the truncated Fock-space oracle; CSV
    Oracle {
        file: PathBuf,
        /// Maximum occupation (default 40, or 30 for `gap`)
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, value_enum)]
        check: OracleCheck,
        /// `re,im` pairs, one per mode
        #[arg(long, value_delimiter = ',', default_value = "1,0")]
        z: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,0")]
        w: Vec<f64>,
    },
}

/// Runs a command, writing results to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Analyze { file, json } => {
            let report = run_report(&read_model(file)?)?;
            let text = if *json { report.to_json() + "\n" } else { render_text(&report) };
            emit(out, &text)?;
            Ok(report.exit_code())
        }
        Command::Gap { file, mode } => gap_cmd(&read_model(file)?.model, *mode, out),
        Command::Evolve { file, times, s0 } => evolve_cmd(&read_model(file)?.model, times, s0, out),
        Command::Decay { file, samples, seed, t_grid, terms, mode } => {
            decay_cmd(&read_model(file)?.model, *samples, *seed, t_grid, *terms, *mode, out)
        }
        Command::Sweep { preset: PresetArg::OneDim, grid, gnuplot } => {
            let grid = SweepGrid::parse(grid)?;
            let rows = sweep_one_dim(&grid)?;
            write_sweep_csv(&rows, out)?;
            if let Some(path) = gnuplot {
                std::fs::write(path, gnuplot_script())
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            }
            Ok(0)
        }
        Command::Oracle { file, cutoff, check, z, w } => oracle_cmd(&read_model(file)?, *cutoff, *check, z, w, out),
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("output: {e}"))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(io_err)
}

/// 17 significant digits, enough to round-trip a double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out)
}

fn write_rows(out: &mut dyn Write, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn gap_cmd(model: &GklsModel, mode: ModeArg, out: &mut dyn Write) -> Result<i32> {
    let dd = build_drift_diffusion(model)?;
    let st = solve_stationary(&dd, &model.zeta)?;
    let mut code = 0;
    for e in mode.embeddings() {
        match e {
            Embedding::Gns => {
                let g = gns_gap(&dd, &st)?;
                if !g.has_gap {
                    code = 2;
                }
                emit(out, &format!("gns {}\n", fmt_f64(g.g)))?;
            }
            Embedding::Kms => {
                let k = kms_gap(&dd, &st)?;
                emit(out, &format!("kms {}\n", fmt_f64(k.g_breve)))?;
            }
        }
    }
    Ok(code)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    mean: Vec<[f64; 2]>,
    cov: Vec<Vec<f64>>,
}

fn read_state(path: &Path, d: usize) -> Result<GaussianState> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    if file.mean.len() != d || file.cov.len() != 2 * d || file.cov.iter().any(|r| r.len() != 2 * d) {
        return Err(Error::Shape(format!("state must have {d} means and a {0}×{0} covariance", 2 * d)));
    }
    let mean = CVec::from_iterator(d, file.mean.iter().map(|&[re, im]| Complex64::new(re, im)));
    let cov = RMat::from_fn(2 * d, 2 * d, |i, j| file.cov[i][j]);
    GaussianState::new(mean, cov)
}

fn evolve_cmd(model: &GklsModel, times: &[f64], s0: &str, out: &mut dyn Write) -> Result<i32> {
    let dd = build_drift_diffusion(model)?;
    let d = model.d;
    let start = match s0 {
        "vacuum" => GaussianState::vacuum(d),
        "stationary" => GaussianState::stationary(&solve_stationary(&dd, &model.zeta)?),
        path => read_state(Path::new(path), d)?,
    };
    let mut header = vec!["t".to_string()];
    for j in 0..d {
        header.push(format!("mean_re_{j}"));
        header.push(format!("mean_im_{j}"));
    }
    for a in 0..2 * d {
        for b in a..2 * d {
            header.push(format!("s_{a}_{b}"));
        }
    }
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let st = state_evolve(&dd, &start, t, &model.zeta)?;
        let mut row = vec![fmt_f64(t)];
        for z in st.mean.iter() {
            row.push(fmt_f64(z.re));
            row.push(fmt_f64(z.im));
        }
        for a in 0..2 * d {
            for b in a..2 * d {
                row.push(fmt_f64(st.cov2d[(a, b)]));
            }
        }
        rows.push(row);
    }
    write_rows(out, &header, &rows)?;
    Ok(0)
}

/// Random combination with coefficients and points uniform in `[-1, 1]`.
pub fn random_combo(rng: &mut impl Rng, d: usize, terms: usize) -> WeylCombo {
    let mut sample = || rng.random_range(-1.0..=1.0);
    WeylCombo::new(
        (0..terms)
            .map(|_| {
                let eta = Complex64::new(sample(), sample());
                let z = CVec::from_iterator(d, (0..d).map(|_| Complex64::new(sample(), sample())));
                (eta, z)
            })
            .collect(),
    )
}

fn decay_cmd(
    model: &GklsModel,
    samples: usize,
    seed: u64,
    t_grid: &[f64],
    terms: usize,
    mode: ModeArg,
    out: &mut dyn Write,
) -> Result<i32> {
    if terms == 0 {
        return Err(Error::EmptyCombo);
    }
    let dd = build_drift_diffusion(model)?;
    let st = solve_stationary(&dd, &model.zeta)?;
    let mut rates = Vec::new();
    for e in mode.embeddings() {
        let rate = match e {
            Embedding::Gns => gns_gap(&dd, &st)?.g,
            Embedding::Kms => kms_gap(&dd, &st)?.g_breve,
        };
        rates.push((e, rate));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let combos: Vec<WeylCombo> = (0..samples).map(|_| random_combo(&mut rng, model.d, terms)).collect();
    let header: Vec<String> = ["sample", "mode", "t", "norm", "bound", "ratio"].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (k, combo) in combos.iter().enumerate() {
        for &(e, rate) in &rates {
            let n0 = norm_decay(&st, &dd, combo, 0.0, e)?;
            for &t in t_grid {
                let n = norm_decay(&st, &dd, combo, t, e)?;
                let bound = (-2.0 * rate * t).exp() * n0;
                let ratio = if bound > 0.0 { n / bound } else { f64::NAN };
                rows.push(vec![k.to_string(), e.name().to_string(), fmt_f64(t), fmt_f64(n), fmt_f64(bound), fmt_f64(ratio)]);
            }
        }
    }
    write_rows(out, &header, &rows)?;
    Ok(0)
}

/// Inclusive, evenly spaced values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.end } else { self.start + step * i as f64 }).collect()
    }

    fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("axis `{text}` is not start:end:count"));
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            [v] => {
                let x: f64 = v.parse().map_err(|_| bad())?;
                Ok(Self { start: x, end: x, count: 1 })
            }
            [a, b, n] => {
                let (start, end): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                let count: usize = n.parse().map_err(|_| bad())?;
                if count == 0 || !start.is_finite() || !end.is_finite() {
                    return Err(bad());
                }
                Ok(Self { start, end, count })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub mu2: Axis,
    pub lambda2: Axis,
    pub omega: Axis,
    pub kappa: Axis,
}

impl SweepGrid {
    pub fn parse(text: &str) -> Result<Self> {
        let mut axes: [Option<Axis>; 4] = [None; 4];
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, range) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("grid entry `{item}` needs name=a:b:n")))?;
            let slot = match name.trim() {
                "mu2" => 0,
                "lambda2" => 1,
                "omega" => 2,
                "kappa" => 3,
                other => return Err(Error::InvalidArgument(format!("unknown grid parameter `{other}`"))),
            };
            axes[slot] = Some(Axis::parse(range.trim())?);
        }
        let need = |i: usize, name: &str| axes[i].ok_or_else(|| Error::InvalidArgument(format!("grid is missing {name}")));
        Ok(Self { mu2: need(0, "mu2")?, lambda2: need(1, "lambda2")?, omega: need(2, "omega")?, kappa: need(3, "kappa")? })
    }

    /// Grid points in row-major order (kappa varies fastest).
    pub fn points(&self) -> Vec<[f64; 4]> {
        let mut out = Vec::new();
        for &mu2 in &self.mu2.values() {
            for &lambda2 in &self.lambda2.values() {
                for &omega in &self.omega.values() {
                    for &kappa in &self.kappa.values() {
                        out.push([mu2, lambda2, omega, kappa]);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: [f64; 4],
    pub g: f64,
    pub g_closed: f64,
    pub g_breve: f64,
    pub g_breve_closed: f64,
    pub sigma: f64,
}

/// Points with no faithful stable invariant state are skipped.
pub fn admissible(p: &[f64; 4]) -> bool {
    one_dim_closed_forms(p[0], p[1], p[2], p[3]).is_ok()
}

fn sweep_point(p: &[f64; 4]) -> Result<SweepRow> {
    let cf = one_dim_closed_forms(p[0], p[1], p[2], p[3])?;
    let model = GklsModel::one_dim(p[0], p[1], p[2], p[3])?;
    let dd = build_drift_diffusion(&model)?;
    let st = solve_stationary(&dd, &model.zeta)?;
    Ok(SweepRow {
        params: *p,
        g: gns_gap(&dd, &st)?.g,
        g_closed: cf.g,
        g_breve: kms_gap(&dd, &st)?.g_breve,
        g_breve_closed: cf.g_breve,
        sigma: st.sigma[0],
    })
}

fn thread_count() -> Option<usize> {
    std::env::var("GAUSSGAP_THREADS").ok()?.parse().ok().filter(|&n: &usize| n > 0)
}

/// Evaluates admissible grid points on a worker pool; rows keep grid order.
pub fn sweep_one_dim(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    let points: Vec<[f64; 4]> = grid.points().into_iter().filter(admissible).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| points.par_iter().map(sweep_point).collect())
}

pub const SWEEP_COLUMNS: [&str; 9] = ["mu2", "lambda2", "omega", "kappa", "g", "g_closed", "g_breve", "g_breve_closed", "sigma"];

pub fn write_sweep_csv(rows: &[SweepRow], out: &mut dyn Write) -> Result<()> {
    let header: Vec<String> = SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            r.params
                .iter()
                .chain([r.g, r.g_closed, r.g_breve, r.g_breve_closed, r.sigma].iter())
                .map(|&x| fmt_f64(x))
                .collect()
        })
        .collect();
    write_rows(out, &header, &body)
}

pub fn gnuplot_script() -> String {
    "# usage: gnuplot -e \"data='sweep.csv'\" this_script\n\
     set datafile separator ','\n\
     set key autotitle columnhead\n\
     set xlabel 'kappa'\n\
     set ylabel 'gap'\n\
     plot data using 4:5 with points title 'g', \\\n\
     \x20    data using 4:7 with points title 'g_breve'\n"
        .to_string()
}

fn parse_point(values: &[f64], d: usize, name: &str) -> Result<CVec> {
    if values.len() != 2 * d {
        return Err(Error::Shape(format!("--{name} needs {d} re,im pairs")));
    }
    Ok(CVec::from_iterator(d, values.chunks(2).map(|c| Complex64::new(c[0], c[1]))))
}

fn oracle_cmd(
    loaded: &LoadedModel,
    cutoff: Option<usize>,
    check: OracleCheck,
    z: &[f64],
    w: &[f64],
    out: &mut dyn Write,
) -> Result<i32> {
    let model = &loaded.model;
    let dd = build_drift_diffusion(model)?;
    let st = solve_stationary(&dd, &model.zeta)?;
    let header: Vec<String> = ["check", "oracle_re", "oracle_im", "closed_re", "closed_im", "abs_diff", "leakage"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    let mut row = |name: &str, oracle: Complex64, closed: Complex64, leakage: f64| {
        rows.push(vec![
            name.to_string(),
            fmt_f64(oracle.re),
            fmt_f64(oracle.im),
            fmt_f64(closed.re),
            fmt_f64(closed.im),
            fmt_f64((oracle - closed).norm()),
            fmt_f64(leakage),
        ]);
    };
    match check {
        OracleCheck::Char | OracleCheck::KmsTrace => {
            let space = build_space(model.d, cutoff.unwrap_or(40))?;
            let rho = Generator::new(model, &space)?.stationary_state()?;
            let leakage = space.leakage(&rho);
            let zv = parse_point(z, model.d, "z")?;
            if check == OracleCheck::Char {
                let closed = GaussianState::stationary(&st).char_fn(&zv);
                row("char", oracle_char_fn(&space, &rho, &zv), closed, leakage);
            } else {
                let wv = parse_point(w, model.d, "w")?;
                let oracle = oracle_kms_trace(&space, &rho, &zv, &wv);
                if !oracle.diagonal {
                    eprintln!("warning: stationary density is not diagonal; KMS trace outside the validated envelope");
                }
                let closed = crate::dynamics::kms_weyl_trace(&st, &zv, &wv)?;
                row("kms-trace", oracle.value, Complex64::new(closed, 0.0), leakage);
            }
        }
        OracleCheck::Gap => {
            let space = build_space(model.d, cutoff.unwrap_or(30))?;
            let gns = gns_gap(&dd, &st)?.g;
            let kms = kms_gap(&dd, &st)?.g_breve;
            for (e, closed) in [(Embedding::Gns, gns), (Embedding::Kms, kms)] {
                let og = oracle_gap(model, &space, e)?;
                if !og.reliable {
                    eprintln!("warning: truncation leakage {:.3e} exceeds tolerance", og.leakage);
                }
                row(e.name(), Complex64::new(og.gap, 0.0), Complex64::new(closed, 0.0), og.leakage);
            }
        }
    }
    write_rows(out, &header, &rows)?;
    Ok(0)
}
