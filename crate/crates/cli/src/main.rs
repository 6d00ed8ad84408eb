//! `hsub`: Hermitian codes, subfield subcodes and trace codes from the
//! command line.

mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hsub::agcode::{self, build_hermitian_code, hermitian_params};
use hsub::gf::TowerInfo;
use hsub::subfield;
use hsub::{HermitianCurve, RBasis, Tower};

#[derive(Parser, Debug)]
#[command(
    name = "hsub",
    version,
    about = "Subfield subcodes of one-point Hermitian codes"
)]
struct Cli {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Largest number of messages the exhaustive distance search may enumerate.
    #[arg(long, global = true, default_value_t = agcode::DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads for sweeps over s (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the affine points of the Hermitian curve over GF(q²).
    Points {
        #[arg(long)]
        q: u32,
    },
    /// Length, dimension and designed distance of H(q², s).
    Params {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        s: u64,
    },
    /// Dimensions of the subfield subcode over GF(r) and of its parent H(q², s).
    SubfieldDim {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Run a verification sweep; exits non-zero if any instance fails.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// True minimum distance of H(q², s) by exhaustive search.
    Distance {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        s: u64,
    },
    /// Write a generator matrix as text, with a JSON sidecar at `<out>.json`.
    Export {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        s: u64,
        /// Export the subfield subcode over GF(r) instead of H(q², s).
        #[arg(long)]
        r: Option<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Delsarte's identity and both dimension routes on every s in range.
    Delsarte {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Subcode dimension 1 below q³/r and 2m+1 at q³/r.
    Theorem {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// The dual of H(q², s) is H(q², q³+q²-q-2-s) for every s in range.
    Duality {
        #[arg(long)]
        q: u32,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Recompute the reference table of dim C_{8,2}(s) and dim H(64, s).
    Table1,
    /// Field axioms, rank-nullity and double duals on seeded random input.
    Properties {
        #[arg(long)]
        q: u32,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct FieldArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    r: u32,
}

#[derive(Args, Debug, Clone, Copy)]
struct RangeArgs {
    /// A single s.
    #[arg(long, conflicts_with_all = ["s_from", "s_to"])]
    s: Option<u64>,
    /// First s of an inclusive range.
    #[arg(long)]
    s_from: Option<u64>,
    /// Last s of an inclusive range.
    #[arg(long)]
    s_to: Option<u64>,
}

impl RangeArgs {
    /// The requested values, or `default` where a bound is missing.
    fn values(&self, default: (u64, u64)) -> Result<Vec<u64>> {
        if let Some(s) = self.s {
            return Ok(vec![s]);
        }
        let from = self.s_from.unwrap_or(default.0);
        let to = self.s_to.unwrap_or(default.1);
        if from > to {
            bail!("empty range: --s-from {from} is larger than --s-to {to}");
        }
        Ok((from..=to).collect())
    }
}

/// Splits `q = r^m` with `r = p^e`; `r` defaults to the characteristic.
fn tower_for(q: u32, r: Option<u32>) -> Result<Tower> {
    if q < 2 {
        bail!("q must be a prime power, got {q}");
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let k = exact_log(q, p).with_context(|| format!("q = {q} is not a prime power"))?;
    let r = r.unwrap_or(p);
    let e = exact_log(r, p)
        .with_context(|| format!("r = {r} is not a power of the characteristic {p} of q"))?;
    if e == 0 || k % e != 0 {
        bail!("q = {q} is not a power of r = {r}");
    }
    Ok(Tower::new(p, e, k / e)?)
}

fn exact_log(x: u32, base: u32) -> Option<u32> {
    let mut k = 0;
    let mut acc = 1u64;
    while acc < x as u64 {
        acc *= base as u64;
        k += 1;
    }
    (acc == x as u64).then_some(k)
}

/// `q³/r - 1` through `q³ - 1`: the step into the `2m + 1` regime and the rest
/// of the range where `H(q², s)` is injective.
fn default_range(t: &Tower) -> (u64, u64) {
    let q3 = (t.q() as u64).pow(3);
    ((q3 / t.r() as u64).saturating_sub(1), q3 - 1)
}

/// Opens `--out`, or stdout.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct PointsJson {
    field: TowerInfo,
    points: Vec<PointJson>,
}

#[derive(Serialize)]
struct PointJson {
    index: usize,
    x: u16,
    y: u16,
}

#[derive(Serialize)]
struct DimRow {
    s: u64,
    dim_subcode: usize,
    dim_parent: usize,
}

#[derive(Serialize)]
struct DimReport {
    q: u32,
    r: u32,
    rows: Vec<DimRow>,
}

#[derive(Serialize)]
struct DistanceJson {
    n: usize,
    k: usize,
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    designed_d: Option<u64>,
}

fn run(cli: &Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Points { q } => {
            let t = tower_for(*q, None)?;
            let curve = HermitianCurve::new(&t);
            let mut w = output(out)?;
            match cli.format {
                Format::Csv => curve.write_points_csv(&mut w)?,
                Format::Json => write_json(
                    &mut w,
                    &PointsJson {
                        field: t.info(),
                        points: curve
                            .points()
                            .iter()
                            .map(|p| PointJson {
                                index: p.index,
                                x: p.x,
                                y: p.y,
                            })
                            .collect(),
                    },
                )?,
            }
            w.flush()?;
        }
        Command::Params { q, s } => {
            let t = tower_for(*q, None)?;
            let curve = HermitianCurve::new(&t);
            let params = hermitian_params(&curve, *s);
            let mut w = output(out)?;
            match cli.format {
                Format::Json => write_json(&mut w, &params)?,
                Format::Csv => {
                    writeln!(w, "n,k,d")?;
                    let d = params.d.map(|d| d.to_string()).unwrap_or_default();
                    writeln!(w, "{},{},{d}", params.n, params.k)?;
                }
            }
            w.flush()?;
        }
        Command::SubfieldDim { field, range } => {
            let t = tower_for(field.q, Some(field.r))?;
            let curve = HermitianCurve::new(&t);
            let basis = RBasis::power(&t);
            let s_values = range.values(default_range(&t))?;
            let rows = subfield::sweep(&t, &curve, &basis, &s_values, cli.jobs)?;
            let mut w = output(out)?;
            match cli.format {
                Format::Csv => {
                    writeln!(w, "s,dim_subcode,dim_parent")?;
                    for row in &rows {
                        writeln!(w, "{},{},{}", row.s, row.k0, row.k)?;
                    }
                }
                Format::Json => write_json(
                    &mut w,
                    &DimReport {
                        q: t.q(),
                        r: t.r(),
                        rows: rows
                            .iter()
                            .map(|row| DimRow {
                                s: row.s,
                                dim_subcode: row.k0,
                                dim_parent: row.k,
                            })
                            .collect(),
                    },
                )?,
            }
            w.flush()?;
        }
        Command::Verify { which } => return verify::run(cli, which),
        Command::Distance { q, s } => {
            let t = tower_for(*q, None)?;
            let curve = HermitianCurve::new(&t);
            let code = build_hermitian_code(&curve, *s);
            let d = agcode::brute_force_min_distance(&t, &code, cli.budget)?;
            let report = DistanceJson {
                n: code.n(),
                k: code.dimension(),
                d,
                designed_d: agcode::designed_min_distance(*q, *s).ok(),
            };
            let mut w = output(out)?;
            match cli.format {
                Format::Json => write_json(&mut w, &report)?,
                Format::Csv => {
                    writeln!(w, "n,k,d,designed_d")?;
                    let designed = report.designed_d.map(|d| d.to_string()).unwrap_or_default();
                    writeln!(w, "{},{},{},{designed}", report.n, report.k, report.d)?;
                }
            }
            w.flush()?;
        }
        Command::Export { q, s, r } => {
            let Some(path) = out else {
                bail!("export needs --out for the matrix file");
            };
            let t = tower_for(*q, *r)?;
            let curve = HermitianCurve::new(&t);
            let mut code = build_hermitian_code(&curve, *s);
            if r.is_some() {
                code = subfield::subfield_subcode(&t, &RBasis::power(&t), &code)?.code;
            }
            let g = code.generators();
            let mut w = output(Some(path))?;
            g.write_text(&mut w)?;
            w.flush()?;
            let mut sidecar_path = path.as_os_str().to_owned();
            sidecar_path.push(".json");
            let mut w = output(Some(Path::new(&sidecar_path)))?;
            write_json(&mut w, &g.sidecar(&t))?;
            w.flush()?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
