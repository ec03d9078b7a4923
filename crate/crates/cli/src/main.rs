//! `freespec` command-line front end. Every subcommand prints one JSON report
//! on standard output; verdicts are report fields and never exit codes.
//! Exit code 2 means invalid input, 3 a numerical failure.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use freespec::extreme::{classify, Tri};
use freespec::feasibility::{
    hull_membership, inclusion, polar_dual_check, spectrahedrop_membership, DropVerdict, HullVerdict,
    InclusionVerdict,
};
use freespec::gallery::{self, GalleryEntry};
use freespec::io::{self, columns_to_value, num, tuple_to_value};
use freespec::pencil::{membership, HermTuple, MonicPencil};
use freespec::structure::{decompose_irreducibles, is_free_simplex, naimark_normal_form};
use freespec::{Error, Result};

use report::Report;

#[derive(Parser)]
#[command(name = "freespec", version, about = "Extreme points and dilations of free spectrahedra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Numerical tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Master seed for all randomness.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sampling subcommands.
    #[arg(long)]
    jobs: Option<usize>,
    /// Record wall-clock time in the report (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Euclidean, Arveson, irreducible, absolute and matrix-extreme verdicts.
    Classify {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Membership status of a point in a free spectrahedron.
    Member {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Membership in the matrix convex hull of a generator tuple.
    HullMember {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Inclusion of the inner spectrahedron in the outer one.
    Include {
        #[arg(long)]
        inner: PathBuf,
        #[arg(long)]
        outer: PathBuf,
        /// Highest level searched for a separating point.
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Membership in the projection of a lifted spectrahedron.
    DropMember {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long)]
        point: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decomposition of a tuple into irreducible blocks.
    Decompose {
        #[arg(long)]
        point: PathBuf,
        /// Write the blocks, one tuple file per block, with this path prefix.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Samples the polar duality between a tuple's hull and its spectrahedron.
    DualCheck {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Free simplex detection and the Naimark normal form.
    SimplexCheck {
        #[arg(long)]
        pencil: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Writes a named pencil.
    Gallery {
        name: GalleryName,
        #[arg(long, default_value_t = 2)]
        g: usize,
        /// Lift parameter for tv-lift.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Dilates a corank-one wild disk pair onto the vanishing boundary.
    LiftOne {
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GalleryName {
    Cube,
    Interval,
    SpinDisk,
    WildDisk,
    Naimark,
    TvLift,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Classify { common, .. }
            | Command::Member { common, .. }
            | Command::HullMember { common, .. }
            | Command::Include { common, .. }
            | Command::DropMember { common, .. }
            | Command::Decompose { common, .. }
            | Command::DualCheck { common, .. }
            | Command::SimplexCheck { common, .. }
            | Command::Gallery { common, .. }
            | Command::LiftOne { common, .. } => common,
        }
    }
}

fn tri(t: Tri) -> &'static str {
    match t {
        Tri::Yes => "Yes",
        Tri::No => "No",
        Tri::Unknown => "Unknown",
    }
}

fn load_pencil(rep: &mut Report, key: &str, path: &Path) -> Result<(MonicPencil, usize)> {
    let (p, vis, bytes) = io::load_pencil(path)?;
    rep.input(key, &bytes);
    Ok((p, vis))
}

fn load_tuple(rep: &mut Report, key: &str, path: &Path) -> Result<HermTuple> {
    let (x, bytes) = io::load_tuple(path)?;
    rep.input(key, &bytes);
    Ok(x)
}

fn arity(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("arity mismatch: {a} variables vs {b}")));
    }
    Ok(())
}

fn run(cmd: &Command, rep: &mut Report) -> Result<()> {
    let tol = rep.tol;
    let seed = rep.seed;
    match cmd {
        Command::Classify { pencil, point, .. } => {
            let (a, _) = load_pencil(rep, "pencil", pencil)?;
            let x = load_tuple(rep, "point", point)?;
            arity(a.g(), x.g())?;
            let c = classify(&a, &x, tol)?;
            rep.verdict("membership", json!(c.status));
            rep.verdict("min_eig", num(c.min_eig));
            rep.verdict("kernel_dim", c.kernel_dim.into());
            rep.verdict("euclidean", c.euclidean.extreme.into());
            rep.verdict("arveson", c.arveson.boundary.into());
            rep.verdict("irreducible", c.irreducible.irreducible.into());
            rep.verdict("commutant_dim", c.irreducible.commutant_dim.into());
            rep.verdict("absolute", c.absolute.into());
            rep.verdict("matrix_extreme", tri(c.matrix_extreme.value).into());
            rep.verdict("matrix_extreme_reason", c.matrix_extreme.reason.clone().into());
            rep.verdict("hierarchy_ok", c.hierarchy_holds().into());
            if let (Some(y), Some(t)) = (&c.euclidean.witness, c.euclidean.step) {
                rep.witness("euclidean", json!({"direction": tuple_to_value(y), "step": num(t)}));
            }
            if let Some(w) = &c.arveson.witness {
                let beta: Vec<Value> = w.beta.iter().map(|b| num(*b)).collect();
                rep.witness(
                    "arveson",
                    json!({
                        "alpha": columns_to_value(&w.alpha),
                        "beta": beta,
                        "t": num(w.t),
                        "dilation": tuple_to_value(&w.dilation(&x)?),
                    }),
                );
            }
            if let Some(p) = &c.irreducible.reducing_projection {
                rep.witness("reducing_projection", io::cmatrix_to_value(p.matrix()));
            }
        }
        Command::Member { pencil, point, .. } => {
            let (a, _) = load_pencil(rep, "pencil", pencil)?;
            let x = load_tuple(rep, "point", point)?;
            arity(a.g(), x.g())?;
            let m = membership(&a, &x, tol)?;
            rep.verdict("status", json!(m.status));
            rep.verdict("min_eig", num(m.min_eig));
            rep.verdict("kernel_dim", m.kernel.map_or(0, |k| k.ncols()).into());
        }
        Command::HullMember { generator, point, .. } => {
            let om = load_tuple(rep, "generator", generator)?;
            let x = load_tuple(rep, "point", point)?;
            let v = hull_membership(&om, &x, tol)?;
            rep.verdict("verdict", v.label().into());
            match v {
                HullVerdict::Member(cert) => {
                    rep.verdict("unital_residual", num(cert.unital_residual));
                    rep.verdict("match_residual", num(cert.match_residual));
                    rep.verdict("choi_min_eig", num(cert.min_eig));
                    rep.witness("choi", io::cmatrix_to_value(cert.choi.matrix()));
                }
                HullVerdict::NonMember(why) | HullVerdict::Unknown(why) => rep.verdict("reason", why.into()),
            }
        }
        Command::Include { inner, outer, level, .. } => {
            let (b, _) = load_pencil(rep, "inner", inner)?;
            let (a, _) = load_pencil(rep, "outer", outer)?;
            let v = inclusion(&b, &a, *level, tol)?;
            rep.verdict("verdict", v.label().into());
            match v {
                InclusionVerdict::Included(cert) => {
                    rep.verdict("unital_residual", num(cert.unital_residual));
                    rep.verdict("match_residual", num(cert.match_residual));
                    rep.witness("choi", io::cmatrix_to_value(cert.choi.matrix()));
                }
                InclusionVerdict::NotIncluded(x) => rep.witness("separating_point", tuple_to_value(&x)),
                InclusionVerdict::Unknown(why) => rep.verdict("reason", why.into()),
            }
        }
        Command::DropMember { pencil, point, .. } => {
            let (a, vis) = load_pencil(rep, "pencil", pencil)?;
            let x = load_tuple(rep, "point", point)?;
            let v = spectrahedrop_membership(&a, vis, &x, tol)?;
            rep.verdict("verdict", v.label().into());
            rep.verdict("visible_vars", vis.into());
            match v {
                DropVerdict::Member { hidden, residual, iterations } => {
                    rep.verdict("residual", num(residual));
                    rep.verdict("iterations", iterations.into());
                    rep.witness("hidden", tuple_to_value(&hidden));
                }
                DropVerdict::NoCertificate { residual, iterations } => {
                    rep.verdict("residual", num(residual));
                    rep.verdict("iterations", iterations.into());
                }
            }
        }
        Command::Decompose { point, out, .. } => {
            let x = load_tuple(rep, "point", point)?;
            let d = decompose_irreducibles(&x, tol, seed)?;
            rep.verdict("blocks", d.block_count().into());
            rep.verdict("block_sizes", json!(d.blocks.iter().map(|b| b.n()).collect::<Vec<_>>()));
            rep.verdict("multiplicities", json!(d.multiplicities));
            rep.verdict("reassembly_error", num(d.reassembly_error(&x)?));
            rep.witness("unitary", io::cmatrix_to_value(&d.unitary));
            match out {
                Some(prefix) => {
                    let mut files = Vec::new();
                    for (i, b) in d.blocks.iter().enumerate() {
                        let path = PathBuf::from(format!("{}.block{i}.json", prefix.display()));
                        io::save_value(&path, &tuple_to_value(b))?;
                        files.push(Value::from(path.display().to_string()));
                    }
                    rep.witness("block_files", Value::Array(files));
                }
                None => rep.witness("blocks", Value::Array(d.blocks.iter().map(tuple_to_value).collect())),
            }
        }
        Command::DualCheck { generator, level, samples, .. } => {
            let om = load_tuple(rep, "generator", generator)?;
            let r = polar_dual_check(&om, *level, *samples, seed, tol)?;
            rep.verdict("level", r.level.into());
            rep.verdict("samples", r.samples.into());
            rep.verdict("battery_size", r.battery_size.into());
            rep.verdict("inside", r.inside.into());
            rep.verdict("outside", r.outside.into());
            rep.verdict("counterexamples", r.counterexamples.len().into());
            if !r.counterexamples.is_empty() {
                rep.witness("counterexamples", json!(r.counterexamples));
            }
        }
        Command::SimplexCheck { pencil, .. } => {
            let (a, _) = load_pencil(rep, "pencil", pencil)?;
            let v = is_free_simplex(&a, tol, seed)?;
            rep.verdict("free_simplex", tri(v.value).into());
            rep.verdict("minimal", json!(v.report));
            rep.witness("minimal_pencil", io::pencil_to_value(&v.minimal, None));
            if v.value == Tri::Yes {
                let nf = naimark_normal_form(&a, tol, seed)?;
                rep.verdict("normal_form_verified", nf.verified().into());
                rep.verdict("normal_form_samples", nf.samples.into());
                rep.witness("normal_form", json!(nf.map));
            }
        }
        Command::Gallery { name, g, alpha, out, .. } => {
            let entry: GalleryEntry = match name {
                GalleryName::Cube => gallery::cube(*g)?,
                GalleryName::Interval => gallery::interval(),
                GalleryName::SpinDisk => gallery::spin_disk(),
                GalleryName::WildDisk => gallery::wild_disk(),
                GalleryName::Naimark => gallery::naimark(*g)?,
                GalleryName::TvLift => gallery::tv_lift(*alpha)?.0,
            };
            let vis = entry.is_drop().then_some(entry.visible_vars);
            let value = io::pencil_to_value(&entry.pencil, vis);
            rep.verdict("name", entry.name.clone().into());
            rep.verdict("g", entry.pencil.g().into());
            rep.verdict("d", entry.pencil.d().into());
            rep.verdict("visible_vars", entry.visible_vars.into());
            rep.verdict("notes", entry.notes.clone().into());
            match out {
                Some(path) => {
                    io::save_value(path, &value)?;
                    rep.witness("file", path.display().to_string().into());
                }
                None => rep.witness("pencil", value),
            }
        }
        Command::LiftOne { point, out, .. } => {
            let x = load_tuple(rep, "point", point)?;
            let z = gallery::lift_one(&x, tol)?;
            rep.verdict("size", z.n().into());
            rep.verdict("vanishing_residual", num(gallery::wild_poly(&z)?.frob()));
            rep.verdict("compression_error", num(z.compress(&identity_isometry(z.n(), x.n())).max_abs_diff(&x)));
            let value = tuple_to_value(&z);
            match out {
                Some(path) => {
                    io::save_value(path, &value)?;
                    rep.witness("file", path.display().to_string().into());
                }
                None => rep.witness("lifted", value),
            }
        }
    }
    Ok(())
}

fn identity_isometry(m: usize, n: usize) -> freespec::linalg::CMatrix {
    freespec::linalg::CMatrix::identity(m, n)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Classify { .. } => "classify",
        Command::Member { .. } => "member",
        Command::HullMember { .. } => "hull-member",
        Command::Include { .. } => "include",
        Command::DropMember { .. } => "drop-member",
        Command::Decompose { .. } => "decompose",
        Command::DualCheck { .. } => "dual-check",
        Command::SimplexCheck { .. } => "simplex-check",
        Command::Gallery { .. } => "gallery",
        Command::LiftOne { .. } => "lift-one",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common().clone();
    if let Some(jobs) = common.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if !(common.tol > 0.0) || !common.tol.is_finite() {
        eprintln!("error: --tol must be a positive number");
        return ExitCode::from(2);
    }
    let start = Instant::now();
    let mut rep = Report::new(command_name(&cli.command), common.tol, common.seed);
    match run(&cli.command, &mut rep) {
        Ok(()) => {
            let elapsed = common.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            print!("{}", io::to_json_string(&rep.finish(elapsed)));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
