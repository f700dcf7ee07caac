//! Command-line front end.
//!
//! Subcommands: `info`, `realify`, `basis`, `verify`, `eval`, `mesh`.
//! Usage errors exit with status 2; a failed numerical invariant exits with
//! status 1 after printing a machine-readable report on standard output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use symharm::basis::{assemble_basis, Flavor};
use symharm::group::GroupName;
use symharm::io::{
    self, eval_csv, load_block, obj_from_radius_grid, radius_grid, save_block, CoefficientFile,
    MeshSpec, TableKind,
};
use symharm::irreps::Realness;
use symharm::mat::CMat;
use symharm::protocol::{run_verification_with, Thresholds};
use symharm::system::SymmetrySystem;

fn usage() -> &'static str {
    "symharm <subcommand> [options]

subcommands:
  info    --group {T|O|I}
      Group order, irrep count, dimensions and the potentially-real set,
      computed from the bundled data.
  realify --group {T|O|I} [--p P] --out DIR
      Write real irrep matrices (stacked per element) and the similarity
      matrices S as coefficient tables.
  basis   --group {T|O|I} --l L [--p P] [--flavor real|complex] --out DIR
      Write every coefficient block of degree L.
  verify  --group {T|O|I} --lmax L [--seed N] [--dirs N]
          [--tol-orthonormality 1e-10] [--tol-residual 1e-9]
          [--tol-realness 1e-10] [--tol-gram 1e-8]
      Run the full verification protocol; exit 0 only if every check passes.
      The tolerance flags default to the tested contract.
  eval    --in FILE --grid NTHETAxNPHI --out CSV
      Tabulate a saved block on a grid (columns theta,phi,f_1..f_dp).
  mesh    --in FILE --j J --out OBJ [--grid NTHETAxNPHI]
      Triangulated radial surface r = kappa1 + kappa2*F_j of a saved block.

environment:
  SYMHARM_DATA_DIR  directory overriding the bundled group/irrep data files
"
}

struct Args {
    positional: Vec<String>,
    flags: Vec<(String, String)>,
}

impl Args {
    fn parse(argv: &[String]) -> Result<Args, String> {
        let mut positional = Vec::new();
        let mut flags = Vec::new();
        let mut i = 0;
        while i < argv.len() {
            let a = &argv[i];
            if let Some(name) = a.strip_prefix("--") {
                let value = argv.get(i + 1).ok_or(format!("flag --{name} needs a value"))?;
                flags.push((name.to_string(), value.clone()));
                i += 2;
            } else {
                positional.push(a.clone());
                i += 1;
            }
        }
        Ok(Args { positional, flags })
    }

    fn flag(&self, name: &str) -> Option<&str> {
        self.flags.iter().rev().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    fn require(&self, name: &str) -> Result<&str, String> {
        self.flag(name).ok_or(format!("missing required flag --{name}"))
    }

    fn group(&self) -> Result<GroupName, String> {
        let raw = self.require("group")?;
        GroupName::parse(raw).ok_or(format!("unknown group {raw:?} (use T, O or I)"))
    }
}

fn parse_grid(raw: &str) -> Result<(usize, usize), String> {
    let (a, b) = raw
        .split_once(['x', 'X'])
        .ok_or(format!("grid must look like 64x128, got {raw:?}"))?;
    let nt: usize = a.parse().map_err(|_| format!("bad grid rows {a:?}"))?;
    let np: usize = b.parse().map_err(|_| format!("bad grid cols {b:?}"))?;
    if nt < 2 || np < 1 {
        return Err("grid must be at least 2x1".to_string());
    }
    Ok((nt, np))
}

/// Distinguishes how a subcommand failed: bad invocation (exit 2) versus a
/// data, I/O or numerical-invariant failure (exit 1).
enum CmdError {
    Usage(String),
    Failure(String),
}

impl CmdError {
    fn usage<T>(msg: impl Into<String>) -> Result<T, CmdError> {
        Err(CmdError::Usage(msg.into()))
    }
}

fn failure(msg: impl std::fmt::Display) -> CmdError {
    CmdError::Failure(msg.to_string())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if argv.is_empty() {
        eprint!("{}", usage());
        return ExitCode::from(2);
    }
    let sub = argv[0].clone();
    let args = match Args::parse(&argv[1..]) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            eprint!("{}", usage());
            return ExitCode::from(2);
        }
    };
    if !args.positional.is_empty() {
        eprintln!("error: unexpected argument {:?}", args.positional[0]);
        eprint!("{}", usage());
        return ExitCode::from(2);
    }
    let run = match sub.as_str() {
        "info" => cmd_info(&args),
        "realify" => cmd_realify(&args),
        "basis" => cmd_basis(&args),
        "verify" => cmd_verify(&args),
        "eval" => cmd_eval(&args),
        "mesh" => cmd_mesh(&args),
        "--help" | "help" | "-h" => {
            print!("{}", usage());
            return ExitCode::SUCCESS;
        }
        other => {
            eprintln!("error: unknown subcommand {other:?}");
            eprint!("{}", usage());
            return ExitCode::from(2);
        }
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Failure(msg)) => {
            println!("FAILURE {msg}");
            ExitCode::from(1)
        }
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprint!("{}", usage());
            ExitCode::from(2)
        }
    }
}

fn load_system(args: &Args) -> Result<SymmetrySystem, CmdError> {
    let name = args.group().map_err(CmdError::Usage)?;
    SymmetrySystem::load(name).map_err(|e| failure(format!("failed to load {name}: {e}")))
}

fn cmd_info(args: &Args) -> Result<(), CmdError> {
    let sys = load_system(args)?;
    let dims: Vec<String> = sys.irreps.iter().map(|i| i.dim.to_string()).collect();
    let real: Vec<String> = sys
        .irreps
        .iter()
        .filter(|i| i.realness == Realness::PotentiallyReal)
        .map(|i| i.p.to_string())
        .collect();
    println!("group {}", sys.group.name);
    println!("N_g {}", sys.group.order());
    println!("N_rep {}", sys.irreps.len());
    println!("N_classes {}", sys.group.classes.len());
    println!("dims {}", dims.join(","));
    println!("potentially_real {}", real.join(","));
    for irrep in &sys.irreps {
        println!("irrep p={} label={} dim={} {}", irrep.p, irrep.label, irrep.dim, irrep.realness);
    }
    Ok(())
}

fn ensure_dir(raw: &str) -> Result<PathBuf, CmdError> {
    let dir = PathBuf::from(raw);
    std::fs::create_dir_all(&dir)
        .map_err(|e| failure(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn selected_ps(args: &Args, sys: &SymmetrySystem) -> Result<Vec<usize>, CmdError> {
    match args.flag("p") {
        Some(raw) => {
            let p: usize = match raw.parse() {
                Ok(p) => p,
                Err(_) => return CmdError::usage(format!("bad irrep index {raw:?}")),
            };
            if p == 0 || p > sys.irreps.len() {
                return CmdError::usage(format!(
                    "irrep index {p} out of range 1..={}",
                    sys.irreps.len()
                ));
            }
            Ok(vec![p])
        }
        None => Ok(sys.irreps.iter().map(|i| i.p).collect()),
    }
}

fn cmd_realify(args: &Args) -> Result<(), CmdError> {
    let sys = load_system(args)?;
    let dir = ensure_dir(args.require("out").map_err(CmdError::Usage)?)?;
    let letter = sys.group.name.letter().to_lowercase();
    for p in selected_ps(args, &sys)? {
        let Some(r) = sys.realifications[p - 1].as_ref() else {
            println!("skip p={} ({})", p, sys.irreps[p - 1].realness);
            continue;
        };
        let d = sys.irreps[p - 1].dim;
        let s_file = CoefficientFile::from_matrix(
            TableKind::Similarity,
            sys.group.name,
            p,
            r.s.clone(),
            Flavor::ComplexY,
        )
        .map_err(failure)?;
        let s_path = dir.join(format!("{letter}_p{p}_similarity.coef"));
        io::save_coefficient_file(&s_path, &s_file).map_err(failure)?;
        // All realified matrices stacked: element g occupies rows g*d..(g+1)*d.
        let mut stacked = CMat::zeros(sys.group.order() * d, d);
        for (g, m) in r.gamma_r.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    stacked.set(g * d + i, j, num_complex::Complex64::new(m.get(i, j), 0.0));
                }
            }
        }
        let g_file = CoefficientFile::from_matrix(
            TableKind::RealIrrep,
            sys.group.name,
            p,
            stacked,
            Flavor::RealCheckY,
        )
        .map_err(failure)?;
        let g_path = dir.join(format!("{letter}_p{p}_real_irrep.coef"));
        io::save_coefficient_file(&g_path, &g_file).map_err(failure)?;
        println!("wrote {} and {}", s_path.display(), g_path.display());
    }
    Ok(())
}

fn cmd_basis(args: &Args) -> Result<(), CmdError> {
    let sys = load_system(args)?;
    let l: usize = args
        .require("l")
        .and_then(|v| v.parse().map_err(|_| "bad degree for --l".to_string()))
        .map_err(CmdError::Usage)?;
    let flavor = match args.flag("flavor") {
        None => Flavor::RealCheckY,
        Some(raw) => match Flavor::parse(raw) {
            Some(f) => f,
            None => return CmdError::usage(format!("unknown flavor {raw:?}")),
        },
    };
    let dir = ensure_dir(args.require("out").map_err(CmdError::Usage)?)?;
    let wanted = selected_ps(args, &sys)?;
    let set = assemble_basis(&sys, l).map_err(|e| failure(format!("assembly failed: {e}")))?;
    let blocks = match flavor {
        Flavor::RealCheckY => &set.real_blocks,
        Flavor::ComplexY => &set.complex_blocks,
    };
    let letter = sys.group.name.letter().to_lowercase();
    let mut wrote = 0;
    for block in blocks {
        if !wanted.contains(&block.p) {
            continue;
        }
        let path = dir.join(format!(
            "{letter}_l{l}_p{}_n{}_{}.coef",
            block.p,
            block.n,
            flavor.as_str()
        ));
        save_block(&path, block).map_err(failure)?;
        println!("wrote {}", path.display());
        wrote += 1;
    }
    println!("blocks {wrote}");
    Ok(())
}

fn cmd_verify(args: &Args) -> Result<(), CmdError> {
    let sys = load_system(args)?;
    let lmax: usize = args
        .require("lmax")
        .and_then(|v| v.parse().map_err(|_| "bad degree for --lmax".to_string()))
        .map_err(CmdError::Usage)?;
    let seed: u64 = match args.flag("seed") {
        None => 0,
        Some(raw) => match raw.parse() {
            Ok(v) => v,
            Err(_) => return CmdError::usage(format!("bad seed {raw:?}")),
        },
    };
    let dirs: usize = match args.flag("dirs") {
        None => 30,
        Some(raw) => match raw.parse() {
            Ok(v) => v,
            Err(_) => return CmdError::usage(format!("bad direction count {raw:?}")),
        },
    };
    let tol_flag = |name: &str, default: f64| -> Result<f64, CmdError> {
        match args.flag(name) {
            None => Ok(default),
            Some(raw) => match raw.parse::<f64>() {
                Ok(v) if v > 0.0 => Ok(v),
                _ => Err(CmdError::Usage(format!("bad tolerance {raw:?} for --{name}"))),
            },
        }
    };
    let defaults = Thresholds::default();
    let tol = Thresholds {
        orthonormality: tol_flag("tol-orthonormality", defaults.orthonormality)?,
        residual: tol_flag("tol-residual", defaults.residual)?,
        realness: tol_flag("tol-realness", defaults.realness)?,
        gram: tol_flag("tol-gram", defaults.gram)?,
    };
    let report = run_verification_with(&sys, lmax, seed, dirs, &tol)
        .map_err(|e| failure(format!("verification aborted: {e}")))?;
    print!("{}", report.render());
    if report.all_pass() {
        Ok(())
    } else {
        Err(failure("one or more checks failed"))
    }
}

fn cmd_eval(args: &Args) -> Result<(), CmdError> {
    let input = PathBuf::from(args.require("in").map_err(CmdError::Usage)?);
    let (nt, np) =
        parse_grid(args.require("grid").map_err(CmdError::Usage)?).map_err(CmdError::Usage)?;
    let out = PathBuf::from(args.require("out").map_err(CmdError::Usage)?);
    let block = load_block(&input).map_err(failure)?;
    let csv = eval_csv(&block, nt, np).map_err(failure)?;
    write_text(&out, &csv)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_mesh(args: &Args) -> Result<(), CmdError> {
    let input = PathBuf::from(args.require("in").map_err(CmdError::Usage)?);
    let j: usize = args
        .require("j")
        .and_then(|v| v.parse().map_err(|_| "bad component index for --j".to_string()))
        .map_err(CmdError::Usage)?;
    let out = PathBuf::from(args.require("out").map_err(CmdError::Usage)?);
    let (nt, np) = match args.flag("grid") {
        None => (64, 128),
        Some(raw) => parse_grid(raw).map_err(CmdError::Usage)?,
    };
    let block = load_block(&input).map_err(failure)?;
    if j == 0 || j > block.dim() {
        return CmdError::usage(format!("component --j must be in 1..={}", block.dim()));
    }
    let spec = MeshSpec::for_block(&block, j - 1, nt, np).map_err(failure)?;
    let grid = radius_grid(&block, j - 1, &spec).map_err(failure)?;
    let obj = obj_from_radius_grid(&grid, &spec);
    write_text(&out, &obj)?;
    println!(
        "wrote {} (kappa1 {} kappa2 {})",
        out.display(),
        spec.kappa1,
        io::format_f64(spec.kappa2)
    );
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CmdError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| failure(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, text)
        .map_err(|e| failure(format!("cannot write {}: {e}", path.display())))
}
