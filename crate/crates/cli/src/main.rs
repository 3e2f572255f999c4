//! `swe` — finite-volume shallow water solver.
//!
//! Subcommands: `run` (drive a built-in case and write CSV/VTK snapshots),
//! `convergence` (manufactured-solution mesh refinement study), `mesh gen` /
//! `mesh check` (structured triangulations), and `riemann` (print the star
//! state and wave fan of a single interface problem).
//!
//! Exit codes: 0 on success, 2 for configuration or usage errors, 3 for
//! solver or I/O failures.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use swe_cli::config::{
    self, parse_flux, parse_format_list, parse_time_list, resolve, RunConfig,
};
use swe_cli::convergence::manufactured_convergence;
use swe_cli::error::CliError;
use swe_cli::{output, runner};
use swe_core::mesh::{generate_rect_mesh, load_mesh, save_mesh, validate_mesh};
use swe_core::riemann::{
    exact_pressure_star, exact_swe_solver, two_rarefaction_star, SolverTolerances, StarState, Wave,
};
use swe_core::solver1d::SchemeOrder;
use swe_core::state::{celerity, Primitive1D};

#[derive(Parser)]
#[command(
    name = "swe",
    version,
    about = "Finite-volume shallow water solver (advection-pressure flux splitting)"
)]
struct Cli {
    /// Worker threads for the 2D edge loops (default: one per core).
    /// Results are bit-identical for any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a case and write snapshots plus a manifest.
    Run(RunArgs),
    /// Manufactured-solution convergence study (2D, scores q_x at T=1).
    Convergence(ConvergenceArgs),
    /// Generate or inspect triangular meshes.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Solve one Riemann problem and print the star state and wave fan.
    Riemann(RiemannArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in case id (riemann1..3, bump1d, bump2d, dam2d, manufactured,
    /// lake1d, lake2d).
    #[arg(long)]
    case: Option<String>,
    /// key = value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spatial order, 1 or 2.
    #[arg(long)]
    order: Option<u32>,
    /// Interface flux: fvs-2r, fvs-exact, or godunov-exact.
    #[arg(long)]
    flux: Option<String>,
    /// CFL coefficient in (0, 1].
    #[arg(long)]
    cfl: Option<f64>,
    /// Gravitational acceleration.
    #[arg(long)]
    g: Option<f64>,
    /// 1D cell count.
    #[arg(long)]
    m: Option<usize>,
    /// 2D rectangles along x (two triangles each).
    #[arg(long)]
    nx: Option<usize>,
    /// 2D rectangles along y.
    #[arg(long)]
    ny: Option<usize>,
    /// 2D mesh file (overrides --nx/--ny).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Comma-separated increasing snapshot times.
    #[arg(long)]
    output_times: Option<String>,
    /// Output directory (created if missing).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Comma-separated output formats: csv, vtk.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Spatial order, 1 or 2.
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// Interface flux: fvs-2r, fvs-exact, or godunov-exact.
    #[arg(long, default_value = "fvs-2r")]
    flux: String,
    /// Comma-separated increasing mesh resolutions (nx = ny).
    #[arg(long, default_value = "16,32,64,128")]
    resolutions: String,
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a structured triangulation of a rectangle.
    Gen {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long, default_value_t = 1.0)]
        lx: f64,
        #[arg(long, default_value_t = 1.0)]
        ly: f64,
        /// Lower-left corner as x,y.
        #[arg(long, default_value = "0,0")]
        origin: String,
        /// Destination file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a mesh file and print a summary.
    Check {
        file: PathBuf,
    },
}

#[derive(Args)]
struct RiemannArgs {
    /// Left depth.
    #[arg(long)]
    hl: f64,
    /// Left velocity.
    #[arg(long)]
    ul: f64,
    /// Left scalar concentration.
    #[arg(long, default_value_t = 0.0)]
    psil: f64,
    /// Right depth.
    #[arg(long)]
    hr: f64,
    /// Right velocity.
    #[arg(long)]
    ur: f64,
    /// Right scalar concentration.
    #[arg(long, default_value_t = 0.0)]
    psir: f64,
    /// Gravitational acceleration.
    #[arg(long, default_value_t = 9.81)]
    g: f64,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => cmd_run(args),
        Command::Convergence(args) => cmd_convergence(args),
        Command::Mesh { command } => cmd_mesh(command),
        Command::Riemann(args) => cmd_riemann(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let flags = RunConfig {
        case: args.case,
        order: args.order,
        flux: args.flux.as_deref().map(parse_flux).transpose()?,
        cfl: args.cfl,
        g: args.g,
        m: args.m,
        nx: args.nx,
        ny: args.ny,
        mesh: args.mesh,
        output_times: args
            .output_times
            .as_deref()
            .map(|s| parse_time_list("--output-times", s))
            .transpose()?,
        out_dir: args.out_dir,
        formats: args
            .format
            .as_deref()
            .map(|s| parse_format_list("--format", s))
            .transpose()?,
    };
    let file = match &args.config {
        Some(path) => config::load_config_file(path)?,
        None => RunConfig::default(),
    };
    let resolved = resolve(&flags.over(file))?;

    let outcome = runner::run(&resolved)?;
    let files = runner::write_outputs(&resolved, &outcome)?;
    println!("{}", runner::summarize(&resolved, &outcome));
    println!(
        "wrote {} files to {}",
        files.len(),
        resolved.out_dir.display()
    );
    Ok(())
}

fn cmd_convergence(args: ConvergenceArgs) -> Result<(), CliError> {
    let order = match args.order {
        1 => SchemeOrder::First,
        2 => SchemeOrder::Second,
        other => return Err(CliError::Usage(format!("order must be 1 or 2, got {other}"))),
    };
    let flux = parse_flux(&args.flux)?;
    let resolutions: Vec<usize> = args
        .resolutions
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad resolution '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    let study = manufactured_convergence(order, flux, &resolutions)?;
    println!(
        "manufactured solution, {} error at T = {}:",
        study.variable, study.t_end
    );
    print!("{}", study.table());
    if let Some(order) = study.finest_order() {
        println!("finest-pair L1 order: {order:.3}");
    }
    Ok(())
}

fn cmd_mesh(command: MeshCommand) -> Result<(), CliError> {
    match command {
        MeshCommand::Gen {
            nx,
            ny,
            lx,
            ly,
            origin,
            out,
        } => {
            let origin = parse_pair(&origin)?;
            let mesh = generate_rect_mesh(nx, ny, lx, ly, origin)?;
            save_mesh(&mesh, &out)?;
            println!(
                "wrote {} nodes, {} cells to {}",
                mesh.n_nodes(),
                mesh.n_cells(),
                out.display()
            );
            Ok(())
        }
        MeshCommand::Check { file } => {
            let mesh = load_mesh(&file)?;
            let problems = validate_mesh(&mesh);
            if !problems.is_empty() {
                for p in &problems {
                    eprintln!("problem: {p}");
                }
                return Err(CliError::Usage(format!(
                    "{}: {} validation problems",
                    file.display(),
                    problems.len()
                )));
            }
            let total_area: f64 = mesh.areas.iter().sum();
            let boundary_edges: usize = (0..mesh.n_cells())
                .map(|i| mesh.edges[i].iter().filter(|e| e.neighbor.is_none()).count())
                .sum();
            println!(
                "{}: ok ({} nodes, {} cells, area {}, {} boundary edges)",
                file.display(),
                mesh.n_nodes(),
                mesh.n_cells(),
                total_area,
                boundary_edges
            );
            Ok(())
        }
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("expected x,y but got '{s}'")));
    }
    let x = parts[0]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad coordinate '{}'", parts[0])))?;
    let y = parts[1]
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad coordinate '{}'", parts[1])))?;
    Ok([x, y])
}

fn cmd_riemann(args: RiemannArgs) -> Result<(), CliError> {
    if !(args.hl >= 0.0 && args.hr >= 0.0) {
        return Err(CliError::Usage("depths must be nonnegative".into()));
    }
    if !(args.g.is_finite() && args.g > 0.0) {
        return Err(CliError::Usage(format!("g must be positive, got {}", args.g)));
    }
    let left = Primitive1D::new(args.hl, args.ul, args.psil);
    let right = Primitive1D::new(args.hr, args.ur, args.psir);
    let g = args.g;
    let tols = SolverTolerances::default();
    let err = |e: swe_core::riemann::RiemannError| CliError::Runtime(e.to_string());

    println!(
        "data: left  h = {} u = {} psi = {}",
        output::fmt_f64(left.h),
        output::fmt_f64(left.u),
        output::fmt_f64(left.psi)
    );
    println!(
        "      right h = {} u = {} psi = {}",
        output::fmt_f64(right.h),
        output::fmt_f64(right.u),
        output::fmt_f64(right.psi)
    );

    let tr = two_rarefaction_star(left, right, g).map_err(err)?;
    println!("\npressure system, two-rarefaction closed form:");
    print_pressure_star(&tr, left, right, g);

    let exact = exact_pressure_star(left, right, g, tols).map_err(err)?;
    println!("\npressure system, exact (Newton + bisection fallback):");
    print_pressure_star(&exact, left, right, g);

    let full = exact_swe_solver(left, right, g, tols).map_err(err)?;
    println!("\nfull shallow water equations, exact:");
    if full.star.dry {
        println!("  dry star region (depths vanish between the waves)");
    }
    println!(
        "  h* = {}  u* = {}",
        output::fmt_f64(full.star.h_star),
        output::fmt_f64(full.u_star)
    );
    let c_star = celerity(full.star.h_star, g);
    print_wave(
        "left ",
        full.star.wave_left,
        full.star.s_l,
        left.u - celerity(left.h, g),
        full.u_star - c_star,
    );
    println!(
        "  contact:     speed {} (psi jumps {} -> {})",
        output::fmt_f64(full.u_star),
        output::fmt_f64(left.psi),
        output::fmt_f64(right.psi)
    );
    print_wave(
        "right",
        full.star.wave_right,
        full.star.s_r,
        full.u_star + c_star,
        right.u + celerity(right.h, g),
    );
    Ok(())
}

/// Pressure-system wave fan: eigenvalues are -c and +c, so rarefaction
/// edges run between the data celerity and the star celerity.
fn print_pressure_star(star: &StarState, left: Primitive1D, right: Primitive1D, g: f64) {
    if star.dry {
        println!("  dry star region (zero interface flux)");
    }
    println!(
        "  h* = {}  q* = {}",
        output::fmt_f64(star.h_star),
        output::fmt_f64(star.q_star)
    );
    let c_star = celerity(star.h_star, g);
    print_wave(
        "left ",
        star.wave_left,
        star.s_l,
        -celerity(left.h, g),
        -c_star,
    );
    print_wave(
        "right",
        star.wave_right,
        star.s_r,
        c_star,
        celerity(right.h, g),
    );
}

fn print_wave(side: &str, wave: Wave, shock_speed: Option<f64>, head: f64, tail: f64) {
    match (wave, shock_speed) {
        (Wave::Shock, Some(s)) => {
            println!("  {side} wave:  shock, speed {}", output::fmt_f64(s));
        }
        (Wave::Shock, None) => println!("  {side} wave:  shock"),
        (Wave::Rarefaction, _) => println!(
            "  {side} wave:  rarefaction, edges {} .. {}",
            output::fmt_f64(head),
            output::fmt_f64(tail)
        ),
    }
}
