use std::io::Write;
use std::path::Path;

use minsurf::area::{area_biquadratic, area_report, ruled1_area, ruled2_area, AreaReport};
use minsurf::geometry::{bilinear_height_grid, make_quad};
use minsurf::io::{grid_from_csv, grid_to_csv, grid_to_obj, patches_to_csv, patches_to_obj, Report};
use minsurf::schwarz::{compute_kappa, distance_to_boundary, schwarz_mesh, Piece, SchwarzPatch};
use minsurf::solver::{solve_detailed, solve_many, Solution, SolverConfig};
use minsurf::{Execution, HeightGrid, QuadConfig};

use crate::{CliError, Command, ConfigArg, Format, OutputArgs, PieceArg, QuadArgs, SolverArgs};

/// Quadrature tolerance for every reported biquadratic area.
const AREA_TOL: f64 = 1e-10;

const TABLE_ROWS: [(f64, f64); 7] = [
    (1.0, 1.0),
    (2.0, 1.0),
    (1.0, 2.0),
    (3.0, 1.0),
    (1.0, 3.0),
    (3.0, 2.0),
    (2.0, 3.0),
];

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Table1 { n, solver, output } => table1(n, &solver, &output),
        Command::Solve { quad, solver, output } => solve(&quad, &solver, &output),
        Command::Areas { input, quad, output } => areas(input.as_deref(), &quad, &output),
        Command::Schwarz { piece, n, margin, output } => schwarz(piece, n, margin, &output),
        Command::Export { input, output } => export(&input, &output),
    }
}

fn config(arg: ConfigArg) -> QuadConfig {
    match arg {
        ConfigArg::Ruled1 => QuadConfig::Ruled1,
        ConfigArg::Ruled2 => QuadConfig::Ruled2,
    }
}

fn solver_config(args: &SolverArgs) -> Result<SolverConfig, CliError> {
    let cfg = SolverConfig {
        reduction_factor: args.reduction,
        max_iters: args.max_iters,
        residual_tol: args.tol,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Sends the data to `--out` or standard output.
fn emit(output: &OutputArgs, data: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => std::fs::write(path, data).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(data.as_bytes()).and_then(|_| stdout.flush()) {
                // a closed pipe (`| head`) is the reader's choice, not a failure
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                }),
            }
        }
    }
}

/// Writes the data and, unless the data already is the report, shows the
/// report on stdout (data in a file) or stderr (data on stdout).
fn emit_with_report(output: &OutputArgs, format: Format, data: &str, report: &Report) -> Result<(), CliError> {
    if format == Format::Report {
        return emit(output, &report.to_string());
    }
    emit(output, data)?;
    if output.out.is_some() {
        print!("{report}");
    } else {
        eprint!("{report}");
    }
    Ok(())
}

fn unsupported(command: &str, format: Format) -> CliError {
    CliError::Usage(format!("{command} cannot write {format:?} output").to_lowercase())
}

fn table1(n: usize, solver: &SolverArgs, output: &OutputArgs) -> Result<(), CliError> {
    let format = output.format.unwrap_or(Format::Report);
    if format == Format::Obj {
        return Err(unsupported("table1", format));
    }
    let cfg = solver_config(solver)?;
    let quads = TABLE_ROWS
        .iter()
        .map(|&(r, d)| make_quad(QuadConfig::Ruled2, r, d))
        .collect::<Result<Vec<_>, _>>()?;
    let solutions = solve_many(&quads, n, &cfg, Execution::default());

    let mut report = Report::new();
    report.push("n", n);
    report.push("columns", "numerical area | spread | ruled2 area | ruled1 area | status iterations");
    let mut csv = String::from("r d numerical spread ruled2 ruled1 status iterations\n");
    let mut failures = Vec::new();
    for (&(r, d), solution) in TABLE_ROWS.iter().zip(solutions) {
        let (a2, a1) = (ruled2_area(r, d)?, ruled1_area(r, d)?);
        let (numerical, spread, status, iterations) = match row_numbers(solution, n) {
            Ok((area, spread, s)) => {
                if !s.report.status.is_converged() {
                    failures.push(format!("({r},{d}) {}", s.report.status.label()));
                }
                (
                    format!("{area:.6}"),
                    format!("{spread:.1e}"),
                    status_text(&s),
                    s.report.iterations.to_string(),
                )
            }
            Err(e) => {
                failures.push(format!("({r},{d}) {e}"));
                ("-".into(), "-".into(), "Error".into(), "-".into())
            }
        };
        report.push(
            format!("{r},{d}"),
            format!("{numerical} | {spread} | {a2:.9} | {a1:.9} | {status} {iterations}"),
        );
        csv.push_str(&format!("{r} {d} {numerical} {spread} {a2:.9} {a1:.9} {status} {iterations}\n"));
    }
    let text = if format == Format::Csv { csv } else { report.to_string() };
    emit(output, &text)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::NotConverged(failures.join(", ")))
    }
}

fn row_numbers(solution: minsurf::Result<Solution>, n: usize) -> Result<(f64, f64, Solution), CliError> {
    let s = solution?;
    if n % 2 != 0 {
        return Err(CliError::Usage(format!("table1 needs an even N for the biquadratic area (got {n})")));
    }
    let area = area_biquadratic(&s.grid, AREA_TOL)?;
    let spread = s.area_spread(AREA_TOL)?;
    Ok((area, spread, s))
}

fn status_text(s: &Solution) -> String {
    let status = s.report.status;
    if status.is_converged() {
        format!("{}({})", status.label(), status.criterion_label())
    } else {
        status.label().to_string()
    }
}

fn solve(quad: &QuadArgs, solver: &SolverArgs, output: &OutputArgs) -> Result<(), CliError> {
    let format = output.format.unwrap_or(Format::Csv);
    let cfg = solver_config(solver)?;
    let q = make_quad(config(quad.config), quad.r, quad.d)?;
    let s = solve_detailed(&q, quad.n, &cfg)?;
    let rep = &s.report;

    let mut report = Report::new();
    report
        .push("config", q.config)
        .push("r", q.r)
        .push("d", q.d)
        .push("n", quad.n)
        .push("status", rep.status.label())
        .push("criterion", rep.status.criterion_label())
        .push("iterations", rep.iterations)
        .push("max_f", format!("{:e}", rep.max_f.last().copied().unwrap_or(f64::NAN)))
        .push("max_dz", format!("{:e}", rep.max_dz.last().copied().unwrap_or(f64::NAN)))
        .push("reduction_factor", rep.reduction_factor)
        .push("residual_tol", format!("{:e}", rep.residual_tol));
    if quad.n % 2 == 0 {
        report
            .push("area_biquadratic", area_biquadratic(&s.grid, AREA_TOL)?)
            .push("area_spread", format!("{:e}", s.area_spread(AREA_TOL)?));
    }
    let data = match format {
        Format::Csv => grid_to_csv(&s.grid),
        Format::Obj => grid_to_obj(&s.grid),
        Format::Report => String::new(),
    };
    emit_with_report(output, format, &data, &report)?;
    if rep.status.is_converged() {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "{} after {} iterations",
            rep.status.label(),
            rep.iterations
        )))
    }
}

fn area_lines(a: &AreaReport) -> (Report, String) {
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| x.to_string());
    let mut report = Report::new();
    report
        .push("n", a.n)
        .push("gradient_sum", a.gradient_sum)
        .push("triangulation", a.triangulation)
        .push("biquadratic", opt(a.biquadratic))
        .push("analytic_ruled", opt(a.analytic_ruled));
    let csv = format!(
        "n gradient_sum triangulation biquadratic analytic_ruled\n{} {} {} {} {}\n",
        a.n,
        a.gradient_sum,
        a.triangulation,
        opt(a.biquadratic),
        opt(a.analytic_ruled)
    );
    (report, csv)
}

fn areas(input: Option<&Path>, quad: &QuadArgs, output: &OutputArgs) -> Result<(), CliError> {
    let format = output.format.unwrap_or(Format::Report);
    if format == Format::Obj {
        return Err(unsupported("areas", format));
    }
    let grid: HeightGrid = match input {
        Some(path) => grid_from_csv(&read(path)?)?,
        None => bilinear_height_grid(&make_quad(config(quad.config), quad.r, quad.d)?, quad.n)?,
    };
    let (report, csv) = area_lines(&area_report(&grid, AREA_TOL)?);
    let text = if format == Format::Csv { csv } else { report.to_string() };
    emit(output, &text)
}

fn schwarz(piece: PieceArg, n: usize, margin: f64, output: &OutputArgs) -> Result<(), CliError> {
    let format = output.format.unwrap_or(Format::Obj);
    let pieces: &[Piece] = match piece {
        PieceArg::FrontRight => &[Piece::FrontRight],
        PieceArg::FrontLeft => &[Piece::FrontLeft],
        PieceArg::Both => &[Piece::FrontRight, Piece::FrontLeft],
    };
    let kappa = compute_kappa()?;
    let patches = pieces
        .iter()
        .map(|&p| schwarz_mesh(p, n, n, margin, Execution::default()))
        .collect::<Result<Vec<SchwarzPatch>, _>>()?;

    let (mut lo, mut hi, mut rim, mut iso) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for p in &patches {
        let (a, b) = p.z_range();
        lo = lo.min(a);
        hi = hi.max(b);
        rim = p.rim().map(distance_to_boundary).fold(rim, f64::max);
        iso = iso.max(p.isotropy_residual);
    }
    let mut report = Report::new();
    report
        .push("kappa", format!("{:.5}", kappa.kappa))
        .push("edge_integral", format!("{:.5}", kappa.edge_integral))
        .push("corner_integral", kappa.corner_integral)
        .push("geometric_scale", kappa.geometric_scale)
        .push("pieces", pieces.iter().map(Piece::label).collect::<Vec<_>>().join(" "))
        .push("nodes_per_piece", n * n)
        .push("z_min", lo)
        .push("z_max", hi)
        .push("rim_edge_distance", format!("{rim:e}"))
        .push("isotropy_residual", format!("{iso:e}"));
    let data = match format {
        Format::Obj => patches_to_obj(&patches),
        Format::Csv => patches_to_csv(&patches),
        Format::Report => String::new(),
    };
    emit_with_report(output, format, &data, &report)
}

fn export(input: &Path, output: &OutputArgs) -> Result<(), CliError> {
    let format = output.format.unwrap_or(Format::Obj);
    let grid = grid_from_csv(&read(input)?)?;
    match format {
        Format::Obj => emit(output, &grid_to_obj(&grid)),
        Format::Csv => emit(output, &grid_to_csv(&grid)),
        Format::Report => Err(unsupported("export", format)),
    }
}
