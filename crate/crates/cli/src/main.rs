use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qrange::exact::{canonical_2x2, jordan3_q_radius, q_crawford_2x2, q_radius_2x2};
use qrange::format::sig12;
use qrange::laws::{run_suite, SuiteConfig};
use qrange::semispace::{cdiag, rmat};
use qrange::sequences::{
    geometric_schedule, trace_crawford, trace_gaps, trace_q, trace_radius, OperatorSequence,
};
use qrange::{
    a_crawford_with, a_opnorm, a_radius, a_radius_with, aq_crawford, aq_radius, reduce_compressed, Budget, CMatrix,
    Error, MatrixJson, QParam, Weight,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qrange", version, about = "(A,q)-numerical radius and Crawford number toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Radius, Crawford number, norm and gaps of one matrix, as JSON.
    Compute(ComputeArgs),
    /// CSV curves for the worked examples.
    Figure(FigureArgs),
    /// Randomized inequality suite; exit 1 on any hard failure.
    Verify(VerifyArgs),
    /// Convergence trace of a sequence, as CSV.
    Converge(ConvergeArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// Operator as matrix JSON.
    #[arg(long)]
    matrix: PathBuf,
    /// Weight as matrix JSON (default identity).
    #[arg(long)]
    weight: Option<PathBuf>,
    /// q as RE or RE,IM.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Estimator restarts.
    #[arg(long, default_value_t = 64)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Closed-form values (2x2 after reduction, real q).
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long)]
    example: u32,
    #[arg(long)]
    out: PathBuf,
    /// Number of q values.
    #[arg(long, default_value_t = 101)]
    grid: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    instances: usize,
    /// Comma-separated dimensions.
    #[arg(long, default_value = "2,3,4", value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    budget: usize,
    /// Summary CSV; the per-check JSON lines go next to it with extension `jsonl`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also check the linear-combination bounds with the alternative composite parameter.
    #[arg(long)]
    proof_form: bool,
    /// Also check the linear-combination bounds with the ordinary adjoint.
    #[arg(long)]
    ordinary_adjoint: bool,
    /// Cripple the estimator (one start, no ascent, no rechecks) to exercise failure reporting.
    #[arg(long)]
    inject_fault: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Perturb,
    Multiplication,
    Qseq,
    Constant,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Radius,
    Crawford,
    GapRadius,
    GapCrawford,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long, value_enum)]
    rule: Rule,
    #[arg(long)]
    out: PathBuf,
    /// Limit operator as matrix JSON (default depends on the rule).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Weight as matrix JSON (default identity).
    #[arg(long)]
    weight: Option<PathBuf>,
    /// Perturbation direction `E` in `T + E/n` (default `T` itself).
    #[arg(long)]
    direction: Option<PathBuf>,
    /// q as RE or RE,IM (ignored by qseq).
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    q: String,
    #[arg(long, value_enum, default_value = "gap-radius")]
    quantity: Quantity,
    /// Grid points of the multiplication rule.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Largest index; indices are the powers of two up to it.
    #[arg(long, default_value_t = 256)]
    max_n: usize,
    #[arg(long, default_value_t = 64)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Unbounded(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotABounded(_) => Failure::Unbounded(e.to_string()),
            Error::EnvelopeViolated { .. } => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn read_json(path: &Path) -> Result<MatrixJson, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    MatrixJson::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<CMatrix, Failure> {
    Ok(read_json(path)?.to_matrix()?)
}

fn read_weight(path: Option<&Path>, dim: usize) -> Result<Weight, Failure> {
    match path {
        Some(p) => Ok(read_json(p)?.to_weight()?),
        None => Ok(Weight::identity(dim)),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn parse_q(s: &str) -> Result<QParam, Failure> {
    let bad = || Failure::Usage(format!("invalid q '{s}', expected RE or RE,IM"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
    let q = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(bad()),
    };
    Ok(QParam::new(q)?)
}

fn budget(restarts: usize, seed: u64) -> Budget {
    Budget::with_restarts(restarts.max(1)).with_seed(seed)
}

fn cvec_json(v: &qrange::CVector) -> serde_json::Value {
    json!({
        "re": v.iter().map(|z| z.re).collect::<Vec<_>>(),
        "im": v.iter().map(|z| z.im).collect::<Vec<_>>(),
    })
}

fn cmd_compute(args: ComputeArgs) -> Result<(), Failure> {
    let t = read_matrix(&args.matrix)?;
    let w = read_weight(args.weight.as_deref(), t.nrows())?;
    let q = parse_q(&args.q)?;
    let norm = a_opnorm(&w, &t)?;
    let out = if args.exact {
        let qv = q.value();
        if qv.im != 0.0 || qv.re < 0.0 {
            return Err(Failure::Usage("--exact requires real q in (0, 1]".into()));
        }
        let b = reduce_compressed(&w, &t)?.b;
        if b.nrows() != 2 {
            return Err(Failure::Usage(format!(
                "--exact requires a 2x2 reduced matrix, got {0}x{0}",
                b.nrows()
            )));
        }
        let form = canonical_2x2(&b)?;
        let one = Complex64::new(1.0, 0.0);
        let (omega_aq, c_aq) = (q_radius_2x2(&form, qv)?, q_crawford_2x2(&form, qv)?);
        json!({
            "omega_aq": omega_aq,
            "c_aq": c_aq,
            "omega_a": q_radius_2x2(&form, one)?,
            "c_a": q_crawford_2x2(&form, one)?,
            "opnorm": norm,
            "gap_omega": norm - omega_aq,
            "gap_c": norm - c_aq,
            "witnesses": null,
            "budget": null,
            "canonical_form": { "t": form.t, "gamma": [form.gamma.re, form.gamma.im], "a": form.a, "b": form.b },
        })
    } else {
        let budget = budget(args.budget, args.seed);
        let omega = aq_radius(&w, &t, q, &budget)?;
        let c = aq_crawford(&w, &t, q, &budget)?;
        let omega_a = a_radius_with(&w, &t, &budget)?;
        let c_a = a_crawford_with(&w, &t, &budget)?;
        json!({
            "omega_aq": omega.value,
            "c_aq": c.value,
            "omega_a": omega_a.value,
            "c_a": c_a.value,
            "opnorm": norm,
            "gap_omega": norm - omega.value,
            "gap_c": norm - c.value,
            "witnesses": {
                "omega_aq": { "x": cvec_json(&omega.witness_x), "y": cvec_json(&omega.witness_y) },
                "c_aq": { "x": cvec_json(&c.witness_x), "y": cvec_json(&c.witness_y) },
            },
            "budget": budget,
        })
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(())
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| if k + 1 == points { hi } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 })
        .collect()
}

fn csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|&v| sig12(v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn cmd_figure(args: FigureArgs) -> Result<(), Failure> {
    if args.grid < 2 {
        return Err(Failure::Usage("--grid needs at least 2 points".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let re = |q: f64| Complex64::new(q, 0.0);
    let text = match args.example {
        1 => {
            let t = rmat(&[&[0.0, 1.0 / 70.0], &[0.0, 0.0]]);
            let form = canonical_2x2(&t)?;
            let omega = q_radius_2x2(&form, one)?;
            let norm = a_opnorm(&Weight::identity(2), &t)?;
            eprintln!(
                "note: two candidate upper curves; the printed one uses sqrt(1-q^2), the bound it is derived from uses sqrt(1-q)"
            );
            let mut rows = Vec::new();
            for q in grid(0.0, 1.0, args.grid) {
                let upper = |s: f64| 2.0 * omega + 2.0 * 2f64.sqrt() * s.sqrt() * norm;
                rows.push(vec![
                    q,
                    2.0 * q * omega,
                    2.0 * q_radius_2x2(&form, re(q))?,
                    upper(1.0 - q),
                    upper(1.0 - q * q),
                ]);
            }
            csv(
                &["q", "two_q_omega", "two_omega_q", "upper_paper_sqrt1mq", "upper_paper_sqrt1mq2"],
                rows.into_iter(),
            )
        }
        2 | 3 => {
            let t = if args.example == 2 {
                rmat(&[&[0.0, 1.0 / 24.0], &[0.0, 0.0]])
            } else {
                eprintln!("note: abs_diff is (1-q)/20; the printed left side (q-1)/20 has the opposite sign");
                cdiag(&[0.05, 0.05])
            };
            let form = canonical_2x2(&t)?;
            let omega = q_radius_2x2(&form, one)?;
            let norm = a_opnorm(&Weight::identity(2), &t)?;
            let mut rows = Vec::new();
            for q in grid(0.0, 1.0, args.grid) {
                let diff = (q_radius_2x2(&form, re(q))? - omega).abs();
                rows.push(vec![q, diff, (2.0 * (1.0 - q)).sqrt() * norm]);
            }
            csv(&["q", "abs_diff", "upper_bound"], rows.into_iter())
        }
        4 => {
            let j = rmat(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
            let w = Weight::identity(3);
            let omega = a_radius(&w, &j)?.value;
            let norm = a_opnorm(&w, &j)?;
            let mut rows = Vec::new();
            for q in grid(0.5, 1.0, args.grid) {
                let wq = jordan3_q_radius(q)?;
                rows.push(vec![q, wq, (wq - omega).abs(), (2.0 * (1.0 - q)).sqrt() * norm]);
            }
            csv(&["q", "omega_q", "abs_diff", "upper_bound"], rows.into_iter())
        }
        n => return Err(Failure::Usage(format!("unknown example {n}, expected 1-4"))),
    };
    write(&args.out, &text)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    if args.dims.iter().any(|&d| d < 2) {
        return Err(Failure::Usage("--dims entries must be at least 2".into()));
    }
    let mut budget = budget(args.budget, args.seed);
    if args.inject_fault {
        budget = Budget {
            restarts: 1,
            iterations: 0,
            pair_samples: 1,
            ..budget
        };
    }
    let config = SuiteConfig {
        n_instances: args.instances,
        dims: args.dims,
        seed: args.seed,
        budget,
        check_proof_form: args.proof_form,
        check_ordinary_adjoint: args.ordinary_adjoint,
        no_recheck: args.inject_fault,
    };
    let result = run_suite(&config);
    let summary = result.summary_csv();
    if let Some(out) = &args.out {
        write(out, &summary)?;
        write(&out.with_extension("jsonl"), &result.to_jsonl())?;
    }
    print!("{summary}");
    let failures = result.failures().count();
    println!(
        "{} checks, {} failures, {} skipped",
        result.reports.len(),
        failures,
        result.skips.len()
    );
    if failures > 0 {
        for f in result.failures().take(20) {
            eprintln!("violation: {} {} lhs={} rhs={}", f.instance_digest, f.law_id, f.lhs, f.rhs);
        }
        return Err(Failure::Check(format!("{failures} hard failures")));
    }
    Ok(())
}

fn cmd_converge(args: ConvergeArgs) -> Result<(), Failure> {
    let budget = budget(args.budget, args.seed);
    let indices = geometric_schedule(args.max_n);
    let default_matrix = |rule: Rule| match rule {
        Rule::Qseq => rmat(&[&[0.0, 1.0 / 24.0], &[0.0, 0.0]]),
        _ => rmat(&[&[0.0, 1.0 / 70.0], &[0.0, 0.0]]),
    };
    let t = match &args.matrix {
        Some(p) => read_matrix(p)?,
        None => default_matrix(args.rule),
    };
    let w = read_weight(args.weight.as_deref(), t.nrows())?;
    let trace = if let Rule::Qseq = args.rule {
        // q_k = 1 - 1/(k+1)^2 for k = 1..=max_n.
        let qs = (1..=args.max_n.max(1))
            .map(|k| QParam::real(1.0 - 1.0 / ((k + 1) * (k + 1)) as f64))
            .collect::<qrange::Result<Vec<_>>>()?;
        trace_q(&w, &t, &qs, &budget)?
    } else {
        let q = parse_q(&args.q)?;
        let seq = match args.rule {
            Rule::Multiplication => {
                if args.grid < 1 {
                    return Err(Failure::Usage("--grid must be positive".into()));
                }
                OperatorSequence::multiplication_default(args.grid)?
            }
            Rule::Constant => OperatorSequence::constant(w, t)?,
            _ => {
                let e = match &args.direction {
                    Some(p) => read_matrix(p)?,
                    None => t.clone(),
                };
                OperatorSequence::perturbation(w, t, e)?
            }
        };
        match args.quantity {
            Quantity::Radius => trace_radius(&seq, q, &indices, &budget)?,
            Quantity::Crawford => trace_crawford(&seq, q, &indices, &budget)?,
            Quantity::GapRadius => trace_gaps(&seq, q, &indices, &budget)?.0,
            Quantity::GapCrawford => trace_gaps(&seq, q, &indices, &budget)?.1,
        }
    };
    write(&args.out, &trace.to_csv())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Converge(a) => cmd_converge(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Unbounded(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
