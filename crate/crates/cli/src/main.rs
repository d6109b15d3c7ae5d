use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use corefold::core_analysis::{is_conjugate_into, is_core_surface, is_member};
use corefold::cover_oracle::{closure_within, cover_ball, ClosureMode, Subcomplex, DEFAULT_SBR_BUDGET};
use corefold::group_words::{are_conjugate, dehn_reduce, is_trivial, DEFAULT_BUDGET};
use corefold::{Error, FoldingEngine, PointedCoreSurface, Presentation, TiledSurface, Word};

#[derive(Parser, Debug)]
#[command(name = "corefold", version, about = "Core surfaces of subgroups of surface groups")]
struct Cli {
    #[arg(long, global = true, default_value_t = 2)]
    genus: usize,
    /// Comma-separated generating words.
    #[arg(long, global = true)]
    gens: Option<String>,
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget_geodesic: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SBR_BUDGET)]
    budget_sbr: usize,
    #[arg(long, global = true, default_value_t = 2)]
    radius: usize,
    /// Randomizes the folding and reduction order.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Br,
    Sbr,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dehn-reduces a word.
    Reduce { word: String },
    /// Decides whether a word is the identity.
    Trivial { word: String },
    /// Decides whether two words are equal.
    Equal { u: String, v: String },
    /// Decides whether two words are conjugate.
    Conjugate { u: String, v: String },
    /// Builds the core surface of the subgroup generated by `--gens`.
    Core,
    /// Certifies the complex in `--in` as a core surface.
    CheckCore,
    /// Decides membership in the subgroup generated by `--gens`.
    Member { word: String },
    /// Decides whether a conjugate of the word lies in the subgroup (`--gens` or `--in`).
    ConjInto { word: String },
    /// Prints counts, Euler characteristic and boundary lengths of `--in`.
    Stats,
    /// Converts the complex in `--in` to DOT.
    ExportDot,
    /// Grows a universal-cover ball, or a neighbourhood of `--in`, to `--radius`.
    CoverBall {
        #[arg(long, default_value_t = 0)]
        basepoint: usize,
    },
    /// Closure of the image of `--in` inside `--ambient`.
    Closure {
        #[arg(long)]
        ambient: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Br)]
        mode: Mode,
    },
}

enum Failure {
    Input(String),
    Budget(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::InvalidGenus(_) | Error::Parse { .. } | Error::Format(_) | Error::Precondition(_) => {
                Failure::Input(e.to_string())
            }
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::TrivialElement | Error::Invariant(_) => Failure::Internal(e.to_string()),
        }
    }
}

struct Ctx {
    cli: Cli,
    pres: Presentation,
    out: String,
}

impl Ctx {
    fn word(&self, text: &str) -> Result<Word, Failure> {
        self.pres.parse_word(text).map_err(|e| Failure::Input(format!("in '{text}': {e}")))
    }

    fn gens(&self) -> Result<Vec<Word>, Failure> {
        let text = self.cli.gens.as_deref().ok_or_else(|| Failure::Input("--gens is required".into()))?;
        text.split(',').filter(|s| !s.trim().is_empty()).map(|s| self.word(s)).collect()
    }

    fn engine(&self) -> FoldingEngine {
        match self.cli.seed {
            Some(s) => FoldingEngine::with_seed(s),
            None => FoldingEngine::new(),
        }
    }

    fn core(&self) -> Result<PointedCoreSurface, Failure> {
        let ws = self.gens()?;
        Ok(self.engine().core_surface_from_generators(&ws, &self.pres)?)
    }

    fn read(&self, path: &PathBuf) -> Result<TiledSurface, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let y = TiledSurface::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        if y.presentation().genus() != self.pres.genus() {
            return Err(Failure::Input(format!(
                "{}: genus {} does not match --genus {}",
                path.display(),
                y.presentation().genus(),
                self.pres.genus()
            )));
        }
        Ok(y)
    }

    fn input(&self) -> Result<TiledSurface, Failure> {
        let path = self.cli.input.clone().ok_or_else(|| Failure::Input("--in is required".into()))?;
        self.read(&path)
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn verbose(&self, s: impl AsRef<str>) {
        if self.cli.verbose {
            eprintln!("{}", s.as_ref());
        }
    }

    /// Writes the complex to `--out` or standard output in the chosen format.
    fn emit(&mut self, y: &TiledSurface) -> Result<(), Failure> {
        let text = match self.cli.format {
            Format::Json => y.to_json(),
            Format::Dot => y.to_dot(),
            Format::Text => String::new(),
        };
        match &self.cli.out {
            Some(p) if !text.is_empty() => {
                fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
            }
            _ => self.out.push_str(&text),
        }
        Ok(())
    }

    fn summary(&mut self, y: &TiledSurface) -> Result<(), Failure> {
        let st = y.stats()?;
        self.line(st.summary());
        if self.cli.verbose {
            for c in y.boundary_cycles()? {
                if !c.is_empty() {
                    eprintln!("boundary {}", c.word().display(&self.pres));
                }
            }
        }
        Ok(())
    }
}

fn run(ctx: &mut Ctx) -> Result<(), Failure> {
    let budget = ctx.cli.budget_geodesic;
    match &ctx.cli.command {
        Command::Reduce { word } => {
            let w = ctx.word(word)?;
            let r = dehn_reduce(&w, &ctx.pres);
            let s = ctx.pres.format_word(r.letters());
            ctx.line(s);
        }
        Command::Trivial { word } => {
            let w = ctx.word(word)?;
            let b = is_trivial(&w, &ctx.pres);
            ctx.line(b.to_string());
        }
        Command::Equal { u, v } => {
            let (u, v) = (ctx.word(u)?, ctx.word(v)?);
            let b = is_trivial(&u.concat(&v.inverse()), &ctx.pres);
            ctx.line(b.to_string());
        }
        Command::Conjugate { u, v } => {
            let (u, v) = (ctx.word(u)?, ctx.word(v)?);
            let b = are_conjugate(&u, &v, &ctx.pres);
            ctx.line(b.to_string());
        }
        Command::Core => {
            let core = ctx.core()?;
            ctx.verbose(format!(
                "basepoint {} conjugator {}",
                core.basepoint,
                core.conjugator.display(&ctx.pres)
            ));
            let (y, map) = core.surface.canonical();
            ctx.verbose(format!("canonical basepoint {}", map[core.basepoint]));
            ctx.emit(&y)?;
            ctx.summary(&y)?;
        }
        Command::CheckCore => {
            let y = ctx.input()?;
            let cert = is_core_surface(&y);
            if let Some(v) = &cert.violation {
                ctx.verbose(format!("{v:?}"));
            }
            ctx.line(cert.is_core.to_string());
        }
        Command::Member { word } => {
            let w = ctx.word(word)?;
            let core = ctx.core()?;
            let b = is_member(&w, &core, budget)?;
            ctx.line(b.to_string());
        }
        Command::ConjInto { word } => {
            let w = ctx.word(word)?;
            let core = if ctx.cli.gens.is_some() {
                ctx.core()?
            } else {
                let surface = ctx.input()?;
                PointedCoreSurface { surface, basepoint: 0, conjugator: Word::empty() }
            };
            let b = is_conjugate_into(&w, &core, budget)?;
            ctx.line(b.to_string());
        }
        Command::Stats => {
            let y = ctx.input()?;
            ctx.summary(&y)?;
        }
        Command::ExportDot => {
            let y = ctx.input()?;
            let dot = y.to_dot();
            match &ctx.cli.out {
                Some(p) => fs::write(p, dot).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
                None => ctx.out.push_str(&dot),
            }
        }
        Command::CoverBall { basepoint } => {
            let seed = match &ctx.cli.input {
                Some(_) => ctx.input()?,
                None => TiledSurface::single_vertex(ctx.pres.clone()),
            };
            let ball = cover_ball(&seed, *basepoint, ctx.cli.radius)?;
            let (y, map) = ball.surface.canonical();
            ctx.verbose(format!("basepoint {}", map[ball.basepoint]));
            ctx.emit(&y)?;
            ctx.summary(&y)?;
        }
        Command::Closure { ambient, mode } => {
            let y = ctx.input()?;
            let z = ctx.read(ambient)?;
            let m = y
                .morphism_to(&z)
                .ok_or_else(|| Failure::Input("no morphism from --in into the ambient complex".into()))?;
            let image = Subcomplex::whole(&y).image(&m);
            let mode = match mode {
                Mode::Br => ClosureMode::BoundaryReduced,
                Mode::Sbr => ClosureMode::StronglyBoundaryReduced,
            };
            let run = closure_within(&image, &z, mode, ctx.cli.budget_sbr)?;
            for s in &run.steps {
                ctx.verbose(format!(
                    "{:?}: +{} faces, boundary {} -> {}",
                    s.kind, s.faces_added, s.boundary_before, s.boundary_after
                ));
            }
            let c = run.closure.surface(&z);
            ctx.emit(&c)?;
            ctx.summary(&c)?;
            ctx.line(format!("steps={} completed={}", run.steps.len(), run.completed));
            if !run.completed {
                return Err(Failure::Budget(format!(
                    "closure budget of {} annexation steps exhausted",
                    ctx.cli.budget_sbr
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pres = match Presentation::new(cli.genus) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut ctx = Ctx { cli, pres, out: String::new() };
    let result = run(&mut ctx);
    let _ = std::io::stdout().write_all(ctx.out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(m)) => {
            eprintln!("budget exhausted: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(1)
        }
    }
}
