//! Command-line front end for the workbench. Every verdict states the
//! size bound it was computed under; every failure prints a replayable
//! certificate. Reports on stdout are byte-identical across runs and
//! worker counts; timing goes to stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use posmod_core::analysis::amalgam::{AmalgamVerdict, CompleteVerdict};
use posmod_core::analysis::classify::{Continuation, HMaxVerdict, PcVerdict};
use posmod_core::analysis::companions::CompanionVerdict;
use posmod_core::analysis::ctr::{CtrOptions, CtrVerdict};
use posmod_core::analysis::robinson::{QeVerdict, RobinsonVerdict};
use posmod_core::analysis::{self, AnalysisError, ModelUniverse, SearchBudget};
use posmod_core::corpus;
use posmod_core::logic::ast::{PositiveFormula, Theory};
use posmod_core::logic::fragment::FormulaFragment;
use posmod_core::logic::parse::{parse_formula, parse_theory, serialize_theory};
use posmod_core::morphisms::{
    find_homomorphisms, is_immersion, EmbeddingFailure, Homomorphism, ImmersionCheck,
    ImmersionMode,
};
use posmod_core::structures::{parse_structure, FiniteStructure};

#[derive(Parser)]
#[command(name = "posmod", version, about = "Positive model theory workbench")]
struct Cli {
    /// Report style: human paragraphs or tab-separated records.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Worker threads for the parallel passes (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Local,
    Global,
}

#[derive(Args)]
struct UniverseArgs {
    /// Theory file (.pmt).
    #[arg(short = 'T', long = "theory")]
    theory: PathBuf,
    /// Largest model size to enumerate.
    #[arg(long, default_value_t = 4)]
    max_size: usize,
    /// Atom-assignment budget for the model search.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Verb {
    /// Enumerate the models of a theory up to a size bound.
    Models {
        #[command(flatten)]
        universe: UniverseArgs,
        /// Persist the universe (members plus manifest) to a directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List or count the homomorphisms between two structures.
    Homs {
        source: PathBuf,
        target: PathBuf,
        /// Print the count only.
        #[arg(long)]
        count: bool,
        /// Stop after this many maps.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Check that an explicit map between two structures is an immersion.
    CheckImmersion {
        source: PathBuf,
        target: PathBuf,
        /// Images of 0..n-1, comma-separated, e.g. 0,2,1.
        #[arg(long)]
        map: String,
        /// Validate with the fragment oracle instead of the retraction
        /// criterion.
        #[arg(long, value_parser = parse_fragment)]
        fragment: Option<FormulaFragment>,
    },
    /// Is the structure positively closed within the bounded universe?
    CheckPc {
        structure: PathBuf,
        #[command(flatten)]
        universe: UniverseArgs,
        /// Also report a homomorphism into a pc member, when one exists.
        #[arg(long)]
        continuation: bool,
    },
    /// Is the structure h-maximal within the bounded universe?
    CheckHmax {
        structure: PathBuf,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Is the structure an amalgamation basis within the bounded universe?
    CheckAmalg {
        structure: PathBuf,
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// Does every pair of members have a joint continuation?
    CheckComplete {
        #[command(flatten)]
        universe: UniverseArgs,
    },
    /// The bounded Ctr set of a formula over a fragment.
    Ctr {
        /// The formula, e.g. "(S x1 x2)".
        formula: String,
        #[command(flatten)]
        universe: UniverseArgs,
        #[arg(long, value_parser = parse_fragment, default_value = "2,1,2")]
        fragment: FormulaFragment,
        /// Check whether the quantifier-free entries generate the set.
        #[arg(long)]
        qf_basis: bool,
        /// Search the set for a complement of the formula.
        #[arg(long)]
        complement: bool,
    },
    /// Does quantifier-free type containment force positive type
    /// containment on tuples of the pc members?
    CheckRobinson {
        #[command(flatten)]
        universe: UniverseArgs,
        #[arg(long, default_value_t = 2)]
        tuple_cap: usize,
        #[arg(long, value_enum, default_value_t = ScopeArg::Global)]
        scope: ScopeArg,
    },
    /// Search the fragment for a quantifier-free formula equivalent to the
    /// query on every pc member.
    Qe {
        formula: String,
        #[command(flatten)]
        universe: UniverseArgs,
        #[arg(long, value_parser = parse_fragment, default_value = "2,2,2")]
        fragment: FormulaFragment,
    },
    /// Do two theories have the same pc members up to the bound?
    Companion {
        theory_left: PathBuf,
        theory_right: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Write a built-in theory and its sample structures to a directory.
    Corpus {
        #[command(subcommand)]
        family: CorpusFamily,
    },
}

#[derive(Subcommand)]
enum CorpusFamily {
    /// The p-cycle theories over {S/2}: T, T' or T_n with its collapse
    /// schema emitted up to the cap.
    Cycles {
        #[arg(long)]
        out: PathBuf,
        /// Emit T_n for this n (> 3); omitted means T or T'.
        #[arg(long)]
        n: Option<usize>,
        /// Add the no-4-cycle axiom (implied by --n).
        #[arg(long)]
        prime: bool,
        /// Largest collapse-axiom instance for T_n.
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
    /// The pointed abelian group theory with the cyclic group Z/p^k.
    Group {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Interpretation of the constant a (nonzero residue mod p^k).
        #[arg(long, default_value_t = 1)]
        g: usize,
    },
    /// The total-successor theory over {F/2} with functional p-cycles.
    Successor {
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_fragment(s: &str) -> Result<FormulaFragment, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let with_or = parts.len() == 4 && parts[3] == "or";
    if !(parts.len() == 3 || with_or) {
        return Err("expected m,v,k or m,v,k,or".to_string());
    }
    let nums: Result<Vec<usize>, _> = parts[..3].iter().map(|p| p.parse()).collect();
    let [m, v, k]: [usize; 3] =
        nums.map_err(|_| "fragment parameters must be integers")?.try_into().unwrap();
    let frag = FormulaFragment::new(m, v, k);
    Ok(if with_or { frag.with_or() } else { frag })
}

/// Usage and input errors exit 2, budget exhaustion 3, a failing verdict 1.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Failure {
        let code = match e {
            AnalysisError::BudgetExceeded { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<posmod_core::morphisms::MorphismError> for Failure {
    fn from(e: posmod_core::morphisms::MorphismError) -> Failure {
        Failure::usage(e.to_string())
    }
}

impl From<posmod_core::analysis::PersistError> for Failure {
    fn from(e: posmod_core::analysis::PersistError) -> Failure {
        Failure::usage(e.to_string())
    }
}

/// One report line: a record in machine mode, prose in human mode.
struct Report {
    verb: &'static str,
    format: Format,
    lines: Vec<String>,
}

impl Report {
    fn new(verb: &'static str, format: Format) -> Report {
        Report { verb, format, lines: Vec::new() }
    }

    fn record(&mut self, verdict: &str, bound: impl ToString, certificate: &str) {
        match self.format {
            Format::Machine => {
                let cert = if certificate.is_empty() { "-" } else { certificate };
                self.lines.push(format!(
                    "{}\t{}\t{}\t{}",
                    self.verb,
                    verdict,
                    bound.to_string(),
                    cert
                ));
            }
            Format::Human => {
                let mut line = format!("{}: {}({})", self.verb, verdict, bound.to_string());
                if !certificate.is_empty() {
                    write!(line, " {certificate}").unwrap();
                }
                self.lines.push(line);
            }
        }
    }

    fn human(&mut self, line: impl Into<String>) {
        if self.format == Format::Human {
            self.lines.push(line.into());
        }
    }

    fn caveat(&mut self, bound: usize) {
        self.human(format!("caveat: quantifies over models of size <= {bound} only"));
    }

    fn print(&self) {
        for line in &self.lines {
            println!("{line}");
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_theory(path: &Path) -> Result<Theory, Failure> {
    let text = read_to_string(path)?;
    parse_theory(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<FiniteStructure, Failure> {
    let text = read_to_string(path)?;
    parse_structure(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Re-seat a structure parsed on its own onto the theory's signature so
/// downstream signature equality checks pass.
fn load_structure_for(path: &Path, theory: &Theory) -> Result<FiniteStructure, Failure> {
    load_structure(path)?
        .with_signature(theory.sig.clone())
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn budget_of(explicit: Option<u64>) -> SearchBudget {
    match explicit {
        Some(max_atom_assignments) => SearchBudget { max_atom_assignments },
        None => SearchBudget::default(),
    }
}

fn build_universe(args: &UniverseArgs) -> Result<ModelUniverse, Failure> {
    let theory = load_theory(&args.theory)?;
    Ok(analysis::enumerate_models(&theory, args.max_size, &budget_of(args.budget))?)
}

fn tuple_str(tuple: &[usize]) -> String {
    let parts: Vec<String> = tuple.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(" "))
}

fn member_str(u: &ModelUniverse, i: usize) -> String {
    format!("member={i} size={}", u.members()[i].size())
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.verb {
        Verb::Models { universe, out } => {
            let u = build_universe(universe)?;
            let mut report = Report::new("models", cli.format);
            report.record("COUNT", u.bound(), &u.len().to_string());
            for (i, m) in u.members().iter().enumerate() {
                match cli.format {
                    Format::Machine => {
                        report.record("MEMBER", u.bound(), &member_str(&u, i));
                    }
                    Format::Human => {
                        report.human(format!("member {i}:"));
                        report.human(m.serialize().trim_end().to_string());
                    }
                }
            }
            if let Some(dir) = out {
                analysis::save_universe(&u, dir)?;
                report.human(format!("saved to {}", dir.display()));
            }
            Ok(report)
        }
        Verb::Homs { source, target, count, limit } => {
            let a = load_structure(source)?;
            let b = load_structure(target)?;
            let homs = find_homomorphisms(&a, &b, &[], *limit)?;
            let mut report = Report::new("homs", cli.format);
            report.record("COUNT", a.size(), &homs.len().to_string());
            if !count {
                for h in &homs {
                    match cli.format {
                        Format::Machine => report.record("HOM", a.size(), &h.serialize()),
                        Format::Human => report.human(h.serialize()),
                    }
                }
            }
            Ok(report)
        }
        Verb::CheckImmersion { source, target, map, fragment } => {
            let a = load_structure(source)?;
            let b = load_structure(target)?;
            let images: Result<Vec<usize>, _> =
                map.split(',').map(|p| p.trim().parse()).collect();
            let f = Homomorphism {
                map: images.map_err(|_| Failure::usage("--map wants integers"))?,
            };
            let mode = match fragment {
                Some(frag) => ImmersionMode::Oracle(*frag),
                None => ImmersionMode::Retraction,
            };
            let mut report = Report::new("check-immersion", cli.format);
            match is_immersion(&a, &b, &f, mode)? {
                ImmersionCheck::Holds { retraction } => {
                    let cert = retraction.map(|r| r.serialize()).unwrap_or_default();
                    report.record("HOLDS", a.size(), &cert);
                    Ok(report)
                }
                ImmersionCheck::Fails { formula, source_tuple } => {
                    report.record(
                        "FAILS",
                        a.size(),
                        &format!("tuple={} formula={formula}", tuple_str(&source_tuple)),
                    );
                    Err(verdict_failure(report))
                }
            }
        }
        Verb::CheckPc { structure, universe, continuation } => {
            let u = build_universe(universe)?;
            let a = load_structure_for(structure, u.theory())?;
            let mut report = Report::new("check-pc", cli.format);
            let verdict = analysis::is_pc(&a, &u)?;
            if *continuation {
                match analysis::pc_continuation(&a, &u)? {
                    Continuation::Found { member, hom } => report.record(
                        "CONTINUATION",
                        u.bound(),
                        &format!("{} hom={}", member_str(&u, member), hom.serialize()),
                    ),
                    Continuation::NotFoundWithin(b) => {
                        report.record("NO_CONTINUATION_WITHIN", b, "")
                    }
                }
            }
            match verdict {
                PcVerdict::HoldsWithin(b) => {
                    report.record("HOLDS_WITHIN", b, "");
                    report.caveat(b);
                    Ok(report)
                }
                PcVerdict::Fails(w) => {
                    report.record(
                        "FAILS",
                        u.bound(),
                        &format!(
                            "{} hom={} tuple={} formula={}",
                            member_str(&u, w.member),
                            w.hom.serialize(),
                            tuple_str(&w.source_tuple),
                            w.formula
                        ),
                    );
                    Err(verdict_failure(report))
                }
            }
        }
        Verb::CheckHmax { structure, universe } => {
            let u = build_universe(universe)?;
            let a = load_structure_for(structure, u.theory())?;
            let mut report = Report::new("check-hmax", cli.format);
            match analysis::is_h_maximal(&a, &u)? {
                HMaxVerdict::HoldsWithin(b) => {
                    report.record("HOLDS_WITHIN", b, "");
                    report.caveat(b);
                    Ok(report)
                }
                HMaxVerdict::Fails(w) => {
                    let why = match &w.failure {
                        EmbeddingFailure::Merged { left, right } => {
                            format!("merged=({left} {right})")
                        }
                        EmbeddingFailure::AtomNotReflected { rel, tuple } => {
                            format!("unreflected=rel{rel}{}", tuple_str(tuple))
                        }
                    };
                    report.record(
                        "FAILS",
                        u.bound(),
                        &format!(
                            "{} hom={} {why}",
                            member_str(&u, w.member),
                            w.hom.serialize()
                        ),
                    );
                    Err(verdict_failure(report))
                }
            }
        }
        Verb::CheckAmalg { structure, universe } => {
            let u = build_universe(universe)?;
            let a = load_structure_for(structure, u.theory())?;
            let mut report = Report::new("check-amalg", cli.format);
            match analysis::is_amalgamation_basis(&a, &u)? {
                AmalgamVerdict::HoldsWithin(b) => {
                    report.record("HOLDS_WITHIN", b, "");
                    report.caveat(b);
                    Ok(report)
                }
                AmalgamVerdict::Fails(w) => {
                    report.record(
                        "FAILS",
                        u.bound(),
                        &format!(
                            "left={} right={} into_left={} into_right={}",
                            w.left,
                            w.right,
                            w.into_left.serialize(),
                            w.into_right.serialize()
                        ),
                    );
                    Err(verdict_failure(report))
                }
            }
        }
        Verb::CheckComplete { universe } => {
            let u = build_universe(universe)?;
            let mut report = Report::new("check-complete", cli.format);
            match analysis::is_complete(&u)? {
                CompleteVerdict::HoldsWithin(b) => {
                    report.record("HOLDS_WITHIN", b, "");
                    report.caveat(b);
                    Ok(report)
                }
                CompleteVerdict::Fails { left, right } => {
                    report.record(
                        "FAILS",
                        u.bound(),
                        &format!("left={} right={}", member_str(&u, left), member_str(&u, right)),
                    );
                    Err(verdict_failure(report))
                }
            }
        }
        Verb::Ctr { formula, universe, fragment, qf_basis, complement } => {
            let u = build_universe(universe)?;
            let phi = parse_theory_formula(formula, u.theory())?;
            let opts = CtrOptions { qf_basis: *qf_basis, complement: *complement };
            let r = analysis::ctr(&u, &phi, *fragment, &opts)?;
            let mut report = Report::new("ctr", cli.format);
            for entry in &r.entries {
                match &entry.verdict {
                    CtrVerdict::NotRefutedUpTo(b) => {
                        report.record("NOT_REFUTED_UP_TO", b, &entry.formula.to_string())
                    }
                    CtrVerdict::Refuted { member, tuple } => report.record(
                        "REFUTED",
                        r.bound,
                        &format!(
                            "{} {} tuple={}",
                            entry.formula,
                            member_str(&u, *member),
                            tuple_str(tuple)
                        ),
                    ),
                }
            }
            if let Some(basis) = &r.qf_basis {
                if basis.uncovered.is_empty() {
                    report.record("QF_BASIS", r.bound, "");
                } else {
                    let parts: Vec<String> = basis
                        .uncovered
                        .iter()
                        .map(|&i| r.entries[i].formula.to_string())
                        .collect();
                    report.record("QF_BASIS_UNCOVERED", r.bound, &parts.join(" "));
                }
            }
            if let Some(found) = &r.complement {
                match found {
                    Some(i) => report.record(
                        "COMPLEMENT",
                        r.bound,
                        &r.entries[*i].formula.to_string(),
                    ),
                    None => report.record("NO_COMPLEMENT_WITHIN", r.bound, ""),
                }
            }
            report.caveat(r.bound);
            Ok(report)
        }
        Verb::CheckRobinson { universe, tuple_cap, scope } => {
            let u = build_universe(universe)?;
            let scope = match scope {
                ScopeArg::Local => analysis::RobinsonScope::Local,
                ScopeArg::Global => analysis::RobinsonScope::Global,
            };
            let mut report = Report::new("check-robinson", cli.format);
            match analysis::check_robinson(&u, *tuple_cap, scope)? {
                RobinsonVerdict::HoldsWithin(b) => {
                    report.record("HOLDS_WITHIN", b, "");
                    report.caveat(b);
                    Ok(report)
                }
                RobinsonVerdict::Fails(w) => {
                    report.record(
                        "FAILS",
                        u.bound(),
                        &format!(
                            "left={} tuple={} right={} tuple={}",
                            member_str(&u, w.left_member),
                            tuple_str(&w.left_tuple),
                            member_str(&u, w.right_member),
                            tuple_str(&w.right_tuple)
                        ),
                    );
                    Err(verdict_failure(report))
                }
            }
        }
        Verb::Qe { formula, universe, fragment } => {
            let u = build_universe(universe)?;
            let phi = parse_theory_formula(formula, u.theory())?;
            let mut report = Report::new("qe", cli.format);
            match analysis::qe_check(&u, &phi, *fragment)? {
                QeVerdict::Equivalent(psi) => {
                    report.record("EQUIVALENT", u.bound(), &psi.to_string());
                    report.caveat(u.bound());
                    Ok(report)
                }
                QeVerdict::NoQfEquivalentWithin(b) => {
                    report.record("NO_QF_EQUIVALENT_WITHIN", b, "");
                    Err(verdict_failure(report))
                }
            }
        }
        Verb::Companion { theory_left, theory_right, max_size, budget } => {
            let t1 = load_theory(theory_left)?;
            let t2 = load_theory(theory_right)?;
            let mut report = Report::new("companion", cli.format);
            match analysis::companion_check(&t1, &t2, *max_size, &budget_of(*budget))? {
                CompanionVerdict::EquivalentWithin(b) => {
                    report.record("EQUIVALENT_WITHIN", b, "");
                    report.caveat(b);
                    Ok(report)
                }
                CompanionVerdict::Differs { left_only, right_only } => {
                    let show = |side: &str, ms: &[FiniteStructure]| -> String {
                        let sizes: Vec<String> =
                            ms.iter().map(|m| m.size().to_string()).collect();
                        format!("{side}=[{}]", sizes.join(" "))
                    };
                    report.record(
                        "DIFFERS",
                        *max_size,
                        &format!(
                            "{} {}",
                            show("left_only_sizes", &left_only),
                            show("right_only_sizes", &right_only)
                        ),
                    );
                    Err(verdict_failure(report))
                }
            }
        }
        Verb::Corpus { family } => run_corpus(cli.format, family),
    }
}

fn parse_theory_formula(text: &str, theory: &Theory) -> Result<PositiveFormula, Failure> {
    parse_formula(text, &theory.sig).map_err(|e| Failure::usage(e.to_string()))
}

fn run_corpus(format: Format, family: &CorpusFamily) -> Result<Report, Failure> {
    let mut report = Report::new("corpus", format);
    let as_corpus_err = |e: corpus::CorpusError| Failure::usage(e.to_string());
    match family {
        CorpusFamily::Cycles { out, n, prime, cap } => {
            let variant = match n {
                Some(n) => corpus::CycleVariant::Tn(*n),
                None if *prime => corpus::CycleVariant::Tprime,
                None => corpus::CycleVariant::T,
            };
            let c = corpus::corpus_cycles(variant, *cap).map_err(as_corpus_err)?;
            ensure_dir(out)?;
            write_file(out, "theory.pmt", &serialize_theory(&c.theory))?;
            report.record("WROTE", cap, "theory.pmt");
            for (name, s) in &c.samples {
                let file = format!("{name}.pms");
                write_file(out, &file, &s.serialize())?;
                report.record("WROTE", s.size(), &file);
            }
        }
        CorpusFamily::Group { out, p, k, g } => {
            let c = corpus::corpus_group(*p, *k, *g).map_err(as_corpus_err)?;
            ensure_dir(out)?;
            write_file(out, "theory.pmt", &serialize_theory(&c.theory))?;
            report.record("WROTE", 0usize, "theory.pmt");
            let file = format!("z{}_{g}.pms", c.structure.size());
            write_file(out, &file, &c.structure.serialize())?;
            report.record("WROTE", c.structure.size(), &file);
        }
        CorpusFamily::Successor { out } => {
            let c = corpus::corpus_successor().map_err(as_corpus_err)?;
            ensure_dir(out)?;
            write_file(out, "theory.pmt", &serialize_theory(&c.theory))?;
            report.record("WROTE", 0usize, "theory.pmt");
            for (name, s) in &c.samples {
                let file = format!("{name}.pms");
                write_file(out, &file, &s.serialize())?;
                report.record("WROTE", s.size(), &file);
            }
        }
    }
    Ok(report)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))
}

/// A failing verdict already has its report printed by the caller; carry
/// the lines through the error path so printing stays in one place.
fn verdict_failure(report: Report) -> Failure {
    let mut message = String::new();
    for line in &report.lines {
        if !message.is_empty() {
            message.push('\n');
        }
        message.push_str(line);
    }
    Failure { code: 1, message }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore the error when a pool already exists (tests call run
        // repeatedly); output is deterministic either way.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let start = Instant::now();
    match run(&cli) {
        Ok(report) => {
            report.print();
            if cli.format == Format::Human {
                eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            if f.code == 1 {
                println!("{}", f.message);
            } else {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
