use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tritforge::catalog::{self, DesignRecord};
use tritforge::genlib::{
    self, declared_domains, gen_pattern, Cascade, Completeness, GateKind, Pattern, PatternKind, Style, StyleSpec,
};
use tritforge::netlist::{self, Netlist};
use tritforge::sim::{self, InputDomain, SimOptions};
use tritforge::simplify::{simplify_pipeline, AssumptionDomain, PassReport};
use tritforge::trit::{full_add_complete, CarryEncoding, SignalEncoding};

#[derive(Parser)]
#[command(name = "tritforge", version, about = "Ternary netlist generation, simulation and simplification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate gates, adders, test benches and stimulus patterns
    #[command(subcommand)]
    Gen(Gen),
    /// Simulate a stimulus pattern and write the per-step trace
    Sim(SimArgs),
    /// Exhaustive truth table over the declared input domains
    Truth(TruthArgs),
    /// Apply input assumptions and simplification passes
    Simplify(SimplifyArgs),
    /// Structural diagnostics and full-swing warnings
    Lint(LintArgs),
    /// Device counts and simulation proxies
    Metrics(MetricsArgs),
    /// Surveyed designs and published measurements
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when omitted
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Overwrite existing output files
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    TernaryCmos,
    Ntpt,
    Mux,
    Decenc,
}

impl From<StyleArg> for Style {
    fn from(s: StyleArg) -> Style {
        match s {
            StyleArg::TernaryCmos => Style::TernaryCmos,
            StyleArg::Ntpt => Style::NtPt,
            StyleArg::Mux => Style::MuxPtTg,
            StyleArg::Decenc => Style::DecoderEncoder,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CarryArg {
    Half,
    Vdd,
}

impl From<CarryArg> for CarryEncoding {
    fn from(c: CarryArg) -> CarryEncoding {
        match c {
            CarryArg::Half => CarryEncoding::HalfVddHigh,
            CarryArg::Vdd => CarryEncoding::FullVddHigh,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CascadeArg {
    Direct,
    TwoTha,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum GateArg {
    Nti,
    Pti,
    Sti,
    Inv,
    Decoder,
    Buffer,
}

impl From<GateArg> for GateKind {
    fn from(g: GateArg) -> GateKind {
        match g {
            GateArg::Nti => GateKind::Nti,
            GateArg::Pti => GateKind::Pti,
            GateArg::Sti => GateKind::Sti,
            GateArg::Inv => GateKind::BinaryInverter,
            GateArg::Decoder => GateKind::TernaryDecoder,
            GateArg::Buffer => GateKind::TernaryBuffer,
        }
    }
}

#[derive(Args)]
struct AdderArgs {
    #[arg(long, value_enum, default_value = "ternary-cmos")]
    style: StyleArg,
    /// Restrict the carry-in to {0, 1}
    #[arg(long)]
    partial: bool,
    /// Level carrying a logical carry of 1
    #[arg(long, value_enum, default_value = "half")]
    carry: CarryArg,
    #[arg(long, value_enum, default_value = "direct")]
    cascade: CascadeArg,
}

impl AdderArgs {
    fn spec(&self) -> StyleSpec {
        StyleSpec::new(
            self.style.into(),
            if self.partial { Completeness::Partial } else { Completeness::Complete },
            self.carry.into(),
            match self.cascade {
                CascadeArg::Direct => Cascade::Direct,
                CascadeArg::TwoTha => Cascade::TwoTha,
            },
        )
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternArg {
    Complete,
    Static,
}

#[derive(Subcommand)]
enum Gen {
    /// A single gate with input `a` and output `y`
    Gate {
        #[arg(value_enum)]
        kind: GateArg,
        #[command(flatten)]
        out: Output,
    },
    /// Ternary full adder
    Tfa {
        #[command(flatten)]
        adder: AdderArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Ternary half adder
    Tha {
        #[arg(long, value_enum, default_value = "ternary-cmos")]
        style: StyleArg,
        #[arg(long, value_enum, default_value = "half")]
        carry: CarryArg,
        #[command(flatten)]
        out: Output,
    },
    /// Ripple-carry adder of partial cells with a binary carry
    Rca {
        #[arg(long, value_enum, default_value = "ternary-cmos")]
        style: StyleArg,
        #[arg(long, default_value_t = 4)]
        digits: usize,
        #[arg(long, value_enum, default_value = "direct")]
        cascade: CascadeArg,
        #[command(flatten)]
        out: Output,
    },
    /// Wrap a netlist with input buffers and fan-out-of-four loads
    Testbench {
        netlist: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Stimulus over the declared input domains of a netlist
    Pattern {
        netlist: PathBuf,
        #[arg(long, value_enum, default_value = "complete")]
        kind: PatternArg,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct SimArgs {
    netlist: PathBuf,
    /// Pattern file; the complete transition walk when omitted
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Clock frequency in Hz for the dynamic power estimate
    #[arg(long)]
    frequency: Option<f64>,
    /// Metrics report file (JSON)
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expect {
    #[value(alias = "table2-complete")]
    Complete,
    #[value(alias = "table2-partial")]
    Partial,
}

#[derive(Args)]
struct TruthArgs {
    netlist: PathBuf,
    /// Compare against the full-adder function; exits 1 on mismatch
    #[arg(long, value_enum)]
    expect: Option<Expect>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SimplifyArgs {
    netlist: PathBuf,
    /// Input restriction, `<net>=<ternary|binary|halfpair>`; repeatable
    #[arg(long, required = true, value_parser = parse_assumption)]
    assume: Vec<AssumptionDomain>,
    /// Re-encode this output so that a carry of 1 is VDD
    #[arg(long)]
    rebind_carry: Option<String>,
    /// Pass report file (JSON)
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

fn parse_assumption(s: &str) -> std::result::Result<AssumptionDomain, String> {
    AssumptionDomain::parse(s).ok_or_else(|| format!("expected <net>=<ternary|binary|halfpair>, got {s:?}"))
}

#[derive(Args)]
struct LintArgs {
    netlist: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct MetricsArgs {
    netlist: PathBuf,
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long)]
    frequency: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dataset {
    /// The surveyed designs
    Designs,
    /// Measurement rows of complete, partial and simplified adders
    Results,
}

#[derive(Args)]
struct CatalogSource {
    /// Catalog CSV; the shipped data when omitted
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "designs")]
    dataset: Dataset,
}

impl CatalogSource {
    fn load(&self) -> Result<Vec<DesignRecord>> {
        match &self.catalog {
            Some(p) => Ok(catalog::load_catalog(&read(p)?).with_context(|| p.display().to_string())?),
            None => Ok(match self.dataset {
                Dataset::Designs => catalog::seed_catalog(),
                Dataset::Results => catalog::seed_results(),
            }),
        }
    }
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Count records per category of a field
    Stats {
        #[command(flatten)]
        source: CatalogSource,
        #[arg(long, default_value = "completeness")]
        field: String,
        /// Only records with this completeness
        #[arg(long)]
        only_partial: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
    /// Recompute power-delay products (and improvement rows for the results)
    PdpCheck {
        #[command(flatten)]
        source: CatalogSource,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_netlist(path: &Path) -> Result<Netlist> {
    netlist::parse(&read(path)?).with_context(|| path.display().to_string())
}

fn write_file(path: &Path, text: &str, force: bool) -> Result<()> {
    if path.exists() && !force {
        bail!("{} exists; pass --force to overwrite", path.display());
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.output {
        Some(p) => write_file(p, text, out.force),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn no_csv(format: Format) -> Result<Format> {
    if format == Format::Csv {
        bail!("csv output is not available for this command");
    }
    Ok(format)
}

fn gen(cmd: Gen) -> Result<()> {
    match cmd {
        Gen::Gate { kind, out } => emit(&out, &netlist::serialize(&genlib::gen_gate(kind.into()))),
        Gen::Tfa { adder, out } => emit(&out, &netlist::serialize(&genlib::gen_tfa(&adder.spec())?)),
        Gen::Tha { style, carry, out } => {
            emit(&out, &netlist::serialize(&genlib::gen_tha(style.into(), carry.into())))
        }
        Gen::Rca { style, digits, cascade, out } => {
            let adder = AdderArgs { style, partial: true, carry: CarryArg::Vdd, cascade };
            emit(&out, &netlist::serialize(&genlib::gen_rca(digits, &adder.spec())?))
        }
        Gen::Testbench { netlist: path, out } => {
            emit(&out, &netlist::serialize(&genlib::gen_testbench(&load_netlist(&path)?)))
        }
        Gen::Pattern { netlist: path, kind, out } => {
            let n = load_netlist(&path)?;
            let kind = match kind {
                PatternArg::Complete => PatternKind::CompleteTransitions,
                PatternArg::Static => PatternKind::StaticStates,
            };
            emit(&out, &gen_pattern(&declared_domains(&n), kind).to_text())
        }
    }
}

fn pattern_for(n: &Netlist, path: Option<&Path>) -> Result<Pattern> {
    match path {
        Some(p) => Ok(Pattern::parse(&read(p)?).with_context(|| p.display().to_string())?),
        None => Ok(gen_pattern(&declared_domains(n), PatternKind::CompleteTransitions)),
    }
}

fn simulate(args: SimArgs) -> Result<()> {
    let n = load_netlist(&args.netlist)?;
    let pattern = pattern_for(&n, args.pattern.as_deref())?;
    let (trace, report) = sim::simulate_pattern(&n, &pattern, &SimOptions { frequency_hz: args.frequency })?;
    if let Some(p) = &args.report {
        write_file(p, &json(&report), args.out.force)?;
    }
    let text = match args.format {
        Format::Csv | Format::Text => trace.to_csv(),
        Format::Json => json(&trace),
    };
    emit(&args.out, &text)
}

fn check_adder(n: &Netlist, table: &sim::TruthTable, expect: Expect) -> Result<()> {
    let names: Vec<&str> = n.inputs.iter().map(|i| i.net.as_str()).collect();
    if names.len() != 3 {
        bail!("expected three inputs (a, b, carry-in), found {}", names.len());
    }
    let carry_in = n.inputs[2].domain;
    match (expect, carry_in) {
        (Expect::Complete, SignalEncoding::Standard) => {}
        (Expect::Partial, SignalEncoding::HalfVddHigh | SignalEncoding::FullVddHigh) => {}
        (_, d) => bail!("carry-in domain {d} does not match the expected table"),
    }
    let find = |options: &[&str]| {
        n.outputs
            .iter()
            .position(|o| options.iter().any(|w| o.net.eq_ignore_ascii_case(w)))
            .ok_or_else(|| anyhow!("no output named {}", options.join(" or ")))
    };
    let sum = find(&["sum", "s"])?;
    let carry = find(&["carry", "cout"])?;
    let rows = table.decoded(n)?;
    let mut bad = 0;
    for (ins, outs) in &rows {
        let (c, s) = full_add_complete(ins[0], ins[1], ins[2]);
        if outs[sum] != s || outs[carry] != c {
            bad += 1;
            eprintln!(
                "mismatch at {}{}{}: sum {} carry {}, expected {} {}",
                ins[0], ins[1], ins[2], outs[sum], outs[carry], s, c
            );
        }
    }
    if bad > 0 {
        bail!("{bad} of {} points differ from the full-adder function", rows.len());
    }
    Ok(())
}

fn truth(args: TruthArgs) -> Result<()> {
    let n = load_netlist(&args.netlist)?;
    let table = sim::truth_table(&n, &InputDomain::declared(&n))?;
    let text = match args.format {
        Format::Text => table.to_text(),
        Format::Csv => table.to_csv(),
        Format::Json => json(&table),
    };
    emit(&args.out, &text)?;
    if let Some(e) = args.expect {
        check_adder(&n, &table, e)?;
    }
    Ok(())
}

/// Exact net name, or the single case-insensitive match.
fn resolve_net(n: &Netlist, name: &str) -> String {
    if n.nets.contains(name) {
        return name.to_string();
    }
    let matches: Vec<&String> = n.nets.iter().filter(|x| x.eq_ignore_ascii_case(name)).collect();
    match matches.as_slice() {
        [one] => (*one).clone(),
        _ => name.to_string(),
    }
}

fn simplify(args: SimplifyArgs) -> Result<()> {
    let mut n = load_netlist(&args.netlist)?;
    let assume: Vec<AssumptionDomain> =
        args.assume.iter().map(|a| AssumptionDomain::new(&resolve_net(&n, &a.net), a.domain)).collect();
    let rebind_carry = args.rebind_carry.as_deref().map(|c| resolve_net(&n, c));
    let before = n.device_count().total;
    let mut report = PassReport::default();
    let last = assume.len() - 1;
    for (i, a) in assume.iter().enumerate() {
        let rebind = if i == last { rebind_carry.as_deref() } else { None };
        let (next, r) = simplify_pipeline(&n, a, rebind)?;
        report.wired += r.wired;
        report.opened += r.opened;
        report.remapped += r.remapped;
        report.pruned += r.pruned;
        report.factored += r.factored;
        n = next;
    }
    if let Some(p) = &args.report {
        let value = serde_json::json!({
            "passes": report,
            "devices_before": before,
            "devices_after": n.device_count().total,
        });
        write_file(p, &json(&value), args.out.force)?;
    }
    emit(&args.out, &netlist::serialize(&n))
}

fn lint(args: LintArgs) -> Result<()> {
    let format = no_csv(args.format)?;
    let n = load_netlist(&args.netlist)?;
    let diagnostics = n.validate();
    let swing = if diagnostics.is_empty() { sim::full_swing_lint(&n) } else { Vec::new() };
    let text = if format == Format::Json {
        json(&serde_json::json!({ "diagnostics": diagnostics, "full_swing": swing }))
    } else {
        let mut s = String::new();
        for d in &diagnostics {
            let _ = writeln!(s, "error: {d}");
        }
        for w in &swing {
            let _ = writeln!(s, "warning: {} degraded by {} devices ({:.3} V headroom)", w.net, w.polarity, w.headroom_volts);
        }
        s
    };
    emit(&args.out, &text)?;
    if !diagnostics.is_empty() {
        bail!("{} structural diagnostics", diagnostics.len());
    }
    Ok(())
}

fn metrics(args: MetricsArgs) -> Result<()> {
    let format = no_csv(args.format)?;
    let n = load_netlist(&args.netlist)?;
    let pattern = pattern_for(&n, args.pattern.as_deref())?;
    let (_, report) = sim::simulate_pattern(&n, &pattern, &SimOptions { frequency_hz: args.frequency })?;
    let counts = n.device_count();
    let text = if format == Format::Json {
        json(&serde_json::json!({ "devices": counts, "metrics": report }))
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "devices          {}", counts.total);
        for (class, k) in &counts.by_class {
            let _ = writeln!(s, "  {class:<14} {k}");
        }
        let _ = writeln!(s, "delay_rounds     {}", report.delay_rounds);
        let _ = writeln!(s, "static_div_mean  {:.4}", report.static_div_mean);
        let _ = writeln!(s, "activity         {:.4}", report.activity);
        if let Some(p) = report.dynamic_power_w {
            let _ = writeln!(s, "dynamic_power_w  {p:.6e}");
        }
        for w in &report.warnings {
            let _ = writeln!(s, "warning: {} {}: {}", w.kind, w.net, w.detail);
        }
        s
    };
    emit(&args.out, &text)
}

fn catalog_cmd(cmd: CatalogCmd) -> Result<()> {
    match cmd {
        CatalogCmd::Stats { source, field, only_partial, format, out } => {
            let mut records = source.load()?;
            if only_partial {
                records.retain(|r| r.completeness == Completeness::Partial);
            }
            let shares = catalog::aggregate(&records, &field)?;
            let text = match format {
                Format::Json => json(&shares),
                Format::Csv => {
                    let mut s = format!("{field},count,percent\n");
                    for (k, v) in &shares {
                        let _ = writeln!(s, "{k},{},{:.1}", v.count, v.percent);
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for (k, v) in &shares {
                        let _ = writeln!(s, "{k:<40} {:>3}/{} {:>5.1}%", v.count, records.len(), v.percent);
                    }
                    s
                }
            };
            emit(&out, &text)
        }
        CatalogCmd::PdpCheck { source, format, out } => {
            let records = source.load()?;
            let pdp = catalog::pdp_check(&records);
            let improvements = match (&source.catalog, source.dataset) {
                (None, Dataset::Results) => catalog::improvement_check(&records, &catalog::seed_improvements()),
                _ => Vec::new(),
            };
            let text = match format {
                Format::Json => json(&serde_json::json!({ "pdp": pdp, "improvements": improvements })),
                Format::Csv => {
                    let mut s = String::from("key,recomputed_fj,reported_fj,consistent\n");
                    for c in &pdp {
                        let reported = c.reported_fj.map(|v| v.to_string()).unwrap_or_default();
                        let _ = writeln!(s, "{},{:.4},{reported},{}", c.key, c.recomputed_fj, c.consistent);
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for c in &pdp {
                        let reported = c.reported_fj.map_or("-".to_string(), |v| v.to_string());
                        let mark = if c.consistent { "ok" } else { "MISMATCH" };
                        let _ = writeln!(s, "{:<20} {:>9.4} fJ  reported {reported:<8} {mark}", c.key, c.recomputed_fj);
                    }
                    for c in &improvements {
                        let mark = if c.consistent { "ok" } else { "MISMATCH" };
                        let _ = writeln!(s, "{c} {mark}");
                    }
                    s
                }
            };
            emit(&out, &text)?;
            let bad = pdp.iter().filter(|c| !c.consistent).count() + improvements.iter().filter(|c| !c.consistent).count();
            if bad > 0 {
                bail!("{bad} reported values disagree with the recomputation");
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(g) => gen(g),
        Command::Sim(a) => simulate(a),
        Command::Truth(a) => truth(a),
        Command::Simplify(a) => simplify(a),
        Command::Lint(a) => lint(a),
        Command::Metrics(a) => metrics(a),
        Command::Catalog(c) => catalog_cmd(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
