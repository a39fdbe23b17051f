//! permbin: deterministic command-line surface over the permutation-binomial
//! toolkit. Exit codes: 0 success, 1 domain error (bad parameters), 2
//! capacity (field or enumeration too large).

mod render;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use permbin::binomial::{
    from_family, is_pb_mu_criterion, criterion_is_complete, Binomial, BinomialRepr, FamilyParams,
    TermRepr,
};
use permbin::canonical::{
    canonical_binomial, canonical_form, canonical_form_unchecked, classify_field, collapse,
    compute_adn, compute_gdn, compute_nd, equivalent, equivalent_bruteforce, CanonicalTriple,
};
use permbin::curves::{build_g, curve_diagnostics, numerator_ng};
use permbin::ff::{factor_prime_power, field_from_descr, make_field, Fe, FieldCtx, FieldDescr};
use permbin::results::{
    default_cache_dir, scan_t110, scan_t19, verify_result, write_jsonl, write_summary_csv, Method,
    ScanOptions, ScanOutput,
};
use permbin::{Error, Result};
use render::{Format, Report};

#[derive(Parser)]
#[command(name = "permbin", version, about = "Permutation binomials of small finite fields")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct F_{p^m} and print its deterministic description.
    FieldInfo {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
    },
    /// Test whether X^n(X^{d(q-1)} + a) permutes F_{q^e}.
    TestPb {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        e: u32,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        coeff: CoeffArg,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
    },
    /// Least representatives of the exponent orbits for a divisor d of q-1.
    Nd {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u64,
    },
    /// The stabilizer subgroup G_{d,n} of an orbit minimum n.
    Gdn {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
    },
    /// Least coefficient logs A_{d,n} reachable under the stabilizer.
    Adn {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
    },
    /// Canonical triple of a permutation binomial, with a replay witness.
    Canonical {
        #[arg(long)]
        q: u64,
        /// The binomial as two log:exp terms, e.g. "0:13,5:3".
        #[arg(long)]
        terms: String,
        /// Skip the permutation precondition (classify any binomial).
        #[arg(long)]
        unchecked: bool,
    },
    /// All permutation binomials of F_q grouped into equivalence classes.
    Classify {
        #[arg(long)]
        q: u64,
    },
    /// Decide equivalence of two binomials, or re-verify a classify stream.
    Equiv {
        #[arg(long, requires = "f_terms", requires = "g_terms", conflicts_with = "from_file")]
        q: Option<u64>,
        /// First binomial as two log:exp terms.
        #[arg(long, requires = "q")]
        f_terms: Option<String>,
        /// Second binomial as two log:exp terms.
        #[arg(long, requires = "q")]
        g_terms: Option<String>,
        /// Cross-check the verdict against the exhaustive search.
        #[arg(long, conflicts_with = "from_file")]
        oracle: bool,
        /// Verify every class of a classify output file instead.
        #[arg(long, value_name = "PATH")]
        from_file: Option<PathBuf>,
    },
    /// Difference-quotient curve of a family member: numerator, degree,
    /// bound, and optional point counts.
    Curve {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        coeff: CoeffArg,
        /// Count off-diagonal zeros of the numerator.
        #[arg(long)]
        count_points: bool,
        /// Restrict the count to the norm-one subgroup.
        #[arg(long)]
        mu_only: bool,
    },
    /// Exhaustive family scans with JSONL output and per-slice summaries.
    Scan {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Base field sizes, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long)]
        n_from: u64,
        #[arg(long)]
        n_to: u64,
        /// First d (t110 scans only).
        #[arg(long)]
        d_from: Option<u64>,
        /// Last d (t110 scans only).
        #[arg(long)]
        d_to: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        /// Gate slices by gcd(n, d) = 1 instead of d | q+1, emitting
        /// normalization notes for reducible points.
        #[arg(long)]
        remark_mode: bool,
        /// Cache scan outputs (PERMBIN_CACHE_DIR overrides the location).
        #[arg(long)]
        cache: bool,
    },
    /// Sweep a predicate against brute force over its whole domain.
    Verify {
        /// Result id: r1.1 ... r1.7, t1.9, or t1.10.
        #[arg(long)]
        result: String,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        e: u32,
    },
}

/// Field-element input: exactly one of a discrete log, an explicit zero, or
/// a little-endian base-p coefficient vector (for table-free fields).
#[derive(Args)]
#[command(group = ArgGroup::new("coeff").required(true).multiple(false))]
struct CoeffArg {
    /// Coefficient as a discrete log of the field generator.
    #[arg(long, group = "coeff")]
    a_log: Option<u64>,
    /// The zero coefficient.
    #[arg(long, group = "coeff")]
    a_zero: bool,
    /// Coefficient as a base-p coefficient vector, least significant first.
    #[arg(long, group = "coeff", value_name = "C0,C1,...")]
    a_vec: Option<String>,
}

impl CoeffArg {
    fn resolve(&self, ctx: &FieldCtx) -> Result<Fe> {
        if let Some(log) = self.a_log {
            Ok(ctx.pow(ctx.xi(), log as u128))
        } else if let Some(vec) = &self.a_vec {
            ctx.from_coeffs(&parse_u64_list(vec)?)
        } else {
            Ok(ctx.zero())
        }
    }

    fn echo(&self, flags: &mut BTreeMap<String, String>) {
        if let Some(log) = self.a_log {
            flags.insert("a-log".into(), log.to_string());
        }
        if let Some(vec) = &self.a_vec {
            flags.insert("a-vec".into(), vec.clone());
        }
        if self.a_zero {
            flags.insert("a-zero".into(), "true".into());
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum MethodArg {
    Brute,
    Criterion,
    Both,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Brute => "brute",
            MethodArg::Criterion => "criterion",
            MethodArg::Both => "both",
        }
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Brute => Method::Brute,
            MethodArg::Criterion => Method::Criterion,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum FamilyArg {
    T19,
    T110,
    All,
}

/// One classify output line after the header: a class and its members,
/// each member as the two terms of its reduced form.
#[derive(Serialize, Deserialize)]
struct ClassLine {
    triple: CanonicalTriple,
    size: usize,
    members: Vec<Vec<TermRepr>>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli).and_then(|bytes| render::emit(cli.out.as_deref(), &bytes)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_capacity() { 2 } else { 1 })
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<u8>> {
    let format = cli.format;
    match &cli.command {
        Command::FieldInfo { p, m } => {
            let ctx = make_field(*p, *m)?;
            let flags = flag_map(&[("p", p.to_string()), ("m", m.to_string())]);
            let mut payload = serde_json::to_value(ctx.descr())?;
            payload["q"] = json!(ctx.q());
            payload["tables"] = json!(ctx.has_tables());
            Report::new("field-info", flags, payload).render(format)
        }
        Command::TestPb { q, e, n, d, coeff, method } => {
            let ctx = extension_field(*q, *e)?;
            let a = coeff.resolve(&ctx)?;
            let params = FamilyParams { q: *q, e: *e, n: *n, d: *d, a };
            let f = from_family(&params, &ctx)?;
            let mut flags = flag_map(&[
                ("q", q.to_string()),
                ("e", e.to_string()),
                ("n", n.to_string()),
                ("d", d.to_string()),
                ("method", method.name().to_string()),
            ]);
            coeff.echo(&mut flags);
            let mut payload = json!({ "q": q, "e": e, "n": n, "d": d });
            let obj = payload.as_object_mut().unwrap();
            let brute = match method {
                MethodArg::Criterion => None,
                _ => Some(f.is_permutation()?),
            };
            let mu = match method {
                MethodArg::Brute => None,
                _ => Some(is_pb_mu_criterion(&params, &ctx)?),
            };
            if let Some(b) = brute {
                obj.insert("brute".into(), json!(b));
            }
            if let Some(c) = mu {
                obj.insert("mu".into(), json!(c));
                let complete = criterion_is_complete(*n, *d, *q);
                obj.insert("criterion_complete".into(), json!(complete));
                if let Some(b) = brute {
                    if complete && b != c {
                        return Err(Error::Internal(format!(
                            "criterion disagreed with brute force at q={q} n={n} d={d}"
                        )));
                    }
                }
            }
            let is_pb = brute.or(mu).unwrap_or(false);
            obj.insert("is_pb".into(), json!(is_pb));
            Report::new("test-pb", flags, payload).render(format)
        }
        Command::Nd { p, m, d } => {
            let ctx = make_field(*p, *m)?;
            let flags =
                flag_map(&[("p", p.to_string()), ("m", m.to_string()), ("d", d.to_string())]);
            let nd = compute_nd(&ctx, *d)?;
            let payload = json!({ "q": ctx.q(), "d": d, "N_d": nd });
            Report::new("nd", flags, payload).render(format)
        }
        Command::Gdn { p, m, d, n } => {
            let ctx = make_field(*p, *m)?;
            let flags = flag_map(&[
                ("p", p.to_string()),
                ("m", m.to_string()),
                ("d", d.to_string()),
                ("n", n.to_string()),
            ]);
            let members = compute_gdn(&ctx, *d, *n)?;
            let payload = json!({ "q": ctx.q(), "d": d, "n": n, "G_dn": members });
            Report::new("gdn", flags, payload).render(format)
        }
        Command::Adn { p, m, d, n } => {
            let ctx = make_field(*p, *m)?;
            let flags = flag_map(&[
                ("p", p.to_string()),
                ("m", m.to_string()),
                ("d", d.to_string()),
                ("n", n.to_string()),
            ]);
            let minima = compute_adn(&ctx, *d, *n)?;
            let payload = json!({ "q": ctx.q(), "d": d, "n": n, "A_dn": minima });
            Report::new("adn", flags, payload).render(format)
        }
        Command::Canonical { q, terms, unchecked } => {
            let ctx = base_field(*q)?;
            let f = parse_binomial(&ctx, terms)?;
            let mut flags = flag_map(&[("q", q.to_string()), ("terms", terms.clone())]);
            if *unchecked {
                flags.insert("unchecked".into(), "true".into());
            }
            let (triple, chain) =
                if *unchecked { canonical_form_unchecked(&f)? } else { canonical_form(&f)? };
            let witness = collapse(&ctx, &chain);
            let rep = canonical_binomial(&ctx, &triple)?;
            let payload = json!({
                "field": ctx.descr(),
                "triple": triple,
                "witness": witness,
                "representative": rep.repr()?.terms,
            });
            Report::new("canonical", flags, payload).render(format)
        }
        Command::Classify { q } => {
            let ctx = base_field(*q)?;
            let flags = flag_map(&[("q", q.to_string())]);
            let classes = classify_field(&ctx)?;
            render_classify(&ctx, &classes, flags, format)
        }
        Command::Equiv { q, f_terms, g_terms, oracle, from_file } => match (q, from_file) {
            (Some(q), None) => {
                let ctx = base_field(*q)?;
                // clap guarantees both are present when --q is.
                let (ft, gt) = (f_terms.as_ref().unwrap(), g_terms.as_ref().unwrap());
                let f = parse_binomial(&ctx, ft)?;
                let g = parse_binomial(&ctx, gt)?;
                let mut flags = flag_map(&[
                    ("q", q.to_string()),
                    ("f-terms", ft.clone()),
                    ("g-terms", gt.clone()),
                ]);
                let witness = equivalent(&f, &g)?;
                let mut payload = json!({
                    "field": ctx.descr(),
                    "equivalent": witness.is_some(),
                });
                if let Some(w) = &witness {
                    payload["witness"] = serde_json::to_value(w)?;
                }
                if *oracle {
                    flags.insert("oracle".into(), "true".into());
                    let brute = equivalent_bruteforce(&f, &g)?;
                    if brute.is_some() != witness.is_some() {
                        return Err(Error::Internal(
                            "canonical equivalence disagreed with exhaustive search".into(),
                        ));
                    }
                    payload["oracle_equivalent"] = json!(brute.is_some());
                }
                Report::new("equiv", flags, payload).render(format)
            }
            (None, Some(path)) => {
                let flags = flag_map(&[("from-file", path.display().to_string())]);
                let (classes, members) = verify_classify_stream(path)?;
                let payload = json!({
                    "file": path.display().to_string(),
                    "classes": classes,
                    "members": members,
                    "consistent": true,
                });
                Report::new("equiv", flags, payload).render(format)
            }
            _ => Err(Error::Malformed(
                "pass either --q with --f-terms/--g-terms, or --from-file".into(),
            )),
        },
        Command::Curve { q, n, d, coeff, count_points, mu_only } => {
            let ctx = extension_field(*q, 2)?;
            let a = coeff.resolve(&ctx)?;
            let params = FamilyParams { q: *q, e: 2, n: *n, d: *d, a };
            let mut flags = flag_map(&[
                ("q", q.to_string()),
                ("n", n.to_string()),
                ("d", d.to_string()),
            ]);
            coeff.echo(&mut flags);
            if *count_points {
                flags.insert("count-points".into(), "true".into());
            }
            if *mu_only {
                flags.insert("mu-only".into(), "true".into());
            }
            let g = build_g(&ctx, &params)?;
            let numerator = numerator_ng(&ctx, &g)?;
            let diagnostics = curve_diagnostics(&ctx, &params, *count_points, *mu_only)?;
            let payload = json!({
                "q": q,
                "n": n,
                "d": d,
                "numerator": numerator.repr(&ctx)?,
                "diagnostics": diagnostics,
            });
            Report::new("curve", flags, payload).render(format)
        }
        Command::Scan {
            family,
            q,
            n_from,
            n_to,
            d_from,
            d_to,
            workers,
            method,
            remark_mode,
            cache,
        } => {
            let opts = ScanOptions {
                method: (*method).into(),
                workers: *workers,
                remark_mode: *remark_mode,
                with_diagnostics: false,
                cache_dir: if *cache { Some(default_cache_dir()) } else { None },
            };
            let d_range = match (family, d_from, d_to) {
                (FamilyArg::T19, None, None) => None,
                (FamilyArg::T19, _, _) => {
                    return Err(Error::Malformed(
                        "--d-from/--d-to apply to t110 scans only".into(),
                    ));
                }
                (_, Some(lo), Some(hi)) => Some(*lo..=*hi),
                _ => {
                    return Err(Error::Malformed(
                        "t110 scans need both --d-from and --d-to".into(),
                    ));
                }
            };
            let mut outputs: Vec<ScanOutput> = Vec::new();
            if matches!(family, FamilyArg::T19 | FamilyArg::All) {
                let qs: Vec<u64> = match family {
                    // "all" silently takes the applicable subset.
                    FamilyArg::All => q.iter().copied().filter(|x| x.is_power_of_two()).collect(),
                    _ => q.clone(),
                };
                if !qs.is_empty() {
                    outputs.extend(scan_t19(&qs, *n_from..=*n_to, &opts)?);
                }
            }
            if matches!(family, FamilyArg::T110 | FamilyArg::All) {
                outputs.extend(scan_t110(q, *n_from..=*n_to, d_range.unwrap(), &opts)?);
            }
            render_scan(&outputs, format)
        }
        Command::Verify { result, q, e } => {
            let flags = flag_map(&[
                ("result", result.clone()),
                ("q", q.to_string()),
                ("e", e.to_string()),
            ]);
            let report = verify_result(result, *q, *e)?;
            let payload = serde_json::to_value(&report)?;
            Report::new("verify", flags, payload).render(format)
        }
    }
}

fn base_field(q: u64) -> Result<Arc<FieldCtx>> {
    let (p, m) = factor_prime_power(q).ok_or(Error::NotPrimePower { q })?;
    Ok(Arc::new(make_field(p, m)?))
}

fn extension_field(q: u64, e: u32) -> Result<Arc<FieldCtx>> {
    let (p, m) = factor_prime_power(q).ok_or(Error::NotPrimePower { q })?;
    Ok(Arc::new(make_field(p, m * e)?))
}

fn flag_map(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Malformed(format!("not an integer: {t:?}")))
        })
        .collect()
}

/// Parses "log:exp,log:exp" into a reduced binomial over ctx.
fn parse_binomial(ctx: &Arc<FieldCtx>, s: &str) -> Result<Binomial> {
    let mut terms = Vec::new();
    for part in s.split(',') {
        let (log, exp) = part
            .split_once(':')
            .ok_or_else(|| Error::Malformed(format!("term {part:?} is not log:exp")))?;
        let log: u64 = log
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad coefficient log {log:?}")))?;
        let exp: u64 = exp
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad exponent {exp:?}")))?;
        terms.push((ctx.pow(ctx.xi(), log as u128), exp));
    }
    if terms.len() != 2 {
        return Err(Error::Malformed(format!(
            "a binomial has exactly 2 terms, got {}",
            terms.len()
        )));
    }
    Binomial::new(ctx, terms[0], terms[1])
}

fn render_classify(
    ctx: &Arc<FieldCtx>,
    classes: &[(CanonicalTriple, Vec<Binomial>)],
    flags: BTreeMap<String, String>,
    format: Format,
) -> Result<Vec<u8>> {
    let total: usize = classes.iter().map(|(_, m)| m.len()).sum();
    match format {
        Format::Json => {
            let mut s = String::new();
            let header = json!({
                "command": "classify",
                "flags": flags,
                "field": ctx.descr(),
                "classes": classes.len(),
                "total": total,
            });
            s.push_str(&format!("{header}\n"));
            for (triple, members) in classes {
                let mut line = ClassLine { triple: *triple, size: members.len(), members: vec![] };
                for f in members {
                    line.members.push(f.repr()?.terms);
                }
                s.push_str(&format!("{}\n", serde_json::to_string(&line)?));
            }
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut s = String::from("d,n,a_log,size\n");
            for (t, members) in classes {
                s.push_str(&format!("{},{},{},{}\n", t.d, t.n, t.a_log, members.len()));
            }
            Ok(s.into_bytes())
        }
        Format::Text => {
            let mut s = format!(
                "F_{}: {} permutation binomials in {} classes\n",
                ctx.q(),
                total,
                classes.len()
            );
            for (t, members) in classes {
                s.push_str(&format!(
                    "d={} n={} a_log={}: {} members\n",
                    t.d,
                    t.n,
                    t.a_log,
                    members.len()
                ));
            }
            Ok(s.into_bytes())
        }
    }
}

/// Re-verifies a classify stream: every member must replay to its class
/// triple and carry a verified witness to the class representative.
fn verify_classify_stream(path: &PathBuf) -> Result<(usize, usize)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Value = serde_json::from_str(
        lines.next().ok_or_else(|| Error::Malformed("empty classify stream".into()))?,
    )?;
    let descr: FieldDescr = serde_json::from_value(
        header
            .get("field")
            .cloned()
            .ok_or_else(|| Error::Malformed("classify header lacks a field description".into()))?,
    )?;
    let ctx = Arc::new(field_from_descr(&descr)?);
    let mut classes = 0usize;
    let mut members_total = 0usize;
    let mut last: Option<CanonicalTriple> = None;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let class: ClassLine = serde_json::from_str(line)?;
        if let Some(prev) = last {
            if prev >= class.triple {
                return Err(Error::Malformed("classify stream classes out of order".into()));
            }
        }
        last = Some(class.triple);
        if class.members.len() != class.size {
            return Err(Error::Malformed(format!(
                "class {:?} declares {} members but lists {}",
                class.triple,
                class.size,
                class.members.len()
            )));
        }
        let rep = canonical_binomial(&ctx, &class.triple)?;
        classes += 1;
        for terms in &class.members {
            let repr = BinomialRepr { field: ctx.descr(), terms: terms.clone() };
            let f = Binomial::from_repr(&repr)?;
            members_total += 1;
            if equivalent(&f, &rep)?.is_none() {
                return Err(Error::Malformed(format!(
                    "member {terms:?} is not equivalent to its class representative"
                )));
            }
        }
    }
    Ok((classes, members_total))
}

fn render_scan(outputs: &[ScanOutput], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut buf = Vec::new();
            write_jsonl(outputs, &mut buf)?;
            Ok(buf)
        }
        Format::Csv => {
            let mut buf = Vec::new();
            write_summary_csv(outputs, &mut buf)?;
            Ok(buf)
        }
        Format::Text => {
            let mut s = String::new();
            for out in outputs {
                let h = &out.header;
                s.push_str(&format!(
                    "family={} q={} e={} n=[{},{}] d=[{},{}] method={}: {} tested, {} positives\n",
                    h.family,
                    h.q,
                    h.e,
                    h.n_min,
                    h.n_max,
                    h.d_min,
                    h.d_max,
                    method_name(h.method),
                    out.total_tested(),
                    out.total_positives(),
                ));
                for rec in out.positives() {
                    s.push_str(&format!("  n={} d={} a_log={}\n", rec.n, rec.d, rec.a_log));
                }
                for slice in &out.slices {
                    if let Some(note) = &slice.normalization {
                        s.push_str(&format!(
                            "  note: ({}, {}) reduces to ({}, {}) via X^{}\n",
                            note.n, note.d, note.n_red, note.d_red, note.delta_inv
                        ));
                    }
                }
            }
            Ok(s.into_bytes())
        }
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Brute => "brute",
        Method::Criterion => "criterion",
        Method::Both => "both",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_parsing_accepts_exactly_two_terms() {
        let ctx = base_field(16).unwrap();
        let f = parse_binomial(&ctx, "0:13,5:3").unwrap();
        assert_eq!(f.exp_hi(), 13);
        assert!(parse_binomial(&ctx, "0:13").is_err());
        assert!(parse_binomial(&ctx, "0:13,5:3,1:1").is_err());
        assert!(parse_binomial(&ctx, "nope").is_err());
    }

    #[test]
    fn flat_rendering_stays_scalar() {
        assert_eq!(render::plain(&json!([1, 2, 3])), "1 2 3");
        assert_eq!(render::plain(&json!("x")), "x");
        assert_eq!(render::plain(&json!({"a": 1})), "{\"a\":1}");
        assert_eq!(render::csv_cell("a,b"), "\"a,b\"");
    }
}
