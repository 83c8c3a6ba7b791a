//! The `nfdb` command line. Query flags are turned into the same parameter
//! pairs the HTTP API receives.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nfdb_core::ingest::{ingest_alpha_table, ingest_wild_mass_table};
use nfdb_core::mass::{frequency_comparison, Place};
use nfdb_core::report::render_summary;
use nfdb_core::{ingest_str, FieldRecord, GroupId, IngestReport, Store, SEED};

use crate::api;
use crate::error::ServiceError;
use crate::params::Pairs;

pub const STORE_FILE: &str = "fields.nfdb";

#[derive(Debug, Parser)]
#[command(
    name = "nfdb",
    version,
    about = "Number field tables with completeness tracking"
)]
pub struct Cli {
    /// Directory holding the store file.
    #[arg(
        long,
        global = true,
        env = "NFDB_DATA_DIR",
        default_value = "nfdb-data"
    )]
    pub data_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Load JSON-lines files (fields, ledger rows, constants).
    Ingest(IngestArgs),
    /// Search the stored fields.
    Query(QueryArgs),
    /// Local and global masses for S_n fields.
    Mass(MassArgs),
    /// Galois root discriminant from slope contents such as "2:[20/7,20/7,20/7]_7^3".
    Grd {
        #[arg(required = true)]
        contents: Vec<String>,
    },
    /// Counts and minima for one group.
    Summary(SummaryArgs),
    /// Observed local discriminant frequencies against the masses.
    Compare(CompareArgs),
    /// Re-check every stored record and index entry.
    Audit,
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "NFDB_LISTEN", default_value = "127.0.0.1:8080")]
        listen: String,
    },
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// JSON-lines files.
    pub files: Vec<PathBuf>,
    /// Also load the bundled seed.
    #[arg(long)]
    pub seed: bool,
    /// Text tables of "group alpha" lines.
    #[arg(long)]
    pub alpha: Vec<PathBuf>,
    /// Text tables of "n p m0 m1 ..." or "n p total T" lines.
    #[arg(long)]
    pub wild_masses: Vec<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct QueryArgs {
    /// Degree; repeatable or comma-separated.
    #[arg(long)]
    pub degree: Vec<String>,
    #[arg(long)]
    pub degree_min: Option<String>,
    #[arg(long)]
    pub degree_max: Option<String>,
    /// Galois group label (4T5) or name (S4); repeatable.
    #[arg(long)]
    pub group: Vec<String>,
    /// Number of complex places; repeatable.
    #[arg(long = "signature", short = 's')]
    pub signature: Vec<String>,
    #[arg(long)]
    pub absdisc_min: Option<String>,
    #[arg(long)]
    pub absdisc_max: Option<String>,
    #[arg(long)]
    pub rd_max: Option<String>,
    #[arg(long)]
    pub grd_min: Option<String>,
    #[arg(long)]
    pub grd_max: Option<String>,
    /// p:emin-emax[:z] or plo-phi:emin-emax[:z]; repeatable.
    #[arg(long)]
    pub ram: Vec<String>,
    /// Only primes named by --ram may ramify.
    #[arg(long)]
    pub only_listed: bool,
    #[arg(long)]
    pub max_prime: Option<String>,
    /// rd, grd or absdisc.
    #[arg(long)]
    pub sort: Option<String>,
    /// class or narrow.
    #[arg(long)]
    pub display: Option<String>,
    #[arg(long)]
    pub limit: Option<String>,
    #[arg(long)]
    pub offset: Option<String>,
    /// Print the JSON response instead of a table.
    #[arg(long)]
    pub json: bool,
    /// Print only the polynomials.
    #[arg(long, conflicts_with = "json")]
    pub polys: bool,
}

impl QueryArgs {
    pub fn pairs(&self) -> Pairs {
        let mut out = Vec::new();
        let mut many = |name: &str, vals: &[String]| {
            out.extend(vals.iter().map(|v| (name.to_string(), v.clone())))
        };
        many("degree", &self.degree);
        many("group", &self.group);
        many("s", &self.signature);
        many("ram", &self.ram);
        let singles = [
            ("degree_min", &self.degree_min),
            ("degree_max", &self.degree_max),
            ("absdisc_min", &self.absdisc_min),
            ("absdisc_max", &self.absdisc_max),
            ("rd_max", &self.rd_max),
            ("grd_min", &self.grd_min),
            ("grd_max", &self.grd_max),
            ("max_prime", &self.max_prime),
            ("sort", &self.sort),
            ("display", &self.display),
            ("limit", &self.limit),
            ("offset", &self.offset),
        ];
        for (name, v) in singles {
            if let Some(v) = v {
                out.push((name.to_string(), v.clone()));
            }
        }
        if self.only_listed {
            out.push(("only_listed".into(), "1".into()));
        }
        out
    }
}

#[derive(Debug, Args)]
pub struct MassArgs {
    #[arg(long)]
    pub n: u32,
    /// Local masses at this prime, tame or ingested wild.
    #[arg(long, visible_alias = "prime")]
    pub tame_prime: Option<u64>,
    /// Aggregated prediction for fields unramified outside these primes.
    #[arg(long, value_delimiter = ',')]
    pub predict: Vec<u64>,
    /// Restrict the prediction to one signature.
    #[arg(long = "signature", short = 's')]
    pub signature: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SummaryArgs {
    #[arg(long)]
    pub group: String,
    /// Comma-separated prime set; repeatable.
    #[arg(long)]
    pub family: Vec<String>,
    #[arg(long)]
    pub grd_cut: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// An S_n group label; every stored field with this group is tallied.
    #[arg(long)]
    pub group: String,
    /// "inf" or a prime; repeatable.
    #[arg(long, required = true)]
    pub place: Vec<String>,
}

pub fn store_path(data_dir: &Path) -> PathBuf {
    data_dir.join(STORE_FILE)
}

pub fn open_store(data_dir: &Path) -> Result<Store, ServiceError> {
    Ok(Store::open(store_path(data_dir))?)
}

fn io(e: std::io::Error) -> ServiceError {
    ServiceError::Store(e.into())
}

fn report_lines(out: &mut dyn Write, name: &str, r: &IngestReport) -> std::io::Result<()> {
    writeln!(
        out,
        "{name}: {} accepted, {} rejected",
        r.accepted,
        r.rejected.len()
    )?;
    for (line, why) in &r.rejected {
        writeln!(out, "  line {line}: {why}")?;
    }
    Ok(())
}

fn ingest(data_dir: &Path, args: &IngestArgs, out: &mut dyn Write) -> Result<bool, ServiceError> {
    std::fs::create_dir_all(data_dir).map_err(io)?;
    let mut store = open_store(data_dir)?;
    let mut clean = true;
    let mut record =
        |name: &str, r: IngestReport, out: &mut dyn Write| -> Result<(), ServiceError> {
            clean &= r.rejected.is_empty();
            report_lines(out, name, &r).map_err(io)
        };
    if args.seed {
        let r = ingest_str(&mut store, SEED);
        record("seed", r, out)?;
    }
    let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(io);
    for path in &args.files {
        let r = ingest_str(&mut store, &read(path)?);
        record(&path.display().to_string(), r, out)?;
    }
    for path in &args.alpha {
        let r = ingest_alpha_table(&mut store, &read(path)?);
        record(&path.display().to_string(), r, out)?;
    }
    for path in &args.wild_masses {
        let r = ingest_wild_mass_table(&mut store, &read(path)?);
        record(&path.display().to_string(), r, out)?;
    }
    store.commit()?;
    writeln!(
        out,
        "store: {} fields, {} ledger rows",
        store.len(),
        store.ledger().len()
    )
    .map_err(io)?;
    Ok(clean)
}

fn mass(store: &Store, args: &MassArgs, out: &mut dyn Write) -> Result<(), ServiceError> {
    let mut pairs: Pairs = vec![("n".into(), args.n.to_string())];
    if let Some(p) = args.tame_prime {
        pairs.push(("p".into(), p.to_string()));
    }
    if !args.predict.is_empty() {
        let list: Vec<String> = args.predict.iter().map(|p| p.to_string()).collect();
        pairs.push(("predict".into(), list.join(",")));
    }
    if let Some(s) = args.signature {
        pairs.push(("s".into(), s.to_string()));
    }
    let m = api::mass(store, &pairs)?;
    let mut text = String::new();
    if let Some(local) = &m.local {
        match &local.masses {
            Some(ms) => text.push_str(&format!("{} | total {}\n", ms.join(" "), local.total.exact)),
            None => text.push_str(&format!("total {}\n", local.total.exact)),
        }
    }
    if let Some(p) = &m.prediction {
        let primes: Vec<String> = p.primes.iter().map(|q| q.to_string()).collect();
        text.push_str(&format!(
            "prediction for {{{}}}: {} ~ {}{}\n",
            primes.join(","),
            p.value.exact,
            p.value.decimal,
            if p.applicable {
                ""
            } else {
                " (square discriminant: heuristic does not apply)"
            }
        ));
    }
    if m.local.is_none() && m.prediction.is_none() {
        let inf: Vec<&str> = m.infinity.iter().map(|v| v.exact.as_str()).collect();
        text.push_str(&format!(
            "{} | total {}\n",
            inf.join(" "),
            m.infinity_total.exact
        ));
    }
    out.write_all(text.as_bytes()).map_err(io)
}

fn grd(contents: &[String], out: &mut dyn Write) -> Result<(), ServiceError> {
    let pairs: Pairs = contents
        .iter()
        .map(|c| ("content".to_string(), c.clone()))
        .collect();
    let g = api::grd(&pairs)?;
    let mut text = String::new();
    for t in &g.terms {
        text.push_str(&format!(
            "{}: {} -> {}^{{{}}}\n",
            t.prime, t.content, t.prime, t.alpha
        ));
    }
    text.push_str(&format!("grd = {} ~ {}\n", g.exact, g.decimal));
    out.write_all(text.as_bytes()).map_err(io)
}

fn parse_group(text: &str) -> Result<GroupId, ServiceError> {
    text.parse()
        .map_err(|e: nfdb_core::ModelError| ServiceError::param("group", e.to_string()))
}

fn compare(store: &Store, args: &CompareArgs, out: &mut dyn Write) -> Result<(), ServiceError> {
    let group = parse_group(&args.group)?;
    let places = args
        .place
        .iter()
        .map(|p| match p.as_str() {
            "inf" | "infinity" => Ok(Place::Infinity),
            other => other.parse().map(Place::Prime).map_err(|_| {
                ServiceError::param("place", format!("{other:?} is neither 'inf' nor a prime"))
            }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let records: Vec<FieldRecord> = store
        .records()
        .filter(|r| r.group == group)
        .cloned()
        .collect();
    let rows = frequency_comparison(&records, group.degree(), &places, store.mass_table())?;
    let render = |v: &[num_rational::BigRational]| -> String {
        v.iter()
            .map(|x| nfdb_core::arith::round_decimal(x, 2))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(out, "{} fields of {}", records.len(), group.display_name()).map_err(io)?;
    for row in rows {
        let place = match row.place {
            Place::Infinity => "inf".to_string(),
            Place::Prime(p) => p.to_string(),
        };
        writeln!(
            out,
            "{place}: predicted {} | observed {} | total {}",
            render(&row.predicted),
            render(&row.observed),
            nfdb_core::arith::rational_text(&row.total)
        )
        .map_err(io)?;
    }
    Ok(())
}

/// Runs every command except `serve`. Returns false when input was rejected
/// or the audit found problems.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool, ServiceError> {
    let dir = &cli.data_dir;
    match &cli.command {
        Command::Ingest(args) => ingest(dir, args, out),
        Command::Query(args) => {
            let store = open_store(dir)?;
            let pairs = args.pairs();
            let text = if args.json {
                let mut s = serde_json::to_string_pretty(&api::fields(&store, &pairs)?)
                    .expect("serializable");
                s.push('\n');
                s
            } else if args.polys {
                api::fields_text(&store, &pairs)?
            } else {
                api::fields_table(&store, &pairs)?
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(true)
        }
        Command::Mass(args) => mass(&open_store(dir)?, args, out).map(|_| true),
        Command::Grd { contents } => grd(contents, out).map(|_| true),
        Command::Summary(args) => {
            let store = open_store(dir)?;
            let mut pairs: Pairs = vec![("group".into(), args.group.clone())];
            pairs.extend(
                args.family
                    .iter()
                    .map(|f| ("family".to_string(), f.clone())),
            );
            if let Some(c) = &args.grd_cut {
                pairs.push(("grd_cut".into(), c.clone()));
            }
            let s = api::summary(&store, &pairs)?;
            let text = if args.json {
                serde_json::to_string_pretty(&s).expect("serializable") + "\n"
            } else {
                render_summary(&s)
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(true)
        }
        Command::Compare(args) => compare(&open_store(dir)?, args, out).map(|_| true),
        Command::Audit => {
            let store = open_store(dir)?;
            let problems = store.audit();
            for p in &problems {
                writeln!(out, "{p}").map_err(io)?;
            }
            writeln!(
                out,
                "audit: {} fields, {} problem(s)",
                store.len(),
                problems.len()
            )
            .map_err(io)?;
            Ok(problems.is_empty())
        }
        Command::Serve { .. } => Err(ServiceError::Rejected(
            "serve runs through the async entry point".into(),
        )),
    }
}
