//! Deterministic command-line front end. Every subcommand normalizes into a
//! run plan and executes it; rerunning the same plan reproduces the
//! artifact byte for byte. Randomness enters only through an explicit
//! `--seed` on instance generation, never through construction logic.
//!
//! Exit codes: 0 on success, 1 on usage, I/O and parse errors, 2 on domain
//! errors such as `WeightOverflow` or `PreconditionFailed`; stderr carries
//! the structured error name.

mod cmds;
mod io;
mod plan;

use clap::{Args, Parser, Subcommand};
use io::{emit, Failure};
use plan::{Format, RunPlan};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "solovay-lab", version, about = "Exact desk-scale constructions for prefix-free complexity and algorithmic randomness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Artifact path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, default_value = "csv")]
    format: String,
    /// Dump the normalized run plan as JSON and exit
    #[arg(long)]
    plan_only: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Complexity table K_budget(x) for every x up to a length
    Ktable {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        maxlen: u64,
        #[arg(long)]
        budget: u64,
        /// Add the deficiency column |x| - K(x)
        #[arg(long)]
        deficiency: bool,
        /// Also dump halting events discovered within this budget
        #[arg(long)]
        events_budget: Option<u64>,
        #[arg(long)]
        events_out: Option<PathBuf>,
    },
    /// Step-count bound g_S on a triple code
    Gs {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        budget: u64,
        /// The string to evaluate, as bits ('-' for empty)
        #[arg(long, allow_hyphen_values = true)]
        m: Option<String>,
        /// Encode x,p,t first (fields as bits,bits,integer)
        #[arg(long, allow_hyphen_values = true)]
        triple: Option<String>,
    },
    /// Partial weight sum of a table; optionally a tail cutoff
    Omega {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        n: u64,
        /// Read f as a staged table at this stage
        #[arg(long)]
        stage: Option<u64>,
        #[arg(long)]
        tail_k: Option<u64>,
        /// Weight certificate, `num/2^exp`
        #[arg(long)]
        cap: Option<String>,
    },
    /// Kraft-Chaitin coding of a request file or of built requests
    KcEncode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        requests: Option<PathBuf>,
        #[arg(long)]
        gs: Option<PathBuf>,
        #[arg(long)]
        h: Option<PathBuf>,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        c: Option<u64>,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Cylinder allocation over a length interval
    Alloc {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        /// lo:hi
        #[arg(long)]
        interval: String,
        #[arg(long)]
        caps: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_entry: Option<u64>,
    },
    /// Effective-test component from a staged table and a complexity table
    UcTest {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        ktable: PathBuf,
        #[arg(long)]
        c: u64,
        #[arg(long)]
        budget: u64,
    },
    /// Covering procedure over an enumerated cylinder list
    Cover {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        cylinders: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        horizon: u64,
        #[arg(long)]
        budget: u64,
    },
    /// Rewrite a weight sequence into an order with the same sum
    OrderRewrite {
        #[command(flatten)]
        common: Common,
        /// Comma-separated values
        #[arg(long)]
        k: String,
        #[arg(long)]
        m: Option<u64>,
    },
    /// Interval partition comparing two weight bounds; optional domination
    Partition {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        horizon: u64,
        #[arg(long)]
        dominate_c: Option<u64>,
    },
    /// Zero insertion along an order with a scripted functional
    Insert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        n: u64,
        /// Source bits; generated from --seed when omitted
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Selection rule run over a bit string
    Select {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long)]
        b_file: Option<PathBuf>,
        #[arg(long)]
        phi: PathBuf,
    },
    /// Triviality constant of a prefix chain against a bound table
    TrivialConst {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        prefixes: Option<PathBuf>,
        /// Use the all-zeros chain of this length instead of a file
        #[arg(long)]
        zeros: Option<u64>,
    },
    /// Prefix-closed tree of strings trivial for an order
    TrivialTree {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        c: i64,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        depth: u64,
    },
    /// Order approximants from a doubly-indexed table
    OrderBelow {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        h0: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        stage_budget: u64,
    },
    /// Crossing point of a weight series past a candidate prefix
    GapPoint {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long)]
        budget: u64,
    },
    /// Hitting set of a table against stage-bounded complexity
    Hitting {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        c: i64,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        stage: u64,
        #[arg(long)]
        n: u64,
    },
    /// Least hitting-set member witnessing high complexity
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        c: i64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        machine: String,
        #[arg(long)]
        stage: u64,
        #[arg(long)]
        n: u64,
    },
}

fn build_plan(cli: Cli) -> Result<(RunPlan, bool), Failure> {
    fn base(name: &str, common: &Common) -> Result<RunPlan, Failure> {
        let format = Format::parse(&common.format).map_err(Failure::Usage)?;
        Ok(RunPlan::new(name, format, common.out.clone()))
    }

    let (plan, plan_only) = match cli.command {
        Command::Ktable { common, machine, maxlen, budget, deficiency, events_budget, events_out } => {
            let mut p = base("ktable", &common)?;
            p.param("machine", machine).param("maxlen", maxlen).param("budget", budget);
            if deficiency {
                p.param("deficiency", "1");
            }
            if let Some(eb) = events_budget {
                p.param("events-budget", eb);
                let path = events_out.ok_or_else(|| io::usage("--events-budget needs --events-out"))?;
                p.input("events-out", path);
            }
            (p, common.plan_only)
        }
        Command::Gs { common, machine, budget, m, triple } => {
            let mut p = base("gs", &common)?;
            p.param("machine", machine).param("budget", budget);
            match (m, triple) {
                (Some(m), None) => {
                    p.param("m", m);
                }
                (None, Some(t)) => {
                    p.param("triple", t);
                }
                _ => return Err(io::usage("give exactly one of --m or --triple")),
            }
            (p, common.plan_only)
        }
        Command::Omega { common, f, n, stage, tail_k, cap } => {
            let mut p = base("omega", &common)?;
            p.input("f", f).param("n", n);
            if let Some(stage) = stage {
                p.param("stage", stage);
            }
            match (tail_k, cap) {
                (Some(k), Some(cap)) => {
                    p.param("tail-k", k).param("cap", cap);
                }
                (None, None) => {}
                _ => return Err(io::usage("--tail-k and --cap go together")),
            }
            (p, common.plan_only)
        }
        Command::KcEncode { common, requests, gs, h, partition, events, c, d, horizon } => {
            let mut p = base("kc-encode", &common)?;
            if let Some(requests) = requests {
                p.input("requests", requests);
            } else {
                let missing = || io::usage("without --requests, give --gs --h --partition --events --c --d --horizon");
                p.input("gs", gs.ok_or_else(missing)?);
                p.input("h", h.ok_or_else(missing)?);
                p.input("partition", partition.ok_or_else(missing)?);
                p.input("events", events.ok_or_else(missing)?);
                p.param("c", c.ok_or_else(missing)?);
                p.param("d", d.ok_or_else(missing)?);
                p.param("horizon", horizon.ok_or_else(missing)?);
            }
            (p, common.plan_only)
        }
        Command::Alloc { common, sigma, interval, caps, seed, max_entry } => {
            io::parse_interval(&interval)?;
            let mut p = base("alloc", &common)?;
            p.param("sigma", sigma).param("interval", interval);
            match (caps, seed) {
                (Some(caps), None) => {
                    p.param("caps", caps);
                }
                (None, Some(seed)) => {
                    p.param("seed", seed);
                    if let Some(me) = max_entry {
                        p.param("max-entry", me);
                    }
                }
                _ => return Err(io::usage("give exactly one of --caps or --seed")),
            }
            (p, common.plan_only)
        }
        Command::UcTest { common, f, ktable, c, budget } => {
            let mut p = base("uc-test", &common)?;
            p.input("f", f).input("ktable", ktable).param("c", c).param("budget", budget);
            (p, common.plan_only)
        }
        Command::Cover { common, cylinders, g, k, horizon, budget } => {
            let mut p = base("cover", &common)?;
            p.input("cylinders", cylinders)
                .input("g", g)
                .param("k", k)
                .param("horizon", horizon)
                .param("budget", budget);
            (p, common.plan_only)
        }
        Command::OrderRewrite { common, k, m } => {
            let mut p = base("order-rewrite", &common)?;
            p.param("k", k);
            if let Some(m) = m {
                p.param("m", m);
            }
            (p, common.plan_only)
        }
        Command::Partition { common, g, h, p: pp, horizon, dominate_c } => {
            let mut p = base("partition", &common)?;
            p.input("g", g).input("h", h).param("p", pp).param("horizon", horizon);
            if let Some(c) = dominate_c {
                p.param("dominate-c", c);
            }
            (p, common.plan_only)
        }
        Command::Insert { common, h, n, a, phi, seed } => {
            let mut p = base("insert", &common)?;
            p.input("h", h).param("n", n);
            if let Some(a) = a {
                p.param("a", a);
            }
            if let Some(phi) = phi {
                p.input("phi", phi);
            }
            if let Some(seed) = seed {
                p.param("seed", seed);
            }
            if p.opt_missing_insert_inputs() {
                return Err(io::usage("give --a or --seed, and --phi or --seed"));
            }
            (p, common.plan_only)
        }
        Command::Select { common, b, b_file, phi } => {
            let mut p = base("select", &common)?;
            p.input("phi", phi);
            match (b, b_file) {
                (Some(bits), None) => {
                    p.param("b", bits);
                }
                (None, Some(path)) => {
                    p.input("b-file", path);
                }
                _ => return Err(io::usage("give exactly one of --b or --b-file")),
            }
            (p, common.plan_only)
        }
        Command::TrivialConst { common, g, machine, budget, prefixes, zeros } => {
            let mut p = base("trivial-const", &common)?;
            p.input("g", g).param("machine", machine).param("budget", budget);
            match (prefixes, zeros) {
                (Some(path), None) => {
                    p.input("prefixes", path);
                }
                (None, Some(n)) => {
                    p.param("zeros", n);
                }
                _ => return Err(io::usage("give exactly one of --prefixes or --zeros")),
            }
            (p, common.plan_only)
        }
        Command::TrivialTree { common, g, c, machine, budget, depth } => {
            let mut p = base("trivial-tree", &common)?;
            p.input("g", g)
                .param("c", c)
                .param("machine", machine)
                .param("budget", budget)
                .param("depth", depth);
            (p, common.plan_only)
        }
        Command::OrderBelow { common, h0, n, stage_budget } => {
            let mut p = base("order-below", &common)?;
            p.input("h0", h0).param("n", n).param("stage-budget", stage_budget);
            (p, common.plan_only)
        }
        Command::GapPoint { common, g, sigma, budget } => {
            let mut p = base("gap-point", &common)?;
            p.input("g", g).param("sigma", sigma).param("budget", budget);
            (p, common.plan_only)
        }
        Command::Hitting { common, f, c, machine, stage, n } => {
            let mut p = base("hitting", &common)?;
            p.input("f", f)
                .param("c", c)
                .param("machine", machine)
                .param("stage", stage)
                .param("n", n);
            (p, common.plan_only)
        }
        Command::Witness { common, f, c, k, machine, stage, n } => {
            let mut p = base("witness", &common)?;
            p.input("f", f)
                .param("c", c)
                .param("k", k)
                .param("machine", machine)
                .param("stage", stage)
                .param("n", n);
            (p, common.plan_only)
        }
    };
    Ok((plan, plan_only))
}

impl RunPlan {
    fn opt_missing_insert_inputs(&self) -> bool {
        let have_a = self.params.contains_key("a") || self.params.contains_key("seed");
        let have_phi = self.inputs.contains_key("phi") || self.params.contains_key("seed");
        !(have_a && have_phi)
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message (offending flag, command list)
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (plan, plan_only) = match build_plan(cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{}", e.message());
            std::process::exit(e.exit_code());
        }
    };
    if plan_only {
        println!("{}", serde_json::to_string_pretty(&plan.to_json()).expect("serializable"));
        return;
    }
    match cmds::execute_plan(&plan).and_then(|artifact| emit(plan.out.as_deref(), &artifact)) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
