//! Artifact output and small input parsers shared by the subcommands.

use solovay_lab::dyadic::DyadicRational;
use solovay_lab::ext::ExtNat;
use std::path::Path;

/// Execution failure, carrying the exit code policy: usage and file
/// problems exit 1, domain errors exit 2. The message leads with the
/// structured error name.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Domain(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::Domain(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Domain(m) => m,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(format!("UsageError: {}", msg.into()))
}

pub fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("IoError: {}: {e}", path.display())))
}

/// One value per line, `inf` allowed.
pub fn parse_table(text: &str) -> Result<Vec<ExtNat>, Failure> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v = line
            .parse::<ExtNat>()
            .map_err(|e| Failure::Io(format!("ParseError: line {}: {e}", lineno + 1)))?;
        out.push(v);
    }
    Ok(out)
}

/// One value per line, finite and nondecreasing.
pub fn parse_order_values(text: &str) -> Result<Vec<u64>, Failure> {
    let table = parse_table(text)?;
    table
        .iter()
        .map(|v| v.finite().ok_or_else(|| Failure::Io("ParseError: order values must be finite".into())))
        .collect()
}

/// Parses `num/2^exp` or a plain integer.
pub fn parse_dyadic(s: &str) -> Result<DyadicRational, Failure> {
    let err = |m: String| Failure::Usage(format!("UsageError: bad dyadic {s:?}: {m}"));
    if let Some((num, rest)) = s.split_once("/2^") {
        let num: i64 = num.parse().map_err(|e| err(format!("{e}")))?;
        let exp: u64 = rest.parse().map_err(|e| err(format!("{e}")))?;
        Ok(DyadicRational::new(num.into(), exp))
    } else {
        let num: i64 = s.parse().map_err(|e| err(format!("{e}")))?;
        Ok(DyadicRational::from_int(num))
    }
}

/// Comma-separated unsigned integers.
pub fn parse_u64_list(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|e| usage(format!("bad integer {part:?}: {e}")))
        })
        .collect()
}

/// `lo:hi` with `lo <= hi`.
pub fn parse_interval(s: &str) -> Result<(u64, u64), Failure> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| usage(format!("interval {s:?} must be lo:hi")))?;
    let lo: u64 = lo.parse().map_err(|e| usage(format!("bad interval bound: {e}")))?;
    let hi: u64 = hi.parse().map_err(|e| usage(format!("bad interval bound: {e}")))?;
    if lo > hi {
        return Err(usage(format!("empty interval {lo}:{hi}")));
    }
    Ok((lo, hi))
}

/// Writes the artifact to the output path, or stdout when none was given.
pub fn emit(out: Option<&Path>, artifact: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, artifact)
            .map_err(|e| Failure::Io(format!("IoError: {}: {e}", path.display()))),
        None => {
            print!("{artifact}");
            Ok(())
        }
    }
}

/// Renders rows as CSV under a header. Values never contain commas.
pub fn csv(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn json_pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

pub fn dyadic_json(d: &DyadicRational) -> serde_json::Value {
    serde_json::json!({
        "num": d.numerator().to_string(),
        "exp": d.exponent(),
    })
}

pub fn ext_nat_string(v: ExtNat) -> String {
    v.to_string()
}
