//! One execution function per subcommand, all driven by a [`RunPlan`].

use crate::io::*;
use crate::plan::{Format, RunPlan};
use serde_json::json;
use solovay_lab::allocation::allocate;
use solovay_lab::bits::BitString;
use solovay_lab::dyadic::DyadicRational;
use solovay_lab::ext::{ExtInt, ExtNat};
use solovay_lab::instances::{functional_for, random_bits, random_capacities, rng_from_seed};
use solovay_lab::kc::{encode_all, parse_requests, Request};
use solovay_lab::machine::{
    enumerate_halting, k_approx, parse_events, write_events, CodecMachine, DovetailMachine,
    Machine, PlainCodec,
};
use solovay_lab::mltest::{cover_with_lengths, restrict_to_log_bound, CoverStatus, CylinderSet};
use solovay_lab::solovay::{
    build_partition, build_test_component, decode_triple, dominate, encode_triple,
    rewrite_to_order, solovay_bound, tail_cutoff, write_intervals, Partition, PartitionInterval,
    StuckAt,
};
use solovay_lab::staged::{parse_staged, partial_weight, OrderFn};
use solovay_lab::stochastic::{insert_zeroes, run_selection, selected_bias, ScriptedFunctional};
use solovay_lab::triviality::{
    build_tree, gap_point, hitting_set_at, trivial_constant, witness_high_complexity,
};

impl RunPlan {
    fn str_param(&self, name: &str) -> Result<&str, Failure> {
        self.params
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| usage(format!("missing --{name}")))
    }

    fn opt_param(&self, name: &str) -> Option<&str> {
        self.params.get(name).map(String::as_str)
    }

    fn u64_param(&self, name: &str) -> Result<u64, Failure> {
        self.str_param(name)?
            .parse()
            .map_err(|e| usage(format!("bad --{name}: {e}")))
    }

    fn i64_param(&self, name: &str) -> Result<i64, Failure> {
        self.str_param(name)?
            .parse()
            .map_err(|e| usage(format!("bad --{name}: {e}")))
    }

    fn bits_param(&self, name: &str) -> Result<BitString, Failure> {
        BitString::parse(self.str_param(name)?).map_err(|e| usage(format!("bad --{name}: {e}")))
    }

    fn machine_param(&self) -> Result<Box<dyn Machine>, Failure> {
        match self.str_param("machine")? {
            "codec" => Ok(Box::new(CodecMachine)),
            "plain" => Ok(Box::new(PlainCodec)),
            "dovetail" => Ok(Box::new(DovetailMachine)),
            other => Err(usage(format!("unknown machine {other:?} (codec, plain, dovetail)"))),
        }
    }

    fn input_text(&self, name: &str) -> Result<String, Failure> {
        let path = self
            .inputs
            .get(name)
            .ok_or_else(|| usage(format!("missing --{name}")))?;
        read_file(path)
    }
}

fn strings_of_length_upto(max: usize) -> impl Iterator<Item = BitString> {
    (0..((1u64 << (max + 1)) - 1)).map(BitString::from_index)
}

pub fn run_ktable(plan: &RunPlan) -> Result<String, Failure> {
    let machine = plan.machine_param()?;
    let maxlen = plan.u64_param("maxlen")? as usize;
    let budget = plan.u64_param("budget")?;
    if maxlen > 12 {
        return Err(usage("maxlen above 12 is not a desk-scale table"));
    }
    if matches!(plan.str_param("machine")?, "dovetail") && budget > 24 {
        return Err(usage("dovetail budgets above 24 enumerate too many programs"));
    }
    let with_deficiency = plan.opt_param("deficiency").is_some();

    if let Some(events_budget) = plan.opt_param("events-budget") {
        let eb: u64 = events_budget.parse().map_err(|e| usage(format!("bad --events-budget: {e}")))?;
        if eb > 20 {
            return Err(usage("events budget above 20 enumerates too many programs"));
        }
        let events = enumerate_halting(machine.as_ref(), eb);
        let path = plan
            .inputs
            .get("events-out")
            .ok_or_else(|| usage("--events-budget needs --events-out"))?;
        std::fs::write(path, write_events(&events))
            .map_err(|e| Failure::Io(format!("IoError: {}: {e}", path.display())))?;
    }

    let mut rows = Vec::new();
    for x in strings_of_length_upto(maxlen) {
        let k = k_approx(machine.as_ref(), &x, budget);
        let mut row = vec![x.to_string(), ext_nat_string(k)];
        if with_deficiency {
            let d = match k {
                ExtNat::Fin(v) => ExtInt::Fin(x.len() as i64 - v as i64),
                ExtNat::Inf => ExtInt::NegInf,
            };
            row.push(d.to_string());
        }
        rows.push(row);
    }
    Ok(match plan.format {
        Format::Csv => csv(if with_deficiency { "x,k,deficiency" } else { "x,k" }, &rows),
        Format::Json => json_pretty(&json!({
            "machine": plan.str_param("machine")?,
            "budget": budget,
            "table": rows.iter().map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert("x".into(), json!(r[0]));
                obj.insert("k".into(), json!(r[1]));
                if with_deficiency {
                    obj.insert("deficiency".into(), json!(r[2]));
                }
                serde_json::Value::Object(obj)
            }).collect::<Vec<_>>(),
        })),
    })
}

pub fn run_gs(plan: &RunPlan) -> Result<String, Failure> {
    let machine = plan.machine_param()?;
    let budget = plan.u64_param("budget")?;
    let m = if let Some(triple) = plan.opt_param("triple") {
        let parts: Vec<&str> = triple.split(',').collect();
        if parts.len() != 3 {
            return Err(usage("--triple wants x,p,t"));
        }
        let x = BitString::parse(parts[0]).map_err(usage)?;
        let p = BitString::parse(parts[1]).map_err(usage)?;
        let t: u64 = parts[2].parse().map_err(|e| usage(format!("bad t: {e}")))?;
        encode_triple(&x, &p, t)
    } else {
        plan.bits_param("m")?
    };
    let g = solovay_bound(machine.as_ref(), &m, budget)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let decoded = decode_triple(&m).ok();
    let (in_range, x, p, t) = match &decoded {
        Some((x, p, t)) => (true, x.to_string(), p.to_string(), t.to_string()),
        None => (false, "-".into(), "-".into(), "-".into()),
    };
    Ok(match plan.format {
        Format::Csv => csv(
            "m,in_range,x,p,t,g",
            &[vec![m.to_string(), in_range.to_string(), x, p, t, g.to_string()]],
        ),
        Format::Json => json_pretty(&json!({
            "g": g,
            "in_range": in_range,
            "m": m.to_string(),
            "p": p,
            "t": t,
            "x": x,
        })),
    })
}

pub fn run_omega(plan: &RunPlan) -> Result<String, Failure> {
    let table = if let Some(stage) = plan.opt_param("stage") {
        let stage: usize = stage.parse().map_err(|e| usage(format!("bad --stage: {e}")))?;
        let staged = parse_staged(&plan.input_text("f")?)
            .map_err(|e| Failure::Io(format!("ParseError: {e}")))?;
        if stage >= staged.stage_len() {
            return Err(usage(format!("stage {stage} beyond table")));
        }
        (0..staged.domain_len()).map(|n| staged.value(n, stage)).collect()
    } else {
        parse_table(&plan.input_text("f")?)?
    };
    let n = plan.u64_param("n")? as usize;
    if n > table.len() {
        return Err(usage(format!("horizon {n} beyond table of {} entries", table.len())));
    }
    let weight = partial_weight(&table, n);

    let tail = match plan.opt_param("tail-k") {
        Some(k) => {
            let k: u64 = k.parse().map_err(|e| usage(format!("bad --tail-k: {e}")))?;
            let cap = parse_dyadic(plan.str_param("cap")?)?;
            if partial_weight(&table, n) > cap {
                return Err(Failure::Domain(
                    "PreconditionFailed: partial weight already exceeds the cap".into(),
                ));
            }
            let s = tail_cutoff(&table, n, k, &cap).map_err(|e| Failure::Domain(e.to_string()))?;
            Some(s)
        }
        None => None,
    };

    Ok(match plan.format {
        Format::Csv => {
            let mut rows = vec![vec![
                weight.numerator().to_string(),
                weight.denominator().to_string(),
            ]];
            if let Some(s) = tail {
                rows[0].push(s.to_string());
                csv("num,den,cutoff", &rows)
            } else {
                csv("num,den", &rows)
            }
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("partial".into(), dyadic_json(&weight));
            if let Some(s) = tail {
                obj.insert("cutoff".into(), json!(s));
            }
            json_pretty(&serde_json::Value::Object(obj))
        }
    })
}

fn parse_partition_file(text: &str) -> Result<Partition, Failure> {
    let mut intervals = Vec::new();
    let mut stuck = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line == "kind,n,lo,hi" {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |e: String| Failure::Io(format!("ParseError: line {}: {e}", lineno + 1));
        match fields.first().copied() {
            Some("interval") if fields.len() == 4 => {
                let lo: u64 = fields[2].parse().map_err(|e| bad(format!("{e}")))?;
                let hi: u64 = fields[3].parse().map_err(|e| bad(format!("{e}")))?;
                intervals.push(PartitionInterval { lo, hi });
            }
            Some("stuck") if fields.len() == 4 => {
                let n: usize = fields[1].parse().map_err(|e| bad(format!("{e}")))?;
                let s: u64 = fields[2].parse().map_err(|e| bad(format!("{e}")))?;
                stuck = Some(StuckAt { n, s });
            }
            Some("htilde") => {}
            _ => return Err(bad("expected `interval,n,lo,hi` or `stuck,n,s,-`".into())),
        }
    }
    Ok(Partition { intervals, stuck })
}

pub fn run_kc_encode(plan: &RunPlan) -> Result<String, Failure> {
    let requests: Vec<Request> = if plan.inputs.contains_key("requests") {
        parse_requests(&plan.input_text("requests")?)
            .map_err(|e| Failure::Io(format!("ParseError: {e}")))?
    } else {
        // request construction from a partition, a bound table and events
        let g_s = parse_table(&plan.input_text("gs")?)?;
        let h = parse_table(&plan.input_text("h")?)?;
        let partition = parse_partition_file(&plan.input_text("partition")?)?;
        let events = parse_events(&plan.input_text("events")?)
            .map_err(|e| Failure::Io(format!("ParseError: {e}")))?;
        let c = plan.u64_param("c")?;
        let d = plan.u64_param("d")?;
        let horizon = plan.u64_param("horizon")? as usize;
        if partition.intervals.len().min(horizon) > 16 {
            return Err(usage("horizon enumerates too many request sources"));
        }
        solovay_lab::triviality::build_requests(&g_s, &h, c, d, &partition, &events, horizon)
    };
    let assignment = encode_all(&requests).map_err(|e| Failure::Domain(e.to_string()))?;
    Ok(match plan.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = assignment
                .codes
                .iter()
                .map(|a| vec![a.label.clone(), a.length.to_string(), a.codeword.to_string()])
                .collect();
            csv("label,length,codeword", &rows)
        }
        Format::Json => json_pretty(&json!({
            "codes": assignment.codes.iter().map(|a| json!({
                "codeword": a.codeword.to_string(),
                "label": a.label,
                "length": a.length,
            })).collect::<Vec<_>>(),
        })),
    })
}

pub fn run_alloc(plan: &RunPlan) -> Result<String, Failure> {
    let sigma = plan.bits_param("sigma")?;
    let (lo, hi) = parse_interval(plan.str_param("interval")?)?;
    let caps: Vec<u64> = if let Some(caps) = plan.opt_param("caps") {
        parse_u64_list(caps)?
    } else {
        let seed = plan.u64_param("seed")?;
        let max_entry = plan.opt_param("max-entry").map_or(Ok(8), |s| {
            s.parse().map_err(|e| usage(format!("bad --max-entry: {e}")))
        })?;
        if lo < sigma.len() as u64 {
            return Err(usage("interval starts below |sigma|"));
        }
        random_capacities(&mut rng_from_seed(seed), &sigma, lo, hi, max_entry)
    };
    if caps.len() as u64 != hi - lo + 1 {
        return Err(usage(format!("expected {} capacities", hi - lo + 1)));
    }
    let result = allocate(&sigma, lo, hi, &caps).map_err(|e| Failure::Domain(e.to_string()))?;
    Ok(match plan.format {
        Format::Csv => {
            let mut rows: Vec<Vec<String>> =
                result.j.iter().map(|j| vec!["J".into(), j.to_string()]).collect();
            rows.extend(result.s.iter().map(|tau| vec!["S".into(), tau.to_string()]));
            csv("kind,value", &rows)
        }
        Format::Json => json_pretty(&json!({
            "J": result.j.iter().collect::<Vec<_>>(),
            "S": result.s.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        })),
    })
}

pub fn run_uc_test(plan: &RunPlan) -> Result<String, Failure> {
    let f = parse_staged(&plan.input_text("f")?)
        .map_err(|e| Failure::Io(format!("ParseError: {e}")))?
        .refine_unit_steps();
    let k_table = parse_staged(&plan.input_text("ktable")?)
        .map_err(|e| Failure::Io(format!("ParseError: {e}")))?;
    if k_table.domain_len() < f.domain_len() {
        return Err(usage("ktable must cover the domain of f"));
    }
    let c = plan.u64_param("c")? as u32;
    let budget = plan.u64_param("budget")? as usize;
    let component = build_test_component(&f, &k_table, c, budget);
    Ok(match plan.format {
        Format::Csv => {
            let mut out = String::from("c,stage,left_num,left_exp,right_num,right_exp\n");
            out.push_str(
                &write_intervals(&component)
                    .lines()
                    .map(|l| l.replace(' ', ","))
                    .collect::<Vec<_>>()
                    .join("\n"),
            );
            if !component.intervals.is_empty() {
                out.push('\n');
            }
            out
        }
        Format::Json => json_pretty(&json!({
            "c": component.c,
            "intervals": component.intervals.iter().map(|si| json!({
                "hi": dyadic_json(&si.interval.hi),
                "lo": dyadic_json(&si.interval.lo),
                "stage": si.stage,
            })).collect::<Vec<_>>(),
            "total_length": dyadic_json(&component.total_length),
        })),
    })
}

pub fn run_cover(plan: &RunPlan) -> Result<String, Failure> {
    let cylinders = CylinderSet::parse(&plan.input_text("cylinders")?)
        .map_err(|e| Failure::Io(format!("ParseError: {e}")))?;
    let g_raw = parse_table(&plan.input_text("g")?)?;
    let g = restrict_to_log_bound(&g_raw);
    let k = plan.u64_param("k")? as u32;
    let horizon = plan.u64_param("horizon")?;
    let budget = plan.u64_param("budget")? as usize;
    if g.len() as u64 <= horizon {
        return Err(usage("g must be defined past the horizon"));
    }
    let cap = DyadicRational::pow2(-(2 * k as i64) - 1);
    if cylinders.total_measure() > cap {
        return Err(Failure::Domain(
            "PreconditionFailed: cylinder measure exceeds 2^(-2k-1)".into(),
        ));
    }
    let run = cover_with_lengths(&cylinders, &g, k, horizon, budget)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let status = match &run.status {
        CoverStatus::Completed => "Completed".to_string(),
        CoverStatus::StuckAtStep4 { sigma, s } => format!("StuckAtStep4 sigma={sigma} s={s}"),
        CoverStatus::BudgetExhausted => "BudgetExhausted".to_string(),
    };
    Ok(match plan.format {
        Format::Csv => {
            let mut rows = Vec::new();
            if run.rounds.is_empty() {
                rows.push(vec![status.clone(), "-".into(), "-".into(), "-".into(), "-".into()]);
            }
            for round in &run.rounds {
                for tau in &round.allocation.s {
                    rows.push(vec![
                        status.clone(),
                        round.sigma.to_string(),
                        round.s.to_string(),
                        round.t.to_string(),
                        tau.to_string(),
                    ]);
                }
            }
            csv("status,sigma,s,t,tau", &rows)
        }
        Format::Json => json_pretty(&json!({
            "rounds": run.rounds.iter().map(|r| json!({
                "J": r.allocation.j.iter().collect::<Vec<_>>(),
                "S": r.allocation.s.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "fresh_n": r.fresh_n,
                "s": r.s,
                "sigma": r.sigma.to_string(),
                "t": r.t,
                "v_interval": json!({
                    "hi": dyadic_json(&r.v_interval.hi),
                    "lo": dyadic_json(&r.v_interval.lo),
                }),
            })).collect::<Vec<_>>(),
            "status": status,
            "v_total_length": dyadic_json(&run.v_total_length()),
        })),
    })
}

pub fn run_order_rewrite(plan: &RunPlan) -> Result<String, Failure> {
    let k = parse_u64_list(plan.str_param("k")?)?;
    let m = match plan.opt_param("m") {
        Some(m) => m.parse().map_err(|e| usage(format!("bad --m: {e}")))?,
        None => k.len(),
    };
    if m > k.len() {
        return Err(usage("m beyond the sequence"));
    }
    let blocks = rewrite_to_order(&k, m);
    Ok(match plan.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = blocks
                .iter()
                .enumerate()
                .map(|(n, b)| vec![n.to_string(), b.value.to_string(), b.copies.to_string()])
                .collect();
            csv("n,value,copies", &rows)
        }
        Format::Json => json_pretty(&json!({
            "blocks": blocks.iter().map(|b| json!({
                "copies": b.copies,
                "value": b.value,
            })).collect::<Vec<_>>(),
        })),
    })
}

pub fn run_partition(plan: &RunPlan) -> Result<String, Failure> {
    let g = parse_table(&plan.input_text("g")?)?;
    let h = parse_staged(&plan.input_text("h")?)
        .map_err(|e| Failure::Io(format!("ParseError: {e}")))?;
    let p = plan.u64_param("p")?;
    let horizon = plan.u64_param("horizon")?;
    if h.domain_len() as u64 <= horizon {
        return Err(usage("h must be defined past the horizon"));
    }
    let partition = build_partition(&g, &h, p, horizon);
    let domination = match plan.opt_param("dominate-c") {
        Some(c) => {
            let c: u64 = c.parse().map_err(|e| usage(format!("bad --dominate-c: {e}")))?;
            Some(
                dominate(&g, &h, &partition, c)
                    .map_err(|e| Failure::Domain(e.to_string()))?,
            )
        }
        None => None,
    };
    Ok(match plan.format {
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = partition
                .intervals
                .iter()
                .enumerate()
                .map(|(n, iv)| {
                    vec!["interval".into(), n.to_string(), iv.lo.to_string(), iv.hi.to_string()]
                })
                .collect();
            if let Some(stuck) = &partition.stuck {
                rows.push(vec![
                    "stuck".into(),
                    stuck.n.to_string(),
                    stuck.s.to_string(),
                    "-".into(),
                ]);
            }
            if let Some(dom) = &domination {
                for (i, v) in dom.values.iter().enumerate() {
                    rows.push(vec!["htilde".into(), i.to_string(), v.to_string(), "-".into()]);
                }
            }
            csv("kind,n,lo,hi", &rows)
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert(
                "intervals".into(),
                json!(partition
                    .intervals
                    .iter()
                    .enumerate()
                    .map(|(n, iv)| json!({"hi": iv.hi, "lo": iv.lo, "n": n}))
                    .collect::<Vec<_>>()),
            );
            obj.insert(
                "stuck".into(),
                match &partition.stuck {
                    Some(stuck) => json!({"n": stuck.n, "s": stuck.s}),
                    None => serde_json::Value::Null,
                },
            );
            if let Some(dom) = &domination {
                obj.insert(
                    "htilde".into(),
                    json!(dom.values.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
                );
                obj.insert("stages".into(), json!(dom.stages));
            }
            json_pretty(&serde_json::Value::Object(obj))
        }
    })
}

pub fn run_insert(plan: &RunPlan) -> Result<String, Failure> {
    let h = OrderFn::new(parse_order_values(&plan.input_text("h")?)?)
        .map_err(|e| Failure::Io(format!("ParseError: {e}")))?;
    let n = plan.u64_param("n")? as usize;
    let a = match plan.opt_param("a") {
        Some(bits) => BitString::parse(bits).map_err(usage)?,
        None => {
            let seed = plan.u64_param("seed")?;
            random_bits(&mut rng_from_seed(seed), n)
        }
    };
    let phi = match plan.inputs.get("phi") {
        Some(_) => ScriptedFunctional::parse(&plan.input_text("phi")?)
            .map_err(|e| Failure::Io(format!("ParseError: {e}")))?,
        None => {
            let seed = plan.u64_param("seed")?;
            functional_for(&mut rng_from_seed(seed ^ 0x9e37_79b9), &h, n)
        }
    };
    let record = insert_zeroes(&a, &h, &phi, n).map_err(|e| Failure::Domain(e.to_string()))?;
    Ok(match plan.format {
        Format::Csv => {
            let mut rows = vec![vec!["b".to_string(), record.b.to_string()]];
            rows.extend(
                record.inserted_positions.iter().map(|p| vec!["pos".to_string(), p.to_string()]),
            );
            csv("field,value", &rows)
        }
        Format::Json => json_pretty(&json!({
            "b": record.b.to_string(),
            "positions": record.inserted_positions,
        })),
    })
}

pub fn run_select(plan: &RunPlan) -> Result<String, Failure> {
    let b = match plan.opt_param("b") {
        Some(bits) => BitString::parse(bits).map_err(usage)?,
        None => BitString::parse(plan.input_text("b-file")?.trim())
            .map_err(|e| Failure::Io(format!("ParseError: {e}")))?,
    };
    let phi = ScriptedFunctional::parse(&plan.input_text("phi")?)
        .map_err(|e| Failure::Io(format!("ParseError: {e}")))?;
    let run = run_selection(&b, &phi);
    let bias = selected_bias(&run.selected_bits).ok();
    Ok(match plan.format {
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = run
                .selected_positions
                .iter()
                .zip(run.selected_bits.iter())
                .map(|(p, bit)| vec![p.to_string(), u8::from(bit).to_string()])
                .collect();
            if let Some(bias) = &bias {
                rows.push(vec!["bias".into(), bias.to_string()]);
            }
            csv("position,bit", &rows)
        }
        Format::Json => json_pretty(&json!({
            "bias": bias.map(|f| json!({"ones": f.ones, "total": f.total})),
            "max_oracle_used": run.max_oracle_used,
            "positions": run.selected_positions,
            "selected_bits": run.selected_bits.to_string(),
        })),
    })
}

pub fn run_trivial_const(plan: &RunPlan) -> Result<String, Failure> {
    let g = parse_table(&plan.input_text("g")?)?;
    let machine = plan.machine_param()?;
    let budget = plan.u64_param("budget")?;
    let prefixes: Vec<BitString> = match plan.opt_param("zeros") {
        Some(n) => {
            let n: usize = n.parse().map_err(|e| usage(format!("bad --zeros: {e}")))?;
            (0..=n).map(|l| BitString::from_bits(vec![false; l])).collect()
        }
        None => {
            let text = plan.input_text("prefixes")?;
            let mut out = Vec::new();
            for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
                out.push(BitString::parse(line).map_err(|e| Failure::Io(format!("ParseError: {e}")))?);
            }
            out
        }
    };
    if g.len() < prefixes.len() {
        return Err(usage("g must cover every prefix length"));
    }
    let c = trivial_constant(&prefixes, &g, machine.as_ref(), budget);
    Ok(match plan.format {
        Format::Csv => csv("constant", &[vec![c.to_string()]]),
        Format::Json => json_pretty(&json!({ "constant": c.to_string() })),
    })
}

pub fn run_trivial_tree(plan: &RunPlan) -> Result<String, Failure> {
    let g = OrderFn::new(parse_order_values(&plan.input_text("g")?)?)
        .map_err(|e| Failure::Io(format!("ParseError: {e}")))?;
    let c = plan.i64_param("c")?;
    let machine = plan.machine_param()?;
    let budget = plan.u64_param("budget")?;
    let depth = plan.u64_param("depth")? as usize;
    if depth > 12 {
        return Err(usage("depth above 12 enumerates too many strings"));
    }
    if g.domain_bound() < depth {
        return Err(usage("order must cover the depth"));
    }
    let tree = build_tree(&g, c, machine.as_ref(), budget, depth);
    Ok(match plan.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = tree
                .write()
                .lines()
                .map(|l| l.split(' ').map(String::from).collect())
                .collect();
            csv("depth,string,in_s", &rows)
        }
        Format::Json => json_pretty(&json!({
            "levels": tree.levels,
            "nodes": tree.nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            "s": tree.s.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
        })),
    })
}

pub fn run_order_below(plan: &RunPlan) -> Result<String, Failure> {
    let text = plan.input_text("h0")?;
    let mut h0: Vec<Vec<u64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<u64>, _> = line.split_whitespace().map(str::parse).collect();
        h0.push(row.map_err(|e| Failure::Io(format!("ParseError: line {}: {e}", lineno + 1)))?);
    }
    if h0.iter().any(|r| r.len() != h0[0].len()) {
        return Err(Failure::Io("ParseError: h0 must be rectangular".into()));
    }
    let n = plan.u64_param("n")? as usize;
    let stage_budget = plan.u64_param("stage-budget")? as usize;
    let approximants = solovay_lab::triviality::order_below(&h0, n, stage_budget);
    Ok(match plan.format {
        Format::Csv => {
            let mut rows = Vec::new();
            for (i, g) in approximants.iter().enumerate() {
                for (n, v) in g.values().iter().enumerate() {
                    rows.push(vec![i.to_string(), n.to_string(), v.to_string()]);
                }
            }
            csv("approximant,n,value", &rows)
        }
        Format::Json => json_pretty(&json!({
            "approximants": approximants.iter().map(|g| g.values().to_vec()).collect::<Vec<_>>(),
        })),
    })
}

pub fn run_gap_point(plan: &RunPlan) -> Result<String, Failure> {
    let g = parse_staged(&plan.input_text("g")?)
        .map_err(|e| Failure::Io(format!("ParseError: {e}")))?;
    let sigma = plan.bits_param("sigma")?;
    if sigma.is_empty() {
        return Err(usage("sigma must be nonempty"));
    }
    let budget = plan.u64_param("budget")? as usize;
    let crossing = gap_point(&g, &sigma, budget);
    Ok(match plan.format {
        Format::Csv => {
            let row = match &crossing {
                Some(c) => vec![
                    "true".to_string(),
                    c.cut.to_string(),
                    c.stage.to_string(),
                    c.partial.numerator().to_string(),
                    c.partial.exponent().to_string(),
                ],
                None => vec!["false".into(), "-".into(), "-".into(), "-".into(), "-".into()],
            };
            csv("crossed,cut,stage,partial_num,partial_exp", &[row])
        }
        Format::Json => match &crossing {
            Some(c) => json_pretty(&json!({
                "crossed": true,
                "cut": c.cut,
                "partial": dyadic_json(&c.partial),
                "stage": c.stage,
            })),
            None => json_pretty(&json!({ "crossed": false })),
        },
    })
}

pub fn run_hitting(plan: &RunPlan) -> Result<String, Failure> {
    let f = parse_table(&plan.input_text("f")?)?;
    let c = plan.i64_param("c")?;
    let machine = plan.machine_param()?;
    let stage = plan.u64_param("stage")?;
    let bound = plan.u64_param("n")?;
    if f.len() as u64 <= bound {
        return Err(usage("f must cover 0..=n"));
    }
    if matches!(plan.str_param("machine")?, "dovetail") && stage > 24 {
        return Err(usage("dovetail stages above 24 enumerate too many programs"));
    }
    let hs = hitting_set_at(&f, c, machine.as_ref(), stage, bound);
    Ok(match plan.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = hs.members.iter().map(|n| vec![n.to_string()]).collect();
            csv("n", &rows)
        }
        Format::Json => json_pretty(&json!({
            "c": hs.c,
            "members": hs.members.iter().collect::<Vec<_>>(),
            "stage": hs.stage,
        })),
    })
}

pub fn run_witness(plan: &RunPlan) -> Result<String, Failure> {
    let f = parse_table(&plan.input_text("f")?)?;
    let c = plan.i64_param("c")?;
    let k = plan.u64_param("k")?;
    let machine = plan.machine_param()?;
    let stage = plan.u64_param("stage")?;
    let bound = plan.u64_param("n")?;
    if f.len() as u64 <= bound {
        return Err(usage("f must cover 0..=n"));
    }
    let witness = witness_high_complexity(&f, c, k, machine.as_ref(), stage, bound)
        .ok_or_else(|| Failure::Domain("NoWitness".into()))?;
    Ok(match plan.format {
        Format::Csv => csv("witness", &[vec![witness.to_string()]]),
        Format::Json => json_pretty(&json!({ "witness": witness })),
    })
}

pub fn execute_plan(plan: &RunPlan) -> Result<String, Failure> {
    match plan.command.as_str() {
        "ktable" => run_ktable(plan),
        "gs" => run_gs(plan),
        "omega" => run_omega(plan),
        "kc-encode" => run_kc_encode(plan),
        "alloc" => run_alloc(plan),
        "uc-test" => run_uc_test(plan),
        "cover" => run_cover(plan),
        "order-rewrite" => run_order_rewrite(plan),
        "partition" => run_partition(plan),
        "insert" => run_insert(plan),
        "select" => run_select(plan),
        "trivial-const" => run_trivial_const(plan),
        "trivial-tree" => run_trivial_tree(plan),
        "order-below" => run_order_below(plan),
        "gap-point" => run_gap_point(plan),
        "hitting" => run_hitting(plan),
        "witness" => run_witness(plan),
        other => Err(usage(format!("unknown command {other:?}"))),
    }
}
