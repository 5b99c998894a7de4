use std::path::Path;

use serde_json::{json, Value as Json};

use graded_coalg::ctmc::{lumpability_quotient, model_to_json, LabelledModel};
use graded_coalg::findist::{Dist, Weight};
use graded_coalg::gcoalg::{
    behavioural_equivalent, show_label_word, trace_equivalent, LabelWord, TraceConfig, WordGradedKernel,
};
use graded_coalg::glogic::{
    logical_quotient, parse_formula_with, uniform_depth, Evaluator, FormulaBudget, Instance, Value,
};
use graded_coalg::numeric::{format_f64, format_rational, Rational};
use graded_coalg::timealg::{SamplingWord, TimeValue};
use graded_coalg::Error;

use crate::models::{load, load_chain, state, Loaded, Source};
use crate::output::{csv, json, table};
use crate::{Arith, EquivMode, Failure, Format, Global, LogicArg, Via};

fn emit(g: &Global, header: &[String], rows: &[Vec<String>], text: impl FnOnce() -> String, data: impl FnOnce() -> Json) {
    let out = match g.format {
        Format::Table => {
            let t = text();
            if t.is_empty() {
                table(header, rows)
            } else {
                t
            }
        }
        Format::Csv => csv(header, rows),
        Format::Json => json(&data()),
    };
    print!("{out}");
}

fn parse_time(s: &str) -> Result<TimeValue, Failure> {
    Ok(s.trim().parse::<TimeValue>()?)
}

struct KernelBlock {
    time: String,
    /// `rows[from][to]`
    rows: Vec<Vec<String>>,
}

pub fn kernel(g: &Global, times: &[String]) -> Result<(), Failure> {
    let (states, blocks) = match load(g, &Source::primary(g))? {
        Loaded::Chain(m) => {
            let n = m.n_states();
            let mut blocks = Vec::new();
            for s in times {
                let t = parse_time(s)?;
                let rows = if t.is_zero() {
                    (0..n).map(|j| (0..n).map(|k| if j == k { "1" } else { "0" }.to_string()).collect()).collect()
                } else if g.arith == Arith::Rational {
                    return Err(Error::InexactTime(format!("t = {t}")).into());
                } else {
                    let k = m.kernel_at(&t);
                    (0..n).map(|j| (0..n).map(|i| format_f64(k.entry(i, j))).collect()).collect()
                };
                blocks.push(KernelBlock { time: t.to_string(), rows });
            }
            (m.states().to_vec(), blocks)
        }
        Loaded::Walk(w) => {
            let carrier: Vec<i64> = w.carrier().copied().collect();
            let mut blocks = Vec::new();
            for s in times {
                let n: usize = s
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("randomwalk times are step counts, got `{s}`")))?;
                let mut rows = Vec::new();
                for x in &carrier {
                    let d = w.iterate(n, x)?;
                    rows.push(carrier.iter().map(|y| format_rational(&d.get(y))).collect());
                }
                blocks.push(KernelBlock { time: n.to_string(), rows });
            }
            (carrier.iter().map(|x| x.to_string()).collect(), blocks)
        }
    };
    let header: Vec<String> = ["time", "from", "to", "weight"].iter().map(|s| s.to_string()).collect();
    let mut flat = Vec::new();
    for b in &blocks {
        for (j, row) in b.rows.iter().enumerate() {
            for (k, p) in row.iter().enumerate() {
                flat.push(vec![b.time.clone(), states[j].clone(), states[k].clone(), p.clone()]);
            }
        }
    }
    let text = || {
        let mut out = String::new();
        let mut head = vec!["from\\to".to_string()];
        head.extend(states.iter().cloned());
        for (i, b) in blocks.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("t = {}\n", b.time));
            let rows: Vec<Vec<String>> = b
                .rows
                .iter()
                .enumerate()
                .map(|(j, r)| std::iter::once(states[j].clone()).chain(r.iter().cloned()).collect())
                .collect();
            out.push_str(&table(&head, &rows));
        }
        out
    };
    let data = || {
        json!({
            "states": states,
            "kernels": blocks.iter().map(|b| json!({"time": b.time, "matrix": b.rows})).collect::<Vec<_>>(),
        })
    };
    emit(g, &header, &flat, text, data);
    Ok(())
}

fn print_trace<W: Weight>(g: &Global, m: &LabelledModel, x: usize, w: &SamplingWord, d: &Dist<LabelWord, W>) {
    let labels = m.labels();
    let rows: Vec<Vec<String>> = d.iter().map(|(lw, p)| vec![show_label_word(labels, lw), p.format()]).collect();
    let header = vec!["label_word".to_string(), "weight".to_string()];
    let text = || format!("{}\n", d.to_ket(|lw| show_label_word(labels, lw)));
    let data = || {
        json!({
            "state": m.states()[x],
            "word": w.to_string(),
            "trace": rows.iter().map(|r| json!({"label_word": r[0], "weight": r[1]})).collect::<Vec<_>>(),
        })
    };
    emit(g, &header, &rows, text, data);
}

pub fn trace(g: &Global, state_name: &str, word: &str) -> Result<(), Failure> {
    let m = load_chain(g, &Source::primary(g))?;
    let x = state(&m, state_name)?;
    let w: SamplingWord = word.parse()?;
    match g.arith {
        Arith::Float => {
            let d = WordGradedKernel::<_, f64>::new(&m).trace_vector(x, &w)?;
            print_trace(g, &m, x, &w, &d);
        }
        Arith::Rational => {
            let d = WordGradedKernel::<_, Rational>::new(&m).trace_vector(x, &w)?;
            print_trace(g, &m, x, &w, &d);
        }
    }
    Ok(())
}

pub struct EquivOptions {
    pub mode: EquivMode,
    pub time_grid: Vec<String>,
    pub max_segments: usize,
    pub max_obs: u64,
    pub exact: bool,
}

/// Renders a JSON object as `key: value` lines or `key,value` rows.
fn emit_object(g: &Global, v: &Json) {
    let rows: Vec<Vec<String>> = v
        .as_object()
        .map(|o| {
            o.iter()
                .map(|(k, val)| {
                    let s = match val {
                        Json::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    vec![k.clone(), s]
                })
                .collect()
        })
        .unwrap_or_default();
    let header = vec!["key".to_string(), "value".to_string()];
    let text = || rows.iter().map(|r| format!("{}: {}\n", r[0], r[1])).collect::<String>();
    emit(g, &header, &rows, text, || v.clone());
}

pub fn equiv(g: &Global, states: &[String], second: &Source, opts: &EquivOptions) -> Result<(), Failure> {
    if states.len() != 2 {
        return Err(Failure::Usage(format!("--states needs exactly two names, got {}", states.len())));
    }
    let m1 = load_chain(g, &Source::primary(g))?;
    let m2 = if second.is_given() { load_chain(g, second)? } else { m1.clone() };
    let x = state(&m1, &states[0])?;
    let y = state(&m2, &states[1])?;
    let verdict = match opts.mode {
        EquivMode::Behavioural => behavioural_equivalent(&m1, x, &m2, y)?.to_json(),
        EquivMode::Trace => {
            let mut config = TraceConfig { max_segments: opts.max_segments, max_obs: opts.max_obs, tol: g.tol, exact: opts.exact, ..TraceConfig::default() };
            if !opts.time_grid.is_empty() {
                config.time_grid = opts.time_grid.iter().map(|s| parse_time(s)).collect::<Result<_, _>>()?;
            }
            if config.time_grid.is_empty() {
                return Err(Failure::Usage("the time grid must not be empty".into()));
            }
            trace_equivalent(&m1, x, &m2, y, &config)?.to_json()
        }
    };
    emit_object(g, &verdict);
    Ok(())
}

fn instance(l: LogicArg) -> Instance {
    match l {
        LogicArg::Bool => Instance::Boolean,
        LogicArg::Quant => Instance::Quantitative,
    }
}

fn block_names(m: &LabelledModel, blocks: &[Vec<usize>]) -> Vec<Vec<String>> {
    blocks.iter().map(|b| b.iter().map(|&x| m.states()[x].clone()).collect()).collect()
}

pub fn quotient(g: &Global, via: Via, logic: LogicArg, depth: usize, output: Option<&Path>) -> Result<(), Failure> {
    let m = load_chain(g, &Source::primary(g))?;
    let lumping = lumpability_quotient(&m)?;
    let (blocks, formulas) = match via {
        Via::Lumping => (lumping.blocks.clone(), None),
        Via::Logic => {
            let budget = FormulaBudget { tol: g.tol, ..FormulaBudget::default() }.with_depth(depth);
            let q = logical_quotient(&m, instance(logic), &budget)?;
            (q.blocks, Some((q.formulas, q.examined)))
        }
    };
    // a quotient model exists when the partition is a verified lumping
    let quotient = (blocks == lumping.blocks && lumping.report.passed()).then_some(&lumping.quotient);
    if let Some(path) = output {
        let q = quotient.ok_or_else(|| Failure::Usage("the partition is not a verified lumping; no quotient model".into()))?;
        std::fs::write(path, model_to_json(q) + "\n")
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let names = block_names(&m, &blocks);
    let shown: Vec<String> = names.iter().map(|b| format!("{{{}}}", b.join(","))).collect();
    let rows: Vec<Vec<String>> =
        names.iter().enumerate().map(|(i, b)| vec![i.to_string(), b.join(" ")]).collect();
    let header = vec!["block".to_string(), "states".to_string()];
    let text = || {
        let mut out = format!("blocks: {}\n", shown.join(" "));
        if let Some((kept, examined)) = formulas {
            out.push_str(&format!("formulas: {examined} examined, {kept} kept\n"));
        }
        match quotient {
            Some(q) => {
                out.push_str(&format!(
                    "quotient: {} (max residual {})\n",
                    q.states().join(", "),
                    format_f64(lumping.report.max_residual())
                ));
                if let Some(p) = output {
                    out.push_str(&format!("written to {}\n", p.display()));
                }
            }
            None => out.push_str("quotient: none (not a lumping)\n"),
        }
        out
    };
    let data = || {
        json!({
            "via": match via { Via::Lumping => "lumping", Via::Logic => "logic" },
            "blocks": names,
            "formulas": formulas.map(|f| f.0),
            "formulas_examined": formulas.map(|f| f.1),
            "verified": quotient.is_some(),
            "max_residual": format_f64(lumping.report.max_residual()),
            "quotient": quotient.map(|q| serde_json::from_str::<Json>(&model_to_json(q)).expect("valid json")),
        })
    };
    emit(g, &header, &rows, text, data);
    Ok(())
}

pub fn eval(g: &Global, logic: Option<LogicArg>, formula: &str, state_name: Option<&str>, all: bool) -> Result<(), Failure> {
    let m = load_chain(g, &Source::primary(g))?;
    let phi = parse_formula_with(formula, Some(m.labels()))?;
    let inst = match logic {
        Some(l) => instance(l),
        None => phi.instance()?.unwrap_or(Instance::Boolean),
    };
    let selected: Vec<usize> = match (state_name, all) {
        (Some(s), _) => vec![state(&m, s)?],
        (None, true) => (0..m.n_states()).collect(),
        (None, false) => return Err(Failure::Usage("give --state NAME or --all".into())),
    };
    let ev = Evaluator::new(&m);
    let (shown, data_values): (Vec<String>, Vec<Json>) = match inst {
        Instance::Boolean => {
            let v = ev.boolean(&phi)?;
            selected.iter().map(|&x| (if v[x] { "⊤" } else { "⊥" }.to_string(), json!(v[x]))).unzip()
        }
        Instance::Quantitative => {
            let v = ev.quantitative(&phi)?;
            if g.arith == Arith::Rational && selected.iter().any(|&x| !v[x].is_exact()) {
                return Err(Error::InexactTime("the formula crosses a positive delay".into()).into());
            }
            selected
                .iter()
                .map(|&x| {
                    let s = match &v[x] {
                        Value::Exact(r) if g.arith == Arith::Float => format_f64(graded_coalg::numeric::to_f64(r)),
                        other => other.to_string(),
                    };
                    (s.clone(), json!(s))
                })
                .unzip()
        }
    };
    let rows: Vec<Vec<String>> =
        selected.iter().zip(&shown).map(|(&x, s)| vec![m.states()[x].clone(), s.clone()]).collect();
    let header = vec!["state".to_string(), "value".to_string()];
    let data = || {
        json!({
            "formula": phi.to_string(),
            "logic": inst.to_string(),
            "depth": uniform_depth(&phi).ok().map(|d| d.to_string()),
            "values": selected.iter().zip(&data_values).map(|(&x, v)| json!({"state": m.states()[x], "value": v})).collect::<Vec<_>>(),
        })
    };
    emit(g, &header, &rows, String::new, data);
    Ok(())
}
