//! Rendering of subcommand payloads. Every payload is first serialized to a
//! JSON value; the CSV writer reads the same value, so both formats carry
//! the same decimal strings by construction.

use serde_json::Value;

use crate::config::Format;
use crate::Failure;

/// Which flattening the CSV writer applies.
#[derive(Debug, Clone, Copy)]
pub enum Payload {
    /// XiTable: one row per index, one column per coordinate.
    Table,
    /// CongruenceReport, or a sweep of them: one row per verdict.
    Report,
    /// Lemma suite: one row per check.
    Lemmas,
    /// ResidueSet: a single row with the members joined by ';'.
    Set,
    /// Dissection parts: one row per retained exponent of each part.
    Dissection,
    /// Coefficient table: one row per n with both b routes.
    Coeffs,
}

pub fn print(payload: Payload, value: &Value, format: Format) -> Result<(), Failure> {
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).map_err(Failure::encode)?;
            s.push('\n');
            s
        }
        Format::Csv => to_csv(payload, value)?,
    };
    print!("{text}");
    Ok(())
}

fn to_csv(payload: Payload, value: &Value) -> Result<String, Failure> {
    match payload {
        Payload::Table => table_csv(value),
        Payload::Report => report_csv(value),
        Payload::Lemmas => lemmas_csv(value),
        Payload::Set => set_csv(value),
        Payload::Dissection => dissection_csv(value),
        Payload::Coeffs => coeffs_csv(value),
    }
}

fn broken(what: &str) -> Failure {
    Failure::Usage(format!("internal: payload missing {what}"))
}

fn str_of(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn joined(v: &Value) -> Result<String, Failure> {
    let items = v.as_array().ok_or_else(|| broken("array"))?;
    Ok(items.iter().map(str_of).collect::<Vec<_>>().join(";"))
}

/// Coordinate strings of a serialized cyclotomic number.
fn coords_of(v: &Value) -> Result<Vec<String>, Failure> {
    let coords = v
        .get("coords")
        .and_then(Value::as_array)
        .ok_or_else(|| broken("coords"))?;
    Ok(coords.iter().map(str_of).collect())
}

fn table_csv(value: &Value) -> Result<String, Failure> {
    let rows = value
        .get("values")
        .and_then(Value::as_array)
        .ok_or_else(|| broken("values"))?;
    let width = rows
        .first()
        .and_then(Value::as_array)
        .map(|r| r.len())
        .unwrap_or(1);
    let mut out = String::from("n");
    for k in 0..width {
        out.push_str(&format!(",c{k}"));
    }
    out.push('\n');
    for (n, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| broken("value row"))?;
        out.push_str(&n.to_string());
        for cell in row {
            out.push(',');
            out.push_str(&str_of(cell));
        }
        out.push('\n');
    }
    Ok(out)
}

/// One verdict row per line. A sweep payload ({"reports": [...]}) gets the
/// spec columns prepended so rows from different runs stay distinguishable.
fn report_csv(value: &Value) -> Result<String, Failure> {
    let reports: Vec<&Value> = match value.get("reports").and_then(Value::as_array) {
        Some(list) => list.iter().collect(),
        None => vec![value],
    };
    let multi = reports.len() > 1 || value.get("reports").is_some();
    let mut out = String::new();
    if multi {
        out.push_str("family,t,p,lambda,m,j,n,pass,value\n");
    } else {
        out.push_str("m,j,n,pass,value\n");
    }
    for report in reports {
        let verdicts = report
            .get("verdicts")
            .and_then(Value::as_array)
            .ok_or_else(|| broken("verdicts"))?;
        let prefix = if multi {
            let spec = report.get("spec").ok_or_else(|| broken("spec"))?;
            format!(
                "{},{},{},{},",
                spec.get("family").map(str_of).unwrap_or_default(),
                spec.get("t").map(str_of).unwrap_or_default(),
                report.get("p").map(str_of).unwrap_or_default(),
                report.get("lambda").map(str_of).unwrap_or_default(),
            )
        } else {
            String::new()
        };
        for verdict in verdicts {
            let value_cell = match verdict.get("value") {
                Some(coords) if !coords.is_null() => joined(coords)?,
                _ => String::new(),
            };
            out.push_str(&format!(
                "{prefix}{},{},{},{},{}\n",
                verdict.get("m").map(str_of).unwrap_or_default(),
                verdict.get("j").map(str_of).unwrap_or_default(),
                verdict.get("n").map(str_of).unwrap_or_default(),
                verdict.get("pass").map(str_of).unwrap_or_default(),
                value_cell,
            ));
        }
    }
    Ok(out)
}

fn lemmas_csv(value: &Value) -> Result<String, Failure> {
    let reports: Vec<&Value> = match value.get("reports").and_then(Value::as_array) {
        Some(list) => list.iter().collect(),
        None => vec![value],
    };
    let mut out = String::from("t,p,group,params,outcome,note\n");
    for report in reports {
        let t = report.get("t").map(str_of).unwrap_or_default();
        let p = report.get("p").map(str_of).unwrap_or_default();
        let checks = report
            .get("checks")
            .and_then(Value::as_array)
            .ok_or_else(|| broken("checks"))?;
        for check in checks {
            out.push_str(&format!(
                "{t},{p},{},{},{},{}\n",
                check.get("group").map(str_of).unwrap_or_default(),
                check.get("params").map(str_of).unwrap_or_default(),
                check.get("outcome").map(str_of).unwrap_or_default(),
                check.get("note").map(str_of).unwrap_or_default(),
            ));
        }
    }
    Ok(out)
}

fn set_csv(value: &Value) -> Result<String, Failure> {
    let members = value.get("members").ok_or_else(|| broken("members"))?;
    Ok(format!(
        "p,kind,r,s,t,max,members\n{},{},{},{},{},{},{}\n",
        value.get("p").map(str_of).unwrap_or_default(),
        value.get("kind").map(str_of).unwrap_or_default(),
        value.get("r").map(str_of).unwrap_or_default(),
        value.get("s").map(str_of).unwrap_or_default(),
        value.get("t").map(str_of).unwrap_or_default(),
        value.get("max").map(str_of).unwrap_or_default(),
        joined(members)?,
    ))
}

fn dissection_csv(value: &Value) -> Result<String, Failure> {
    let parts = value
        .get("parts")
        .and_then(Value::as_array)
        .ok_or_else(|| broken("parts"))?;
    let width = parts
        .first()
        .and_then(|p| p.get("coeffs"))
        .and_then(Value::as_array)
        .and_then(|c| c.first())
        .map(|c| coords_of(c).map(|v| v.len()))
        .transpose()?
        .unwrap_or(1);
    let hash = value
        .get("reassembly_sha256")
        .map(str_of)
        .unwrap_or_default();
    let mut out = format!("# reassembly_sha256={hash}\npart,exponent");
    for k in 0..width {
        out.push_str(&format!(",c{k}"));
    }
    out.push('\n');
    for (idx, part) in parts.iter().enumerate() {
        let min_exp = part
            .get("min_exp")
            .and_then(Value::as_i64)
            .ok_or_else(|| broken("min_exp"))?;
        let coeffs = part
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| broken("coeffs"))?;
        for (off, cell) in coeffs.iter().enumerate() {
            out.push_str(&format!("{idx},{}", min_exp + off as i64));
            for coord in coords_of(cell)? {
                out.push(',');
                out.push_str(&coord);
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn coeffs_csv(value: &Value) -> Result<String, Failure> {
    let entries = value
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| broken("entries"))?;
    let mut out = String::from("n,equal,b,b_derivative\n");
    for entry in entries {
        let n = entry
            .get("coeffs")
            .and_then(|c| c.get("n"))
            .map(str_of)
            .unwrap_or_default();
        let b = entry
            .get("coeffs")
            .and_then(|c| c.get("b"))
            .map(coords_of)
            .transpose()?
            .unwrap_or_default()
            .join(";");
        let b_derivative = entry
            .get("b_derivative")
            .map(coords_of)
            .transpose()?
            .unwrap_or_default()
            .join(";");
        out.push_str(&format!(
            "{n},{},{b},{b_derivative}\n",
            entry.get("equal").map(str_of).unwrap_or_default(),
        ));
    }
    Ok(out)
}
