//! Line-delimited interchange formats.
//!
//! Every file starts with a header line carrying a `schema` field; the
//! remaining lines are one record each. Serialization is canonical and
//! bit-exact: object keys are sorted, label sets are sorted proposition
//! arrays, traces are in canonical form and canonical order, and no floats
//! appear anywhere.
//!
//! Schemas:
//!
//! * `trace-set/1` — header `{"alphabet":[..],"schema":..}`, then one
//!   `{"loop":[[..]],"stem":[[..]]}` line per trace;
//! * `transition-system/1` — header `{"alphabet":[..],"initial":id,
//!   "schema":..}`, then `{"labels":[..],"vertex":id}` lines followed by
//!   `{"edge":[from,to]}` lines;
//! * `tile-set/1` — header `{"colors":[..],"designated":i,"schema":..}`,
//!   then one `{"east":c,"north":c,"south":c,"west":c}` line per tile
//!   (tile order is semantic: `designated` is an index);
//! * `word/1` — header `{"alphabet":[..],"schema":..}`, then one
//!   `{"letter":[..]}` line per position.

use crate::error::{Error, Result};
use crate::kripke::TransitionSystem;
use crate::tiling::{Tile, TileSet};
use crate::trace::{Alphabet, Labels, TraceSet, UpTrace};
use serde_json::{json, Value};

fn parse_line(line: &str, what: &str) -> Result<Value> {
    serde_json::from_str(line)
        .map_err(|e| Error::InvalidInput(format!("malformed {what} line: {e}")))
}

fn get<'v>(v: &'v Value, key: &str, what: &str) -> Result<&'v Value> {
    v.get(key)
        .ok_or_else(|| Error::InvalidInput(format!("{what}: missing field {key:?}")))
}

fn string_array(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput(format!("{what}: expected an array")))?
        .iter()
        .map(|s| {
            s.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::InvalidInput(format!("{what}: expected strings")))
        })
        .collect()
}

fn check_schema(header: &Value, expected: &str) -> Result<()> {
    let schema = get(header, "schema", "header")?
        .as_str()
        .ok_or_else(|| Error::InvalidInput("header schema must be a string".to_string()))?;
    if schema != expected {
        return Err(Error::InvalidInput(format!(
            "expected schema {expected:?}, found {schema:?}"
        )));
    }
    Ok(())
}

fn labels_value(alphabet: &Alphabet, labels: Labels) -> Value {
    Value::Array(
        alphabet
            .names(labels)
            .into_iter()
            .map(|s| Value::String(s.to_string()))
            .collect(),
    )
}

fn labels_from_value(alphabet: &Alphabet, v: &Value, what: &str) -> Result<Labels> {
    let names = string_array(v, what)?;
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    alphabet.labels(&refs)
}

fn label_rows(alphabet: &Alphabet, row: &[Labels]) -> Value {
    Value::Array(row.iter().map(|l| labels_value(alphabet, *l)).collect())
}

pub fn write_trace_set(t: &TraceSet) -> String {
    let mut out = String::new();
    let header = json!({
        "alphabet": t.alphabet().props(),
        "schema": "trace-set/1",
    });
    out.push_str(&header.to_string());
    out.push('\n');
    for tr in t.traces() {
        let rec = json!({
            "loop": label_rows(t.alphabet(), tr.cycle()),
            "stem": label_rows(t.alphabet(), tr.stem()),
        });
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    out
}

pub fn read_trace_set(text: &str) -> Result<TraceSet> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = parse_line(
        lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty trace-set file".to_string()))?,
        "trace-set header",
    )?;
    check_schema(&header, "trace-set/1")?;
    let alphabet = Alphabet::new(string_array(
        get(&header, "alphabet", "header")?,
        "alphabet",
    )?)?;
    let mut traces = Vec::new();
    for line in lines {
        let rec = parse_line(line, "trace")?;
        let read_row = |key: &str| -> Result<Vec<Labels>> {
            get(&rec, key, "trace")?
                .as_array()
                .ok_or_else(|| Error::InvalidInput(format!("trace {key} must be an array")))?
                .iter()
                .map(|v| labels_from_value(&alphabet, v, "label set"))
                .collect()
        };
        let stem = read_row("stem")?;
        let cycle = read_row("loop")?;
        traces.push(UpTrace::new(stem, cycle)?);
    }
    TraceSet::new(alphabet, traces)
}

pub fn write_transition_system(ts: &TransitionSystem) -> String {
    let mut out = String::new();
    let header = json!({
        "alphabet": ts.alphabet().props(),
        "initial": ts.id(ts.initial()),
        "schema": "transition-system/1",
    });
    out.push_str(&header.to_string());
    out.push('\n');
    let mut order: Vec<usize> = (0..ts.vertex_count()).collect();
    order.sort_by(|&a, &b| ts.id(a).cmp(ts.id(b)));
    for v in &order {
        let rec = json!({
            "labels": labels_value(ts.alphabet(), ts.label(*v)),
            "vertex": ts.id(*v),
        });
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    let mut edges: Vec<(&str, &str)> = ts
        .edges()
        .iter()
        .map(|&(a, b)| (ts.id(a), ts.id(b)))
        .collect();
    edges.sort();
    for (a, b) in edges {
        let rec = json!({ "edge": [a, b] });
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    out
}

pub fn read_transition_system(text: &str) -> Result<TransitionSystem> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = parse_line(
        lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty transition-system file".to_string()))?,
        "transition-system header",
    )?;
    check_schema(&header, "transition-system/1")?;
    let alphabet = Alphabet::new(string_array(
        get(&header, "alphabet", "header")?,
        "alphabet",
    )?)?;
    let initial_id = get(&header, "initial", "header")?
        .as_str()
        .ok_or_else(|| Error::InvalidInput("initial must be a vertex id".to_string()))?
        .to_string();
    let mut vertices: Vec<(String, Labels)> = Vec::new();
    let mut edge_ids: Vec<(String, String)> = Vec::new();
    for line in lines {
        let rec = parse_line(line, "record")?;
        if rec.get("vertex").is_some() {
            let id = get(&rec, "vertex", "vertex")?
                .as_str()
                .ok_or_else(|| Error::InvalidInput("vertex id must be a string".to_string()))?
                .to_string();
            let labels = labels_from_value(&alphabet, get(&rec, "labels", "vertex")?, "labels")?;
            vertices.push((id, labels));
        } else if rec.get("edge").is_some() {
            let pair = string_array(get(&rec, "edge", "edge")?, "edge")?;
            if pair.len() != 2 {
                return Err(Error::InvalidInput(
                    "edge must be a [from, to] pair".to_string(),
                ));
            }
            edge_ids.push((pair[0].clone(), pair[1].clone()));
        } else {
            return Err(Error::InvalidInput(
                "record is neither a vertex nor an edge".to_string(),
            ));
        }
    }
    let index_of = |id: &str| -> Result<usize> {
        vertices
            .iter()
            .position(|(v, _)| v == id)
            .ok_or_else(|| Error::InvalidInput(format!("unknown vertex id {id:?}")))
    };
    let edges = edge_ids
        .iter()
        .map(|(a, b)| Ok((index_of(a)?, index_of(b)?)))
        .collect::<Result<Vec<_>>>()?;
    let initial = index_of(&initial_id)?;
    TransitionSystem::new(alphabet, vertices, edges, initial)
}

pub fn write_tile_set(ts: &TileSet) -> String {
    let mut out = String::new();
    let header = json!({
        "colors": ts.colors(),
        "designated": ts.designated(),
        "schema": "tile-set/1",
    });
    out.push_str(&header.to_string());
    out.push('\n');
    for t in ts.tiles() {
        let rec = json!({
            "east": ts.colors()[t.east],
            "north": ts.colors()[t.north],
            "south": ts.colors()[t.south],
            "west": ts.colors()[t.west],
        });
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    out
}

pub fn read_tile_set(text: &str) -> Result<TileSet> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = parse_line(
        lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty tile-set file".to_string()))?,
        "tile-set header",
    )?;
    check_schema(&header, "tile-set/1")?;
    let colors = string_array(get(&header, "colors", "header")?, "colors")?;
    let designated = get(&header, "designated", "header")?
        .as_u64()
        .ok_or_else(|| Error::InvalidInput("designated must be an index".to_string()))?
        as usize;
    let color_index = |v: &Value| -> Result<usize> {
        let name = v
            .as_str()
            .ok_or_else(|| Error::InvalidInput("tile side must be a color name".to_string()))?;
        colors
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown color {name:?}")))
    };
    let mut tiles = Vec::new();
    for line in lines {
        let rec = parse_line(line, "tile")?;
        tiles.push(Tile {
            east: color_index(get(&rec, "east", "tile")?)?,
            west: color_index(get(&rec, "west", "tile")?)?,
            north: color_index(get(&rec, "north", "tile")?)?,
            south: color_index(get(&rec, "south", "tile")?)?,
        });
    }
    TileSet::new(colors, tiles, designated)
}

pub fn write_word(alphabet: &Alphabet, word: &[Labels]) -> String {
    let mut out = String::new();
    let header = json!({
        "alphabet": alphabet.props(),
        "schema": "word/1",
    });
    out.push_str(&header.to_string());
    out.push('\n');
    for l in word {
        let rec = json!({ "letter": labels_value(alphabet, *l) });
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    out
}

pub fn read_word(text: &str) -> Result<(Alphabet, Vec<Labels>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = parse_line(
        lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty word file".to_string()))?,
        "word header",
    )?;
    check_schema(&header, "word/1")?;
    let alphabet = Alphabet::new(string_array(
        get(&header, "alphabet", "header")?,
        "alphabet",
    )?)?;
    let mut word = Vec::new();
    for line in lines {
        let rec = parse_line(line, "letter")?;
        word.push(labels_from_value(
            &alphabet,
            get(&rec, "letter", "letter")?,
            "letter",
        )?);
    }
    Ok((alphabet, word))
}
