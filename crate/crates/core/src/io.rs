//! Reading and writing networks: ASCII and binary AIGER, and a native text
//! format that keeps XOR gates.
//!
//! Native format, one item per line, `#` starts a comment:
//!
//! ```text
//! pi a
//! pi b
//! and 3 2 4
//! xor 4 3 5
//! po 9
//! ```
//!
//! Node 0 is the constant, PIs take ids 1, 2, ... in order of appearance
//! and every gate line must use the next free id. A literal is
//! `2·id + complemented`.

use crate::xag::{GateKind, Network, NodeId, NodeKind, Signal};
use rustc_hash::FxHashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("sequential AIGER is not supported ({0} latches)")]
    Latches(usize),
    #[error("unrecognized file format")]
    UnknownFormat,
}

fn perr(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        msg: msg.into(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Rewrite `¬(x∧y) ∧ ¬(¬x∧¬y)` into `x ⊕ y` when both inner ANDs have
    /// no other fanout.
    pub xor_extract: bool,
}

/// Parsed combinational AIGER contents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AigerDoc {
    pub max_var: u32,
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
    /// `(lhs, rhs0, rhs1)` literals.
    pub ands: Vec<(u32, u32, u32)>,
    pub input_names: FxHashMap<usize, String>,
}

fn parse_header(line: &str, magic: &str, lineno: usize) -> Result<[u32; 5], IoError> {
    let mut it = line.split_ascii_whitespace();
    if it.next() != Some(magic) {
        return Err(perr(lineno, format!("expected '{magic}' header")));
    }
    let nums: Vec<u32> = it
        .map(|t| t.parse::<u32>().map_err(|_| perr(lineno, format!("bad header field '{t}'"))))
        .collect::<Result<_, _>>()?;
    if nums.len() < 5 || nums.len() > 9 {
        return Err(perr(lineno, "header needs M I L O A"));
    }
    if nums[5..].iter().any(|&x| x != 0) {
        return Err(perr(lineno, "bad/constraint/justice/fairness sections are not supported"));
    }
    if nums[2] > 0 {
        return Err(IoError::Latches(nums[2] as usize));
    }
    Ok([nums[0], nums[1], nums[2], nums[3], nums[4]])
}

fn parse_lits(line: &str, count: usize, lineno: usize) -> Result<Vec<u32>, IoError> {
    let v: Vec<u32> = line
        .split_ascii_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| perr(lineno, format!("bad literal '{t}'"))))
        .collect::<Result<_, _>>()?;
    if v.len() != count {
        return Err(perr(lineno, format!("expected {count} literal(s), found {}", v.len())));
    }
    Ok(v)
}

/// Parses the symbol table and comment section; only input names are kept.
fn parse_symbols<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    num_inputs: usize,
    doc: &mut AigerDoc,
) -> Result<(), IoError> {
    for (lineno, line) in lines {
        if line == "c" || line.starts_with("c ") {
            break;
        }
        if line.is_empty() {
            continue;
        }
        let (tag, name) = line.split_once(' ').ok_or_else(|| perr(lineno, "malformed symbol"))?;
        let kind = tag.as_bytes()[0];
        let pos: usize = tag[1..]
            .parse()
            .map_err(|_| perr(lineno, format!("bad symbol position '{tag}'")))?;
        match kind {
            b'i' => {
                if pos >= num_inputs {
                    return Err(perr(lineno, format!("input symbol {pos} out of range")));
                }
                doc.input_names.insert(pos, name.to_string());
            }
            b'o' | b'l' | b'b' | b'c' | b'j' | b'f' => {}
            _ => return Err(perr(lineno, format!("unknown symbol kind '{}'", kind as char))),
        }
    }
    Ok(())
}

/// Parses ASCII AIGER (`aag`).
pub fn parse_aag(text: &str) -> Result<AigerDoc, IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let [m, i, _, o, a] = parse_header(header, "aag", hl)?;
    let mut doc = AigerDoc {
        max_var: m,
        ..Default::default()
    };
    if (i as u64) + (a as u64) > m as u64 {
        return Err(perr(hl, "M is smaller than I + A"));
    }
    let mut defined = vec![false; m as usize + 1];
    defined[0] = true;
    let mut next = |what: &str| lines.next().ok_or_else(|| perr(0, format!("unexpected end of file in {what}")));
    for _ in 0..i {
        let (ln, l) = next("inputs")?;
        let lit = parse_lits(l, 1, ln)?[0];
        if lit < 2 || lit & 1 == 1 || lit / 2 > m {
            return Err(perr(ln, format!("invalid input literal {lit}")));
        }
        if defined[(lit / 2) as usize] {
            return Err(perr(ln, format!("variable {} defined twice", lit / 2)));
        }
        defined[(lit / 2) as usize] = true;
        doc.inputs.push(lit);
    }
    let mut out_lines = Vec::new();
    for _ in 0..o {
        let (ln, l) = next("outputs")?;
        let lit = parse_lits(l, 1, ln)?[0];
        if lit / 2 > m {
            return Err(perr(ln, format!("output literal {lit} exceeds M")));
        }
        out_lines.push(ln);
        doc.outputs.push(lit);
    }
    let mut prev_lhs = 0;
    for _ in 0..a {
        let (ln, l) = next("AND gates")?;
        let v = parse_lits(l, 3, ln)?;
        let (lhs, r0, r1) = (v[0], v[1], v[2]);
        if lhs & 1 == 1 {
            return Err(perr(ln, format!("odd AND left-hand side {lhs}")));
        }
        if lhs / 2 > m || lhs < 2 {
            return Err(perr(ln, format!("AND left-hand side {lhs} out of range")));
        }
        if lhs <= prev_lhs {
            return Err(perr(ln, format!("AND left-hand side {lhs} not increasing")));
        }
        if defined[(lhs / 2) as usize] {
            return Err(perr(ln, format!("variable {} defined twice", lhs / 2)));
        }
        for r in [r0, r1] {
            if r / 2 > m || !defined[(r / 2) as usize] {
                return Err(perr(ln, format!("literal {r} used before definition")));
            }
        }
        defined[(lhs / 2) as usize] = true;
        prev_lhs = lhs;
        doc.ands.push((lhs, r0, r1));
    }
    for (k, &lit) in doc.outputs.iter().enumerate() {
        if !defined[(lit / 2) as usize] {
            return Err(perr(out_lines[k], format!("output literal {lit} is undefined")));
        }
    }
    parse_symbols(lines, i as usize, &mut doc)?;
    Ok(doc)
}

fn read_varint(bytes: &[u8], pos: &mut usize) -> Option<u32> {
    let mut x: u64 = 0;
    let mut shift = 0;
    loop {
        let b = *bytes.get(*pos)?;
        *pos += 1;
        x |= ((b & 0x7f) as u64) << shift;
        if b & 0x80 == 0 {
            return u32::try_from(x).ok();
        }
        shift += 7;
        if shift > 35 {
            return None;
        }
    }
}

/// Parses binary AIGER (`aig`).
pub fn parse_aig(bytes: &[u8]) -> Result<AigerDoc, IoError> {
    let mut pos = 0;
    let mut lineno = 0;
    let mut next_line = |pos: &mut usize| -> Result<&str, IoError> {
        lineno += 1;
        let rest = &bytes[*pos..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| perr(lineno, "unexpected end of file"))?;
        *pos += end + 1;
        std::str::from_utf8(&rest[..end])
            .map(|s| s.trim_end_matches('\r'))
            .map_err(|_| perr(lineno, "invalid UTF-8"))
    };
    let header = next_line(&mut pos)?;
    let [m, i, _, o, a] = parse_header(header, "aig", 1)?;
    if i as u64 + a as u64 != m as u64 {
        return Err(perr(1, "binary AIGER requires M = I + A"));
    }
    let mut doc = AigerDoc {
        max_var: m,
        inputs: (1..=i).map(|v| 2 * v).collect(),
        ..Default::default()
    };
    for k in 0..o {
        let l = next_line(&mut pos)?;
        let lit = parse_lits(l, 1, k as usize + 2)?[0];
        if lit / 2 > m {
            return Err(perr(k as usize + 2, format!("output literal {lit} exceeds M")));
        }
        doc.outputs.push(lit);
    }
    let gate_line = o as usize + 2;
    for k in 0..a {
        let lhs = 2 * (i + k + 1);
        let bad = || perr(gate_line, format!("truncated or malformed delta encoding in AND {k}"));
        let d0 = read_varint(bytes, &mut pos).ok_or_else(bad)?;
        let d1 = read_varint(bytes, &mut pos).ok_or_else(bad)?;
        if d0 == 0 || d0 > lhs || d1 > lhs - d0 {
            return Err(bad());
        }
        let r0 = lhs - d0;
        let r1 = r0 - d1;
        doc.ands.push((lhs, r0, r1));
    }
    let rest = std::str::from_utf8(&bytes[pos..]).unwrap_or("");
    parse_symbols(
        rest.lines().enumerate().map(|(k, l)| (gate_line + 1 + k, l.trim_end_matches('\r'))),
        i as usize,
        &mut doc,
    )?;
    Ok(doc)
}

/// Builds a network from parsed AIGER. Gates that no output reaches are
/// dropped.
pub fn doc_to_network(doc: &AigerDoc, opts: ReadOptions) -> Network {
    let m = doc.max_var as usize;
    let mut net = Network::new();
    let mut map: Vec<Signal> = vec![Signal::FALSE; m + 1];
    for (k, &lit) in doc.inputs.iter().enumerate() {
        let name = doc.input_names.get(&k).cloned().unwrap_or_else(|| format!("x{k}"));
        map[(lit / 2) as usize] = net.create_named_pi(name);
    }

    // var -> index of its AND
    let mut gate_of: Vec<Option<usize>> = vec![None; m + 1];
    for (k, &(lhs, ..)) in doc.ands.iter().enumerate() {
        gate_of[(lhs / 2) as usize] = Some(k);
    }
    let mut xors: FxHashMap<usize, (u32, u32)> = FxHashMap::default();
    let mut absorbed = vec![false; doc.ands.len()];
    if opts.xor_extract {
        let mut refs = vec![0u32; m + 1];
        for &(_, r0, r1) in &doc.ands {
            refs[(r0 / 2) as usize] += 1;
            refs[(r1 / 2) as usize] += 1;
        }
        for &o in &doc.outputs {
            refs[(o / 2) as usize] += 1;
        }
        for (k, &(_, r0, r1)) in doc.ands.iter().enumerate() {
            if r0 & 1 == 0 || r1 & 1 == 0 || r0 / 2 == r1 / 2 {
                continue;
            }
            let (Some(p), Some(q)) = (gate_of[(r0 / 2) as usize], gate_of[(r1 / 2) as usize]) else {
                continue;
            };
            if refs[(r0 / 2) as usize] != 1 || refs[(r1 / 2) as usize] != 1 || absorbed[p] || absorbed[q] {
                continue;
            }
            let (_, p0, p1) = doc.ands[p];
            let (_, q0, q1) = doc.ands[q];
            let matches = (p0 ^ 1 == q0 && p1 ^ 1 == q1) || (p0 ^ 1 == q1 && p1 ^ 1 == q0);
            if matches && p0 / 2 != p1 / 2 {
                absorbed[p] = true;
                absorbed[q] = true;
                xors.insert(k, (p0, p1));
            }
        }
    }
    let lit = |map: &[Signal], l: u32| map[(l / 2) as usize].complement_if(l & 1 == 1);
    for (k, &(lhs, r0, r1)) in doc.ands.iter().enumerate() {
        if absorbed[k] {
            continue;
        }
        let s = if let Some(&(x, y)) = xors.get(&k) {
            net.create_xor(lit(&map, x), lit(&map, y))
        } else {
            net.create_and(lit(&map, r0), lit(&map, r1))
        };
        map[(lhs / 2) as usize] = s;
    }
    for &o in &doc.outputs {
        net.create_po(lit(&map, o));
    }
    net.sweep_dangling();
    if net.num_dead() > 0 {
        net = net.compact();
    }
    net
}

pub fn read_aiger(text: &str, opts: ReadOptions) -> Result<Network, IoError> {
    Ok(doc_to_network(&parse_aag(text)?, opts))
}

pub fn read_aiger_binary(bytes: &[u8], opts: ReadOptions) -> Result<Network, IoError> {
    Ok(doc_to_network(&parse_aig(bytes)?, opts))
}

/// Dispatches on the leading magic: `aag`, `aig`, or the native format.
pub fn read_any(bytes: &[u8], opts: ReadOptions) -> Result<Network, IoError> {
    if bytes.starts_with(b"aag ") {
        let text = std::str::from_utf8(bytes).map_err(|_| perr(1, "invalid UTF-8"))?;
        read_aiger(text, opts)
    } else if bytes.starts_with(b"aig ") {
        read_aiger_binary(bytes, opts)
    } else {
        let text = std::str::from_utf8(bytes).map_err(|_| IoError::UnknownFormat)?;
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'));
        match first.and_then(|l| l.split_ascii_whitespace().next()) {
            Some("pi" | "and" | "xor" | "po") | None => read_xag(text),
            _ => Err(IoError::UnknownFormat),
        }
    }
}

/// Dense numbering used by both writers: constant, PIs in order, then live
/// gates in topological order.
fn numbering(net: &Network) -> (Vec<u32>, Vec<NodeId>) {
    let mut id = vec![u32::MAX; net.size()];
    id[0] = 0;
    for (k, &pi) in net.pis().iter().enumerate() {
        id[pi as usize] = k as u32 + 1;
    }
    let gates: Vec<NodeId> = net.topo_order().into_iter().filter(|&g| net.is_gate(g)).collect();
    (id, gates)
}

/// Writes ASCII AIGER. Each XOR becomes three ANDs, `¬(¬(a∧¬b) ∧ ¬(¬a∧b))`,
/// so the AND count is `#AND + 3·#XOR`.
pub fn write_aiger(net: &Network) -> String {
    let (mut var, gates) = numbering(net);
    let num_pis = net.num_pis() as u32;
    let num_xor = gates.iter().filter(|&&g| net.kind(g) == NodeKind::Xor).count() as u32;
    let num_ands = gates.len() as u32 + 2 * num_xor;
    // literal of each node's positive output
    let mut lit = vec![0u32; net.size()];
    for &pi in net.pis() {
        lit[pi as usize] = 2 * var[pi as usize];
    }
    let mut body = String::new();
    let mut next = num_pis + 1;
    let sig = |lit: &[u32], s: Signal| lit[s.node() as usize] ^ s.is_complemented() as u32;
    for &g in &gates {
        let f = net.fanins(g);
        let (a, b) = (sig(&lit, f[0]), sig(&lit, f[1]));
        if net.kind(g) == NodeKind::And {
            let l = 2 * next;
            next += 1;
            let _ = writeln!(body, "{l} {} {}", a.max(b), a.min(b));
            lit[g as usize] = l;
        } else {
            let p = 2 * next;
            let q = p + 2;
            let n = p + 4;
            next += 3;
            let _ = writeln!(body, "{p} {} {}", a.max(b ^ 1), a.min(b ^ 1));
            let _ = writeln!(body, "{q} {} {}", (a ^ 1).max(b), (a ^ 1).min(b));
            let _ = writeln!(body, "{n} {} {}", q ^ 1, p ^ 1);
            lit[g as usize] = n ^ 1;
        }
        var[g as usize] = next - 1;
    }
    let mut out = String::new();
    let _ = writeln!(out, "aag {} {} 0 {} {}", num_pis + num_ands, num_pis, net.num_pos(), num_ands);
    for k in 0..num_pis {
        let _ = writeln!(out, "{}", 2 * (k + 1));
    }
    for &po in net.pos() {
        let _ = writeln!(out, "{}", sig(&lit, po));
    }
    out.push_str(&body);
    for (k, name) in net.pi_names().iter().enumerate() {
        if !name.is_empty() && !name.contains('\n') {
            let _ = writeln!(out, "i{k} {name}");
        }
    }
    out
}

/// Writes the native format. Writing, reading and writing again yields the
/// same text.
pub fn write_xag(net: &Network) -> String {
    let (mut id, gates) = numbering(net);
    let mut out = String::new();
    for name in net.pi_names() {
        let _ = writeln!(out, "pi {}", pi_name(name));
    }
    let lit = |id: &[u32], s: Signal| 2 * id[s.node() as usize] + s.is_complemented() as u32;
    let mut next = net.num_pis() as u32 + 1;
    for &g in &gates {
        id[g as usize] = next;
        let f = net.fanins(g);
        let kw = if net.kind(g) == NodeKind::And { "and" } else { "xor" };
        let _ = writeln!(out, "{kw} {next} {} {}", lit(&id, f[0]), lit(&id, f[1]));
        next += 1;
    }
    for &po in net.pos() {
        let _ = writeln!(out, "po {}", lit(&id, po));
    }
    out
}

fn pi_name(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_whitespace() || c == '#' { '_' } else { c })
        .collect();
    if cleaned.is_empty() {
        "_".to_string()
    } else {
        cleaned
    }
}

/// Parses the native format.
pub fn read_xag(text: &str) -> Result<Network, IoError> {
    let mut net = Network::new();
    let mut map: Vec<Signal> = vec![Signal::FALSE];
    let mut pos_seen = false;
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_ascii_whitespace();
        let kw = tok.next().unwrap();
        let args: Vec<&str> = tok.collect();
        let lit = |map: &[Signal], t: &str| -> Result<Signal, IoError> {
            let l: u32 = t.parse().map_err(|_| perr(ln, format!("bad literal '{t}'")))?;
            let node = (l / 2) as usize;
            if node >= map.len() {
                return Err(perr(ln, format!("literal {l} refers to undefined node {node}")));
            }
            Ok(map[node].complement_if(l & 1 == 1))
        };
        match kw {
            "pi" => {
                if args.len() != 1 {
                    return Err(perr(ln, "expected 'pi <name>'"));
                }
                if map.len() > net.num_pis() + 1 {
                    return Err(perr(ln, "PIs must precede gates"));
                }
                map.push(net.create_named_pi(args[0]));
            }
            "and" | "xor" => {
                if args.len() != 3 {
                    return Err(perr(ln, format!("expected '{kw} <id> <lit> <lit>'")));
                }
                let gid: usize = args[0].parse().map_err(|_| perr(ln, format!("bad id '{}'", args[0])))?;
                if gid != map.len() {
                    return Err(perr(ln, format!("gate id {gid} out of sequence, expected {}", map.len())));
                }
                if pos_seen {
                    return Err(perr(ln, "gates must precede POs"));
                }
                let a = lit(&map, args[1])?;
                let b = lit(&map, args[2])?;
                let kind = if kw == "and" { GateKind::And } else { GateKind::Xor };
                map.push(net.create_gate(kind, a, b));
            }
            "po" => {
                if args.len() != 1 {
                    return Err(perr(ln, "expected 'po <lit>'"));
                }
                let s = lit(&map, args[0])?;
                net.create_po(s);
                pos_seen = true;
            }
            _ => return Err(perr(ln, format!("unknown keyword '{kw}'"))),
        }
    }
    Ok(net)
}
