//! Reader for the `tritforge-net v1` text format.
//!
//! ```text
//! .title <string>
//! .vdd <volts>
//! .input <net> <ternary|binary|halfpair>
//! .output <net> [enc=<ternary|binary|halfpair>]
//! .net <net>
//! M <id> <n|p> <hvt|mvt|lvt|ulvt> G=<net> S=<net> D=<net> [tag=<string>]...
//! C <id> <net> <farads>
//! .end
//! ```
//!
//! Keywords are case-insensitive; net names are not. `#` starts a comment.

use std::collections::{BTreeSet, HashMap};

use super::{is_rail, Device, Load, Netlist, NetlistError, Polarity, ThresholdClass};
use crate::trit::SignalEncoding;

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Require every net to be declared with `.net`, `.input` or `.output`
    /// before a device line uses it.
    pub strict: bool,
}

pub fn parse(text: &str) -> Result<Netlist, NetlistError> {
    parse_with(text, ParseOptions::default())
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &body[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &body[s..],
            column: s + 1,
        });
    }
    tokens
}

/// Parses a value with an optional engineering suffix (`2f`, `1.5p`, `3e-15`).
fn parse_value(text: &str) -> Option<f64> {
    if let Ok(v) = text.parse::<f64>() {
        return Some(v);
    }
    let lower = text.to_ascii_lowercase();
    let (digits, scale) = [
        ("meg", 1e6),
        ("f", 1e-15),
        ("p", 1e-12),
        ("n", 1e-9),
        ("u", 1e-6),
        ("m", 1e-3),
        ("k", 1e3),
    ]
    .iter()
    .find_map(|(suffix, scale)| lower.strip_suffix(suffix).map(|d| (d.to_string(), *scale)))?;
    digits.parse::<f64>().ok().map(|v| v * scale)
}

struct Parser {
    options: ParseOptions,
    netlist: Netlist,
    ids: HashMap<String, usize>,
    declared: BTreeSet<String>,
    /// Output declarations awaiting a device line that creates the net.
    pending_outputs: Vec<(String, usize)>,
    ended: bool,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> NetlistError {
    NetlistError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn semantic(line: usize, message: impl Into<String>) -> NetlistError {
    NetlistError::Semantic {
        line,
        message: message.into(),
    }
}

pub fn parse_with(text: &str, options: ParseOptions) -> Result<Netlist, NetlistError> {
    let mut p = Parser {
        options,
        netlist: Netlist::new(""),
        ids: HashMap::new(),
        declared: BTreeSet::new(),
        pending_outputs: Vec::new(),
        ended: false,
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        if p.ended {
            return Err(syntax(line_no, tokens[0].column, "content after .end"));
        }
        p.line(line_no, raw, &tokens)?;
    }
    p.finish()
}

impl Parser {
    fn line(&mut self, line: usize, raw: &str, tokens: &[Token<'_>]) -> Result<(), NetlistError> {
        let head = tokens[0].text.to_ascii_lowercase();
        match head.as_str() {
            ".title" => {
                let rest = match raw.find('#') {
                    Some(i) => &raw[..i],
                    None => raw,
                };
                let start = tokens[0].column - 1 + tokens[0].text.len();
                self.netlist.title = rest[start..].trim().to_string();
            }
            ".vdd" => {
                self.expect_len(line, tokens, 2)?;
                let v = parse_value(tokens[1].text)
                    .filter(|v| v.is_finite() && *v > 0.0)
                    .ok_or_else(|| syntax(line, tokens[1].column, format!("invalid supply voltage '{}'", tokens[1].text)))?;
                self.netlist.vdd = v;
            }
            ".input" => {
                self.expect_len(line, tokens, 3)?;
                let net = self.declare(line, &tokens[1])?;
                let domain = SignalEncoding::from_keyword(tokens[2].text).ok_or_else(|| {
                    syntax(
                        line,
                        tokens[2].column,
                        format!("unknown input domain '{}' (expected ternary, binary or halfpair)", tokens[2].text),
                    )
                })?;
                if self.netlist.is_input(&net) {
                    return Err(semantic(line, format!("input {net} declared twice")));
                }
                self.netlist.add_input(&net, domain);
            }
            ".output" => {
                if tokens.len() < 2 || tokens.len() > 3 {
                    let col = tokens.last().map(|t| t.column).unwrap_or(1);
                    return Err(syntax(line, col, ".output expects <net> [enc=<domain>]"));
                }
                let net = tokens[1].text.to_string();
                if is_rail(&net) {
                    return Err(semantic(line, format!("reserved rail {net} cannot be an output")));
                }
                let mut encoding = SignalEncoding::Standard;
                if let Some(tok) = tokens.get(2) {
                    let (key, value) = split_key(tok).ok_or_else(|| syntax(line, tok.column, "expected enc=<domain>"))?;
                    if !key.eq_ignore_ascii_case("enc") {
                        return Err(syntax(line, tok.column, format!("unknown output attribute '{key}'")));
                    }
                    encoding = SignalEncoding::from_keyword(value)
                        .ok_or_else(|| syntax(line, tok.column, format!("unknown encoding '{value}'")))?;
                }
                if self.netlist.is_output(&net) {
                    return Err(semantic(line, format!("output {net} declared twice")));
                }
                self.netlist.outputs.push(super::OutputDecl {
                    net: net.clone(),
                    encoding,
                });
                if !self.netlist.nets.contains(&net) {
                    self.pending_outputs.push((net.clone(), line));
                }
                self.declared.insert(net);
            }
            ".net" => {
                self.expect_len(line, tokens, 2)?;
                let net = self.declare(line, &tokens[1])?;
                self.netlist.add_net(&net);
            }
            ".end" => {
                self.expect_len(line, tokens, 1)?;
                self.ended = true;
            }
            "m" => self.device(line, tokens)?,
            "c" => self.load(line, tokens)?,
            other if other.starts_with('.') => {
                return Err(syntax(line, tokens[0].column, format!("unknown directive '{}'", tokens[0].text)));
            }
            _ => {
                return Err(syntax(line, tokens[0].column, format!("unexpected token '{}'", tokens[0].text)));
            }
        }
        Ok(())
    }

    fn expect_len(&self, line: usize, tokens: &[Token<'_>], n: usize) -> Result<(), NetlistError> {
        if tokens.len() == n {
            return Ok(());
        }
        let col = if tokens.len() > n {
            tokens[n].column
        } else {
            tokens.last().map(|t| t.column + t.text.len()).unwrap_or(1)
        };
        Err(syntax(
            line,
            col,
            format!("{} expects {} argument(s), found {}", tokens[0].text, n - 1, tokens.len() - 1),
        ))
    }

    fn declare(&mut self, line: usize, tok: &Token<'_>) -> Result<String, NetlistError> {
        if is_rail(tok.text) {
            return Err(semantic(line, format!("reserved rail {} cannot be declared", tok.text)));
        }
        self.declared.insert(tok.text.to_string());
        Ok(tok.text.to_string())
    }

    fn claim_id(&mut self, line: usize, id: &str) -> Result<(), NetlistError> {
        if let Some(first) = self.ids.insert(id.to_string(), line) {
            return Err(semantic(line, format!("duplicate id {id} (first defined on line {first})")));
        }
        Ok(())
    }

    fn use_net(&mut self, line: usize, net: &str) -> Result<String, NetlistError> {
        if !is_rail(net) && self.options.strict && !self.declared.contains(net) {
            return Err(semantic(line, format!("undeclared net {net}")));
        }
        Ok(net.to_string())
    }

    fn device(&mut self, line: usize, tokens: &[Token<'_>]) -> Result<(), NetlistError> {
        if tokens.len() < 7 {
            let col = tokens.last().map(|t| t.column + t.text.len()).unwrap_or(1);
            return Err(syntax(
                line,
                col,
                "device line expects M <id> <n|p> <vt> G=<net> S=<net> D=<net> [tag=<string>]...",
            ));
        }
        let id = tokens[1].text;
        let polarity = match tokens[2].text.to_ascii_lowercase().as_str() {
            "n" => Polarity::N,
            "p" => Polarity::P,
            _ => {
                return Err(syntax(line, tokens[2].column, format!("unknown polarity '{}'", tokens[2].text)));
            }
        };
        let vt = ThresholdClass::from_keyword(tokens[3].text).ok_or_else(|| {
            syntax(line, tokens[3].column, format!("unknown threshold class '{}'", tokens[3].text))
        })?;
        let (mut gate, mut source, mut drain) = (None, None, None);
        let mut tags = BTreeSet::new();
        for tok in &tokens[4..] {
            let (key, value) = split_key(tok).ok_or_else(|| syntax(line, tok.column, format!("expected key=value, found '{}'", tok.text)))?;
            let slot = match key.to_ascii_lowercase().as_str() {
                "g" => &mut gate,
                "s" => &mut source,
                "d" => &mut drain,
                "tag" => {
                    tags.insert(value.to_string());
                    continue;
                }
                _ => return Err(syntax(line, tok.column, format!("unknown device attribute '{key}'"))),
            };
            if slot.replace(value.to_string()).is_some() {
                return Err(syntax(line, tok.column, format!("terminal {key} given twice")));
            }
        }
        let missing = |name: &str| syntax(line, tokens[0].column, format!("device {id} is missing terminal {name}"));
        let gate = gate.ok_or_else(|| missing("G"))?;
        let source = source.ok_or_else(|| missing("S"))?;
        let drain = drain.ok_or_else(|| missing("D"))?;
        self.claim_id(line, id)?;
        let device = Device {
            id: id.to_string(),
            polarity,
            vt,
            gate: self.use_net(line, &gate)?,
            source: self.use_net(line, &source)?,
            drain: self.use_net(line, &drain)?,
            tags,
        };
        self.netlist.add_device(device);
        Ok(())
    }

    fn load(&mut self, line: usize, tokens: &[Token<'_>]) -> Result<(), NetlistError> {
        self.expect_len(line, tokens, 4)?;
        let farads = parse_value(tokens[3].text)
            .filter(|v| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| syntax(line, tokens[3].column, format!("invalid capacitance '{}'", tokens[3].text)))?;
        self.claim_id(line, tokens[1].text)?;
        let net = self.use_net(line, tokens[2].text)?;
        self.netlist.add_net(&net);
        self.netlist.loads.push(Load {
            id: tokens[1].text.to_string(),
            net,
            farads,
        });
        Ok(())
    }

    fn finish(mut self) -> Result<Netlist, NetlistError> {
        for (net, line) in &self.pending_outputs {
            if !self.netlist.nets.contains(net) {
                return Err(semantic(*line, format!("undeclared net {net}: output never created by a device line")));
            }
        }
        // Outputs are nets even when only a load mentions them.
        let outputs: Vec<String> = self.netlist.outputs.iter().map(|o| o.net.clone()).collect();
        for net in outputs {
            self.netlist.add_net(&net);
        }
        Ok(self.netlist)
    }
}

fn split_key<'a>(tok: &Token<'a>) -> Option<(&'a str, &'a str)> {
    let (k, v) = tok.text.split_once('=')?;
    if k.is_empty() || v.is_empty() {
        None
    } else {
        Some((k, v))
    }
}
