//! `.pla` switching-function tables.
//!
//! Column 0 of a table is the most significant bit of a minterm, so the row
//! `101 1` describes minterm 5. The same convention is used everywhere in the
//! crate: qubit `i` carries column `i`, and printed bitstrings are MSB-first.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Largest input width that [`expand`] will enumerate by default.
pub const DEFAULT_EXPANSION_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaError {
    #[error("line {line}: expected {expected} literals, found {found}")]
    WidthMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: unsupported directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: illegal character `{ch}`")]
    IllegalChar { line: usize, ch: char },
    #[error("missing `{0}` declaration before the first cube")]
    MissingHeader(&'static str),
    #[error("line {line}: {msg}")]
    BadDirective { line: usize, msg: String },
    #[error("`.p` declares {declared} cubes but {found} were read")]
    CubeCountMismatch { declared: usize, found: usize },
    #[error("cube has {found_inputs}/{found_outputs} columns, table expects {n}/{m}")]
    CubeShape { n: usize, m: usize, found_inputs: usize, found_outputs: usize },
    #[error("{n} inputs exceeds the expansion limit of {limit}")]
    TooWide { n: usize, limit: usize },
    #[error("domain value {0} appears more than once")]
    DuplicateDomain(u64),
    #[error("no integer pairs given")]
    EmptyPairs,
}

/// A ternary `.pla` column entry.
///
/// In the input part `Dash` means "both values"; in the output part it marks
/// a don't-care.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Zero,
    One,
    Dash,
}

impl Literal {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Literal::Zero),
            '1' => Some(Literal::One),
            '-' => Some(Literal::Dash),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Literal::Zero => '0',
            Literal::One => '1',
            Literal::Dash => '-',
        }
    }
}

fn literals_from_str(s: &str) -> Option<Vec<Literal>> {
    s.chars().map(Literal::from_char).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cube {
    pub inputs: Vec<Literal>,
    pub outputs: Vec<Literal>,
}

impl Cube {
    pub fn new(inputs: Vec<Literal>, outputs: Vec<Literal>) -> Self {
        Cube { inputs, outputs }
    }

    /// Builds a cube from `"01-"`-style strings. Panics on characters outside
    /// `{0,1,-}`; meant for literals written in source.
    pub fn from_strs(inputs: &str, outputs: &str) -> Self {
        Cube {
            inputs: literals_from_str(inputs).expect("cube inputs must be 0/1/-"),
            outputs: literals_from_str(outputs).expect("cube outputs must be 0/1/-"),
        }
    }

    /// Full minterm cube for `value` on `n` columns.
    pub fn from_minterm(value: u64, n: usize, outputs: Vec<Literal>) -> Self {
        let inputs =
            (0..n).map(|k| if (value >> (n - 1 - k)) & 1 == 1 { Literal::One } else { Literal::Zero }).collect();
        Cube { inputs, outputs }
    }

    /// Every minterm covered by the input part, in ascending order.
    pub fn minterms(&self) -> Vec<u64> {
        let n = self.inputs.len();
        let mut base = 0u64;
        let mut free = Vec::new();
        for (k, lit) in self.inputs.iter().enumerate() {
            let bit = 1u64 << (n - 1 - k);
            match lit {
                Literal::One => base |= bit,
                Literal::Zero => {}
                Literal::Dash => free.push(bit),
            }
        }
        free.reverse();
        (0..1u64 << free.len())
            .map(|counter| {
                free.iter().enumerate().filter(|(j, _)| (counter >> j) & 1 == 1).fold(base, |acc, (_, bit)| acc | bit)
            })
            .collect()
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.inputs {
            write!(f, "{}", l.as_char())?;
        }
        f.write_str(" ")?;
        for l in &self.outputs {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// `.type` of a table. Only the ON-set (`f`) and ON+DC (`fd`) readings are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlaKind {
    F,
    #[default]
    Fd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaTable {
    pub n: usize,
    pub m: usize,
    pub cubes: Vec<Cube>,
    pub kind: PlaKind,
    pub input_labels: Option<Vec<String>>,
    pub output_labels: Option<Vec<String>>,
}

impl PlaTable {
    pub fn new(n: usize, m: usize) -> Self {
        PlaTable { n, m, cubes: Vec::new(), kind: PlaKind::Fd, input_labels: None, output_labels: None }
    }

    pub fn push(&mut self, cube: Cube) -> Result<(), PlaError> {
        if cube.inputs.len() != self.n || cube.outputs.len() != self.m {
            return Err(PlaError::CubeShape {
                n: self.n,
                m: self.m,
                found_inputs: cube.inputs.len(),
                found_outputs: cube.outputs.len(),
            });
        }
        self.cubes.push(cube);
        Ok(())
    }

    pub fn with_cubes(n: usize, m: usize, cubes: impl IntoIterator<Item = Cube>) -> Result<Self, PlaError> {
        let mut t = PlaTable::new(n, m);
        for c in cubes {
            t.push(c)?;
        }
        Ok(t)
    }
}

/// Parses a `.pla` table.
///
/// Accepted directives are `.i .o .p .ilb .ob .type .e`; anything else is
/// rejected rather than ignored. `#` starts a comment.
pub fn parse_pla(text: &str) -> Result<PlaTable, PlaError> {
    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut declared: Option<usize> = None;
    let mut kind = PlaKind::Fd;
    let mut input_labels = None;
    let mut output_labels = None;
    let mut cubes: Vec<(usize, Cube)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('.') {
            let mut tokens = line.split_whitespace();
            let keyword = tokens.next().unwrap_or(".");
            let rest: Vec<&str> = tokens.collect();
            match keyword {
                ".i" => n = Some(parse_count(line_no, keyword, &rest)?),
                ".o" => m = Some(parse_count(line_no, keyword, &rest)?),
                ".p" => {
                    let p = rest.first().and_then(|t| t.parse::<usize>().ok());
                    declared = Some(p.ok_or_else(|| PlaError::BadDirective {
                        line: line_no,
                        msg: "`.p` needs a cube count".into(),
                    })?);
                }
                ".ilb" => input_labels = Some(rest.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
                ".ob" => output_labels = Some(rest.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
                ".type" => {
                    kind = match rest.first().copied() {
                        Some("f") => PlaKind::F,
                        Some("fd") => PlaKind::Fd,
                        _ => return Err(PlaError::UnknownDirective { line: line_no, directive: line.to_string() }),
                    }
                }
                ".e" | ".end" => break,
                _ => return Err(PlaError::UnknownDirective { line: line_no, directive: keyword.to_string() }),
            }
            continue;
        }

        let n = n.ok_or(PlaError::MissingHeader(".i"))?;
        let m = m.ok_or(PlaError::MissingHeader(".o"))?;
        let mut lits = Vec::with_capacity(n + m);
        for ch in line.chars().filter(|c| !c.is_whitespace()) {
            lits.push(Literal::from_char(ch).ok_or(PlaError::IllegalChar { line: line_no, ch })?);
        }
        // the separating whitespace counts toward the width
        let found = line.chars().count();
        let expected = n + m + (found - lits.len()).min(1);
        if lits.len() != n + m {
            return Err(PlaError::WidthMismatch { line: line_no, expected, found });
        }
        let outputs = lits.split_off(n);
        cubes.push((line_no, Cube::new(lits, outputs)));
    }

    let n = n.ok_or(PlaError::MissingHeader(".i"))?;
    let m = m.ok_or(PlaError::MissingHeader(".o"))?;
    if let Some(declared) = declared {
        if declared != cubes.len() {
            return Err(PlaError::CubeCountMismatch { declared, found: cubes.len() });
        }
    }
    for (label_count, expected, what) in
        [(input_labels.as_ref().map(Vec::len), n, ".ilb"), (output_labels.as_ref().map(Vec::len), m, ".ob")]
    {
        if let Some(count) = label_count {
            if count != expected {
                return Err(PlaError::BadDirective {
                    line: 0,
                    msg: format!("`{what}` lists {count} names, expected {expected}"),
                });
            }
        }
    }
    if kind == PlaKind::F {
        if let Some((line, _)) = cubes.iter().find(|(_, c)| c.outputs.contains(&Literal::Dash)) {
            return Err(PlaError::IllegalChar { line: *line, ch: '-' });
        }
    }

    Ok(PlaTable { n, m, cubes: cubes.into_iter().map(|(_, c)| c).collect(), kind, input_labels, output_labels })
}

fn parse_count(line: usize, keyword: &str, rest: &[&str]) -> Result<usize, PlaError> {
    match rest.first().and_then(|t| t.parse::<usize>().ok()) {
        Some(v) if v > 0 => Ok(v),
        _ => Err(PlaError::BadDirective { line, msg: format!("`{keyword}` needs a positive count") }),
    }
}

/// Emits `.i`, `.o`, optional `.ilb`/`.ob`, `.type f` for F tables, `.p`,
/// the cubes in stored order and `.e`, with LF line endings.
pub fn write_pla(table: &PlaTable) -> String {
    let mut out = format!(".i {}\n.o {}\n", table.n, table.m);
    if let Some(labels) = &table.input_labels {
        out.push_str(&format!(".ilb {}\n", labels.join(" ")));
    }
    if let Some(labels) = &table.output_labels {
        out.push_str(&format!(".ob {}\n", labels.join(" ")));
    }
    if table.kind == PlaKind::F {
        out.push_str(".type f\n");
    }
    out.push_str(&format!(".p {}\n", table.cubes.len()));
    for cube in &table.cubes {
        out.push_str(&cube.to_string());
        out.push('\n');
    }
    out.push_str(".e\n");
    out
}

/// One output bit of a fully expanded table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutBit {
    Zero,
    One,
    DontCare,
}

impl OutBit {
    pub fn as_char(self) -> char {
        match self {
            OutBit::Zero => '0',
            OutBit::One => '1',
            OutBit::DontCare => '-',
        }
    }
}

/// Minterm-level view of a switching function. Minterms missing from
/// `entries` are unspecified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecTable {
    pub n: usize,
    pub m: usize,
    pub entries: BTreeMap<u64, Vec<OutBit>>,
}

impl SpecTable {
    pub fn new(n: usize, m: usize) -> Self {
        SpecTable { n, m, entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, minterm: u64, bits: Vec<OutBit>) {
        debug_assert!(self.n >= 64 || minterm < 1u64 << self.n);
        debug_assert_eq!(bits.len(), self.m);
        self.entries.insert(minterm, bits);
    }

    pub fn get(&self, minterm: u64) -> Option<&[OutBit]> {
        self.entries.get(&minterm).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_dont_cares(&self) -> bool {
        self.entries.values().any(|bits| bits.contains(&OutBit::DontCare))
    }

    /// Re-compacts into one full-minterm cube per specified row. Expanding
    /// the result with `partial` set reproduces this table exactly.
    pub fn to_pla(&self) -> PlaTable {
        let mut table = PlaTable::new(self.n, self.m);
        table.cubes = self
            .entries
            .iter()
            .map(|(&x, bits)| {
                let outputs = bits
                    .iter()
                    .map(|b| match b {
                        OutBit::Zero => Literal::Zero,
                        OutBit::One => Literal::One,
                        OutBit::DontCare => Literal::Dash,
                    })
                    .collect();
                Cube::from_minterm(x, self.n, outputs)
            })
            .collect();
        table
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandOptions {
    /// Leave minterms covered by no cube unspecified instead of all-Zero.
    pub partial: bool,
    pub limit: usize,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions { partial: false, limit: DEFAULT_EXPANSION_LIMIT }
    }
}

pub fn expand(table: &PlaTable) -> Result<SpecTable, PlaError> {
    expand_with(table, &ExpandOptions::default())
}

/// Enumerates every minterm of every cube.
///
/// Output `1` marks are ORed across overlapping cubes and win over `-`;
/// a `0` mark carries no information, so a covered bit ends up Zero only when
/// nothing marks it One or DontCare.
pub fn expand_with(table: &PlaTable, opts: &ExpandOptions) -> Result<SpecTable, PlaError> {
    if table.n > opts.limit || table.n >= 64 {
        return Err(PlaError::TooWide { n: table.n, limit: opts.limit });
    }
    let rows = 1usize << table.n;
    let m = table.m;
    // 0 = zero, 1 = don't care, 2 = one
    let mut marks = vec![0u8; rows * m];
    let mut covered = vec![false; rows];
    for cube in &table.cubes {
        for x in cube.minterms() {
            let x = x as usize;
            covered[x] = true;
            let row = &mut marks[x * m..(x + 1) * m];
            for (slot, lit) in row.iter_mut().zip(&cube.outputs) {
                let mark = match lit {
                    Literal::One => 2,
                    Literal::Dash => 1,
                    Literal::Zero => 0,
                };
                *slot = (*slot).max(mark);
            }
        }
    }
    let mut spec = SpecTable::new(table.n, m);
    for x in 0..rows {
        if !covered[x] && opts.partial {
            continue;
        }
        let bits = marks[x * m..(x + 1) * m]
            .iter()
            .map(|&v| match v {
                2 => OutBit::One,
                1 => OutBit::DontCare,
                _ => OutBit::Zero,
            })
            .collect();
        spec.entries.insert(x as u64, bits);
    }
    Ok(spec)
}

/// (domain, range) rows of an integer-valued function.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntegerPairs {
    pub rows: Vec<(u64, u64)>,
}

impl IntegerPairs {
    pub fn new(rows: Vec<(u64, u64)>) -> Self {
        IntegerPairs { rows }
    }
}

/// Number of bits needed for `max_value` in unsigned fixed point, at least one.
pub fn bit_width(max_value: u64) -> usize {
    (64 - max_value.leading_zeros() as usize).max(1)
}

/// Encodes integer rows as an unsigned big-endian switching function, one
/// fully specified cube per row, using `n = bits(max domain)` and
/// `m = bits(max range)`.
pub fn encode_integer_pairs(pairs: &IntegerPairs) -> Result<PlaTable, PlaError> {
    let max_d = pairs.rows.iter().map(|r| r.0).max().ok_or(PlaError::EmptyPairs)?;
    let max_r = pairs.rows.iter().map(|r| r.1).max().ok_or(PlaError::EmptyPairs)?;
    let n = bit_width(max_d);
    let m = bit_width(max_r);
    let mut seen = std::collections::HashSet::new();
    let mut table = PlaTable::new(n, m);
    for &(d, r) in &pairs.rows {
        if !seen.insert(d) {
            return Err(PlaError::DuplicateDomain(d));
        }
        let outputs = Cube::from_minterm(r, m, Vec::new()).inputs;
        table.cubes.push(Cube::from_minterm(d, n, outputs));
    }
    Ok(table)
}
