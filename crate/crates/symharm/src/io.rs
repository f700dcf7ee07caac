//! Data files, coefficient tables, CSV evaluation and OBJ surfaces.
//!
//! Three line-oriented text formats live here, all parsed with explicit
//! line-number errors and written with 17 significant digits so that every
//! `f64` round-trips bit-exactly:
//!
//! * group files: generator matrices plus the expected group order;
//! * irrep files: per-irrep generator images plus per-element generator
//!   words in the canonical ordering (the library expands the words into the
//!   full matrix family and validates it against the multiplication table);
//! * coefficient files: one matrix per file with header metadata, an FNV-1a
//!   checksum over the matrix lines, and provenance checksums of the data
//!   files that produced it.
//!
//! Bundled defaults are compiled in; the environment variable
//! `SYMHARM_DATA_DIR` points the loaders at replacement group/irrep files.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;

use crate::basis::{BlockMatrix, CoefficientBlock, Flavor};
use crate::group::{FiniteRotationGroup, GroupError, GroupName, RotationMatrix};
use crate::harmonics::SphericalAngles;
use crate::irreps::{Irrep, Realness};
use crate::mat::{CMat, RMat};

/// Environment variable that overrides the bundled data location.
pub const DATA_DIR_ENV: &str = "SYMHARM_DATA_DIR";

const BUNDLED_GROUP_T: &str = include_str!("data/group_t.txt");
const BUNDLED_GROUP_O: &str = include_str!("data/group_o.txt");
const BUNDLED_GROUP_I: &str = include_str!("data/group_i.txt");
const BUNDLED_IRREPS_T: &str = include_str!("data/irreps_t.txt");
const BUNDLED_IRREPS_O: &str = include_str!("data/irreps_o.txt");
const BUNDLED_IRREPS_I: &str = include_str!("data/irreps_i.txt");

#[derive(Clone, Debug, PartialEq)]
pub enum DataError {
    Io { path: String, msg: String },
    /// Structural problem in a data file, with its position.
    SchemaMismatch { file: String, line: usize, msg: String },
    /// Matrix lines do not hash to the recorded checksum.
    ChecksumMismatch { file: String },
    /// The loaded data violates a mathematical invariant.
    Validation { file: String, msg: String },
    Group(GroupError),
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataError::Io { path, msg } => write!(f, "{path}: {msg}"),
            DataError::SchemaMismatch { file, line, msg } => {
                write!(f, "{file}:{line}: {msg}")
            }
            DataError::ChecksumMismatch { file } => write!(f, "{file}: checksum mismatch"),
            DataError::Validation { file, msg } => write!(f, "{file}: {msg}"),
            DataError::Group(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DataError {}

/// FNV-1a 64-bit hash, used for data-file and matrix checksums.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Canonical decimal form used everywhere: 17 significant digits, which is
/// enough for a bit-exact f64 round trip.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(file: &str, line: usize, tok: &str) -> Result<f64, DataError> {
    tok.parse::<f64>().map_err(|e| DataError::SchemaMismatch {
        file: file.to_string(),
        line,
        msg: format!("bad number {tok:?}: {e}"),
    })
}

fn parse_usize(file: &str, line: usize, tok: &str) -> Result<usize, DataError> {
    tok.parse::<usize>().map_err(|e| DataError::SchemaMismatch {
        file: file.to_string(),
        line,
        msg: format!("bad integer {tok:?}: {e}"),
    })
}

/// Non-comment, non-blank lines with their 1-based line numbers.
struct Lines<'a> {
    file: String,
    items: Vec<(usize, &'a str)>,
    cursor: usize,
}

impl<'a> Lines<'a> {
    fn new(file: &str, text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Lines { file: file.to_string(), items, cursor: 0 }
    }

    fn next(&mut self) -> Result<(usize, &'a str), DataError> {
        let item = self.items.get(self.cursor).copied().ok_or_else(|| DataError::SchemaMismatch {
            file: self.file.clone(),
            line: self.items.last().map(|(n, _)| *n).unwrap_or(0) + 1,
            msg: "unexpected end of file".to_string(),
        })?;
        self.cursor += 1;
        Ok(item)
    }

    fn expect_key(&mut self, key: &str) -> Result<(usize, Vec<&'a str>), DataError> {
        let (line, text) = self.next()?;
        let mut toks = text.split_whitespace();
        let head = toks.next().unwrap_or("");
        if head != key {
            return Err(DataError::SchemaMismatch {
                file: self.file.clone(),
                line,
                msg: format!("expected {key:?}, found {head:?}"),
            });
        }
        Ok((line, toks.collect()))
    }

    fn done(&self) -> bool {
        self.cursor >= self.items.len()
    }
}

/// Parsed contents of a group data file.
#[derive(Clone, Debug)]
pub struct GroupDataSpec {
    pub name: GroupName,
    pub expected_order: usize,
    pub generators: Vec<RotationMatrix>,
}

fn group_file_name(name: GroupName) -> String {
    format!("group_{}.txt", name.letter().to_lowercase())
}

fn irreps_file_name(name: GroupName) -> String {
    format!("irreps_{}.txt", name.letter().to_lowercase())
}

fn bundled_group_text(name: GroupName) -> &'static str {
    match name {
        GroupName::Tetrahedral => BUNDLED_GROUP_T,
        GroupName::Octahedral => BUNDLED_GROUP_O,
        GroupName::Icosahedral => BUNDLED_GROUP_I,
    }
}

fn bundled_irreps_text(name: GroupName) -> &'static str {
    match name {
        GroupName::Tetrahedral => BUNDLED_IRREPS_T,
        GroupName::Octahedral => BUNDLED_IRREPS_O,
        GroupName::Icosahedral => BUNDLED_IRREPS_I,
    }
}

/// Raw text of a data file: the override directory when set, the compiled-in
/// default otherwise. Returns the text and a label for error messages.
fn data_text(file_name: &str, bundled: &'static str) -> Result<(String, String), DataError> {
    if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        let path = Path::new(&dir).join(file_name);
        let text = std::fs::read_to_string(&path).map_err(|e| DataError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Ok((text, path.display().to_string()))
    } else {
        Ok((bundled.to_string(), format!("bundled:{file_name}")))
    }
}

/// Checksums (FNV-1a of the raw bytes) of the group and irrep data files
/// that the loaders would currently read for `name`.
pub fn data_checksums(name: GroupName) -> Result<(u64, u64), DataError> {
    let (g, _) = data_text(&group_file_name(name), bundled_group_text(name))?;
    let (i, _) = data_text(&irreps_file_name(name), bundled_irreps_text(name))?;
    Ok((fnv1a64(g.as_bytes()), fnv1a64(i.as_bytes())))
}

pub fn parse_group_file(file: &str, text: &str) -> Result<GroupDataSpec, DataError> {
    let mut lines = Lines::new(file, text);
    let (line, toks) = lines.expect_key("schema")?;
    if toks != ["1"] {
        return Err(DataError::SchemaMismatch {
            file: file.to_string(),
            line,
            msg: format!("unsupported schema {toks:?}"),
        });
    }
    let (line, toks) = lines.expect_key("group")?;
    let name = toks
        .first()
        .and_then(|t| GroupName::parse(t))
        .ok_or_else(|| DataError::SchemaMismatch {
            file: file.to_string(),
            line,
            msg: "unknown group name".to_string(),
        })?;
    let (line, toks) = lines.expect_key("order")?;
    let expected_order = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
    let (line, toks) = lines.expect_key("generators")?;
    let n_gen = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
    let mut generators = Vec::with_capacity(n_gen);
    for _ in 0..n_gen {
        lines.expect_key("generator")?;
        let mut entries = [[0.0; 3]; 3];
        for row in &mut entries {
            let (line, text) = lines.next()?;
            let toks: Vec<&str> = text.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(DataError::SchemaMismatch {
                    file: file.to_string(),
                    line,
                    msg: format!("expected 3 numbers, found {}", toks.len()),
                });
            }
            for (slot, tok) in row.iter_mut().zip(&toks) {
                *slot = parse_f64(file, line, tok)?;
            }
        }
        let r = RotationMatrix::new(entries).map_err(DataError::Group)?;
        generators.push(r);
    }
    lines.expect_key("end")?;
    Ok(GroupDataSpec { name, expected_order, generators })
}

pub fn write_group_file(spec: &GroupDataSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# Rotation group {}: generator matrices (row-major) and group order.\n",
        spec.name
    ));
    out.push_str("schema 1\n");
    out.push_str(&format!("group {}\n", spec.name));
    out.push_str(&format!("order {}\n", spec.expected_order));
    out.push_str(&format!("generators {}\n", spec.generators.len()));
    for g in &spec.generators {
        out.push_str("generator\n");
        for row in g.entries() {
            let cells: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

/// Loads the generator data for `name`.
pub fn load_group_data(name: GroupName) -> Result<GroupDataSpec, DataError> {
    let file_name = group_file_name(name);
    let (text, label) = data_text(&file_name, bundled_group_text(name))?;
    let spec = parse_group_file(&label, &text)?;
    if spec.name != name {
        return Err(DataError::Validation {
            file: label,
            msg: format!("file declares group {}, expected {}", spec.name, name),
        });
    }
    Ok(spec)
}

/// One irrep as stored on disk: generator images plus element words.
#[derive(Clone, Debug)]
pub struct IrrepFileEntry {
    pub p: usize,
    pub label: String,
    pub dim: usize,
    pub generator_images: Vec<CMat>,
    pub words: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct IrrepFileSpec {
    pub group: GroupName,
    pub entries: Vec<IrrepFileEntry>,
}

pub fn parse_irreps_file(file: &str, text: &str) -> Result<IrrepFileSpec, DataError> {
    let mut lines = Lines::new(file, text);
    let (line, toks) = lines.expect_key("schema")?;
    if toks != ["1"] {
        return Err(DataError::SchemaMismatch {
            file: file.to_string(),
            line,
            msg: format!("unsupported schema {toks:?}"),
        });
    }
    let (line, toks) = lines.expect_key("group")?;
    let group = toks
        .first()
        .and_then(|t| GroupName::parse(t))
        .ok_or_else(|| DataError::SchemaMismatch {
            file: file.to_string(),
            line,
            msg: "unknown group name".to_string(),
        })?;
    let (line, toks) = lines.expect_key("irreps")?;
    let n_irreps = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
    let mut entries = Vec::with_capacity(n_irreps);
    for _ in 0..n_irreps {
        lines.expect_key("irrep")?;
        let (line, toks) = lines.expect_key("p")?;
        let p = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
        let (_, toks) = lines.expect_key("label")?;
        let label = toks.first().copied().unwrap_or("?").to_string();
        let (line, toks) = lines.expect_key("dim")?;
        let dim = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
        let (line, toks) = lines.expect_key("gens")?;
        let n_gen = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
        let mut generator_images = Vec::with_capacity(n_gen);
        for _ in 0..n_gen {
            lines.expect_key("gen")?;
            let mut m = CMat::zeros(dim, dim);
            for i in 0..dim {
                let (line, text) = lines.next()?;
                let toks: Vec<&str> = text.split_whitespace().collect();
                if toks.len() != 2 * dim {
                    return Err(DataError::SchemaMismatch {
                        file: file.to_string(),
                        line,
                        msg: format!("expected {} numbers, found {}", 2 * dim, toks.len()),
                    });
                }
                for j in 0..dim {
                    let re = parse_f64(file, line, toks[2 * j])?;
                    let im = parse_f64(file, line, toks[2 * j + 1])?;
                    m.set(i, j, Complex64::new(re, im));
                }
            }
            generator_images.push(m);
        }
        let (line, toks) = lines.expect_key("words")?;
        let n_words = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
        let mut words = vec![Vec::new(); n_words];
        for expect_idx in 0..n_words {
            let (line, toks) = lines.expect_key("word")?;
            if toks.is_empty() {
                return Err(DataError::SchemaMismatch {
                    file: file.to_string(),
                    line,
                    msg: "word line missing element index".to_string(),
                });
            }
            let idx = parse_usize(file, line, toks[0])?;
            if idx != expect_idx {
                return Err(DataError::SchemaMismatch {
                    file: file.to_string(),
                    line,
                    msg: format!("word index {idx} out of order (expected {expect_idx})"),
                });
            }
            let mut w = Vec::with_capacity(toks.len() - 1);
            for tok in &toks[1..] {
                w.push(parse_usize(file, line, tok)?);
            }
            words[idx] = w;
        }
        entries.push(IrrepFileEntry { p, label, dim, generator_images, words });
    }
    lines.expect_key("end")?;
    Ok(IrrepFileSpec { group, entries })
}

pub fn write_irreps_file(spec: &IrrepFileSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# Complex unitary irreps of {}: generator images and per-element generator words.\n",
        spec.group
    ));
    out.push_str("schema 1\n");
    out.push_str(&format!("group {}\n", spec.group));
    out.push_str(&format!("irreps {}\n", spec.entries.len()));
    for e in &spec.entries {
        out.push_str("irrep\n");
        out.push_str(&format!("p {}\n", e.p));
        out.push_str(&format!("label {}\n", e.label));
        out.push_str(&format!("dim {}\n", e.dim));
        out.push_str(&format!("gens {}\n", e.generator_images.len()));
        for m in &e.generator_images {
            out.push_str("gen\n");
            for i in 0..e.dim {
                let mut cells = Vec::with_capacity(2 * e.dim);
                for j in 0..e.dim {
                    let v = m.get(i, j);
                    cells.push(format_f64(v.re));
                    cells.push(format_f64(v.im));
                }
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
        }
        out.push_str(&format!("words {}\n", e.words.len()));
        for (idx, w) in e.words.iter().enumerate() {
            out.push_str(&format!("word {idx}"));
            for g in w {
                out.push_str(&format!(" {g}"));
            }
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

/// Loads, expands and validates the irreps of `group`: generator images are
/// multiplied out along the stored words, the words are checked against the
/// group's own rotations, and each family must be unitary and homomorphic
/// over the full multiplication table.
pub fn load_irrep_data(group: &FiniteRotationGroup) -> Result<Vec<Irrep>, DataError> {
    let file_name = irreps_file_name(group.name);
    let (text, label) = data_text(&file_name, bundled_irreps_text(group.name))?;
    let spec = parse_irreps_file(&label, &text)?;
    if spec.group != group.name {
        return Err(DataError::Validation {
            file: label,
            msg: format!("file declares group {}, expected {}", spec.group, group.name),
        });
    }
    let n = group.order();
    // Generator rotations by generator id (the length-1 words of the group).
    let mut gen_rotations: Vec<Option<&RotationMatrix>> = Vec::new();
    for e in &group.elements {
        if e.word.len() == 1 {
            let id = e.word[0];
            if gen_rotations.len() <= id {
                gen_rotations.resize(id + 1, None);
            }
            gen_rotations[id] = Some(&e.rotation);
        }
    }
    let mut irreps = Vec::with_capacity(spec.entries.len());
    for entry in spec.entries {
        if entry.words.len() != n {
            return Err(DataError::Validation {
                file: label.clone(),
                msg: format!(
                    "irrep p={} carries {} words for a group of order {n}",
                    entry.p,
                    entry.words.len()
                ),
            });
        }
        // Words must reproduce the group's own rotations element by element.
        for (idx, word) in entry.words.iter().enumerate() {
            let mut acc = RotationMatrix::identity();
            for &gid in word {
                let gen = gen_rotations.get(gid).copied().flatten().ok_or_else(|| {
                    DataError::Validation {
                        file: label.clone(),
                        msg: format!("word for element {idx} names unknown generator {gid}"),
                    }
                })?;
                acc = acc.mul(gen);
            }
            if acc.max_abs_diff(&group.elements[idx].rotation) > crate::group::MATCH_TOL {
                return Err(DataError::Validation {
                    file: label.clone(),
                    msg: format!("word for element {idx} does not reproduce its rotation"),
                });
            }
        }
        let mut matrices = Vec::with_capacity(n);
        for word in &entry.words {
            let mut acc = CMat::identity(entry.dim);
            for &gid in word {
                let img = entry.generator_images.get(gid).ok_or_else(|| DataError::Validation {
                    file: label.clone(),
                    msg: format!("irrep p={} has no image for generator {gid}", entry.p),
                })?;
                acc = acc.mul(img);
            }
            matrices.push(acc);
        }
        for (g, m) in matrices.iter().enumerate() {
            let defect = m.unitarity_defect();
            if defect > 1e-10 {
                return Err(DataError::Validation {
                    file: label.clone(),
                    msg: format!("irrep p={} element {g} unitarity defect {defect:.3e}", entry.p),
                });
            }
        }
        for g in 0..n {
            for h in 0..n {
                let defect = matrices[g].mul(&matrices[h]).max_abs_diff(&matrices[group.mul(g, h)]);
                if defect > 1e-10 {
                    return Err(DataError::Validation {
                        file: label.clone(),
                        msg: format!(
                            "irrep p={} homomorphism defect {defect:.3e} at ({g},{h})",
                            entry.p
                        ),
                    });
                }
            }
        }
        irreps.push(Irrep {
            group: group.name,
            p: entry.p,
            label: entry.label,
            dim: entry.dim,
            matrices,
            realness: Realness::Unclassified,
        });
    }
    irreps.sort_by_key(|i| i.p);
    for (idx, irrep) in irreps.iter().enumerate() {
        if irrep.p != idx + 1 {
            return Err(DataError::Validation {
                file: label,
                msg: format!("irrep indices are not 1..{}", irreps.len()),
            });
        }
    }
    Ok(irreps)
}

/// What a coefficient file stores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    /// A basis-function coefficient block.
    Block,
    /// A similarity matrix S (complex d x d).
    Similarity,
    /// A stack of realified irrep matrices ((N_g d) x d, real).
    RealIrrep,
}

impl TableKind {
    fn as_str(&self) -> &'static str {
        match self {
            TableKind::Block => "block",
            TableKind::Similarity => "similarity",
            TableKind::RealIrrep => "real_irrep",
        }
    }

    fn parse(s: &str) -> Option<TableKind> {
        match s {
            "block" => Some(TableKind::Block),
            "similarity" => Some(TableKind::Similarity),
            "real_irrep" => Some(TableKind::RealIrrep),
            _ => None,
        }
    }
}

/// In-memory form of a coefficient file.
#[derive(Clone, Debug)]
pub struct CoefficientFile {
    pub schema_version: usize,
    pub kind: TableKind,
    pub tool: String,
    pub group: GroupName,
    pub p: usize,
    pub l: usize,
    pub n: usize,
    pub flavor: Flavor,
    pub matrix: CMat,
    /// (label, fnv1a64 hex) pairs recording the data files used.
    pub provenance: Vec<(String, String)>,
}

pub const TOOL_VERSION: &str = concat!("symharm ", env!("CARGO_PKG_VERSION"));

impl CoefficientFile {
    /// Wraps a basis block, attaching provenance checksums of the bundled
    /// data currently in effect.
    pub fn from_block(block: &CoefficientBlock) -> Result<Self, DataError> {
        let (gsum, isum) = data_checksums(block.group)?;
        Ok(CoefficientFile {
            schema_version: 1,
            kind: TableKind::Block,
            tool: TOOL_VERSION.to_string(),
            group: block.group,
            p: block.p,
            l: block.l,
            n: block.n,
            flavor: block.flavor,
            matrix: block.complex_matrix(),
            provenance: vec![
                ("group_data".to_string(), format!("{gsum:016x}")),
                ("irrep_data".to_string(), format!("{isum:016x}")),
            ],
        })
    }

    pub fn from_matrix(
        kind: TableKind,
        group: GroupName,
        p: usize,
        matrix: CMat,
        flavor: Flavor,
    ) -> Result<Self, DataError> {
        let (gsum, isum) = data_checksums(group)?;
        Ok(CoefficientFile {
            schema_version: 1,
            kind,
            tool: TOOL_VERSION.to_string(),
            group,
            p,
            l: 0,
            n: 0,
            flavor,
            matrix,
            provenance: vec![
                ("group_data".to_string(), format!("{gsum:016x}")),
                ("irrep_data".to_string(), format!("{isum:016x}")),
            ],
        })
    }

    /// Reinterprets a `block` table as a [`CoefficientBlock`].
    pub fn to_block(&self) -> Option<CoefficientBlock> {
        if self.kind != TableKind::Block {
            return None;
        }
        let matrix = match self.flavor {
            Flavor::RealCheckY => BlockMatrix::Real(self.matrix.real_part()),
            Flavor::ComplexY => BlockMatrix::Complex(self.matrix.clone()),
        };
        Some(CoefficientBlock {
            group: self.group,
            p: self.p,
            l: self.l,
            n: self.n,
            flavor: self.flavor,
            matrix,
        })
    }
}

fn matrix_lines(m: &CMat) -> Vec<String> {
    (0..m.rows())
        .map(|i| {
            let mut cells = Vec::with_capacity(2 * m.cols());
            for j in 0..m.cols() {
                let v = m.get(i, j);
                cells.push(format_f64(v.re));
                cells.push(format_f64(v.im));
            }
            format!("row {}", cells.join(" "))
        })
        .collect()
}

fn matrix_checksum(lines: &[String]) -> u64 {
    let mut joined = String::new();
    for l in lines {
        joined.push_str(l);
        joined.push('\n');
    }
    fnv1a64(joined.as_bytes())
}

/// Renders a coefficient file to its canonical text form.
pub fn render_coefficient_file(cf: &CoefficientFile) -> String {
    let lines = matrix_lines(&cf.matrix);
    let checksum = matrix_checksum(&lines);
    let mut out = String::new();
    out.push_str(&format!("schema {}\n", cf.schema_version));
    out.push_str(&format!("kind {}\n", cf.kind.as_str()));
    out.push_str(&format!("tool {}\n", cf.tool));
    out.push_str(&format!("group {}\n", cf.group));
    out.push_str(&format!("p {}\n", cf.p));
    out.push_str(&format!("l {}\n", cf.l));
    out.push_str(&format!("n {}\n", cf.n));
    out.push_str(&format!("flavor {}\n", cf.flavor.as_str()));
    out.push_str(&format!("rows {}\n", cf.matrix.rows()));
    out.push_str(&format!("cols {}\n", cf.matrix.cols()));
    for (key, value) in &cf.provenance {
        out.push_str(&format!("provenance {key} {value}\n"));
    }
    for l in &lines {
        out.push_str(l);
        out.push('\n');
    }
    out.push_str(&format!("checksum {checksum:016x}\n"));
    out
}

/// Writes a coefficient file to `path`.
pub fn save_coefficient_file(path: &Path, cf: &CoefficientFile) -> Result<(), DataError> {
    std::fs::write(path, render_coefficient_file(cf)).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Convenience wrapper used by the CLI: saves one basis block.
pub fn save_block(path: &Path, block: &CoefficientBlock) -> Result<(), DataError> {
    save_coefficient_file(path, &CoefficientFile::from_block(block)?)
}

/// Parses a coefficient file, verifying the matrix checksum.
pub fn parse_coefficient_file(file: &str, text: &str) -> Result<CoefficientFile, DataError> {
    let mut lines = Lines::new(file, text);
    let (line, toks) = lines.expect_key("schema")?;
    let schema_version = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
    if schema_version != 1 {
        return Err(DataError::SchemaMismatch {
            file: file.to_string(),
            line,
            msg: format!("unsupported schema {schema_version}"),
        });
    }
    let (line, toks) = lines.expect_key("kind")?;
    let kind = toks
        .first()
        .and_then(|t| TableKind::parse(t))
        .ok_or_else(|| DataError::SchemaMismatch {
            file: file.to_string(),
            line,
            msg: "unknown kind".to_string(),
        })?;
    let (_, toks) = lines.expect_key("tool")?;
    let tool = toks.join(" ");
    let (line, toks) = lines.expect_key("group")?;
    let group = toks
        .first()
        .and_then(|t| GroupName::parse(t))
        .ok_or_else(|| DataError::SchemaMismatch {
            file: file.to_string(),
            line,
            msg: "unknown group name".to_string(),
        })?;
    let (line, toks) = lines.expect_key("p")?;
    let p = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
    let (line, toks) = lines.expect_key("l")?;
    let l = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
    let (line, toks) = lines.expect_key("n")?;
    let n = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
    let (line, toks) = lines.expect_key("flavor")?;
    let flavor = toks
        .first()
        .and_then(|t| Flavor::parse(t))
        .ok_or_else(|| DataError::SchemaMismatch {
            file: file.to_string(),
            line,
            msg: "unknown flavor".to_string(),
        })?;
    let (line, toks) = lines.expect_key("rows")?;
    let rows = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
    let (line, toks) = lines.expect_key("cols")?;
    let cols = parse_usize(file, line, toks.first().copied().unwrap_or(""))?;
    let mut provenance = Vec::new();
    let mut matrix = CMat::zeros(rows, cols);
    let mut raw_rows: Vec<String> = Vec::with_capacity(rows);
    let mut row_idx = 0;
    loop {
        let (line, text) = lines.next()?;
        let mut toks = text.split_whitespace();
        match toks.next().unwrap_or("") {
            "provenance" => {
                let key = toks.next().unwrap_or("").to_string();
                let value = toks.next().unwrap_or("").to_string();
                provenance.push((key, value));
            }
            "row" => {
                if row_idx >= rows {
                    return Err(DataError::SchemaMismatch {
                        file: file.to_string(),
                        line,
                        msg: "more rows than declared".to_string(),
                    });
                }
                let cells: Vec<&str> = toks.collect();
                if cells.len() != 2 * cols {
                    return Err(DataError::SchemaMismatch {
                        file: file.to_string(),
                        line,
                        msg: format!("expected {} numbers, found {}", 2 * cols, cells.len()),
                    });
                }
                for j in 0..cols {
                    let re = parse_f64(file, line, cells[2 * j])?;
                    let im = parse_f64(file, line, cells[2 * j + 1])?;
                    matrix.set(row_idx, j, Complex64::new(re, im));
                }
                raw_rows.push(text.to_string());
                row_idx += 1;
            }
            "checksum" => {
                if row_idx != rows {
                    return Err(DataError::SchemaMismatch {
                        file: file.to_string(),
                        line,
                        msg: format!("declared {rows} rows, found {row_idx}"),
                    });
                }
                let declared = toks.next().unwrap_or("");
                let declared = u64::from_str_radix(declared, 16).map_err(|_| {
                    DataError::SchemaMismatch {
                        file: file.to_string(),
                        line,
                        msg: "bad checksum literal".to_string(),
                    }
                })?;
                let actual = matrix_checksum(&raw_rows);
                if actual != declared {
                    return Err(DataError::ChecksumMismatch { file: file.to_string() });
                }
                if !lines.done() {
                    return Err(DataError::SchemaMismatch {
                        file: file.to_string(),
                        line: line + 1,
                        msg: "trailing content after checksum".to_string(),
                    });
                }
                return Ok(CoefficientFile {
                    schema_version,
                    kind,
                    tool,
                    group,
                    p,
                    l,
                    n,
                    flavor,
                    matrix,
                    provenance,
                });
            }
            other => {
                return Err(DataError::SchemaMismatch {
                    file: file.to_string(),
                    line,
                    msg: format!("unexpected key {other:?}"),
                });
            }
        }
    }
}

/// Loads a coefficient file from disk.
pub fn load_coefficient_file(path: &Path) -> Result<CoefficientFile, DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_coefficient_file(&path.display().to_string(), &text)
}

/// Loads a block table from disk.
pub fn load_block(path: &Path) -> Result<CoefficientBlock, DataError> {
    let cf = load_coefficient_file(path)?;
    cf.to_block().ok_or_else(|| DataError::Validation {
        file: path.display().to_string(),
        msg: format!("file holds a {:?} table, not a block", cf.kind),
    })
}

/// Evaluation grid: `n_theta` rows from pole to pole inclusive, `n_phi`
/// uniformly spaced azimuth columns.
pub fn eval_grid(n_theta: usize, n_phi: usize) -> Vec<SphericalAngles> {
    assert!(n_theta >= 2 && n_phi >= 1);
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            out.push(SphericalAngles::new(theta, phi));
        }
    }
    out
}

/// Tabulates a block on an evaluation grid as RFC-4180 style CSV (comma
/// separated, dot decimal, LF line endings): columns
/// `theta,phi,f_1,...,f_{d_p}`.
pub fn eval_csv(
    block: &CoefficientBlock,
    n_theta: usize,
    n_phi: usize,
) -> Result<String, crate::harmonics::DegreeOutOfRange> {
    let mut out = String::new();
    out.push_str("theta,phi");
    for j in 1..=block.dim() {
        out.push_str(&format!(",f_{j}"));
    }
    out.push('\n');
    for angles in eval_grid(n_theta, n_phi) {
        let values = crate::basis::evaluate_basis(block, angles)?;
        out.push_str(&format_f64(angles.theta));
        out.push(',');
        out.push_str(&format_f64(angles.phi));
        for v in values {
            out.push(',');
            out.push_str(&format_f64(v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Radial surface parameters: the radius at direction x is
/// `kappa1 + kappa2 * F_j(x)`, kept inside [0.5, 1].
#[derive(Clone, Copy, Debug)]
pub struct MeshSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl MeshSpec {
    /// Chooses `kappa1 = 0.75` and `kappa2 = 0.25 / max |F_j|` over the grid,
    /// which maps the radius exactly into [0.5, 1].
    pub fn for_block(
        block: &CoefficientBlock,
        j: usize,
        n_theta: usize,
        n_phi: usize,
    ) -> Result<MeshSpec, crate::harmonics::DegreeOutOfRange> {
        assert!(n_theta >= 16, "mesh grid too coarse");
        let mut max_abs: f64 = 0.0;
        for angles in eval_grid(n_theta, n_phi) {
            let v = crate::basis::evaluate_basis(block, angles)?[j];
            max_abs = max_abs.max(v.abs());
        }
        let kappa2 = if max_abs > 0.0 { 0.25 / max_abs } else { 0.0 };
        Ok(MeshSpec { n_theta, n_phi, kappa1: 0.75, kappa2 })
    }
}

/// Radii of the surface on the evaluation grid, row i = theta index.
pub fn radius_grid(
    block: &CoefficientBlock,
    j: usize,
    spec: &MeshSpec,
) -> Result<RMat, crate::harmonics::DegreeOutOfRange> {
    let mut grid = RMat::zeros(spec.n_theta, spec.n_phi);
    for (idx, angles) in eval_grid(spec.n_theta, spec.n_phi).into_iter().enumerate() {
        let v = crate::basis::evaluate_basis(block, angles)?[j];
        let r = spec.kappa1 + spec.kappa2 * v;
        assert!((0.5 - 1e-9..=1.0 + 1e-9).contains(&r), "radius {r} escaped [0.5, 1]");
        grid.set(idx / spec.n_phi, idx % spec.n_phi, r);
    }
    Ok(grid)
}

/// Triangulated OBJ surface of the radius grid. The two pole rows collapse
/// to single vertices, interior rows wrap in phi, and every face is a
/// triangle, so the mesh is watertight.
pub fn obj_from_radius_grid(grid: &RMat, spec: &MeshSpec) -> String {
    let (nt, np) = (spec.n_theta, spec.n_phi);
    let mut out = String::new();
    out.push_str("# radial surface r(theta, phi) = kappa1 + kappa2 * F\n");
    let mut index = vec![vec![0usize; np]; nt];
    let mut next = 1usize; // OBJ indices are 1-based
    let mut push_vertex = |out: &mut String, theta: f64, phi: f64, r: f64| -> usize {
        let a = SphericalAngles::new(theta, phi);
        let v = a.to_unit_vector();
        out.push_str(&format!(
            "v {} {} {}\n",
            format_f64(r * v[0]),
            format_f64(r * v[1]),
            format_f64(r * v[2])
        ));
        let id = next;
        next += 1;
        id
    };
    for i in 0..nt {
        let theta = std::f64::consts::PI * i as f64 / (nt - 1) as f64;
        if i == 0 || i == nt - 1 {
            let id = push_vertex(&mut out, theta, 0.0, grid.get(i, 0));
            for j in 0..np {
                index[i][j] = id;
            }
        } else {
            for j in 0..np {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / np as f64;
                index[i][j] = push_vertex(&mut out, theta, phi, grid.get(i, j));
            }
        }
    }
    for i in 0..(nt - 1) {
        for j in 0..np {
            let jn = (j + 1) % np;
            let (a, b, c, d) = (index[i][j], index[i][jn], index[i + 1][jn], index[i + 1][j]);
            if i == 0 {
                out.push_str(&format!("f {a} {c} {d}\n"));
            } else if i == nt - 2 {
                out.push_str(&format!("f {a} {b} {c}\n"));
            } else {
                out.push_str(&format!("f {a} {b} {c}\n"));
                out.push_str(&format!("f {a} {c} {d}\n"));
            }
        }
    }
    out
}

/// Grid coordinates (theta index, phi index) of one extremum.
pub type GridPoint = (usize, usize);

/// Grid-local strict extrema of the radius grid, with phi wraparound.
/// Returns (maxima, minima); each pole row contributes at most one
/// candidate.
pub fn local_extrema(grid: &RMat) -> (Vec<GridPoint>, Vec<GridPoint>) {
    let (nt, np) = (grid.rows(), grid.cols());
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let neighbors = |i: usize, j: usize| -> Vec<f64> {
        let mut out = Vec::new();
        if i == 0 || i == nt - 1 {
            // Poles: the adjacent ring.
            let ring = if i == 0 { 1 } else { nt - 2 };
            for jj in 0..np {
                out.push(grid.get(ring, jj));
            }
            return out;
        }
        for di in [-1i64, 0, 1] {
            for dj in [-1i64, 0, 1] {
                if di == 0 && dj == 0 {
                    continue;
                }
                let ii = i as i64 + di;
                let jj = (j as i64 + dj).rem_euclid(np as i64) as usize;
                if ii < 0 || ii >= nt as i64 {
                    continue;
                }
                out.push(grid.get(ii as usize, jj));
            }
        }
        out
    };
    for i in 0..nt {
        let js: Vec<usize> = if i == 0 || i == nt - 1 { vec![0] } else { (0..np).collect() };
        for j in js {
            let v = grid.get(i, j);
            let nb = neighbors(i, j);
            if nb.iter().all(|&x| v > x) {
                maxima.push((i, j));
            } else if nb.iter().all(|&x| v < x) {
                minima.push((i, j));
            }
        }
    }
    (maxima, minima)
}
