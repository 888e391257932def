//! Versioned JSON files for flocks (`.flock.json`), H-modules (`.hmod.json`)
//! and bimodules (`.bimod.json`).
//!
//! Matrices are `{"rows", "cols", "entries"}` with row-major entries;
//! elements are integers over GF(p) and `"n/d"` strings over Q. Emission is
//! canonical, so emit, parse, emit reproduces the same bytes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::exactlin::{FieldSpec, LinError, Mat};
use crate::flock::{FlockDatum, FlockParts};
use crate::herdoid::HCategory;
use crate::lincat::{FinLinCat, Module, ShapeError};

pub const FLOCK_FORMAT: &str = "herd-flock/1";
pub const HMODULE_FORMAT: &str = "herd-hmodule/1";
pub const BIMODULE_FORMAT: &str = "herd-bimodule/1";
pub const CATEGORY_FORMAT: &str = "herd-category/1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format '{found}' (expected '{expected}')")]
    Version { found: String, expected: String },
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("{0}")]
    Invalid(String),
    #[error("module belongs to instance {found}, not {expected}")]
    Mismatch { found: String, expected: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Indexed {
    at: Vec<usize>,
    matrix: MatrixJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlockFile {
    format: String,
    field: String,
    objects: Vec<String>,
    homdims: Vec<usize>,
    composition: Vec<Indexed>,
    identities: Vec<MatrixJson>,
    tau: Vec<usize>,
    tau_hom: Vec<Indexed>,
    sigma: Vec<MatrixJson>,
    #[serde(default)]
    rho: Option<Vec<MatrixJson>>,
    #[serde(default)]
    s_hom: Option<Vec<MatrixJson>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryFile {
    format: String,
    field: String,
    instance_sha256: String,
    objects: Vec<String>,
    homdims: Vec<usize>,
    composition: Vec<Indexed>,
    identities: Vec<MatrixJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleJson {
    format: String,
    field: String,
    instance_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    operation: Option<String>,
    #[serde(default)]
    inputs: Vec<String>,
    valdim: Vec<usize>,
    actions: Vec<Indexed>,
}

fn mat_json(m: &Mat) -> MatrixJson {
    let k = m.field();
    MatrixJson { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().map(|x| k.elem_to_json(x)).collect() }
}

fn mat_parse(k: FieldSpec, j: &MatrixJson) -> Result<Mat, FormatError> {
    let data = j.entries.iter().map(|v| k.elem_from_json(v)).collect::<Result<Vec<_>, _>>()?;
    Ok(Mat::from_entries(k, j.rows, j.cols, data)?)
}

fn nonempty(m: &Mat) -> bool {
    m.rows() > 0 && m.cols() > 0
}

/// Fill a dense table from sparse `at`-indexed entries; absent entries are
/// zero matrices of the expected shape.
fn dense(
    k: FieldSpec,
    what: &str,
    arity: usize,
    n: usize,
    listed: &[Indexed],
    shape: impl Fn(&[usize]) -> (usize, usize),
) -> Result<Vec<Mat>, FormatError> {
    let size = n.pow(arity as u32);
    let mut out: Vec<Option<Mat>> = vec![None; size];
    for e in listed {
        if e.at.len() != arity || e.at.iter().any(|&i| i >= n) {
            return Err(FormatError::Invalid(format!("{what}: bad index {:?}", e.at)));
        }
        let idx = e.at.iter().fold(0, |acc, &i| acc * n + i);
        if out[idx].is_some() {
            return Err(FormatError::Invalid(format!("{what}: duplicate entry {:?}", e.at)));
        }
        out[idx] = Some(mat_parse(k, &e.matrix)?);
    }
    let mut digits = vec![0; arity];
    let mut result = Vec::with_capacity(size);
    for (idx, m) in out.into_iter().enumerate() {
        let mut r = idx;
        for d in (0..arity).rev() {
            digits[d] = r % n;
            r /= n;
        }
        result.push(match m {
            Some(m) => m,
            None => {
                let (rows, cols) = shape(&digits);
                Mat::zeros(k, rows, cols)
            }
        });
    }
    Ok(result)
}

fn sparse(n: usize, arity: usize, table: impl Fn(&[usize]) -> Mat) -> Vec<Indexed> {
    let mut out = Vec::new();
    let mut digits = vec![0; arity];
    for idx in 0..n.pow(arity as u32) {
        let mut r = idx;
        for d in (0..arity).rev() {
            digits[d] = r % n;
            r /= n;
        }
        let m = table(&digits);
        if nonempty(&m) {
            out.push(Indexed { at: digits.clone(), matrix: mat_json(&m) });
        }
    }
    out
}

/// One line per top-level key; list values get one element per line.
struct Emitter {
    out: String,
    first: bool,
}

impl Emitter {
    fn new() -> Self {
        Emitter { out: "{\n".into(), first: true }
    }

    fn sep(&mut self) {
        if !self.first {
            self.out.push_str(",\n");
        }
        self.first = false;
    }

    fn field<T: Serialize>(&mut self, key: &str, v: &T) {
        self.sep();
        let _ = write!(self.out, "  \"{key}\": {}", serde_json::to_string(v).expect("serializable"));
    }

    fn list<T: Serialize>(&mut self, key: &str, items: &[T]) {
        self.sep();
        if items.is_empty() {
            let _ = write!(self.out, "  \"{key}\": []");
            return;
        }
        let _ = writeln!(self.out, "  \"{key}\": [");
        for (i, it) in items.iter().enumerate() {
            let comma = if i + 1 < items.len() { "," } else { "" };
            let _ = writeln!(self.out, "    {}{comma}", serde_json::to_string(it).expect("serializable"));
        }
        self.out.push_str("  ]");
    }

    fn finish(mut self) -> String {
        self.out.push_str("\n}\n");
        self.out
    }
}

pub fn emit_flock(f: &FlockDatum) -> String {
    let a = f.category();
    let n = a.n();
    let mut e = Emitter::new();
    e.field("format", &FLOCK_FORMAT);
    e.field("field", &f.field().to_string());
    e.field("objects", &a.objects());
    e.field("homdims", &(0..n * n).map(|i| a.homdim(i / n, i % n)).collect::<Vec<_>>());
    e.list("composition", &sparse(n, 3, |t| a.comp(t[0], t[1], t[2]).clone()));
    e.list("identities", &(0..n).map(|x| mat_json(a.ident(x))).collect::<Vec<_>>());
    e.field("tau", &(0..n * n * n).map(|i| f.tau(i / (n * n), i / n % n, i % n)).collect::<Vec<_>>());
    e.list("tau_hom", &sparse(n, 6, |t| f.tau_hom([t[0], t[1], t[2], t[3], t[4], t[5]]).clone()));
    e.list("sigma", &(0..n * n).map(|i| mat_json(f.sigma(i / n, i % n))).collect::<Vec<_>>());
    let parts = f.to_parts();
    if let Some(rho) = &parts.rho {
        e.list("rho", &rho.iter().map(mat_json).collect::<Vec<_>>());
    }
    if let Some(s) = &parts.s_hom {
        e.list("s_hom", &s.iter().map(mat_json).collect::<Vec<_>>());
    }
    e.finish()
}

fn expect_format(found: &str, expected: &str) -> Result<(), FormatError> {
    if found != expected {
        return Err(FormatError::Version { found: found.into(), expected: expected.into() });
    }
    Ok(())
}

pub fn parse_flock(text: &str) -> Result<FlockDatum, FormatError> {
    let file: FlockFile = serde_json::from_str(text)?;
    expect_format(&file.format, FLOCK_FORMAT)?;
    let k: FieldSpec = file.field.parse()?;
    let n = file.objects.len();
    if file.homdims.len() != n * n {
        return Err(FormatError::Invalid(format!("homdims: expected {} entries, found {}", n * n, file.homdims.len())));
    }
    if file.tau.len() != n * n * n {
        return Err(FormatError::Invalid(format!("tau: expected {} entries, found {}", n * n * n, file.tau.len())));
    }
    if let Some(bad) = file.tau.iter().find(|&&t| t >= n) {
        return Err(FormatError::Invalid(format!("tau names object {bad} of {n}")));
    }
    let hd = |a: usize, b: usize| file.homdims[a * n + b];
    let tau = |a: usize, b: usize, c: usize| file.tau[(a * n + b) * n + c];
    let comp = dense(k, "composition", 3, n, &file.composition, |t| (hd(t[0], t[2]), hd(t[0], t[1]) * hd(t[1], t[2])))?;
    let ident = file.identities.iter().map(|m| mat_parse(k, m)).collect::<Result<Vec<_>, _>>()?;
    let category = FinLinCat::new(k, file.objects.clone(), file.homdims.clone(), comp, ident)?;
    let tau_hom = dense(k, "tau_hom", 6, n, &file.tau_hom, |t| {
        (hd(tau(t[0], t[1], t[2]), tau(t[3], t[4], t[5])), hd(t[0], t[3]) * hd(t[4], t[1]) * hd(t[2], t[5]))
    })?;
    let list = |v: &[MatrixJson]| v.iter().map(|m| mat_parse(k, m)).collect::<Result<Vec<_>, _>>();
    let sigma = list(&file.sigma)?;
    let rho = file.rho.as_deref().map(list).transpose()?;
    let s_hom = file.s_hom.as_deref().map(list).transpose()?;
    Ok(FlockDatum::from_parts(FlockParts { category, tau_obj: file.tau.clone(), tau_hom, sigma, rho, s_hom })?)
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Digest of the canonical emission of a flock.
pub fn flock_digest(f: &FlockDatum) -> String {
    sha256_hex(&emit_flock(f))
}

/// A finite linear category, such as H, pinned to the instance it came from.
pub fn emit_category(c: &FinLinCat, instance_sha256: &str) -> String {
    let n = c.n();
    let mut e = Emitter::new();
    e.field("format", &CATEGORY_FORMAT);
    e.field("field", &c.field().to_string());
    e.field("instance_sha256", &instance_sha256);
    e.field("objects", &c.objects());
    e.field("homdims", &(0..n * n).map(|i| c.homdim(i / n, i % n)).collect::<Vec<_>>());
    e.list("composition", &sparse(n, 3, |t| c.comp(t[0], t[1], t[2]).clone()));
    e.list("identities", &(0..n).map(|x| mat_json(c.ident(x))).collect::<Vec<_>>());
    e.finish()
}

/// Returns the category and the instance digest it records.
pub fn parse_category(text: &str) -> Result<(FinLinCat, String), FormatError> {
    let file: CategoryFile = serde_json::from_str(text)?;
    expect_format(&file.format, CATEGORY_FORMAT)?;
    let k: FieldSpec = file.field.parse()?;
    let n = file.objects.len();
    if file.homdims.len() != n * n {
        return Err(FormatError::Invalid(format!("homdims: expected {} entries, found {}", n * n, file.homdims.len())));
    }
    let hd = |a: usize, b: usize| file.homdims[a * n + b];
    let comp = dense(k, "composition", 3, n, &file.composition, |t| (hd(t[0], t[2]), hd(t[0], t[1]) * hd(t[1], t[2])))?;
    let ident = file.identities.iter().map(|m| mat_parse(k, m)).collect::<Result<Vec<_>, _>>()?;
    let c = FinLinCat::new(k, file.objects.clone(), file.homdims.clone(), comp, ident)?;
    Ok((c, file.instance_sha256))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleKind {
    /// A module over H.
    H,
    /// A module over `A^op (x) A`.
    Bimodule,
}

impl ModuleKind {
    fn format(self) -> &'static str {
        match self {
            ModuleKind::H => HMODULE_FORMAT,
            ModuleKind::Bimodule => BIMODULE_FORMAT,
        }
    }
}

/// A module together with the digests pinning where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleFile {
    pub kind: ModuleKind,
    pub instance_sha256: String,
    pub operation: Option<String>,
    pub inputs: Vec<String>,
    pub module: Module,
}

pub fn emit_module(m: &ModuleFile) -> String {
    let base = &m.module.base;
    let n = base.n();
    let mut e = Emitter::new();
    e.field("format", &m.kind.format());
    e.field("field", &base.field().to_string());
    e.field("instance_sha256", &m.instance_sha256);
    if let Some(op) = &m.operation {
        e.field("operation", op);
    }
    e.field("inputs", &m.inputs);
    e.field("valdim", &m.module.valdim);
    e.list("actions", &sparse(n, 2, |t| m.module.act_matrix(t[0], t[1]).clone()));
    e.finish()
}

/// Parse a module file over the H or envelope of `h`, whose instance digest
/// is `digest`.
pub fn parse_module(text: &str, h: &HCategory, digest: &str) -> Result<ModuleFile, FormatError> {
    let file: ModuleJson = serde_json::from_str(text)?;
    let kind = match file.format.as_str() {
        HMODULE_FORMAT => ModuleKind::H,
        BIMODULE_FORMAT => ModuleKind::Bimodule,
        other => {
            return Err(FormatError::Version { found: other.into(), expected: format!("{HMODULE_FORMAT} or {BIMODULE_FORMAT}") })
        }
    };
    if file.instance_sha256 != digest {
        return Err(FormatError::Mismatch { found: file.instance_sha256, expected: digest.into() });
    }
    let base = match kind {
        ModuleKind::H => h.underlying().clone(),
        ModuleKind::Bimodule => h.envelope().clone(),
    };
    let k: FieldSpec = file.field.parse()?;
    if k != base.field() {
        return Err(FormatError::Invalid(format!("module over {k}, instance over {}", base.field())));
    }
    let n = base.n();
    if file.valdim.len() != n {
        return Err(FormatError::Invalid(format!("valdim: expected {n} entries, found {}", file.valdim.len())));
    }
    let vd = &file.valdim;
    let act = dense(k, "actions", 2, n, &file.actions, |t| (vd[t[1]], base.homdim(t[0], t[1]) * vd[t[0]]))?;
    let module = Module::new(base, file.valdim.clone(), act)?;
    Ok(ModuleFile { kind, instance_sha256: file.instance_sha256, operation: file.operation, inputs: file.inputs, module })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flock::*;
    use crate::herdoid::*;

    fn instances() -> Vec<FlockDatum> {
        let f5 = FieldSpec::prime(5).unwrap();
        let c2 = flock_codiscrete(&HeapTable::affine_cyclic(2), f5).unwrap();
        let g2 = flock_abelian_group_algebra(&GroupTable::cyclic(2), f5, GroupTransport::Product).unwrap();
        vec![
            flock_point(FieldSpec::rationals()),
            c2.clone(),
            flock_product(&c2, &g2).unwrap(),
            flock_abelian_group_algebra(&GroupTable::cyclic(3), FieldSpec::rationals(), GroupTransport::Product).unwrap(),
        ]
    }

    #[test]
    fn flock_round_trip_is_byte_identical() {
        for f in instances() {
            let text = emit_flock(&f);
            let back = parse_flock(&text).unwrap();
            assert_eq!(back, f);
            assert_eq!(emit_flock(&back), text);
        }
    }

    #[test]
    fn module_round_trip() {
        let f = &instances()[1];
        let h = build_h(f).unwrap();
        let d = flock_digest(f);
        let m = ModuleFile {
            kind: ModuleKind::H,
            instance_sha256: d.clone(),
            operation: None,
            inputs: vec![],
            module: promonoidal(&h).j,
        };
        let text = emit_module(&m);
        let back = parse_module(&text, &h, &d).unwrap();
        assert_eq!(back, m);
        assert_eq!(emit_module(&back), text);
        assert!(matches!(parse_module(&text, &h, "00"), Err(FormatError::Mismatch { .. })));
    }

    #[test]
    fn category_round_trip() {
        let h = build_h(&instances()[2]).unwrap();
        let text = emit_category(h.underlying(), "ab");
        let (c, d) = parse_category(&text).unwrap();
        assert_eq!((&c, d.as_str()), (&**h.underlying(), "ab"));
        assert_eq!(emit_category(&c, "ab"), text);
    }

    #[test]
    fn malformed_inputs() {
        let text = emit_flock(&instances()[1]);
        assert!(matches!(parse_flock(&text[..text.len() / 2]), Err(FormatError::Json(_))));
        let wrong = text.replace(FLOCK_FORMAT, "herd-flock/9");
        assert!(matches!(parse_flock(&wrong), Err(FormatError::Version { .. })));
        let bad_residue = text.replacen("\"entries\":[1]", "\"entries\":[7]", 1);
        assert!(matches!(parse_flock(&bad_residue), Err(FormatError::Lin(_))));
    }
}
