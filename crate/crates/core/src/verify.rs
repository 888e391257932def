//! The full check suite over a flock, in a fixed order, with structured and
//! text reports.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::flock::{check_flock, FlockDatum};
use crate::fourier::{
    adjunction_check, associativity_comparison, conservativity_check, convolve, double_dual_check, duality_preservation_check,
    fourier_coend, hmodule_hom_check, internal_hom_adjunction_check, left_unit_comparison, multiplicativity_check,
    right_unit_comparison, sample_bimodules, sample_modules, star_autonomy_checks,
};
use crate::herdoid::{
    antipode, build_h, check_promonoidal, kleisli, promonoidal, Antipode, HCategory, HerdError, PromonoidalData,
};
use crate::lincat::{Module, Violation, Violations};

pub const REPORT_FORMAT: &str = "herd-report/1";

/// Suite entries in run order.
pub const SUITE: [&str; 13] = [
    "flock",
    "h_category",
    "kleisli",
    "antipode",
    "promonoidal",
    "convolution",
    "fourier",
    "multiplicativity",
    "duality",
    "adjunction",
    "internal_homs",
    "conservativity",
    "star_autonomy",
];

/// Claims checked by the suite and the entries that check them.
pub const CLAIMS: [(&str, &[&str]); 9] = [
    ("flock and H axioms", &["flock", "h_category"]),
    ("Kleisli functor, identity on objects", &["kleisli"]),
    ("antipode is a functor H^op -> H", &["antipode"]),
    ("promonoidal structure and convolution", &["promonoidal", "convolution", "multiplicativity"]),
    ("Fourier transform is restriction", &["fourier"]),
    ("Fourier transform is multiplicative and preserves duals", &["multiplicativity", "duality"]),
    ("Fourier transform has a right adjoint and is conservative", &["adjunction", "conservativity"]),
    ("left and right internal homs", &["internal_homs"]),
    ("cyclic relations and star-autonomy", &["star_autonomy"]),
];

fn prerequisites(id: &str) -> &'static [&'static str] {
    match id {
        "h_category" => &["flock"],
        "kleisli" | "antipode" => &["h_category"],
        "promonoidal" | "fourier" | "adjunction" | "conservativity" => &["kleisli"],
        "convolution" => &["promonoidal"],
        "multiplicativity" | "internal_homs" => &["convolution"],
        "duality" => &["antipode", "kleisli"],
        "star_autonomy" => &["antipode", "promonoidal"],
        _ => &[],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Entry {
    pub id: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    pub failures: Vec<Violation>,
    pub dims: BTreeMap<String, Vec<usize>>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimEntry {
    pub claim: String,
    pub entries: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub instance: String,
    pub field: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input_sha256: Option<String>,
    pub seed: u64,
    pub samples: Vec<String>,
    pub claims: Vec<ClaimEntry>,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    pub fn entry(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.entries.iter().filter(|e| e.status == Status::Fail).map(|e| e.id.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance {} over {} (seed {})", self.instance, self.field, self.seed)?;
        if let Some(d) = &self.input_sha256 {
            writeln!(f, "input sha256 {d}")?;
        }
        if !self.samples.is_empty() {
            writeln!(f, "samples: {}", self.samples.join(", "))?;
        }
        for c in &self.claims {
            writeln!(f, "claim: {} <- {}", c.claim, c.entries.join(", "))?;
        }
        for e in &self.entries {
            let tag = match e.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            write!(f, "{tag} {:<17} {:>9.3} ms", e.id, e.elapsed.as_secs_f64() * 1e3)?;
            if let Some(r) = &e.reason {
                write!(f, "  ({r})")?;
            }
            writeln!(f)?;
            for (k, v) in &e.dims {
                writeln!(f, "     {k}: {v:?}")?;
            }
            for v in &e.failures {
                writeln!(f, "     failed {v}")?;
            }
        }
        write!(f, "{}", if self.passed() { "result: pass" } else { "result: FAIL" })
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Entries to report; `None` runs everything.
    pub checks: Option<Vec<String>>,
    pub samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, checks: None, samples: 3 }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown check '{0}' (known: {known})", known = SUITE.join(", "))]
pub struct UnknownCheck(pub String);

/// Parse a `--suite` argument: `all` or a comma-separated list of entries.
pub fn parse_checks(s: &str) -> Result<Option<Vec<String>>, UnknownCheck> {
    if s == "all" {
        return Ok(None);
    }
    s.split(',')
        .map(|c| {
            let c = c.trim();
            if SUITE.contains(&c) {
                Ok(c.to_string())
            } else {
                Err(UnknownCheck(c.to_string()))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

#[derive(Default)]
struct State {
    h: Option<HCategory>,
    s: Option<Antipode>,
    data: Option<PromonoidalData>,
    samples: Option<Vec<(String, Module)>>,
}

struct Outcome {
    violations: Violations,
    dims: BTreeMap<String, Vec<usize>>,
}

impl From<Violations> for Outcome {
    fn from(violations: Violations) -> Self {
        Outcome { violations, dims: BTreeMap::new() }
    }
}

pub fn run_suite(name: &str, f: &FlockDatum, options: &SuiteOptions) -> Report {
    let selected = |id: &str| options.checks.as_ref().is_none_or(|c| c.iter().any(|x| x == id));
    let mut needed: Vec<&str> = SUITE.iter().copied().filter(|id| selected(id)).collect();
    let mut i = 0;
    while i < needed.len() {
        for p in prerequisites(needed[i]) {
            if !needed.contains(p) {
                needed.push(p);
            }
        }
        i += 1;
    }
    let mut state = State::default();
    let mut status: BTreeMap<&str, Status> = BTreeMap::new();
    let mut entries = Vec::new();
    for id in SUITE {
        if !needed.contains(&id) {
            continue;
        }
        let blocked: Vec<&str> = prerequisites(id).iter().copied().filter(|p| status.get(p) != Some(&Status::Pass)).collect();
        let start = Instant::now();
        let entry = if blocked.is_empty() {
            let out = run_check(id, f, &mut state, options);
            let st = if out.violations.passed() { Status::Pass } else { Status::Fail };
            Entry {
                id: id.into(),
                status: st,
                reason: None,
                failures: out.violations.failures,
                dims: out.dims,
                elapsed: start.elapsed(),
            }
        } else {
            Entry {
                id: id.into(),
                status: Status::Skip,
                reason: Some(format!("requires {}", blocked.join(", "))),
                failures: Vec::new(),
                dims: BTreeMap::new(),
                elapsed: Duration::ZERO,
            }
        };
        status.insert(id, entry.status);
        if selected(id) {
            entries.push(entry);
        }
    }
    let claims = CLAIMS
        .iter()
        .map(|(claim, ids)| ClaimEntry { claim: claim.to_string(), entries: ids.iter().map(|s| s.to_string()).collect() })
        .collect();
    Report {
        format: REPORT_FORMAT.into(),
        instance: name.into(),
        field: f.field().to_string(),
        input_sha256: None,
        seed: options.seed,
        samples: state.samples.map(|s| s.into_iter().map(|x| x.0).collect()).unwrap_or_default(),
        claims,
        entries,
    }
}

fn run_check(id: &str, f: &FlockDatum, st: &mut State, options: &SuiteOptions) -> Outcome {
    let mut dims = BTreeMap::new();
    if id == "flock" {
        dims.insert("objects".into(), vec![f.n()]);
        dims.insert("homdims".into(), (0..f.n() * f.n()).map(|i| f.category().homdim(i / f.n(), i % f.n())).collect());
        return Outcome { violations: check_flock(f), dims };
    }
    if id == "h_category" {
        return match build_h(f) {
            Ok(h) => {
                dims.insert("objects".into(), vec![h.underlying().n()]);
                dims.insert("total_hom_dim".into(), vec![h.underlying().total_hom_dim()]);
                st.h = Some(h);
                Outcome { violations: Violations::default(), dims }
            }
            Err(HerdError::Flock(v)) | Err(HerdError::Category(v)) => v.into(),
            Err(e) => single("h.build", e.to_string()).into(),
        };
    }
    let h = st.h.as_ref().expect("prerequisite built H").clone();
    let violations = match id {
        "kleisli" => {
            let kl = kleisli(&h);
            let mut v = kl.check().prefixed("kleisli");
            if !kl.is_surjective_on_objects() {
                v.push("kleisli.surjective", "objects");
            }
            if kl.objmap.iter().enumerate().any(|(i, &o)| i != o) {
                v.push("kleisli.identity_on_objects", "objects");
            }
            v
        }
        "antipode" => match antipode(&h) {
            Ok(s) => {
                dims.insert("involutive".into(), vec![s.involutive as usize]);
                st.s = Some(s);
                Violations::default()
            }
            Err(HerdError::MissingAntipode) => single("antipode.missing", "no rho or s_hom data"),
            Err(HerdError::Antipode(v)) => v,
            Err(e) => single("antipode.build", e.to_string()),
        },
        "promonoidal" => {
            let data = promonoidal(&h);
            dims.insert("j".into(), data.j.valdim.clone());
            let v = check_promonoidal(&h, &data);
            st.data = Some(data);
            v
        }
        "convolution" => {
            let data = st.data.as_ref().expect("promonoidal built").clone();
            let samples = samples(&h, st, options);
            let mut v = Violations::default();
            let jj = convolve(&h, &data.j, &data.j);
            dims.insert("j*j".into(), jj.module.valdim.clone());
            v.extend(prefixed(jj.violations, "j*j"));
            for (name, m) in &samples {
                v.extend(prefixed(left_unit_comparison(&h, &data.j, m).violations, name));
                v.extend(prefixed(right_unit_comparison(&h, &data.j, m).violations, name));
            }
            for (i, (name, m)) in samples.iter().enumerate() {
                let (n1, n2) = (&samples[(i + 1) % samples.len()], &samples[(i + 2) % samples.len()]);
                let label = format!("({name},{},{})", n1.0, n2.0);
                v.extend(prefixed(associativity_comparison(&h, m, &n1.1, &n2.1).violations, &label));
            }
            v
        }
        "fourier" => {
            let samples = samples(&h, st, options);
            let mut v = Violations::default();
            for (name, m) in &samples {
                let fc = fourier_coend(&h, m);
                dims.insert(format!("K*{name}"), fc.bimodule.valdim.clone());
                v.extend(prefixed(fc.violations, name));
            }
            v
        }
        "multiplicativity" => {
            let data = st.data.as_ref().expect("promonoidal built").clone();
            let samples = samples(&h, st, options);
            let mut v = Violations::default();
            for (i, (name, m)) in samples.iter().enumerate() {
                let (n2, m2) = &samples[(i + 1) % samples.len()];
                v.extend(prefixed(multiplicativity_check(&h, &data, m, m2), &format!("({name},{n2})")));
            }
            v
        }
        "duality" => {
            let s = st.s.as_ref().expect("antipode built").clone();
            let samples = samples(&h, st, options);
            let mut v = Violations::default();
            for (name, m) in &samples {
                v.extend(prefixed(duality_preservation_check(&h, &s, m), name));
                v.extend(prefixed(double_dual_check(&s, m), name));
            }
            v
        }
        "adjunction" => {
            let samples = samples(&h, st, options);
            let bimods = sample_bimodules(&h, &samples);
            let mut v = Violations::default();
            for (i, (name, m)) in samples.iter().enumerate() {
                let (pn, p) = &bimods[(i + 1) % bimods.len()];
                v.extend(prefixed(adjunction_check(&h, m, p), &format!("({name},{pn})")));
            }
            v
        }
        "internal_homs" => {
            let samples = samples(&h, st, options);
            let bimods = sample_bimodules(&h, &samples);
            let mut v = Violations::default();
            for (i, (name, m)) in samples.iter().enumerate() {
                let (n1, n2) = (&samples[(i + 1) % samples.len()], &samples[(i + 2) % samples.len()]);
                v.extend(prefixed(hmodule_hom_check(&h, m, &n1.1, &n2.1), &format!("({name},{},{})", n1.0, n2.0)));
            }
            for (i, (name, p)) in bimods.iter().enumerate() {
                let (q, r) = (&bimods[(i + 1) % bimods.len()], &bimods[(i + 2) % bimods.len()]);
                v.extend(prefixed(internal_hom_adjunction_check(&h, p, &q.1, &r.1), &format!("({name},{},{})", q.0, r.0)));
            }
            v
        }
        "conservativity" => {
            let samples = samples(&h, st, options);
            let mut v = Violations::default();
            for (i, (name, m)) in samples.iter().enumerate() {
                let (n2, m2) = &samples[(i + 1) % samples.len()];
                let seed = options.seed.wrapping_add(i as u64);
                v.extend(prefixed(conservativity_check(&h, m, m, seed), name));
                v.extend(prefixed(conservativity_check(&h, m, m2, seed), &format!("({name},{n2})")));
            }
            v
        }
        "star_autonomy" => {
            let s = st.s.as_ref().expect("antipode built").clone();
            let data = st.data.as_ref().expect("promonoidal built").clone();
            let samples = samples(&h, st, options);
            let star = star_autonomy_checks(&h, &s, &data, &samples);
            dims.insert("d".into(), star.dualizing.valdim.clone());
            star.violations
        }
        other => unreachable!("unknown suite entry {other}"),
    };
    Outcome { violations, dims }
}

fn prefixed(v: Violations, name: &str) -> Violations {
    v.prefixed(name)
}

fn single(law: &str, witness: impl Into<String>) -> Violations {
    let mut v = Violations::default();
    v.push(law, witness);
    v
}

fn samples(h: &HCategory, st: &mut State, options: &SuiteOptions) -> Vec<(String, Module)> {
    if st.data.is_none() {
        st.data = Some(promonoidal(h));
    }
    if st.samples.is_none() {
        let data = st.data.as_ref().expect("just built");
        st.samples = Some(sample_modules(h, data, st.s.as_ref(), options.samples, options.seed));
    }
    st.samples.clone().expect("just built")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::FieldSpec;
    use crate::exactlin::Mat;
    use crate::flock::*;

    #[test]
    fn point_passes_and_is_deterministic() {
        let f = flock_point(FieldSpec::prime(5).unwrap());
        let a = run_suite("point", &f, &SuiteOptions::default());
        assert!(a.passed(), "{a}");
        assert_eq!(a.entries.len(), SUITE.len());
        let b = run_suite("point", &f, &SuiteOptions::default());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn subsets_and_skips() {
        let f = flock_point(FieldSpec::prime(5).unwrap());
        let opts = SuiteOptions { checks: parse_checks("fourier").unwrap(), ..Default::default() };
        let r = run_suite("point", &f, &opts);
        assert_eq!(r.entries.len(), 1);
        assert!(parse_checks("flock,nosuch").is_err());

        let mut parts = f.to_parts();
        parts.tau_obj[0] = 0;
        let k = parts.category.field();
        parts.category.set_ident(0, Mat::zeros(k, 1, 1));
        let bad = FlockDatum::from_parts(parts).unwrap();
        let r = run_suite("bad", &bad, &SuiteOptions::default());
        assert_eq!(r.failing(), vec!["flock"]);
        assert!(r.entries[1..].iter().all(|e| e.status == Status::Skip));
    }

    #[test]
    fn claims_reference_suite_entries() {
        for (_, ids) in CLAIMS {
            assert!(ids.iter().all(|i| SUITE.contains(i)));
        }
        for id in SUITE {
            assert!(CLAIMS.iter().any(|(_, ids)| ids.contains(&id)), "{id}");
        }
    }
}
