//! Acceptance run over the six builder instances. Prints one line per
//! criterion and exits non-zero if any fails.

use std::process::ExitCode;

use herd_core::exactlin::{FieldSpec, Mat};
use herd_core::flock::{flock_abelian_group_algebra, FlockDatum, FlockParts, GroupTable, GroupTransport};
use herd_core::format::{emit_flock, parse_flock};
use herd_core::fourier::{convolve, convolve_direct_dims, dual_module, fourier_coend, hmodule_hom_right, sample_modules};
use herd_core::herdoid::{antipode, antipode_from_pairings, build_h, kleisli, promonoidal, HCategory};
use herd_core::instances::{self, NAMES};
use herd_core::verify::{run_suite, Report, SuiteOptions};

type Outcome = Result<(), String>;
type Criterion<'a> = (&'a str, &'a dyn Fn(&[Instance]) -> Outcome);

struct Instance {
    name: &'static str,
    flock: FlockDatum,
    h: HCategory,
    report: Report,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn entries_pass(insts: &[Instance], ids: &[&str]) -> Outcome {
    for inst in insts {
        for id in ids {
            let e = inst.report.entry(id).ok_or_else(|| format!("{}: no entry {id}", inst.name))?;
            ensure(e.status == herd_core::verify::Status::Pass, || {
                format!("{}: {id} is {:?} ({:?})", inst.name, e.status, e.failures.first().map(|f| f.to_string()))
            })?;
        }
    }
    Ok(())
}

fn bump(m: &Mat, i: usize, j: usize) -> Mat {
    let mut out = m.clone();
    let k = m.field();
    out.set(i, j, m.get(i, j) + &k.one());
    out
}

fn corrupt(name: &str, edit: impl FnOnce(&mut FlockParts)) -> FlockDatum {
    let mut parts = instances::build(name, None).unwrap().into_parts();
    edit(&mut parts);
    FlockDatum::from_parts(parts).unwrap()
}

/// Runs the suite on `f` and expects exactly `entry` to fail, with `law` among
/// its failures.
fn fails_exactly(label: &str, f: &FlockDatum, entry: &str, law: &str) -> Outcome {
    let r = run_suite(label, f, &SuiteOptions::default());
    ensure(r.failing() == vec![entry], || format!("{label}: failing entries {:?}, expected [{entry}]", r.failing()))?;
    let e = r.entry(entry).unwrap();
    ensure(e.failures.iter().any(|v| v.law.starts_with(law) && !v.witness.is_empty()), || {
        format!("{label}: {law} not among {:?}", e.failures.iter().map(|v| &v.law).collect::<Vec<_>>())
    })
}

fn c1_axioms(insts: &[Instance]) -> Outcome {
    entries_pass(insts, &["flock", "h_category"])?;
    let composition = corrupt("g2", |p| {
        let m = bump(p.category.comp(0, 0, 0), 0, 0);
        p.category.set_comp(0, 0, 0, m);
    });
    fails_exactly("g2/composition", &composition, "flock", "category.left_unit")?;
    let transport = corrupt("g2", |p| p.tau_hom[0] = bump(&p.tau_hom[0], 0, 0));
    fails_exactly("g2/tau_hom", &transport, "flock", "tau.functoriality")?;
    let heap = corrupt("c2", |p| p.tau_obj[0] = 1);
    fails_exactly("c2/tau_obj", &heap, "flock", "heap.")?;
    let sigma = corrupt("g2", |p| p.sigma[0] = Mat::zeros(p.sigma[0].field(), 2, 2));
    fails_exactly("g2/sigma", &sigma, "flock", "sigma.nondegenerate")?;
    let rho = corrupt("g2", |p| {
        let r = &mut p.rho.as_mut().unwrap()[0];
        *r = Mat::zeros(r.field(), 2, 2);
    });
    fails_exactly("g2/rho", &rho, "flock", "rho.nondegenerate")?;
    let base = instances::build("g2", None).unwrap();
    let doubled = vec![antipode_from_pairings(&base, 0, 0, 0, 0).unwrap().scale(&base.field().from_i64(2))];
    let s_hom = corrupt("g2", |p| {
        p.rho = None;
        p.s_hom = Some(doubled);
    });
    fails_exactly("g2/s_hom", &s_hom, "antipode", "antipode.")?;
    let inverse =
        flock_abelian_group_algebra(&GroupTable::cyclic(3), FieldSpec::prime(7).unwrap(), GroupTransport::HeapInverse).unwrap();
    fails_exactly("g3/heap_inverse", &inverse, "promonoidal", "j.restricts_to_hom")
}

fn c2_kleisli(insts: &[Instance]) -> Outcome {
    entries_pass(insts, &["kleisli"])?;
    for inst in insts {
        let kl = kleisli(&inst.h);
        ensure(kl.check().passed(), || format!("{}: kleisli is not a functor", inst.name))?;
        ensure(kl.objmap.iter().enumerate().all(|(i, &o)| i == o), || format!("{}: not identity on objects", inst.name))?;
        ensure(kl.is_surjective_on_objects(), || format!("{}: not surjective", inst.name))?;
    }
    Ok(())
}

fn c3_fourier(insts: &[Instance]) -> Outcome {
    entries_pass(insts, &["fourier"])?;
    for inst in insts {
        ensure(inst.report.samples.len() >= 3, || format!("{}: only {} samples", inst.name, inst.report.samples.len()))?;
    }
    let g2 = insts.iter().find(|i| i.name == "g2").unwrap();
    let fc = fourier_coend(&g2.h, &promonoidal(&g2.h).j);
    ensure(fc.violations.passed() && fc.bimodule.valdim == vec![2], || format!("g2: K*j dims {:?}", fc.bimodule.valdim))
}

fn c4_unit_assoc(insts: &[Instance]) -> Outcome {
    entries_pass(insts, &["convolution"])?;
    for inst in insts {
        let want = match inst.name {
            "g2" | "c2xg2" => 2,
            "g3" => 3,
            _ => 1,
        };
        let dims = &inst.report.entry("convolution").unwrap().dims["j*j"];
        ensure(dims.iter().all(|&d| d == want), || format!("{}: j*j dims {dims:?}, expected all {want}", inst.name))?;
    }
    Ok(())
}

fn c5_direct_dims(insts: &[Instance]) -> Outcome {
    for inst in insts {
        let h = &inst.h;
        let data = promonoidal(h);
        let s = antipode(h).unwrap();
        let mut ms = vec![data.j.clone()];
        ms.extend(sample_modules(h, &data, Some(&s), 3, 0).into_iter().map(|x| x.1));
        for (i, m) in ms.iter().enumerate() {
            let n = &ms[(i + 1) % ms.len()];
            let dims = convolve(h, m, n).module.valdim;
            for alt in [false, true] {
                let direct = convolve_direct_dims(h, &data, m, n, alt);
                ensure(direct == dims, || format!("{}: pair {i}: direct {direct:?} vs {dims:?}", inst.name))?;
            }
        }
    }
    Ok(())
}

fn c11_star(insts: &[Instance]) -> Outcome {
    entries_pass(insts, &["star_autonomy"])?;
    for inst in insts {
        let h = &inst.h;
        let data = promonoidal(h);
        let s = antipode(h).unwrap();
        let d = dual_module(&s, &data.j);
        for (name, m) in sample_modules(h, &data, Some(&s), 3, 0) {
            let hr = hmodule_hom_right(h, &m, &d).module.valdim;
            let dual = dual_module(&s, &m).valdim;
            ensure(hr == dual, || format!("{}: hom_r({name},d) dims {hr:?} vs dual {dual:?}", inst.name))?;
        }
    }
    Ok(())
}

fn c12_determinism(insts: &[Instance]) -> Outcome {
    for inst in insts {
        let opts = SuiteOptions { seed: 11, ..SuiteOptions::default() };
        let a = run_suite(inst.name, &inst.flock, &opts).to_json();
        let b = run_suite(inst.name, &inst.flock, &opts).to_json();
        ensure(a == b, || format!("{}: structured reports differ", inst.name))?;
        for field in [None, Some(FieldSpec::rationals())] {
            let Ok(f) = instances::build(inst.name, field) else { continue };
            let text = emit_flock(&f);
            let back = parse_flock(&text).map_err(|e| format!("{}: {e}", inst.name))?;
            ensure(emit_flock(&back) == text && back == f, || format!("{}: round trip differs", inst.name))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let insts: Vec<Instance> = NAMES
        .iter()
        .map(|&name| {
            let flock = instances::build(name, None).unwrap();
            let h = build_h(&flock).unwrap();
            let report = run_suite(name, &flock, &SuiteOptions::default());
            Instance { name, flock, h, report }
        })
        .collect();
    let criteria: [Criterion; 12] = [
        ("flock and H axioms, corruptions", &c1_axioms),
        ("Kleisli functor", &c2_kleisli),
        ("Fourier transform is restriction", &c3_fourier),
        ("unit and associativity of convolution", &c4_unit_assoc),
        ("direct convolution dimensions", &c5_direct_dims),
        ("multiplicativity", &|i| entries_pass(i, &["multiplicativity"])),
        ("duality preservation", &|i| entries_pass(i, &["duality"])),
        ("adjunction", &|i| entries_pass(i, &["adjunction"])),
        ("internal homs", &|i| entries_pass(i, &["internal_homs"])),
        ("conservativity", &|i| entries_pass(i, &["conservativity"])),
        ("star-autonomy", &c11_star),
        ("determinism and round trip", &c12_determinism),
    ];
    let mut failed = 0;
    for (i, (label, check)) in criteria.iter().enumerate() {
        match check(&insts) {
            Ok(()) => println!("PASS {:>2} {label}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {label}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
