//! Acceptance criteria, one report line each.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trinomial::abelian::{smith_normal_form, IntegerMatrix};
use trinomial::derivation::{
    is_elementary, kernel_element, reconstruct_from_kernel, DerivationDegree, ElementaryType,
    Nilpotency,
};
use trinomial::oracle::{psi_window, verify_theorem, OracleSettings};
use trinomial::ring::{fine_grading, ExplicitGrading, Polynomial, TrinomialData, Var};
use trinomial::roots::{BoxCoordinates, RootContext};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grading_reproduction() -> Outcome {
    let ones = fine_grading(&TrinomialData::all_ones(2, 2, 2).unwrap()).unwrap();
    ensure(ones.group().free_rank() == 4, || format!("all-ones rank {}", ones.group().free_rank()))?;
    ensure(ones.group().torsion_invariants().is_empty(), || "all-ones torsion".into())?;
    let fg = fine_grading(&quadric()).unwrap();
    ensure(fg.group().free_rank() == 3, || format!("quadric rank {}", fg.group().free_rank()))?;
    ensure(fg.group().torsion_invariants().is_empty(), || "quadric torsion".into())?;
    let vectors = XYZ_VECTORS
        .iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    ExplicitGrading::new(&fg, vectors).map_err(|e| format!("explicit grading rejected: {e}"))?;
    Ok("ranks 4 and 3, torsion-free, explicit grading accepted".into())
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_trinomial")
}

fn write_spec(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("trinomial-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn class_count() -> Outcome {
    let mut seen = Vec::new();
    for (n0, n1, n2) in [(1usize, 1usize, 1usize), (2, 2, 2), (2, 2, 1)] {
        let ones = |k: usize| vec!["1"; k].join(" ");
        let path = write_spec(
            &format!("ones-{n0}{n1}{n2}.spec"),
            &format!("l0: {}\nl1: {}\nl2: {}\n", ones(n0), ones(n1), ones(n2)),
        );
        let out = Command::new(bin())
            .args(["elementary", path.to_str().unwrap(), "--count"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("exit {:?}", out.status.code()))?;
        let json: serde_json::Value =
            serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let count = json["count"].as_u64().ok_or("missing count")? as usize;
        let expected = n0 * n1 * n2 + n0 * n1 + n1 * n2 + n2 * n0;
        ensure(count == expected, || format!("({n0},{n1},{n2}): {count} != {expected}"))?;
        seen.push(count);
    }
    Ok(format!("counts {seen:?}"))
}

fn elementary_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 250 {
        let t = random_trinomial(&mut rng, 3, 3);
        let Some(spec) = random_spec(&mut rng, &t, 2) else { continue };
        let fg = fine_grading(&t).unwrap();
        let d = spec.derivation(&t);
        let ctx = || format!("{t} with {spec:?}");
        ensure(d.is_well_defined(), || format!("delta(g) != 0: {}", ctx()))?;

        let group = fg.group();
        let g = fg.g_degree();
        let mut expected = match spec.kind {
            ElementaryType::I => group.add(g, g).unwrap(),
            ElementaryType::II { .. } => g.clone(),
        };
        for i in spec.kind.active_blocks() {
            expected = group.sub(&expected, fg.degree_of(Var::new(i, spec.c[i]))).unwrap();
        }
        for v in t.vars() {
            let k = BigInt::from(spec.multiplier.exponents[t.flat(v)]);
            expected = group.add(&expected, &group.scale(fg.degree_of(v), &k).unwrap()).unwrap();
        }
        expected = group
            .add(&expected, &group.scale(g, &BigInt::from(spec.multiplier.m)).unwrap())
            .unwrap();
        ensure(
            d.degree(&fg).unwrap() == DerivationDegree::Homogeneous(expected),
            || format!("degree mismatch: {}", ctx()),
        )?;
        ensure(
            matches!(d.bounded_nilpotency(5), Nilpotency::Nilpotent(_)),
            || format!("not nilpotent within 5: {}", ctx()),
        )?;
        let blocks: Vec<usize> = d.non_kernel_variables().iter().map(|v| v.block).collect();
        let distinct: BTreeSet<usize> = blocks.iter().copied().collect();
        ensure(blocks.len() == distinct.len(), || format!("two non-kernel in a block: {}", ctx()))?;
        ensure(d.block_image_proportionality(), || format!("not proportional: {}", ctx()))?;
        checked += 1;
    }
    Ok(format!("{checked} instances"))
}

fn root_geometry() -> Outcome {
    let ctx = RootContext::new(&quadric()).unwrap();
    let fg = ctx.grading();
    let eg = xyz_grading(fg);
    let mut corners = BTreeSet::new();
    let mut laterals = BTreeSet::new();
    for set in ctx.basic_sets() {
        let offset = xyz_coords(&eg, &set.offset);
        if set.free_block() == 2 {
            corners.insert(offset);
        } else {
            laterals.insert(offset);
        }
    }
    let want_corners: BTreeSet<[i64; 3]> =
        [[1, 1, 0], [1, -1, 0], [-1, 1, 0], [-1, -1, 0]].into_iter().collect();
    let want_laterals: BTreeSet<[i64; 3]> =
        [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]].into_iter().collect();
    ensure(corners == want_corners, || format!("corner offsets {corners:?}"))?;
    ensure(laterals == want_laterals, || format!("lateral offsets {laterals:?}"))?;

    let roots = ctx
        .enumerate_roots_in_box(&[(-5, 5), (-5, 5), (-5, 5)], BoxCoordinates::Explicit(&eg))
        .map_err(|e| e.to_string())?;
    let mut found = BTreeSet::new();
    for q in &roots {
        let [x, y, z] = xyz_coords(&eg, &q.element);
        found.insert([x, y, z]);
        let count = q.containing_sets.len();
        ensure(count <= 3, || format!("({x},{y},{z}) in {count} sets"))?;
        for (k, _) in &q.containing_sets {
            if ctx.basic_sets()[*k].free_block() != 2 {
                ensure((x + y + z).rem_euclid(2) == 1, || format!("lateral member ({x},{y},{z}) has even sum"))?;
            }
        }
        if q.type_one {
            ensure(count == 3, || format!("type one ({x},{y},{z}) in {count} sets"))?;
        }
        ensure(count == quadric_set_count(x, y, z), || {
            format!("({x},{y},{z}): {count} sets, cone formula gives {}", quadric_set_count(x, y, z))
        })?;
        ensure(q.type_one == quadric_type_one(x, y, z), || format!("type one flag at ({x},{y},{z})"))?;
    }
    for x in -5..=5 {
        for y in -5..=5 {
            for z in -5..=5 {
                let predicted = quadric_set_count(x, y, z) > 0;
                ensure(predicted == found.contains(&[x, y, z]), || {
                    format!("({x},{y},{z}) predicted {predicted}")
                })?;
            }
        }
    }
    for (x, y) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let q = ctx.is_root(&xyz_point(fg, &eg, [x, y, 1])).unwrap();
        ensure(q.is_root() && q.type_one, || format!("vertex ({x},{y},1)"))?;
    }
    Ok(format!("{} roots in [-5,5]^3 match the cone formula", roots.len()))
}

fn witness_soundness() -> Outcome {
    let ctx = RootContext::new(&quadric()).unwrap();
    let fg = ctx.grading();
    let eg = xyz_grading(fg);
    let roots = ctx
        .enumerate_roots_in_box(&[(-5, 5), (-5, 5), (-5, 5)], BoxCoordinates::Explicit(&eg))
        .map_err(|e| e.to_string())?;
    let mut checked = 0;
    for q in &roots {
        let at = xyz_coords(&eg, &q.element);
        for (k, w) in &q.containing_sets {
            let set = &ctx.basic_sets()[*k];
            let d = ctx
                .witness_derivation(&q.element, set, w)
                .map_err(|e| format!("{at:?}: {e}"))?;
            ensure(d.is_well_defined(), || format!("{at:?}: delta(g) != 0"))?;
            ensure(
                d.degree(fg).unwrap() == DerivationDegree::Homogeneous(q.element.clone()),
                || format!("{at:?}: wrong degree"),
            )?;
            ensure(
                matches!(d.bounded_nilpotency(50), Nilpotency::Nilpotent(_)),
                || format!("{at:?}: not nilpotent"),
            )?;
            ensure(is_elementary(&d).is_elementary(), || format!("{at:?}: not recognized"))?;
            ensure(
                d.non_kernel_variables() == [set.pair.0, set.pair.1].into_iter().collect(),
                || format!("{at:?}: non-kernel variables"),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} witness derivations over {} roots", roots.len()))
}

fn theorem_oracle() -> Outcome {
    let mut summary = Vec::new();
    for k in [2u32, 3] {
        let t = TrinomialData::new(vec![1], vec![1], vec![k]).unwrap();
        let ctx = RootContext::new(&t).unwrap();
        let w = ctx.functional().block_value();
        let degrees = psi_window(&ctx, w, w as i64).map_err(|e| e.to_string())?;
        let settings = OracleSettings {
            cap: 6,
            nilpotency_cap: 50,
            samples: 20,
            seed: 11,
        };
        let report = verify_theorem(&ctx, &degrees, settings).map_err(|e| e.to_string())?;
        ensure(report.counterexamples == 0, || format!("x+y+z^{k}: {} counterexamples", report.counterexamples))?;
        ensure(report.root_mismatches == 0, || {
            format!("x+y+z^{k}: {} nilpotent degrees are not roots", report.root_mismatches)
        })?;
        ensure(report.roots_without_nilpotent == 0, || {
            format!("x+y+z^{k}: {} roots without nilpotent element", report.roots_without_nilpotent)
        })?;
        let roots = report.degrees.iter().filter(|d| d.is_root).count();
        let nilpotent: usize = report.degrees.iter().map(|d| d.nilpotent).sum();
        summary.push(format!(
            "x+y+z^{k}: {} degrees, {roots} roots, {nilpotent} nilpotent, {} unknown at cap",
            report.degrees.len(),
            report.unknown_at_cap
        ));
    }
    Ok(summary.join("; "))
}

fn kernel_dichotomy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 150 {
        let t = random_trinomial(&mut rng, 3, 3);
        let Some(spec) = random_spec(&mut rng, &t, 2) else { continue };
        let base = spec.base_derivation(&t);
        let h = kernel_element(&t, &spec).map_err(|e| e.to_string())?;
        ensure(base.is_in_kernel(&h), || format!("kernel element escapes: {spec:?}"))?;

        let x = Polynomial::block_monomial(&t, 0);
        let y = Polynomial::block_monomial(&t, 1);
        let (b0, b1) = (&spec.beta[0], &spec.beta[1]);
        let zeta = nonzero_rational(&mut rng);
        let xi = rat(rng.gen_range(-4i64..=4));
        if &zeta * -b0.clone() != &xi * b1 {
            let binomial = &x.scale(&zeta) + &y.scale(&xi);
            ensure(!base.is_in_kernel(&binomial), || format!("({zeta}, {xi}) in kernel of {spec:?}"))?;
        }

        let kernel: BTreeSet<Var> = t.vars().filter(|v| base.image(*v).is_zero()).collect();
        let r = reconstruct_from_kernel(&t, &kernel, b1, &-b0.clone()).map_err(|e| format!("{spec:?}: {e}"))?;
        ensure(r.kind == spec.kind, || format!("type {:?} vs {:?}", r.kind, spec.kind))?;
        let mut c = spec.c;
        if let ElementaryType::II { i0 } = spec.kind {
            c[i0] = 1;
        }
        ensure(r.c == c, || format!("C {:?} vs {:?}", r.c, c))?;
        let pivot = (0..3).find(|&i| !spec.beta[i].is_zero()).unwrap();
        let scale = &r.beta[pivot] / &spec.beta[pivot];
        ensure(
            (0..3).all(|i| r.beta[i] == &spec.beta[i] * &scale),
            || format!("beta {:?} vs {:?}", r.beta, spec.beta),
        )?;
        checked += 1;
    }
    Ok(format!("{checked} specs"))
}

fn snf_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 0..600 {
        let a = random_matrix(&mut rng, 6, 9);
        let s = smith_normal_form(&a);
        ensure(s.u.mul(&a).mul(&s.v) == s.d, || format!("#{n}: U A V != D"))?;
        let unit = |m: &IntegerMatrix| determinant(&square_rows(m)).abs().is_one();
        ensure(unit(&s.u) && unit(&s.v), || format!("#{n}: not unimodular"))?;
        ensure(s.u.mul(&s.u_inv) == IntegerMatrix::identity(a.rows()), || format!("#{n}: U_inv"))?;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let entry = s.d.get(i, j);
                if i != j {
                    ensure(entry.is_zero(), || format!("#{n}: off-diagonal entry"))?;
                } else {
                    ensure(!entry.is_negative(), || format!("#{n}: negative diagonal"))?;
                }
            }
        }
        let diag = &s.diag;
        for k in 1..diag.len() {
            let divides = if diag[k - 1].is_zero() {
                diag[k].is_zero()
            } else {
                (&diag[k] % &diag[k - 1]).is_zero()
            };
            ensure(divides, || format!("#{n}: divisibility chain {diag:?}"))?;
        }
        if n % 3 == 0 {
            let mut product = BigInt::one();
            for (k, d) in diag.iter().enumerate() {
                product *= d;
                ensure(
                    product == determinantal_divisor(&a, k + 1),
                    || format!("#{n}: invariant factors disagree with minors"),
                )?;
            }
        }
    }
    Ok("600 matrices".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("grading reproduction", grading_reproduction),
        ("elementary class count", class_count),
        ("elementary property suite", elementary_suite),
        ("quadric root geometry", root_geometry),
        ("witness soundness", witness_soundness),
        ("theorem oracle", theorem_oracle),
        ("kernel dichotomy and reconstruction", kernel_dichotomy),
        ("smith normal form suite", snf_suite),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", k + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL {name}: {why}", k + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
