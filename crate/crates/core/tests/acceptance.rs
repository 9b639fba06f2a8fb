//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so the `[PASS]` / `[FAIL]` lines are
//! always visible. The process fails if any criterion fails unexpectedly.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cuntzr_core::bialgebra::check_coassoc;
use cuntzr_core::cuntz::{random_monomial, CuntzMonomial, DirectSumElement};
use cuntzr_core::gns::{span_basis, GpRepresentation, Tensor2Vector};
use cuntzr_core::rmatrix::{
    apply_r, build_r, counterexample_demo, radix_swap_r, verify_intertwining, verify_symmetry,
    verify_ybe,
};
use cuntzr_core::states::{boxtimes, star, GpState, UnitVector};
use cuntzr_core::{Error, C64};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    /// Fails as literally stated; the corrected statement was verified.
    KnownFail(String),
}

type Criterion = (&'static str, fn() -> Outcome);

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    match outcome {
        Outcome::Pass(msg) if elapsed > limit => {
            Outcome::Fail(format!("{msg}; took {elapsed:.2?}, limit {limit:?}"))
        }
        Outcome::Pass(msg) => Outcome::Pass(format!("{msg} ({elapsed:.2?})")),
        other => other,
    }
}

fn verdict(ok: bool, msg: String) -> Outcome {
    if ok {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn e(a: u64, b: u64) -> Tensor2Vector {
    Tensor2Vector::basis((a, b))
}

fn mono(n: usize, u: &[usize], v: &[usize]) -> CuntzMonomial {
    CuntzMonomial::new(n, u, v).unwrap()
}

fn generators(n: usize) -> Vec<CuntzMonomial> {
    (1..=n).map(|i| mono(n, &[i], &[])).collect()
}

/// Independent oracle for the standard-state R-matrix: push every word of
/// length `depth` through the permutative index maps by hand.
fn brute_force_swap(n: u64, m: u64, depth: u32) -> BTreeMap<(u64, u64), (u64, u64)> {
    let nm = n * m;
    let mut out = BTreeMap::new();
    for code in 0..nm.pow(depth) {
        // letters w_1..w_depth of the word, w_1 outermost
        let letters: Vec<u64> = (0..depth).map(|k| code / nm.pow(k) % nm + 1).collect();
        let (mut a, mut b, mut a2, mut b2) = (1u64, 1u64, 1u64, 1u64);
        for &w in letters.iter().rev() {
            let (i, j) = ((w - 1) / m + 1, (w - 1) % m + 1);
            a = n * (a - 1) + i;
            b = m * (b - 1) + j;
            let (j2, i2) = ((w - 1) / n + 1, (w - 1) % n + 1);
            a2 = n * (a2 - 1) + i2;
            b2 = m * (b2 - 1) + j2;
        }
        out.insert((a, b), (a2, b2));
    }
    out
}

/// `ρ_z(s_u s_v*)` straight from the defining product formula.
fn gp_formula(z: &[C64], m: &CuntzMonomial) -> C64 {
    let u: C64 = m
        .creation()
        .letters()
        .iter()
        .map(|&j| z[j - 1].conj())
        .product();
    let v: C64 = m
        .annihilation()
        .letters()
        .iter()
        .map(|&k| z[k - 1])
        .product();
    u * v
}

fn ac1() -> Outcome {
    timed(Duration::from_secs(1), || {
        let (p2, p3) = (GpRepresentation::standard(2), GpRepresentation::standard(3));
        let r = build_r(&p2, &p3, 1).unwrap();
        let image = apply_r(&r, &e(1, 3)).unwrap();
        let residual = image.distance(&e(1, 2));
        let off_identity = (r.matrix() - DMatrix::<C64>::identity(r.rank(), r.rank()))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let oracle = brute_force_swap(2, 3, 1);
        let matches_oracle = r.permutation() == Some(&oracle);
        verdict(
            residual == 0.0 && off_identity > 0.5 && matches_oracle,
            format!(
                "R(ω_2,ω_3) e_1⊗e_3 = e_1⊗e_2, residual {residual:e}; max |R - I| = {off_identity}"
            ),
        )
    })
}

fn ac2() -> Outcome {
    timed(Duration::from_secs(1), || {
        let report = counterexample_demo();
        let p = GpRepresentation::standard(2);
        let p_bar = GpRepresentation::for_state(&GpState::new(UnitVector::standard(2, 2)));
        let witness = match build_r(&p, &p_bar, 1) {
            Err(Error::NotCommuting { witness }) => Some(*witness),
            _ => None,
        };
        let ok = report.pass() && witness == Some(mono(4, &[2], &[]));
        let fails = report.check("intertwining-fails").map(|c| c.residual);
        verdict(
            ok,
            format!(
                "Rv = v, ⟨v,(π_2(s_2)⊗π̄_2(s_1))v⟩ = 0, intertwining residual {fails:?}, NotCommuting witness {}",
                witness.map(|w| w.to_string()).unwrap_or_else(|| "missing".into())
            ),
        )
    })
}

fn ac3() -> Outcome {
    timed(Duration::from_secs(10), || {
        let mut checked = 0;
        for n in 1..=8 {
            for g in generators(n) {
                for x in [g.clone(), g.adjoint()] {
                    if !check_coassoc(&DirectSumElement::from(x.clone())) {
                        return Outcome::Fail(format!("coassociativity fails on {x}"));
                    }
                    checked += 1;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [4, 6, 12] {
            for _ in 0..100 {
                let x = random_monomial(&mut rng, n, 2);
                if !check_coassoc(&DirectSumElement::from(x.clone())) {
                    return Outcome::Fail(format!("coassociativity fails on {x}"));
                }
                checked += 1;
            }
        }
        Outcome::Pass(format!("(Δ⊗id)Δ = (id⊗Δ)Δ exactly on {checked} monomials"))
    })
}

fn ac4() -> Outcome {
    timed(Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst = 0.0f64;
        let mut worst_oracle = 0.0f64;
        for _ in 0..5 {
            let z = UnitVector::random(&mut rng, 2);
            let y = UnitVector::random(&mut rng, 3);
            let zy = boxtimes(&z, &y);
            let product = star(GpState::new(z).into(), GpState::new(y).into());
            for _ in 0..100 {
                let x = random_monomial(&mut rng, 6, 3);
                let lhs = product.eval_monomial(&x).unwrap();
                let rhs = GpState::new(zy.clone()).eval_monomial(&x);
                worst = worst.max((lhs - rhs).norm());
                worst_oracle = worst_oracle.max((rhs - gp_formula(zy.components(), &x)).norm());
            }
        }
        verdict(
            worst <= 1e-12 && worst_oracle <= 1e-12,
            format!("max |ρ_z⋆ρ_y - ρ_(z⊠y)| = {worst:e} over 500 evaluations"),
        )
    })
}

fn ac5() -> Outcome {
    timed(Duration::from_secs(30), || {
        let u2 = GpRepresentation::for_state(&GpState::uniform(2));
        let u3 = GpRepresentation::for_state(&GpState::uniform(3));
        let r = build_r(&u2, &u3, 2).unwrap();
        let intertwine = verify_intertwining(&r, &generators(6), 1, 1e-9).unwrap();
        let symmetry = verify_symmetry(&u2, &u3, 2, 1e-9).unwrap();
        let unitary = r.unitarity_defect();
        let ok = r.rank() == 36
            && unitary <= 1e-9
            && r.gram_residual() <= 1e-10
            && intertwine.pass()
            && symmetry.pass();
        verdict(
            ok,
            format!(
                "rank {}, ‖R†R - I‖ = {unitary:e}, intertwining {:e}, symmetry {:e}",
                r.rank(),
                intertwine.check("intertwine").unwrap().residual,
                symmetry.check("symmetry").unwrap().residual
            ),
        )
    })
}

fn ac6() -> Outcome {
    timed(Duration::from_secs(60), || {
        let (p2, p3, p5) = (
            GpRepresentation::standard(2),
            GpRepresentation::standard(3),
            GpRepresentation::standard(5),
        );
        let exact = verify_ybe([&p2, &p3, &p5], 1, 0.0).unwrap();
        let u2 = GpRepresentation::for_state(&GpState::uniform(2));
        let u3 = GpRepresentation::for_state(&GpState::uniform(3));
        let twisted = verify_ybe([&u2, &u3, &u2], 1, 1e-9).unwrap();
        verdict(
            exact.pass() && twisted.pass(),
            format!(
                "(ω_2,ω_3,ω_5) max residual {:e}; (ρ_u2,ρ_u3,ρ_u2) max residual {:e}",
                exact.max_residual(),
                twisted.max_residual()
            ),
        )
    })
}

fn ac7() -> Outcome {
    let states = [
        ("ω_2", GpRepresentation::standard(2)),
        ("ω_3", GpRepresentation::standard(3)),
        ("ρ_u2", GpRepresentation::for_state(&GpState::uniform(2))),
    ];
    let mut identity_residual = 0.0f64;
    let mut flip_residual = 0.0f64;
    for (_, rep) in &states {
        let r = build_r(rep, rep, 2).unwrap();
        for q in r.basis() {
            let image = apply_r(&r, q).unwrap();
            identity_residual = identity_residual.max(image.distance(q));
            flip_residual = flip_residual.max(image.distance(&q.swap()));
        }
    }
    if identity_residual <= 1e-12 {
        return Outcome::Pass(format!("R(ω,ω) = I, residual {identity_residual:e}"));
    }
    let msg = format!(
        "R(ω,ω) is not the identity (residual {identity_residual:.3}); it is the flip τ, residual {flip_residual:e}"
    );
    if flip_residual <= 1e-12 {
        Outcome::KnownFail(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn ac8() -> Outcome {
    timed(Duration::from_secs(60), || {
        for (n, m) in [(2usize, 3usize), (3, 2), (2, 5)] {
            for depth in 0..=3usize {
                let built = build_r(
                    &GpRepresentation::standard(n),
                    &GpRepresentation::standard(m),
                    depth,
                )
                .unwrap();
                let closed = radix_swap_r(n, m, depth).unwrap();
                let oracle = brute_force_swap(n as u64, m as u64, depth as u32);
                if built.permutation() != closed.permutation()
                    || closed.permutation() != Some(&oracle)
                {
                    return Outcome::Fail(format!(
                        "permutations differ for ({n},{m}) depth {depth}"
                    ));
                }
                for (&source, &target) in &oracle {
                    let image = apply_r(&built, &Tensor2Vector::basis(source)).unwrap();
                    if image != Tensor2Vector::basis(target) {
                        return Outcome::Fail(format!(
                            "dense R differs at {source:?} for ({n},{m}) depth {depth}"
                        ));
                    }
                }
            }
        }
        Outcome::Pass("closed form = build_r exactly for (2,3),(3,2),(2,5), depth ≤ 3".into())
    })
}

fn ac9() -> Outcome {
    let mut ranks = Vec::new();
    for (n, m) in [(2usize, 3usize), (2, 5)] {
        for uniform in [false, true] {
            let make = |k: usize| {
                if uniform {
                    GpRepresentation::for_state(&GpState::uniform(k))
                } else {
                    GpRepresentation::standard(k)
                }
            };
            for depth in 0..=2u32 {
                let rank = span_basis(&make(n), &make(m), depth as usize)
                    .unwrap()
                    .rank();
                if rank != (n * m).pow(depth) {
                    return Outcome::Fail(format!(
                        "rank {rank} for ({n},{m}) depth {depth}, uniform={uniform}"
                    ));
                }
                ranks.push(rank);
            }
        }
    }
    Outcome::Pass(format!("span ranks {ranks:?}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1 R(ω_2,ω_3) on e_1⊗e_3", ac1),
        ("AC2 non-commuting counterexample", ac2),
        ("AC3 coassociativity", ac3),
        ("AC4 ⋆ product equals ⊠", ac4),
        ("AC5 unitarity, intertwining, symmetry", ac5),
        ("AC6 Yang-Baxter", ac6),
        ("AC7 R(ω,ω) = I", ac7),
        ("AC8 closed-form equivalence", ac8),
        ("AC9 cyclicity evidence", ac9),
    ];
    let mut unexpected = 0;
    for (name, run) in criteria {
        match run() {
            Outcome::Pass(msg) => println!("[PASS] {name}: {msg}"),
            Outcome::Fail(msg) => {
                unexpected += 1;
                println!("[FAIL] {name}: {msg}");
            }
            Outcome::KnownFail(msg) => println!("[FAIL] {name} (known, see README): {msg}"),
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
