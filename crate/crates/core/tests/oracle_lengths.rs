//! Independent dense oracle for the length computations.
//!
//! Everything here goes through one-shot dense Gaussian elimination on the
//! full truncated coordinate space (`image_span` + `preimage_space` +
//! `dim_quotient`), bypassing the leveled elimination and normal-form table
//! the production path uses. The two routes must agree, and the expected
//! values frozen below were computed with this oracle.

use gradmod_core::jets::JetBasis;
use gradmod_core::linalg::{dim_quotient, span, EchelonSpan, LinearOp, VectorOverField};
use gradmod_core::poly::parse_polynomial;
use gradmod_core::trunc::{image_span, ModuleWindow, Presentation, TruncationWindow};
use gradmod_core::{Field, MultiPolynomial};

fn pres(vars: &[&str], rows: &[&[&str]]) -> Presentation {
    let field = Field::default_prime();
    let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let entries = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| parse_polynomial(&field, &names, s).unwrap())
                .collect()
        })
        .collect();
    Presentation::new(field, entries).unwrap()
}

fn poly(vars: &[&str], text: &str) -> MultiPolynomial {
    let field = Field::default_prime();
    let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    parse_polynomial(&field, &names, text).unwrap()
}

/// Dense span of `n^a F + im φ` inside the degree-`d` window.
fn dense_power_plus_image(p: &Presentation, jets: &JetBasis, d: usize, a: usize) -> EchelonSpan {
    let mut s = image_span(p, d).unwrap();
    for coord in jets.coords_of_degrees(a.min(d), d) {
        let mut v = vec![0u64; jets.ncoords()];
        v[coord] = 1;
        s.insert(v);
    }
    s
}

/// Multiplication by a polynomial as a dense linear map on jets.
fn mul_op<'a>(
    jets: &'a JetBasis,
    g: &'a MultiPolynomial,
) -> impl Fn(&Field, &VectorOverField) -> VectorOverField + 'a {
    move |field: &Field, v: &VectorOverField| {
        let mut out = vec![0u64; jets.ncoords()];
        for (coord, &val) in v.iter().enumerate() {
            if val == 0 {
                continue;
            }
            let mono = jets.coord_mono(coord);
            let comp = jets.coord_comp(coord);
            for (e, c) in g.terms() {
                if let Some(m) = jets.mul_mono(mono, e) {
                    let target = jets.coord(m, comp);
                    out[target] = field.add(out[target], field.mul(val, c));
                }
            }
        }
        out
    }
}

type BoxedOp<'a> = Box<dyn Fn(&Field, &VectorOverField) -> VectorOverField + 'a>;

fn full_space(field: Field, jets: &JetBasis) -> EchelonSpan {
    span(
        field,
        jets.ncoords(),
        (0..jets.ncoords()).map(|i| {
            let mut v = vec![0u64; jets.ncoords()];
            v[i] = 1;
            v
        }),
    )
}

/// Dense `ℓ((m^a M : gs) / m^n M)`.
fn dense_colon_quotient(
    p: &Presentation,
    d: usize,
    gs: &[&MultiPolynomial],
    a: usize,
    n: usize,
) -> usize {
    let field = *p.field();
    let jets = JetBasis::new(p.nvars(), p.size(), d);
    let target = dense_power_plus_image(p, &jets, d, a);
    let w = full_space(field, &jets);
    let ops: Vec<BoxedOp<'_>> = gs
        .iter()
        .map(|g| Box::new(mul_op(&jets, g)) as BoxedOp<'_>)
        .collect();
    let op_refs: Vec<&dyn LinearOp> = ops.iter().map(|b| b as &dyn LinearOp).collect();
    let colon = gradmod_core::linalg::preimage_space(&w, &op_refs, &target);
    let base = dense_power_plus_image(p, &jets, d, n);
    dim_quotient(&colon, &base)
}

#[test]
fn dense_b_values_case_1_4() {
    // b(z) = z against a generic linear form, frozen from Singh's equality
    // and reproduced by the dense colon oracle and by the production path.
    let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
    let x = poly(&["x", "y"], "x + 7*y");
    let d = 8;
    let win = ModuleWindow::build(&p, TruncationWindow::for_degree(&p, d + 2).unwrap()).unwrap();
    for n in 1..=4usize {
        let dense = dense_colon_quotient(&p, d, &[&x], n + 1, n);
        let fast = win.colon_length(&x, n).unwrap();
        let frozen = usize::from(n == 1);
        assert_eq!(dense, frozen, "dense b_{n}");
        assert_eq!(fast, frozen, "fast b_{n}");
    }
}

#[test]
fn dense_b_values_vanish_case_1_3() {
    let p = pres(&["x", "y"], &[&["y^2", "0"], &["x^2", "y"]]);
    let x = poly(&["x", "y"], "x + 11*y");
    for n in 1..=3usize {
        assert_eq!(dense_colon_quotient(&p, 8, &[&x], n + 1, n), 0);
    }
}

#[test]
fn dense_ratliff_rush_union_case_1_4() {
    // The union ∪_i (m^{1+i}M : m^i) stabilizes at ℓ(m̃M/mM) = 1; computed
    // densely, with the monomial colon at each stage.
    let p = pres(&["x", "y"], &[&["y^2", "0"], &["x", "y"]]);
    let field = *p.field();
    let d = 8;
    let jets = JetBasis::new(2, 2, d);
    let w = full_space(field, &jets);
    let base = dense_power_plus_image(&p, &jets, d, 1);
    let mut lens = Vec::new();
    for i in 0..=3usize {
        let monos: Vec<MultiPolynomial> = jets
            .monos_of_degree(i)
            .map(|m| {
                MultiPolynomial::from_terms(2, &field, [(jets.mono_exponents(m).clone(), 1u64)])
            })
            .collect();
        let target = dense_power_plus_image(&p, &jets, d, 1 + i);
        let ops: Vec<BoxedOp<'_>> = monos
            .iter()
            .map(|g| Box::new(mul_op(&jets, g)) as BoxedOp<'_>)
            .collect();
        let op_refs: Vec<&dyn LinearOp> = ops.iter().map(|b| b as &dyn LinearOp).collect();
        let colon = gradmod_core::linalg::preimage_space(&w, &op_refs, &target);
        lens.push(dim_quotient(&colon, &base));
    }
    // Ascending and stabilized at 1 from i = 1 on.
    assert_eq!(lens, vec![0, 1, 1, 1]);
}

#[test]
fn dense_rho_values() {
    // ℓ(m^{n+1}M / J m^n M) computed densely: J-multiples + image, one shot.
    let p = pres(&["x", "y"], &[&["y^2", "0"], &["x^2", "y"]]);
    let field = *p.field();
    let x = poly(&["x", "y"], "x + 5*y");
    let d = 9;
    let jets = JetBasis::new(2, 2, d);
    let win = ModuleWindow::build(&p, TruncationWindow::for_degree(&p, d + 3).unwrap()).unwrap();
    for n in 0..=2usize {
        let mut gens: Vec<VectorOverField> = Vec::new();
        let op = mul_op(&jets, &x);
        for deg in n..d {
            for m in jets.monos_of_degree(deg) {
                for comp in 0..2 {
                    let mut v = vec![0u64; jets.ncoords()];
                    v[jets.coord(m, comp)] = 1;
                    gens.push(op(&field, &v));
                }
            }
        }
        let mut denom = image_span(&p, d).unwrap();
        for g in gens {
            denom.insert(g);
        }
        let numer = dense_power_plus_image(&p, &jets, d, n + 1);
        let dense = dim_quotient(&numer, &denom);
        let fast = win.power_mod_j_len(std::slice::from_ref(&x), n).unwrap();
        let frozen = usize::from(n == 0);
        assert_eq!(dense, frozen, "dense rho_{n}");
        assert_eq!(fast, frozen, "fast rho_{n}");
    }
}

#[test]
fn dense_vv_delta_case_2_5() {
    // The δ = 2 stratum, realized on a worked example: the
    // Valabrega-Valla lengths sum to 2. The dense route intersects with the
    // modular law: A ∩ (B + n^c F) = (A ∩ B) + n^c F for c > n, so
    // dim(A ∩ B_c) = rk A + rk B_c - rk(A + B_c), stabilized over c.
    let p = pres(
        &["x", "y", "z"],
        &[&["x", "y", "z"], &["x^2", "x^2", "0"], &["0", "0", "x^2"]],
    );
    let field = *p.field();
    let forms = [
        poly(&["x", "y", "z"], "x + 3*z"),
        poly(&["x", "y", "z"], "y + 5*z"),
    ];
    let d = 8;
    let jets = JetBasis::new(3, 3, d);
    let image = image_span(&p, d).unwrap();
    let j_multiples = |lo: usize| -> Vec<VectorOverField> {
        let mut gens = Vec::new();
        for form in &forms {
            let op = mul_op(&jets, form);
            for deg in lo..d {
                for m in jets.monos_of_degree(deg) {
                    for comp in 0..3 {
                        let mut v = vec![0u64; jets.ncoords()];
                        v[jets.coord(m, comp)] = 1;
                        gens.push(op(&field, &v));
                    }
                }
            }
        }
        gens
    };
    let with_power = |base: &EchelonSpan, c: usize| -> EchelonSpan {
        let mut s = base.clone();
        for coord in jets.coords_of_degrees(c.min(d), d) {
            let mut v = vec![0u64; jets.ncoords()];
            v[coord] = 1;
            s.insert(v);
        }
        s
    };
    let vv_dense = |n: usize| -> usize {
        let a_span = dense_power_plus_image(&p, &jets, d, n + 1);
        let mut jf = image.clone();
        for g in j_multiples(0) {
            jf.insert(g);
        }
        let mut jmn = image.clone();
        for g in j_multiples(n) {
            jmn.insert(g);
        }
        let mut prev = None;
        for c in (n + 2)..d {
            let b_c = with_power(&jf, c);
            let x_c = with_power(&jmn, c);
            let a_plus_b = a_span.sum(&b_c);
            let inter = a_span.rank() + b_c.rank() - a_plus_b.rank();
            let len = inter - x_c.rank();
            if prev == Some(len) {
                return len;
            }
            prev = Some(len);
        }
        panic!("vv did not stabilize inside the dense window");
    };
    let win = ModuleWindow::build(&p, TruncationWindow::default_for(&p).unwrap()).unwrap();
    let fast = win.vv_lengths(&forms, 2).unwrap();
    let dense: Vec<usize> = (0..=2).map(vv_dense).collect();
    assert_eq!(dense, fast);
    assert_eq!(dense.iter().sum::<usize>(), 2, "δ = 2 in this stratum");
}

#[test]
fn dense_hilbert_values_three_vars() {
    let p = pres(
        &["x", "y", "z"],
        &[&["x", "y", "0"], &["x^2", "x^2", "0"], &["0", "0", "x^2"]],
    );
    let d = 7;
    let dense = image_span(&p, d).unwrap();
    let jets = JetBasis::new(3, 3, d);
    let win = ModuleWindow::build(&p, TruncationWindow::default_for(&p).unwrap()).unwrap();
    for n in 0..=d.min(win.safe_degree()) {
        let pivots = dense.pivots_in(jets.coords_of_degrees(n, n));
        assert_eq!(
            win.hilbert_value(n).unwrap(),
            jets.dim_degree(n) - pivots,
            "H({n})"
        );
    }
}

#[test]
fn dense_dim_quotient_derived_example() {
    // Ranks 3 and 2 with a one-dimensional intersection in F_p^5 give
    // dim (U + W)/W = 2; frozen from the dense elimination.
    let field = Field::default_prime();
    let e = |i: usize| -> VectorOverField {
        let mut v = vec![0u64; 5];
        v[i] = 1;
        v
    };
    let u = span(field, 5, vec![e(0), e(1), e(2)]);
    let mut mixed = e(2);
    mixed[3] = 0;
    let w = span(field, 5, vec![mixed, e(3)]);
    assert_eq!(u.rank(), 3);
    assert_eq!(w.rank(), 2);
    assert_eq!(dim_quotient(&u, &w), 2);
    assert_eq!(u.sum(&w).rank(), 4);
}

#[test]
fn dense_splitting_type_oracle() {
    // Dimension-zero reduction of diag(y^2, y^3): H = (2, 2, 1, 0) and the
    // conjugate splitting is (2, 3).
    let p = pres(&["y"], &[&["y^2", "0"], &["0", "y^3"]]);
    let d = 6;
    let dense = image_span(&p, d).unwrap();
    let jets = JetBasis::new(1, 2, d);
    let values: Vec<usize> = (0..=4)
        .map(|n| jets.dim_degree(n) - dense.pivots_in(jets.coords_of_degrees(n, n)))
        .collect();
    assert_eq!(values, vec![2, 2, 1, 0, 0]);
    let a = gradmod_core::SplittingType::from_hilbert(&values).unwrap();
    assert_eq!(a.0, vec![2, 3]);
}
