//! Exhaustive cross-checks of the derived graph edges and the constant
//! folder against independent brute-force oracles.

#[path = "common/oracles.rs"]
mod oracles;

use rand::SeedableRng;
use viperkit_core::corpus::generate_corpus;
use viperkit_core::cpg::builder::build_cpg;
use viperkit_core::cpg::consts::{eval_const, ConstValue};
use viperkit_core::frontend::ast::StmtKind;
use viperkit_core::frontend::parser::parse;

#[test]
fn dominance_and_dataflow_match_brute_force_on_generated_corpus() {
    let mut checked = 0;
    for g in generate_corpus(3, 2) {
        let ast = parse(&g.sample.source).expect("generated samples parse");
        for f in &ast.functions {
            let cpg = build_cpg(&g.sample.source, f);
            if oracles::statement_count(&cpg) > 12 {
                continue;
            }
            if let Err(e) = oracles::check_graph_against_oracles(&cpg) {
                panic!("{}: {}", g.sample.sample_id, e);
            }
            checked += 1;
        }
    }
    assert!(checked >= 40, "expected to cross-check at least 40 functions, got {checked}");
}

fn fold(expr_text: &str) -> ConstValue {
    let src = format!("void f() {{ int probe = {}; }}", expr_text);
    let ast = parse(&src).unwrap_or_else(|e| panic!("expr `{expr_text}` fails to parse: {e}"));
    match &ast.functions[0].body.stmts[0].kind {
        StmtKind::Decl(d) => eval_const(d.declarators[0].init.as_ref().unwrap()),
        _ => unreachable!(),
    }
}

#[test]
fn eval_const_matches_independent_evaluator_on_seeded_expressions() {
    assert_eq!(fold("10*sizeof(int)"), ConstValue::Known(40));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for i in 0..1000 {
        let e = oracles::gen_expr(&mut rng, 4);
        let got = fold(&e.text);
        let want = e.expected.map(ConstValue::Known).unwrap_or(ConstValue::Unknown);
        assert_eq!(got, want, "expression {i}: {}", e.text);
    }
}
