mod common;

use common::{all_option_sets, random_model};
use proptest::prelude::*;
use uvl2ivml::ivml::{render_expr, IvmlOp};
use uvl2ivml::uvl::print_uvl;
use uvl2ivml::transform::TransformError;
use uvl2ivml::{emit_ivml, Naming, parse_ivml_subset, parse_uvl, transform, IvmlExpr};

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn uvl_print_parse(seed in any::<u64>()) {
        let model = random_model(seed, 12);
        let reparsed = parse_uvl(&print_uvl(&model)).unwrap();
        prop_assert!(reparsed.structurally_eq(&model));
    }

    #[test]
    fn ivml_emit_parse(seed in any::<u64>()) {
        let model = random_model(seed, 12);
        for opts in all_option_sets() {
            let (project, _) = match transform(&model, &opts) {
                Ok(r) => r,
                // pretty names reuse parent names, which may clash with Boolean variables
                Err(TransformError::NameCollision { .. }) if opts.naming == Naming::Pretty => continue,
                Err(e) => panic!("{e}"),
            };
            let text = emit_ivml(&project).unwrap();
            prop_assert_eq!(parse_ivml_subset(&text).unwrap(), project);
            // deterministic
            prop_assert_eq!(emit_ivml(&transform(&model, &opts).unwrap().0).unwrap(), text);
        }
    }

    #[test]
    fn expression_render_parse(expr in expr_strategy()) {
        let text = format!("project P {{ {}; }}", render_expr(&expr));
        let project = parse_ivml_subset(&text).unwrap();
        prop_assert_eq!(project.constraints().next().unwrap(), &expr);
    }
}

fn leaf() -> impl Strategy<Value = IvmlExpr> {
    prop_oneof![
        "[a-e]".prop_map(IvmlExpr::var),
        any::<bool>().prop_map(IvmlExpr::Bool),
        "[a-e]".prop_map(IvmlExpr::IsDefined),
        ("[s-u]", "[A-C]").prop_map(|(s, l)| IvmlExpr::includes(s, "E", l)),
    ]
}

fn numeric() -> impl Strategy<Value = IvmlExpr> {
    let atom = prop_oneof![
        (-50i64..50).prop_map(IvmlExpr::Int),
        (-400i32..400).prop_map(|v| IvmlExpr::Real(f64::from(v) / 8.0)),
        "[s-u]".prop_map(IvmlExpr::Size),
        "[n-p]".prop_map(IvmlExpr::var),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (arith_op(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| IvmlExpr::binary(op, l, r)),
            inner.prop_map(|e| IvmlExpr::Floor(Box::new(e))),
        ]
    })
}

fn arith_op() -> impl Strategy<Value = IvmlOp> {
    prop_oneof![Just(IvmlOp::Add), Just(IvmlOp::Sub), Just(IvmlOp::Mul), Just(IvmlOp::Div)]
}

fn comparison() -> impl Strategy<Value = IvmlExpr> {
    let op = prop_oneof![
        Just(IvmlOp::Lt),
        Just(IvmlOp::Le),
        Just(IvmlOp::Gt),
        Just(IvmlOp::Ge),
        Just(IvmlOp::Eq),
        Just(IvmlOp::Ne),
    ];
    (op, numeric(), numeric()).prop_map(|(op, l, r)| IvmlExpr::binary(op, l, r))
}

fn expr_strategy() -> impl Strategy<Value = IvmlExpr> {
    prop_oneof![leaf(), comparison()].prop_recursive(4, 24, 2, |inner| {
        let op = prop_oneof![
            Just(IvmlOp::And),
            Just(IvmlOp::Or),
            Just(IvmlOp::Implies),
            Just(IvmlOp::Iff),
        ];
        prop_oneof![
            (op, inner.clone(), inner.clone()).prop_map(|(op, l, r)| IvmlExpr::binary(op, l, r)),
            inner.prop_map(IvmlExpr::not),
        ]
    })
}
