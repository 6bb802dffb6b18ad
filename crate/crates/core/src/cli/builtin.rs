//! Built-in scenarios.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::scenario::{
    ChartSpec, CheckEntry, CheckSpec, PatchRef, PatchSpec, PeriodicSpec, Sampling, Scenario,
    WarpedSpec, DEFAULT_COUNT, DEFAULT_RESOLUTION, DEFAULT_TRIALS,
};

/// Registry names. `euclidean-n` and `round-sphere-m` also accept a
/// dimension suffix, e.g. `euclidean-4`.
pub const BUILTINS: &[&str] = &[
    "euclidean-n",
    "gaussian-soliton",
    "hyperbolic-halfspace",
    "round-sphere-m",
    "paper-example-hyperbolic",
    "paper-example-cylinder",
    "line-exp-warped-witness",
    "flat-torus-2",
    "torus-section33",
];

const GEOMETRY_CHECKS: &[&str] = &[
    "riemann-symmetries",
    "metric-compatibility",
    "contracted-bianchi",
    "hessian-symmetry",
    "traceless-hessian",
    "bochner-lemma-a",
    "bochner-lemma-b",
    "oracle-metric",
    "oracle-scalar-curvature",
];

const SOLITON_CHECKS: &[&str] = &[
    "soliton-residual",
    "gradient-soliton-residual",
    "nabla-xi-residual",
    "generalized-geodesic",
    "trace-identity",
    "pairing-identity",
    "lambda-quadratic",
    "lambda-quadratic-printed",
    "bochner-formula",
    "ricci-contraction",
    "ricci-contraction-scalar",
    "ricci-contraction-printed",
    "fit-constants",
];

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn ids(xs: &[&str]) -> Vec<CheckSpec> {
    xs.iter().map(|s| CheckSpec::Id(s.to_string())).collect()
}

fn fields(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn coords(prefix: &str, short: &[&str], n: usize) -> Vec<String> {
    if n <= short.len() {
        strings(&short[..n])
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn diagonal(n: usize, entry: &str) -> Vec<Vec<String>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        entry.to_string()
                    } else {
                        "0".to_string()
                    }
                })
                .collect()
        })
        .collect()
}

fn chart(coords: Vec<String>, constraints: &[&str]) -> ChartSpec {
    ChartSpec {
        dimension: Some(coords.len()),
        coords,
        constraints: strings(constraints),
    }
}

fn sampling(seed: u64, bounds: Vec<[f64; 2]>) -> Sampling {
    Sampling {
        seed,
        count: DEFAULT_COUNT,
        bounds,
    }
}

fn sum_of_squares(cs: &[String]) -> String {
    cs.iter()
        .map(|c| format!("{c}^2"))
        .collect::<Vec<_>>()
        .join("+")
}

fn euclidean(n: usize) -> Result<Scenario> {
    if n == 0 {
        return Err(Error::scenario("builtin", "dimension must be at least 1"));
    }
    let cs = coords("x", &["x", "y", "z"], n);
    let f = if n == 1 {
        format!("sin({0})+{0}^3", cs[0])
    } else {
        format!("sin({0})*{1}+{1}^2*{0}", cs[0], cs[n - 1])
    };
    Ok(Scenario {
        name: format!("euclidean-{n}"),
        chart: Some(chart(cs, &[])),
        metric: Some(diagonal(n, "1")),
        fields: fields(&[("f", &f), ("scal_expected", "0")]),
        vector_fields: BTreeMap::new(),
        sampling: sampling(1, vec![[-1.0, 1.0]; n]),
        checks: ids(&[&["scalar-curvature"], GEOMETRY_CHECKS].concat()),
        warped: None,
        periodic: None,
    })
}

fn round_sphere(m: usize) -> Result<Scenario> {
    if m < 2 {
        return Err(Error::scenario(
            "builtin",
            "sphere dimension must be at least 2",
        ));
    }
    let cs = coords("u", &["u", "v", "w"], m);
    let factor = format!("4/(1+{})^2", sum_of_squares(&cs));
    let f = format!("{0}^2-{1}", cs[0], cs[1]);
    let scal = format!("{}", m * (m - 1));
    Ok(Scenario {
        name: format!("round-sphere-{m}"),
        chart: Some(chart(cs, &[])),
        metric: Some(diagonal(m, &factor)),
        fields: fields(&[("f", &f), ("scal_expected", &scal)]),
        vector_fields: BTreeMap::new(),
        sampling: sampling(2, vec![[-1.0, 1.0]; m]),
        checks: ids(&[&["scalar-curvature"], GEOMETRY_CHECKS].concat()),
        warped: None,
        periodic: None,
    })
}

fn gaussian() -> Scenario {
    let cs = strings(&["x", "y", "z"]);
    Scenario {
        name: "gaussian-soliton".into(),
        chart: Some(chart(cs, &[])),
        metric: Some(diagonal(3, "1")),
        fields: fields(&[
            ("f", "(x^2+y^2+z^2)/2"),
            ("lambda", "-1"),
            ("mu", "0"),
            ("scal_expected", "0"),
        ]),
        vector_fields: BTreeMap::new(),
        sampling: sampling(3, vec![[-1.0, 1.0]; 3]),
        checks: ids(&[
            &["scalar-curvature", "riemann-symmetries"],
            SOLITON_CHECKS,
            &["grad-scal-alignment", "maximum-principle", "constant-scal"],
        ]
        .concat()),
        warped: None,
        periodic: None,
    }
}

fn half_space_chart() -> ChartSpec {
    chart(strings(&["x", "y", "z"]), &["z"])
}

fn half_space_box() -> Vec<[f64; 2]> {
    vec![[-1.0, 1.0], [-1.0, 1.0], [0.25, 2.0]]
}

fn hyperbolic() -> Scenario {
    Scenario {
        name: "hyperbolic-halfspace".into(),
        chart: Some(half_space_chart()),
        metric: Some(diagonal(3, "z^(-2)")),
        fields: fields(&[
            ("f", "-ln(z)"),
            ("lambda", "-7"),
            ("mu", "1"),
            ("scal_expected", "-6"),
        ]),
        vector_fields: BTreeMap::new(),
        sampling: sampling(4, half_space_box()),
        checks: ids(&[
            &[
                "scalar-curvature",
                "riemann-symmetries",
                "oracle-scalar-curvature",
            ],
            SOLITON_CHECKS,
            &["grad-scal-alignment", "constant-scal"],
        ]
        .concat()),
        warped: None,
        periodic: None,
    }
}

fn worked_hyperbolic() -> Scenario {
    Scenario {
        name: "paper-example-hyperbolic".into(),
        chart: Some(half_space_chart()),
        metric: Some(diagonal(3, "z^(-2)")),
        fields: fields(&[
            ("f", "-ln(z)"),
            ("lambda", "-8"),
            ("mu", "2"),
            ("scal_expected", "-6"),
        ]),
        vector_fields: BTreeMap::new(),
        sampling: sampling(5, half_space_box()),
        checks: ids(&[
            "scalar-curvature",
            "fit-constants",
            "paper-constants-audit",
            "lambda-quadratic-printed",
        ]),
        warped: None,
        periodic: None,
    }
}

fn worked_cylinder() -> Scenario {
    let mut bounds = half_space_box();
    bounds.extend([[-1.0, 1.0]; 3]);
    Scenario {
        name: "paper-example-cylinder".into(),
        chart: None,
        metric: None,
        fields: fields(&[
            ("f", "-ln(z)"),
            ("lambda", "-2"),
            ("mu", "2"),
            ("scal_expected", "0"),
        ]),
        vector_fields: BTreeMap::new(),
        sampling: sampling(6, bounds),
        checks: ids(&[
            "scalar-curvature",
            "warped-scal",
            "lift",
            "paper-constants-audit",
        ]),
        warped: Some(WarpedSpec {
            base: PatchRef::Named("builtin:hyperbolic-halfspace".into()),
            fiber: PatchRef::Named("builtin:round-sphere-3".into()),
            phi: "1".into(),
        }),
        periodic: None,
    }
}

fn line_witness() -> Scenario {
    Scenario {
        name: "line-exp-warped-witness".into(),
        chart: None,
        metric: None,
        fields: fields(&[("f", "t"), ("lambda", "2*exp(-2*t)-7"), ("mu", "1")]),
        vector_fields: BTreeMap::new(),
        sampling: sampling(7, vec![[-1.0, 1.0]; 3]),
        checks: ids(&[
            "warped-scal",
            "lift",
            "warped-base-condition",
            "warped-fiber-scal",
            "warped-base-soliton",
            "warped-product-soliton",
            "warped-fiber-hessian",
            "warped-reduction",
            "tensor-condition",
            "tensor-condition-trace",
            "tensor-condition-nabla-xi",
            "hessian-divergence",
            "div-hess-condition",
            "div-hess-xi-condition",
        ]),
        warped: Some(WarpedSpec {
            base: PatchRef::Inline(PatchSpec {
                name: "line".into(),
                chart: chart(strings(&["t"]), &[]),
                metric: vec![vec!["1".into()]],
            }),
            fiber: PatchRef::Named("builtin:round-sphere-2".into()),
            phi: "exp(t)".into(),
        }),
        periodic: None,
    }
}

fn torus(
    name: &str,
    factor: &str,
    f: &str,
    phi: &str,
    seed: u64,
    checks: Vec<CheckSpec>,
) -> Scenario {
    let period = 2.0 * PI;
    Scenario {
        name: name.into(),
        chart: Some(chart(strings(&["x", "y"]), &[])),
        metric: Some(diagonal(2, factor)),
        fields: fields(&[("f", f), ("mu", "0.5"), ("phi", phi)]),
        vector_fields: BTreeMap::new(),
        sampling: sampling(seed, vec![[0.0, period]; 2]),
        checks,
        warped: None,
        periodic: Some(PeriodicSpec {
            periods: vec![period; 2],
            resolution: DEFAULT_RESOLUTION,
            trials: DEFAULT_TRIALS,
        }),
    }
}

fn integral_checks() -> Vec<CheckSpec> {
    let mut out = vec![CheckSpec::Detailed(CheckEntry {
        id: "divergence-theorem".into(),
        tol: Some(1e-10),
    })];
    out.extend(ids(&[
        "integration-by-parts",
        "traceless-chain",
        "aggregate-identity",
        "rigidity-trials",
    ]));
    out
}

fn flat_torus() -> Scenario {
    let mut checks = ids(&["scalar-curvature"]);
    checks.extend(integral_checks());
    checks.extend(ids(&["hessian-divergence"]));
    let mut sc = torus(
        "flat-torus-2",
        "1",
        "sin(x)+0.5*cos(2*y)+0.3*sin(x+y)",
        "1",
        8,
        checks,
    );
    sc.fields.insert("scal_expected".into(), "0".into());
    sc
}

fn torus_divergence() -> Scenario {
    let mut checks = integral_checks();
    checks.extend(ids(&[
        "hessian-divergence",
        "div-phi-expansion",
        "div-mu-expansion",
        "div-hess-condition",
        "div-hess-split",
        "div-hess-xi-condition",
    ]));
    torus(
        "torus-section33",
        "1+0.25*sin(x)*cos(y)",
        "sin(x)*cos(y)+0.4*cos(2*x)",
        "2+sin(x+y)",
        9,
        checks,
    )
}

fn suffix(name: &str, prefix: &str, default: usize) -> Option<Result<usize>> {
    let rest = name.strip_prefix(prefix)?;
    Some(match rest {
        "n" | "m" => Ok(default),
        digits => digits
            .parse()
            .map_err(|_| Error::scenario("builtin", format!("bad dimension in `{name}`"))),
    })
}

/// Looks up a built-in scenario.
pub fn builtin(name: &str) -> Result<Scenario> {
    if let Some(n) = suffix(name, "euclidean-", 3) {
        return euclidean(n?);
    }
    if let Some(m) = suffix(name, "round-sphere-", 3) {
        return round_sphere(m?);
    }
    Ok(match name {
        "gaussian-soliton" => gaussian(),
        "hyperbolic-halfspace" => hyperbolic(),
        "paper-example-hyperbolic" => worked_hyperbolic(),
        "paper-example-cylinder" => worked_cylinder(),
        "line-exp-warped-witness" => line_witness(),
        "flat-torus-2" => flat_torus(),
        "torus-section33" => torus_divergence(),
        _ => {
            return Err(Error::scenario(
                "builtin",
                format!(
                    "unknown builtin `{name}`; available: {}",
                    BUILTINS.join(", ")
                ),
            ))
        }
    })
}
