//! Built-in plant/model pairs.
//!
//! | id | alias             | plant                  | model                  |
//! |----|-------------------|------------------------|------------------------|
//! | P1 | biased-quadratic  | (u₁−1)² + (u₂−1)²      | u₁² + u₂²              |
//! | P2 | wrong-curvature   | u²                     | −u²                    |
//! | P3 | rosenbrock-plant  | 100(u₂−u₁²)² + (1−u₁)² | u₁² + u₂²              |
//! | P4 | himmelblau-plant  | (u₁²+u₂−11)² + (u₁+u₂²−7)² | (u₁−1)² + (u₂−1)²  |

use crate::error::{Error, Result};

use super::{InputVector, ProblemPair, ScalarOracle};

/// Static description of a catalog problem.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub alias: &'static str,
    pub dim: usize,
    pub description: &'static str,
    /// Documented starting point used by the examples and acceptance runs.
    pub start: &'static [f64],
    build: fn() -> ProblemPair,
}

impl CatalogEntry {
    pub fn build(&self) -> ProblemPair {
        (self.build)()
    }
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        id: "P1",
        alias: "biased-quadratic",
        dim: 2,
        description: "shifted quadratic plant, origin-centred quadratic model (benign mismatch)",
        start: &[0.0, 0.0],
        build: biased_quadratic,
    },
    CatalogEntry {
        id: "P2",
        alias: "wrong-curvature",
        dim: 1,
        description: "convex plant, concave model (corrected model unbounded below)",
        start: &[3.0],
        build: wrong_curvature,
    },
    CatalogEntry {
        id: "P3",
        alias: "rosenbrock-plant",
        dim: 2,
        description: "Rosenbrock plant, isotropic quadratic model (hard nonconvex plant)",
        start: &[-1.2, 1.0],
        build: rosenbrock_plant,
    },
    CatalogEntry {
        id: "P4",
        alias: "himmelblau-plant",
        dim: 2,
        description: "Himmelblau plant with four minimizers, quadratic model centred at (1, 1)",
        start: &[0.0, 0.0],
        build: himmelblau_plant,
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    ENTRIES
}

/// Looks a problem up by id (`"P3"`) or alias (`"rosenbrock-plant"`).
pub fn problem(id: &str) -> Result<ProblemPair> {
    ENTRIES
        .iter()
        .find(|e| e.id.eq_ignore_ascii_case(id) || e.alias == id)
        .map(CatalogEntry::build)
        .ok_or_else(|| Error::UnknownProblem(id.to_string()))
}

fn sphere() -> ScalarOracle {
    ScalarOracle::from_fns(
        2,
        |u| u[0] * u[0] + u[1] * u[1],
        |u| vec![2.0 * u[0], 2.0 * u[1]],
    )
}

fn finish(pair: ProblemPair, description: &str, optimum: &[f64]) -> ProblemPair {
    pair.with_description(description)
        .with_known_optimum(InputVector::new(optimum.to_vec()).expect("finite optimum"))
        .expect("optimum matches dimension")
}

fn biased_quadratic() -> ProblemPair {
    let plant = ScalarOracle::from_fns(
        2,
        |u| (u[0] - 1.0).powi(2) + (u[1] - 1.0).powi(2),
        |u| vec![2.0 * (u[0] - 1.0), 2.0 * (u[1] - 1.0)],
    );
    let pair = ProblemPair::new("P1", plant, sphere()).expect("matching dims");
    finish(pair, ENTRIES[0].description, &[1.0, 1.0])
}

fn wrong_curvature() -> ProblemPair {
    let plant = ScalarOracle::from_fns(1, |u| u[0] * u[0], |u| vec![2.0 * u[0]]);
    let model = ScalarOracle::from_fns(1, |u| -u[0] * u[0], |u| vec![-2.0 * u[0]]);
    let pair = ProblemPair::new("P2", plant, model).expect("matching dims");
    finish(pair, ENTRIES[1].description, &[0.0])
}

fn rosenbrock_plant() -> ProblemPair {
    let plant = ScalarOracle::from_fns(
        2,
        |u| rosenbrock_value(u[0], u[1]),
        |u| {
            let a = u[1] - u[0] * u[0];
            vec![-400.0 * u[0] * a - 2.0 * (1.0 - u[0]), 200.0 * a]
        },
    );
    let pair = ProblemPair::new("P3", plant, sphere()).expect("matching dims");
    finish(pair, ENTRIES[2].description, &[1.0, 1.0])
}

/// Rosenbrock value in double-double arithmetic, so the result is within
/// about half an ulp. Plain evaluation loses several ulps at |u| ≈ 5, which
/// swamps central differences at small steps.
fn rosenbrock_value(x: f64, y: f64) -> f64 {
    let a = Dd::from(y).add(Dd::prod(x, x).neg());
    let b = Dd::sum(1.0, -x);
    let v = a.mul(a).mul(Dd::from(100.0)).add(b.mul(b));
    v.0 + v.1
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn from(x: f64) -> Self {
        Dd(x, 0.0)
    }

    fn sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }

    fn prod(a: f64, b: f64) -> Self {
        let p = a * b;
        Dd(p, a.mul_add(b, -p))
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Dd(s, lo - (s - hi))
    }

    fn neg(self) -> Self {
        Dd(-self.0, -self.1)
    }

    fn add(self, o: Dd) -> Self {
        let s = Dd::sum(self.0, o.0);
        Dd::renorm(s.0, s.1 + self.1 + o.1)
    }

    fn mul(self, o: Dd) -> Self {
        let p = Dd::prod(self.0, o.0);
        Dd::renorm(p.0, p.1 + self.0 * o.1 + self.1 * o.0)
    }
}

fn himmelblau_plant() -> ProblemPair {
    let plant = ScalarOracle::from_fns(
        2,
        |u| {
            let a = u[0] * u[0] + u[1] - 11.0;
            let b = u[0] + u[1] * u[1] - 7.0;
            a * a + b * b
        },
        |u| {
            let a = u[0] * u[0] + u[1] - 11.0;
            let b = u[0] + u[1] * u[1] - 7.0;
            vec![4.0 * u[0] * a + 2.0 * b, 2.0 * a + 4.0 * u[1] * b]
        },
    );
    let model = ScalarOracle::from_fns(
        2,
        |u| (u[0] - 1.0).powi(2) + (u[1] - 1.0).powi(2),
        |u| vec![2.0 * (u[0] - 1.0), 2.0 * (u[1] - 1.0)],
    );
    let pair = ProblemPair::new("P4", plant, model).expect("matching dims");
    finish(pair, ENTRIES[3].description, &[3.0, 2.0])
}
