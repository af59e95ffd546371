//! Frame fixtures: a quasi-orthonormal frame at one point, its Gram matrix,
//! the ambient connection on tangent directions, and the decomposition of ξ.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_traits::Zero;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameRole {
    Radical,
    Screen,
    Transversal,
    ScreenTransversal,
    AmbientOnly,
}

impl FrameRole {
    pub fn name(self) -> &'static str {
        match self {
            FrameRole::Radical => "radical",
            FrameRole::Screen => "screen",
            FrameRole::Transversal => "transversal",
            FrameRole::ScreenTransversal => "screen_transversal",
            FrameRole::AmbientOnly => "ambient_only",
        }
    }

    fn rank(self) -> u8 {
        match self {
            FrameRole::Radical => 0,
            FrameRole::Screen => 1,
            FrameRole::Transversal => 2,
            FrameRole::ScreenTransversal => 3,
            FrameRole::AmbientOnly => 4,
        }
    }
}

/// The ambient connection the fixture's table comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionKind {
    /// Torsion `η(Y)X - η(X)Y`, non-metricity driven by `η`.
    SemiSymmetricNonMetric,
    LeviCivita,
}

impl ConnectionKind {
    pub fn name(self) -> &'static str {
        match self {
            ConnectionKind::SemiSymmetricNonMetric => "semi_symmetric_non_metric",
            ConnectionKind::LeviCivita => "levi_civita",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("fixture is not valid TOML: {0}")]
    Syntax(String),
    #[error("bad scalar in {context}: {message}")]
    Scalar { context: String, message: String },
    #[error("{context} refers to unknown frame vector {name:?}")]
    UnknownFrame { context: String, name: String },
    #[error("frame vector {0:?} is declared twice")]
    DuplicateFrame(String),
    #[error("expected {expected} frame vector(s) with role {role}, found {found}")]
    RoleCount {
        role: &'static str,
        expected: &'static str,
        found: usize,
    },
    #[error("dimension is {declared} but {frames} frame vectors are declared")]
    Dimension { declared: usize, frames: usize },
    #[error("metric invariant {invariant} fails: found {found}")]
    Invariant { invariant: String, found: String },
    #[error("metric entry g({a},{b}) is declared twice with different values")]
    ConflictingMetric { a: String, b: String },
    #[error("screen metric is degenerate")]
    DegenerateScreen,
    #[error("ambient metric is degenerate")]
    DegenerateMetric,
    #[error("declared signature {declared:?} but the metric has {negative} negative and {positive} positive directions")]
    Signature {
        declared: String,
        negative: usize,
        positive: usize,
    },
    #[error("{table} entry ({x}, {y}) must have a tangent vector in the {slot} slot")]
    Direction {
        table: &'static str,
        x: String,
        y: String,
        slot: &'static str,
    },
    #[error("{table} entry {entry} is declared twice")]
    Duplicate { table: &'static str, entry: String },
    #[error("xi screen component {0:?} is not a screen vector")]
    XiComponent(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Text(String),
    Int(i64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    name: String,
    role: FrameRole,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    a: String,
    b: String,
    value: RawScalar,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTriple {
    x: String,
    y: String,
    #[serde(default)]
    result: BTreeMap<String, RawScalar>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetricDerivative {
    along: String,
    a: String,
    b: String,
    value: RawScalar,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawXi {
    #[serde(default)]
    a: Option<RawScalar>,
    #[serde(default)]
    b: Option<RawScalar>,
    #[serde(default)]
    e: Option<RawScalar>,
    #[serde(default)]
    screen: BTreeMap<String, RawScalar>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixture {
    name: String,
    #[serde(default)]
    description: String,
    dimension: usize,
    #[serde(default)]
    signature: Option<String>,
    connection_kind: ConnectionKind,
    #[serde(default = "default_strict")]
    strict: bool,
    #[serde(default)]
    evaluation_point: BTreeMap<String, RawScalar>,
    frame: Vec<RawFrame>,
    #[serde(default)]
    metric: Vec<RawMetric>,
    #[serde(default)]
    connection: Vec<RawTriple>,
    xi: RawXi,
    #[serde(default)]
    bracket: Option<Vec<RawTriple>>,
    #[serde(default)]
    metric_derivative: Option<Vec<RawMetricDerivative>>,
}

fn default_strict() -> bool {
    true
}

impl RawScalar {
    fn text(&self) -> String {
        match self {
            RawScalar::Text(s) => s.clone(),
            RawScalar::Int(i) => i.to_string(),
        }
    }

    fn parse<S: Scalar>(&self, context: impl Fn() -> String) -> Result<S, FixtureError> {
        S::parse_scalar(&self.text()).map_err(|e| FixtureError::Scalar {
            context: context(),
            message: e.to_string(),
        })
    }
}

/// A validated fixture. Frame vectors are stored in the canonical order
/// `E, Z_1..Z_n, N, W, ambient-only...`; the first `n + 1` are tangent.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFixture<S> {
    pub name: String,
    pub description: String,
    pub kind: ConnectionKind,
    /// When set, a failed compatibility check is an error rather than a
    /// reported residual.
    pub strict: bool,
    pub signature: Option<String>,
    pub evaluation_point: BTreeMap<String, String>,
    pub labels: Vec<String>,
    pub roles: Vec<FrameRole>,
    pub gram: Matrix<S>,
    /// `connection[x][y]` holds the frame coordinates of `∇̄_{e_x} e_y` for
    /// tangent `x` and every frame vector `y`.
    pub connection: Vec<Vec<Vec<S>>>,
    /// Frame coordinates of `ξ`.
    pub xi: Vec<S>,
    /// `bracket[x][y]` for tangent `x, y`, when supplied.
    pub bracket: Option<Vec<Vec<Vec<S>>>>,
    /// `metric_derivative[x]` holds `e_x(g(e_a, e_b))` for tangent `x`, when
    /// supplied.
    pub metric_derivative: Option<Vec<Matrix<S>>>,
}

impl<S: Scalar> FrameFixture<S> {
    pub fn from_toml_str(text: &str) -> Result<Self, FixtureError> {
        let raw: RawFixture =
            toml::from_str(text).map_err(|e| FixtureError::Syntax(e.to_string()))?;
        let fixture = Self::from_raw(raw)?;
        fixture.validate(0.0)?;
        Ok(fixture)
    }

    fn from_raw(raw: RawFixture) -> Result<Self, FixtureError> {
        let mut seen = HashMap::new();
        for f in &raw.frame {
            if seen.insert(f.name.clone(), f.role).is_some() {
                return Err(FixtureError::DuplicateFrame(f.name.clone()));
            }
        }
        let count = |role: FrameRole| raw.frame.iter().filter(|f| f.role == role).count();
        for (role, expected) in [
            (FrameRole::Radical, "exactly one"),
            (FrameRole::Transversal, "exactly one"),
            (FrameRole::ScreenTransversal, "exactly one"),
        ] {
            let found = count(role);
            if found != 1 {
                return Err(FixtureError::RoleCount {
                    role: role.name(),
                    expected,
                    found,
                });
            }
        }
        if count(FrameRole::Screen) == 0 {
            return Err(FixtureError::RoleCount {
                role: FrameRole::Screen.name(),
                expected: "at least one",
                found: 0,
            });
        }
        if raw.dimension != raw.frame.len() {
            return Err(FixtureError::Dimension {
                declared: raw.dimension,
                frames: raw.frame.len(),
            });
        }

        // Stable sort keeps the file order of screen and ambient-only vectors.
        let mut ordered: Vec<&RawFrame> = raw.frame.iter().collect();
        ordered.sort_by_key(|f| f.role.rank());
        let labels: Vec<String> = ordered.iter().map(|f| f.name.clone()).collect();
        let roles: Vec<FrameRole> = ordered.iter().map(|f| f.role).collect();
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let dim = labels.len();
        let tangent = 1 + count(FrameRole::Screen);

        let lookup = |context: &str, name: &str| -> Result<usize, FixtureError> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| FixtureError::UnknownFrame {
                    context: context.to_string(),
                    name: name.to_string(),
                })
        };
        let vector = |context: &str,
                      entries: &BTreeMap<String, RawScalar>|
         -> Result<Vec<S>, FixtureError> {
            let mut v = vec![S::zero(); dim];
            for (name, value) in entries {
                let k = lookup(context, name)?;
                v[k] = value.parse(|| format!("{context} component {name}"))?;
            }
            Ok(v)
        };

        let mut gram = Matrix::zeros(dim, dim);
        let mut set: HashMap<(usize, usize), String> = HashMap::new();
        for m in &raw.metric {
            let i = lookup("metric", &m.a)?;
            let j = lookup("metric", &m.b)?;
            let value: S = m.value.parse(|| format!("metric g({},{})", m.a, m.b))?;
            let key = (i.min(j), i.max(j));
            let text = value.to_string();
            if let Some(prev) = set.get(&key) {
                if *prev != text {
                    return Err(FixtureError::ConflictingMetric {
                        a: m.a.clone(),
                        b: m.b.clone(),
                    });
                }
            }
            set.insert(key, text);
            gram[(i, j)] = value.clone();
            gram[(j, i)] = value;
        }

        let triples = |table: &'static str,
                       rows: &[RawTriple],
                       tangent_y: bool|
         -> Result<Vec<Vec<Vec<S>>>, FixtureError> {
            let cols = if tangent_y { tangent } else { dim };
            let mut out = vec![vec![vec![S::zero(); dim]; cols]; tangent];
            let mut declared = HashMap::new();
            for t in rows {
                let x = lookup(table, &t.x)?;
                let y = lookup(table, &t.y)?;
                if x >= tangent {
                    return Err(FixtureError::Direction {
                        table,
                        x: t.x.clone(),
                        y: t.y.clone(),
                        slot: "first",
                    });
                }
                if y >= cols {
                    return Err(FixtureError::Direction {
                        table,
                        x: t.x.clone(),
                        y: t.y.clone(),
                        slot: "second",
                    });
                }
                if declared.insert((x, y), ()).is_some() {
                    return Err(FixtureError::Duplicate {
                        table,
                        entry: format!("({}, {})", t.x, t.y),
                    });
                }
                out[x][y] = vector(&format!("{table} ({}, {})", t.x, t.y), &t.result)?;
            }
            Ok(out)
        };
        let connection = triples("connection", &raw.connection, false)?;
        let bracket = match &raw.bracket {
            Some(rows) => Some(triples("bracket", rows, true)?),
            None => None,
        };

        let metric_derivative = match &raw.metric_derivative {
            None => None,
            Some(rows) => {
                let mut out = vec![Matrix::zeros(dim, dim); tangent];
                for d in rows {
                    let x = lookup("metric_derivative", &d.along)?;
                    let i = lookup("metric_derivative", &d.a)?;
                    let j = lookup("metric_derivative", &d.b)?;
                    if x >= tangent {
                        return Err(FixtureError::Direction {
                            table: "metric_derivative",
                            x: d.along.clone(),
                            y: format!("g({},{})", d.a, d.b),
                            slot: "first",
                        });
                    }
                    let value: S = d
                        .value
                        .parse(|| format!("metric_derivative along {}", d.along))?;
                    out[x][(i, j)] = value.clone();
                    out[x][(j, i)] = value;
                }
                Some(out)
            }
        };

        let mut xi = vec![S::zero(); dim];
        for (name, value) in &raw.xi.screen {
            let k = lookup("xi", name)?;
            if roles[k] != FrameRole::Screen {
                return Err(FixtureError::XiComponent(name.clone()));
            }
            xi[k] = value.parse(|| format!("xi component {name}"))?;
        }
        let coefficient = |v: &Option<RawScalar>, label: &str| -> Result<S, FixtureError> {
            match v {
                Some(v) => v.parse(|| format!("xi.{label}")),
                None => Ok(S::zero()),
            }
        };
        xi[0] = coefficient(&raw.xi.a, "a")?;
        xi[tangent] = coefficient(&raw.xi.b, "b")?;
        xi[tangent + 1] = coefficient(&raw.xi.e, "e")?;

        Ok(Self {
            name: raw.name,
            description: raw.description,
            kind: raw.connection_kind,
            strict: raw.strict,
            signature: raw.signature,
            evaluation_point: raw
                .evaluation_point
                .iter()
                .map(|(k, v)| (k.clone(), v.text()))
                .collect(),
            labels,
            roles,
            gram,
            connection,
            xi,
            bracket,
            metric_derivative,
        })
    }

    /// Checks the frame normalization, the orthogonality of the
    /// decomposition, non-degeneracy and the declared signature.
    pub fn validate(&self, tol: f64) -> Result<(), FixtureError> {
        let g = &self.gram;
        let (e, n_idx, w) = (self.e(), self.n_index(), self.w_index());
        let expect = |i: usize, j: usize, target: S, what: String| -> Result<(), FixtureError> {
            if g[(i, j)].approx_eq(&target, tol) {
                Ok(())
            } else {
                Err(FixtureError::Invariant {
                    invariant: what,
                    found: g[(i, j)].to_string(),
                })
            }
        };
        let l = &self.labels;
        expect(e, e, S::zero(), format!("g({0},{0}) = 0", l[e]))?;
        expect(e, n_idx, S::one(), format!("g({},{}) = 1", l[e], l[n_idx]))?;
        expect(n_idx, n_idx, S::zero(), format!("g({0},{0}) = 0", l[n_idx]))?;
        expect(n_idx, w, S::zero(), format!("g({},{}) = 0", l[n_idx], l[w]))?;
        expect(e, w, S::zero(), format!("g({},{}) = 0", l[e], l[w]))?;
        let eps = g[(w, w)].clone();
        if !(eps.approx_eq(&S::one(), tol) || eps.approx_eq(&-S::one(), tol)) {
            return Err(FixtureError::Invariant {
                invariant: format!("g({0},{0}) = ±1", l[w]),
                found: eps.to_string(),
            });
        }
        for z in self.screen_range() {
            for other in [e, n_idx, w] {
                expect(z, other, S::zero(), format!("g({},{}) = 0", l[z], l[other]))?;
            }
        }
        let screen: Vec<usize> = self.screen_range().collect();
        if g.principal_submatrix(&screen).inverse().is_err() {
            return Err(FixtureError::DegenerateScreen);
        }
        let (negative, positive, zero) = inertia(g, tol);
        if zero > 0 {
            return Err(FixtureError::DegenerateMetric);
        }
        if let Some(sig) = &self.signature {
            let neg = sig.chars().filter(|c| *c == '-').count();
            let pos = sig.chars().filter(|c| *c == '+').count();
            if neg != negative || pos != positive {
                return Err(FixtureError::Signature {
                    declared: sig.clone(),
                    negative,
                    positive,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Number of screen vectors.
    pub fn n(&self) -> usize {
        self.roles
            .iter()
            .filter(|r| **r == FrameRole::Screen)
            .count()
    }

    pub fn tangent_dim(&self) -> usize {
        self.n() + 1
    }

    pub fn e(&self) -> usize {
        0
    }

    pub fn n_index(&self) -> usize {
        self.n() + 1
    }

    pub fn w_index(&self) -> usize {
        self.n() + 2
    }

    pub fn screen_range(&self) -> std::ops::Range<usize> {
        1..self.n() + 1
    }

    pub fn tangent_labels(&self) -> Vec<String> {
        self.labels[..self.tangent_dim()].to_vec()
    }

    /// Frame index of a named vector.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    /// `g(u, v)` for frame-coordinate vectors.
    pub fn pair(&self, u: &[S], v: &[S]) -> S {
        let gv = self.gram.mul_vec(v);
        u.iter()
            .zip(&gv)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    /// Coefficients `(a, b, e)` of `ξ` along `E`, `N`, `W`.
    pub fn xi_coefficients(&self) -> (S, S, S) {
        (
            self.xi[self.e()].clone(),
            self.xi[self.n_index()].clone(),
            self.xi[self.w_index()].clone(),
        )
    }

    /// Renders the fixture back to the TOML layout it was read from.
    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        let q = |s: &S| format!("\"{s}\"");
        let comps = |v: &[S]| -> String {
            let parts: Vec<String> = v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| format!("{} = {}", toml_key(&self.labels[k]), q(c)))
                .collect();
            format!("{{ {} }}", parts.join(", "))
        };
        out.push_str(&format!("name = {:?}\n", self.name));
        out.push_str(&format!("description = {:?}\n", self.description));
        out.push_str(&format!("dimension = {}\n", self.dim()));
        if let Some(sig) = &self.signature {
            out.push_str(&format!("signature = {sig:?}\n"));
        }
        out.push_str(&format!("connection_kind = {:?}\n", self.kind.name()));
        out.push_str(&format!("strict = {}\n", self.strict));
        let point: Vec<String> = self
            .evaluation_point
            .iter()
            .map(|(k, v)| format!("{} = {v:?}", toml_key(k)))
            .collect();
        out.push_str(&format!("evaluation_point = {{ {} }}\n", point.join(", ")));
        let bracket_empty = self
            .bracket
            .as_ref()
            .is_some_and(|t| t.iter().flatten().flatten().all(Zero::is_zero));
        let derivative_empty = self
            .metric_derivative
            .as_ref()
            .is_some_and(|t| t.iter().all(Matrix::is_zero_matrix));
        if bracket_empty {
            out.push_str("bracket = []\n");
        }
        if derivative_empty {
            out.push_str("metric_derivative = []\n");
        }
        for (label, role) in self.labels.iter().zip(&self.roles) {
            out.push_str(&format!(
                "\n[[frame]]\nname = {label:?}\nrole = {:?}\n",
                role.name()
            ));
        }
        let dim = self.dim();
        for i in 0..dim {
            for j in i..dim {
                if !self.gram[(i, j)].is_zero() {
                    out.push_str(&format!(
                        "\n[[metric]]\na = {:?}\nb = {:?}\nvalue = {}\n",
                        self.labels[i],
                        self.labels[j],
                        q(&self.gram[(i, j)])
                    ));
                }
            }
        }
        let triples = |out: &mut String, table: &str, t: &[Vec<Vec<S>>]| {
            for (x, row) in t.iter().enumerate() {
                for (y, v) in row.iter().enumerate() {
                    if v.iter().any(|c| !c.is_zero()) {
                        out.push_str(&format!(
                            "\n[[{table}]]\nx = {:?}\ny = {:?}\nresult = {}\n",
                            self.labels[x],
                            self.labels[y],
                            comps(v)
                        ));
                    }
                }
            }
        };
        triples(&mut out, "connection", &self.connection);
        let (a, b, e) = self.xi_coefficients();
        let mut screen_xi = vec![S::zero(); dim];
        for k in self.screen_range() {
            screen_xi[k] = self.xi[k].clone();
        }
        out.push_str(&format!(
            "\n[xi]\na = {}\nb = {}\ne = {}\nscreen = {}\n",
            q(&a),
            q(&b),
            q(&e),
            comps(&screen_xi)
        ));
        if let Some(t) = &self.bracket {
            triples(&mut out, "bracket", t);
        }
        if let Some(md) = &self.metric_derivative {
            for (x, m) in md.iter().enumerate() {
                for i in 0..dim {
                    for j in i..dim {
                        if !m[(i, j)].is_zero() {
                            out.push_str(&format!(
                                "\n[[metric_derivative]]\nalong = {:?}\na = {:?}\nb = {:?}\nvalue = {}\n",
                                self.labels[x],
                                self.labels[i],
                                self.labels[j],
                                q(&m[(i, j)])
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

fn toml_key(k: &str) -> String {
    if k.chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        k.to_string()
    } else {
        format!("{k:?}")
    }
}

/// `(negative, positive, zero)` counts of a symmetric matrix, by symmetric
/// elimination (congruence preserves inertia).
pub fn inertia<S: Scalar>(g: &Matrix<S>, tol: f64) -> (usize, usize, usize) {
    let mut a = g.clone();
    let mut n = a.rows();
    let scale = g.max_abs().max(1.0);
    let small = |v: &S| v.is_negligible(scale, tol);
    let (mut neg, mut pos) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while n > 0 {
        let pivot = active.iter().copied().find(|&i| !small(&a[(i, i)]));
        let p = match pivot {
            Some(p) => p,
            None => {
                // Zero diagonal: replace e_i by e_i + e_j for a nonzero a_ij.
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !small(&a[(i, j)]));
                let Some((i, j)) = pair else { break };
                let dim = a.rows();
                for k in 0..dim {
                    let v = a[(i, k)].clone() + a[(j, k)].clone();
                    a[(i, k)] = v;
                }
                for k in 0..dim {
                    let v = a[(k, i)].clone() + a[(k, j)].clone();
                    a[(k, i)] = v;
                }
                i
            }
        };
        let d = a[(p, p)].clone();
        if d > S::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&k| k != p);
        for &i in &active {
            let f = a[(i, p)].clone() / d.clone();
            for &j in &active {
                let v = a[(i, j)].clone() - f.clone() * a[(p, j)].clone();
                a[(i, j)] = v;
            }
        }
        n -= 1;
    }
    (neg, pos, n)
}
