//! Invariant matrix-valued symbols: the Fourier-side representation of
//! left-invariant operators.
//!
//! A symbol assigns to each dual point `xi` a `d_xi x d_xi` matrix
//! `sigma(xi)`; applying the operator to a function multiplies each
//! Fourier block by it. Built-in families cover the operators used in the
//! diagnostics (perturbed neutral operator on SU(2), Laplacian, Bessel
//! potentials, a synthetic sub-Laplacian model, the sphere Laplacian
//! lift, and user-defined diagonal formulas). Symbols can also be
//! extracted numerically from a black-box grid operator.

pub mod expr;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{rep_eval, DualIndex, GroupId, GroupPoint};
use crate::error::{Error, Result};
use crate::fourier::{forward, inverse, synthesize, FourierCoefficients, GridFunction};
use crate::linalg::{hs_norm, mat_to_rows, rows_to_mat};
use crate::quadrature::QuadratureGrid;
use crate::{C64, CMat};

/// A deterministic rule `xi -> sigma(xi)` for a Fourier multiplier.
#[derive(Clone)]
pub struct InvariantSymbol {
    pub group: GroupId,
    pub name: String,
    rule: Rule,
}

#[derive(Clone)]
enum Rule {
    Builtin(Builtin),
    /// Explicit per-`xi` matrices; missing entries evaluate to zero (with
    /// a warning on stderr when `warn_missing` is set).
    Explicit { map: Arc<BTreeMap<DualIndex, CMat>>, warn_missing: bool },
    /// Fourier-side composition `sigma_A(xi) sigma_B(xi)`.
    Product(Arc<InvariantSymbol>, Arc<InvariantSymbol>),
    Custom(Arc<dyn Fn(&DualIndex) -> Result<CMat> + Send + Sync>),
}

#[derive(Clone, Debug)]
enum Builtin {
    Identity,
    /// `diag(c + j)` over the weights `j in {-l..l}` of SU(2).
    NeutralPlusC { c: C64 },
    /// Positive Laplace-Beltrami operator: `nu_xi I`.
    Laplacian,
    /// `(Id + Laplacian)^{s/2} = <xi>^s I`.
    BesselPotential { s: f64 },
    /// Synthetic Hormander-step-`kappa` model: negative diagonal whose
    /// magnitudes are log-spaced across `[<xi>^{1/kappa}, <xi>]`, so
    /// `lambda_min = <xi>^{1/kappa}` by construction.
    Su2SublaplacianModel { kappa: f64 },
    /// Lift of the sphere Laplacian: single middle entry `l^2 + l` at
    /// integer `l`, zero block at half-integers.
    S2LaplacianLift,
    /// User-supplied diagonal formula evaluated per index.
    DiagonalFormula { expression: expr::Expr, text: String },
}

impl std::fmt::Debug for InvariantSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InvariantSymbol")
            .field("group", &self.group)
            .field("name", &self.name)
            .finish()
    }
}

impl InvariantSymbol {
    pub fn identity(group: GroupId) -> Self {
        InvariantSymbol { group, name: "identity".into(), rule: Rule::Builtin(Builtin::Identity) }
    }

    pub fn from_rule<F>(group: GroupId, name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&DualIndex) -> Result<CMat> + Send + Sync + 'static,
    {
        InvariantSymbol { group, name: name.into(), rule: Rule::Custom(Arc::new(f)) }
    }

    pub fn from_explicit(
        group: GroupId,
        name: impl Into<String>,
        map: BTreeMap<DualIndex, CMat>,
        warn_missing: bool,
    ) -> Result<Self> {
        for (xi, m) in &map {
            let d = xi.dim();
            if xi.group() != group {
                return Err(Error::GroupMismatch {
                    expected: group.to_string(),
                    got: xi.group().to_string(),
                });
            }
            if m.shape() != (d, d) {
                return Err(Error::ShapeMismatch(format!(
                    "symbol at {xi} must be {d}x{d}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(InvariantSymbol {
            group,
            name: name.into(),
            rule: Rule::Explicit { map: Arc::new(map), warn_missing },
        })
    }

    /// Evaluate `sigma(xi)`.
    pub fn eval(&self, xi: &DualIndex) -> Result<CMat> {
        if xi.group() != self.group {
            return Err(Error::GroupMismatch {
                expected: self.group.to_string(),
                got: xi.group().to_string(),
            });
        }
        let d = xi.dim();
        match &self.rule {
            Rule::Builtin(b) => Ok(eval_builtin(b, xi)),
            Rule::Explicit { map, warn_missing } => match map.get(xi) {
                Some(m) => Ok(m.clone()),
                None => {
                    if *warn_missing {
                        eprintln!("warning: symbol {:?} has no entry at xi = {xi}; using zero", self.name);
                    }
                    Ok(CMat::zeros(d, d))
                }
            },
            Rule::Product(a, b) => Ok(a.eval(xi)? * b.eval(xi)?),
            Rule::Custom(f) => {
                let m = f(xi)?;
                if m.shape() != (d, d) {
                    return Err(Error::ShapeMismatch(format!(
                        "symbol rule returned {}x{} at {xi}, expected {d}x{d}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                Ok(m)
            }
        }
    }
}

fn eval_builtin(b: &Builtin, xi: &DualIndex) -> CMat {
    let d = xi.dim();
    let nu = xi.nu();
    let eig = xi.eigenvalue();
    match b {
        Builtin::Identity => CMat::identity(d, d),
        Builtin::NeutralPlusC { c } => {
            let ell = (d as f64 - 1.0) / 2.0;
            CMat::from_fn(d, d, |i, j| {
                if i == j {
                    c + C64::new(i as f64 - ell, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        }
        Builtin::Laplacian => CMat::identity(d, d) * C64::new(nu, 0.0),
        Builtin::BesselPotential { s } => {
            CMat::identity(d, d) * C64::new((1.0 + nu).powf(s / 2.0), 0.0)
        }
        Builtin::Su2SublaplacianModel { kappa } => {
            let low = eig.powf(1.0 / kappa);
            CMat::from_fn(d, d, |i, j| {
                if i == j {
                    let t = if d == 1 { 0.0 } else { i as f64 / (d as f64 - 1.0) };
                    let magnitude = low * (eig / low).powf(t);
                    C64::new(-magnitude, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        }
        Builtin::S2LaplacianLift => {
            let mut m = CMat::zeros(d, d);
            if d % 2 == 1 {
                // integer l: middle weight carries l^2 + l
                let ell = (d - 1) / 2;
                m[(ell, ell)] = C64::new((ell * ell + ell) as f64, 0.0);
            }
            m
        }
        Builtin::DiagonalFormula { expression, .. } => {
            let ell = match xi {
                DualIndex::Su2 { two_ell } => *two_ell as f64 / 2.0,
                DualIndex::Torus(n) => {
                    if n.len() == 1 {
                        n[0] as f64
                    } else {
                        nu.sqrt()
                    }
                }
            };
            CMat::from_fn(d, d, |i, j| {
                if i == j {
                    let bind = expr::Bindings {
                        l: ell,
                        j: match xi {
                            DualIndex::Su2 { .. } => i as f64 - (d as f64 - 1.0) / 2.0,
                            DualIndex::Torus(_) => 0.0,
                        },
                        nu,
                        eig,
                    };
                    C64::new(expression.eval(&bind), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        }
    }
}

/// Serialized operator description.
///
/// ```json
/// {"group": "su2", "symbol": {"builtin": "neutral_plus_c", "params": {"c": 0.5}}}
/// {"group": "torus:1", "symbol": {"explicit": [{"xi": [3], "matrix": [[[9.0, 0.0]]]}]}}
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub group: String,
    pub symbol: SymbolSpec,
    /// Optional display name; defaults to the builtin name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Builtin {
        builtin: String,
        #[serde(default)]
        params: serde_json::Map<String, serde_json::Value>,
    },
    Explicit { explicit: Vec<ExplicitEntry> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExplicitEntry {
    pub xi: serde_json::Value,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// Parse `"su2"` or `"torus:d"`.
pub fn parse_group(text: &str) -> Result<GroupId> {
    if text == "su2" {
        return Ok(GroupId::Su2);
    }
    if let Some(d) = text.strip_prefix("torus:") {
        let d: usize = d
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad torus dimension in {text:?}")))?;
        if d == 0 {
            return Err(Error::InvalidSpec("torus dimension must be >= 1".into()));
        }
        return Ok(GroupId::Torus(d));
    }
    Err(Error::InvalidSpec(format!("unknown group {text:?} (expected \"su2\" or \"torus:d\")")))
}

/// Parse a dual index from its JSON form: an integer array for the torus,
/// a string like `"3/2"` (or a nonnegative integer) for SU(2).
pub fn parse_xi(group: GroupId, v: &serde_json::Value) -> Result<DualIndex> {
    match group {
        GroupId::Torus(d) => {
            let arr = v
                .as_array()
                .ok_or_else(|| Error::InvalidSpec(format!("torus xi must be an array, got {v}")))?;
            if arr.len() != d {
                return Err(Error::InvalidSpec(format!(
                    "torus xi must have {d} components, got {}",
                    arr.len()
                )));
            }
            let n = arr
                .iter()
                .map(|x| {
                    x.as_i64()
                        .ok_or_else(|| Error::InvalidSpec(format!("torus xi component {x} not an integer")))
                })
                .collect::<Result<Vec<i64>>>()?;
            Ok(DualIndex::torus(n))
        }
        GroupId::Su2 => {
            if let Some(n) = v.as_u64() {
                return Ok(DualIndex::su2(2 * n as u32));
            }
            if let Some(s) = v.as_str() {
                return parse_su2_spin(s);
            }
            Err(Error::InvalidSpec(format!(
                "su2 xi must be an integer or a string like \"3/2\", got {v}"
            )))
        }
    }
}

/// Parse `"2"` or `"3/2"` into an SU(2) dual index.
pub fn parse_su2_spin(s: &str) -> Result<DualIndex> {
    let s = s.trim();
    if let Some(num) = s.strip_suffix("/2") {
        let two_ell: u32 = num
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad spin {s:?}")))?;
        if two_ell % 2 == 0 {
            return Err(Error::InvalidSpec(format!(
                "spin {s:?} should be written as the integer {}",
                two_ell / 2
            )));
        }
        Ok(DualIndex::su2(two_ell))
    } else {
        let ell: u32 = s.parse().map_err(|_| Error::InvalidSpec(format!("bad spin {s:?}")))?;
        Ok(DualIndex::su2(2 * ell))
    }
}

/// JSON form of a dual index (inverse of [`parse_xi`]).
pub fn xi_to_json(xi: &DualIndex) -> serde_json::Value {
    match xi {
        DualIndex::Torus(n) => serde_json::json!(n),
        DualIndex::Su2 { .. } => serde_json::Value::String(xi.to_string()),
    }
}

/// Build a symbol from its serialized description.
pub fn builtin_symbol(spec: &OperatorSpec) -> Result<InvariantSymbol> {
    let group = parse_group(&spec.group)?;
    match &spec.symbol {
        SymbolSpec::Builtin { builtin, params } => {
            let b = match builtin.as_str() {
                "identity" => Builtin::Identity,
                "neutral_plus_c" => {
                    require_su2(group, builtin)?;
                    Builtin::NeutralPlusC { c: param_complex(params, "c")? }
                }
                "laplacian" => Builtin::Laplacian,
                "bessel_potential" => Builtin::BesselPotential { s: param_f64(params, "s")? },
                "su2_sublaplacian_model" => {
                    require_su2(group, builtin)?;
                    let kappa = param_f64(params, "kappa")?;
                    if kappa < 1.0 {
                        return Err(Error::InvalidSpec("kappa must be >= 1".into()));
                    }
                    Builtin::Su2SublaplacianModel { kappa }
                }
                "s2_laplacian_lift" => {
                    require_su2(group, builtin)?;
                    Builtin::S2LaplacianLift
                }
                "diagonal_formula" => {
                    let text = params
                        .get("expression")
                        .and_then(|v| v.as_str())
                        .ok_or_else(|| {
                            Error::InvalidSpec("diagonal_formula needs a string \"expression\"".into())
                        })?;
                    Builtin::DiagonalFormula { expression: expr::Expr::parse(text)?, text: text.into() }
                }
                other => return Err(Error::InvalidSpec(format!("unknown builtin {other:?}"))),
            };
            let name = spec.name.clone().unwrap_or_else(|| describe_builtin(&b));
            Ok(InvariantSymbol { group, name, rule: Rule::Builtin(b) })
        }
        SymbolSpec::Explicit { explicit } => {
            let mut map = BTreeMap::new();
            for entry in explicit {
                let xi = parse_xi(group, &entry.xi)?;
                let m = rows_to_mat(&entry.matrix)?;
                let d = xi.dim();
                if m.shape() != (d, d) {
                    return Err(Error::InvalidSpec(format!(
                        "matrix at xi = {xi} must be {d}x{d}, got {}x{}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                map.insert(xi, m);
            }
            let name = spec.name.clone().unwrap_or_else(|| "explicit".into());
            InvariantSymbol::from_explicit(group, name, map, true)
        }
    }
}

/// Serialize an explicit symbol table back to an [`OperatorSpec`].
pub fn explicit_spec(group: GroupId, name: &str, map: &BTreeMap<DualIndex, CMat>) -> OperatorSpec {
    OperatorSpec {
        group: group.to_string(),
        name: Some(name.into()),
        symbol: SymbolSpec::Explicit {
            explicit: map
                .iter()
                .map(|(xi, m)| ExplicitEntry { xi: xi_to_json(xi), matrix: mat_to_rows(m) })
                .collect(),
        },
    }
}

fn describe_builtin(b: &Builtin) -> String {
    match b {
        Builtin::Identity => "identity".into(),
        Builtin::NeutralPlusC { c } => {
            if c.im == 0.0 {
                format!("neutral_plus_c({})", c.re)
            } else {
                format!("neutral_plus_c({}+{}i)", c.re, c.im)
            }
        }
        Builtin::Laplacian => "laplacian".into(),
        Builtin::BesselPotential { s } => format!("bessel_potential({s})"),
        Builtin::Su2SublaplacianModel { kappa } => format!("su2_sublaplacian_model({kappa})"),
        Builtin::S2LaplacianLift => "s2_laplacian_lift".into(),
        Builtin::DiagonalFormula { text, .. } => format!("diagonal_formula({text})"),
    }
}

fn require_su2(group: GroupId, builtin: &str) -> Result<()> {
    if group != GroupId::Su2 {
        return Err(Error::InvalidSpec(format!("builtin {builtin:?} requires group \"su2\"")));
    }
    Ok(())
}

fn param_f64(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::InvalidSpec(format!("missing numeric parameter {key:?}")))
}

fn param_complex(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> Result<C64> {
    match params.get(key) {
        Some(serde_json::Value::Number(n)) => Ok(C64::new(n.as_f64().unwrap(), 0.0)),
        Some(serde_json::Value::Array(a)) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| Error::InvalidSpec(format!("bad {key:?}")))?;
            let im = a[1].as_f64().ok_or_else(|| Error::InvalidSpec(format!("bad {key:?}")))?;
            Ok(C64::new(re, im))
        }
        _ => Err(Error::InvalidSpec(format!(
            "parameter {key:?} must be a number or an [re, im] pair"
        ))),
    }
}

/// Convenience constructors mirroring the builtin table.
pub fn neutral_plus_c(c: C64) -> InvariantSymbol {
    InvariantSymbol {
        group: GroupId::Su2,
        name: describe_builtin(&Builtin::NeutralPlusC { c }),
        rule: Rule::Builtin(Builtin::NeutralPlusC { c }),
    }
}

pub fn laplacian(group: GroupId) -> InvariantSymbol {
    InvariantSymbol { group, name: "laplacian".into(), rule: Rule::Builtin(Builtin::Laplacian) }
}

pub fn bessel_potential(group: GroupId, s: f64) -> InvariantSymbol {
    InvariantSymbol {
        group,
        name: describe_builtin(&Builtin::BesselPotential { s }),
        rule: Rule::Builtin(Builtin::BesselPotential { s }),
    }
}

pub fn su2_sublaplacian_model(kappa: f64) -> InvariantSymbol {
    assert!(kappa >= 1.0, "kappa must be >= 1");
    InvariantSymbol {
        group: GroupId::Su2,
        name: describe_builtin(&Builtin::Su2SublaplacianModel { kappa }),
        rule: Rule::Builtin(Builtin::Su2SublaplacianModel { kappa }),
    }
}

pub fn s2_laplacian_lift() -> InvariantSymbol {
    InvariantSymbol {
        group: GroupId::Su2,
        name: "s2_laplacian_lift".into(),
        rule: Rule::Builtin(Builtin::S2LaplacianLift),
    }
}

/// Apply a multiplier on the Fourier side: `out(xi) = sigma(xi) u(xi)`.
pub fn apply_multiplier(
    sym: &InvariantSymbol,
    coeffs: &FourierCoefficients,
) -> Result<FourierCoefficients> {
    if let Some(g) = coeffs.group {
        if g != sym.group {
            return Err(Error::GroupMismatch {
                expected: sym.group.to_string(),
                got: g.to_string(),
            });
        }
    }
    let mut out = FourierCoefficients::new(sym.group);
    out.fiber_index = coeffs.fiber_index;
    for (xi, m) in &coeffs.coeffs {
        out.coeffs.insert(xi.clone(), sym.eval(xi)? * m);
    }
    Ok(out)
}

/// Fourier-side composition: the symbol of `A . B`.
pub fn compose(a: &InvariantSymbol, b: &InvariantSymbol) -> Result<InvariantSymbol> {
    if a.group != b.group {
        return Err(Error::GroupMismatch {
            expected: a.group.to_string(),
            got: b.group.to_string(),
        });
    }
    Ok(InvariantSymbol {
        group: a.group,
        name: format!("{}.{}", a.name, b.name),
        rule: Rule::Product(Arc::new(a.clone()), Arc::new(b.clone())),
    })
}

/// Realize a symbol as a grid operator (forward, multiply, synthesize).
pub fn multiplier_on_grid<'a>(
    sym: &'a InvariantSymbol,
    duals: &'a [DualIndex],
) -> impl Fn(&GridFunction) -> Result<GridFunction> + 'a {
    move |f: &GridFunction| {
        let coeffs = forward(f, duals)?;
        let image = apply_multiplier(sym, &coeffs)?;
        synthesize(&image, &f.grid)
    }
}

/// Recover the symbol of a black-box linear left-invariant operator.
///
/// Samples each coefficient function `t^xi_{uv}` on the grid, pushes it
/// through `op`, and reads off `sigma(xi) = xi(x)* (A xi)(x)` at the
/// identity. The same quantity is recomputed at five Haar-random points
/// (seeded); if the worst deviation exceeds `1e-8` the operator is
/// rejected as x-dependent.
pub fn extract_symbol<F>(
    op: F,
    duals: &[DualIndex],
    grid: &Arc<QuadratureGrid>,
    seed: u64,
) -> Result<InvariantSymbol>
where
    F: Fn(&GridFunction) -> Result<GridFunction>,
{
    const TOLERANCE: f64 = 1e-8;
    let group = grid.group;
    let max_eig = duals.iter().map(|xi| xi.eigenvalue()).fold(1.0f64, f64::max);
    if grid.band_limit + 1e-9 < 2.0 * max_eig {
        return Err(Error::BandLimitExceeded {
            band_limit: grid.band_limit,
            requested: 2.0 * max_eig,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![GroupPoint::identity(group)];
    for _ in 0..5 {
        points.push(GroupPoint::sample(group, &mut rng));
    }

    let mut map = BTreeMap::new();
    let mut worst_dev = 0.0f64;
    for xi in duals {
        if xi.group() != group {
            return Err(Error::GroupMismatch {
                expected: group.to_string(),
                got: xi.group().to_string(),
            });
        }
        let d = xi.dim();
        // Fourier data of A applied to each coefficient function
        let mut image_coeffs: Vec<Vec<FourierCoefficients>> = Vec::with_capacity(d);
        for u in 0..d {
            let mut row = Vec::with_capacity(d);
            for v in 0..d {
                let t_uv = GridFunction::from_fn(grid.clone(), |x| {
                    rep_eval(xi, x).expect("grid node valid").entries[(u, v)]
                });
                let g = op(&t_uv)?;
                row.push(forward(&g, duals)?);
            }
            image_coeffs.push(row);
        }
        let sigma_at = |x: &GroupPoint| -> Result<CMat> {
            let a_xi = CMat::from_fn(d, d, |u, v| {
                inverse(&image_coeffs[u][v], x).expect("inversion cannot fail on valid point")
            });
            Ok(rep_eval(xi, x)?.entries.adjoint() * a_xi)
        };
        let sigma0 = sigma_at(&points[0])?;
        for p in &points[1..] {
            let dev = hs_norm(&(sigma_at(p)? - &sigma0));
            worst_dev = worst_dev.max(dev);
        }
        if worst_dev > TOLERANCE {
            return Err(Error::NotAMultiplier { max_deviation: worst_dev, tolerance: TOLERANCE });
        }
        map.insert(xi.clone(), sigma0);
    }
    InvariantSymbol::from_explicit(group, "extracted", map, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::enumerate_dual;
    use crate::fourier::random_coefficients;
    use crate::quadrature::build_grid;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec_json(text: &str) -> OperatorSpec {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn neutral_operator_at_spin_one() {
        let sym = neutral_plus_c(C64::new(0.0, 0.0));
        let m = sym.eval(&DualIndex::su2(2)).unwrap();
        for (i, expect) in [-1.0, 0.0, 1.0].iter().enumerate() {
            assert_eq!(m[(i, i)], C64::new(*expect, 0.0));
        }
    }

    #[test]
    fn s2_lift_at_spin_two() {
        let sym = s2_laplacian_lift();
        let m = sym.eval(&DualIndex::su2(4)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if (i, j) == (2, 2) { 6.0 } else { 0.0 };
                assert_eq!(m[(i, j)], C64::new(expect, 0.0));
            }
        }
        // half-integer spins carry the zero block
        let z = sym.eval(&DualIndex::su2(3)).unwrap();
        assert_eq!(hs_norm(&z), 0.0);
    }

    #[test]
    fn bessel_on_torus() {
        let sym = bessel_potential(GroupId::Torus(1), 2.0);
        let m = sym.eval(&DualIndex::torus(vec![1])).unwrap();
        assert_relative_eq!(m[(0, 0)].re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn sublaplacian_model_magnitudes() {
        let sym = su2_sublaplacian_model(2.0);
        let xi = DualIndex::su2(8);
        let m = sym.eval(&xi).unwrap();
        let eig = xi.eigenvalue();
        // diagonal magnitudes run from eig^{1/kappa} up to eig
        assert_relative_eq!(m[(0, 0)].re, -eig.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(m[(8, 8)].re, -eig, epsilon = 1e-12);
        for i in 0..8 {
            assert!(m[(i, i)].re.abs() <= m[(i + 1, i + 1)].re.abs() + 1e-12);
        }
    }

    #[test]
    fn apply_identity_leaves_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let duals = enumerate_dual(GroupId::Su2, 3.0);
        let coeffs = random_coefficients(&duals, &mut rng);
        let out = apply_multiplier(&InvariantSymbol::identity(GroupId::Su2), &coeffs).unwrap();
        for xi in &duals {
            assert_eq!(out.get(xi).unwrap(), coeffs.get(xi).unwrap());
        }
    }

    #[test]
    fn laplacian_scales_eigenfunction_coefficients() {
        let grid = Arc::new(build_grid(GroupId::Su2, DualIndex::su2(2).eigenvalue() + 1e-9));
        let xi1 = DualIndex::su2(2);
        let f = GridFunction::from_fn(grid, |x| rep_eval(&xi1, x).unwrap().entries[(1, 1)]);
        let coeffs = forward(&f, &[xi1.clone()]).unwrap();
        let out = apply_multiplier(&laplacian(GroupId::Su2), &coeffs).unwrap();
        let expect = coeffs.get(&xi1).unwrap() * C64::new(2.0, 0.0); // nu_1 = 2
        assert!(hs_norm(&(out.get(&xi1).unwrap() - expect)) < 1e-14);
    }

    #[test]
    fn neutral_kernel_direction_is_annihilated() {
        let sym = neutral_plus_c(C64::new(0.5, 0.0));
        let xi = DualIndex::su2(1);
        let mut u = FourierCoefficients::new(GroupId::Su2);
        // first column = basis vector at weight -1/2
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        u.insert(xi.clone(), m).unwrap();
        let out = apply_multiplier(&sym, &u).unwrap();
        assert_eq!(hs_norm(out.get(&xi).unwrap()), 0.0);
    }

    #[test]
    fn compose_algebra() {
        let duals = enumerate_dual(GroupId::Su2, 4.0);
        let id = InvariantSymbol::identity(GroupId::Su2);
        let lap = laplacian(GroupId::Su2);
        let both = compose(&id, &lap).unwrap();
        for xi in &duals {
            assert_eq!(both.eval(xi).unwrap(), lap.eval(xi).unwrap());
        }
        // bessel(s) . bessel(-s) = identity
        let b = compose(
            &bessel_potential(GroupId::Su2, 1.7),
            &bessel_potential(GroupId::Su2, -1.7),
        )
        .unwrap();
        for xi in &duals {
            let m = b.eval(xi).unwrap();
            let d = xi.dim();
            assert!(hs_norm(&(m - CMat::identity(d, d))) < 1e-12, "{xi}");
        }
        // laplacian twice is nu^2 I
        let l2 = compose(&lap, &lap).unwrap();
        for xi in &duals {
            let d = xi.dim();
            let expect = CMat::identity(d, d) * C64::new(xi.nu() * xi.nu(), 0.0);
            assert!(hs_norm(&(l2.eval(xi).unwrap() - expect)) < 1e-12);
        }
    }

    #[test]
    fn compose_is_application_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let duals = enumerate_dual(GroupId::Su2, 3.0);
        let coeffs = random_coefficients(&duals, &mut rng);
        let a = neutral_plus_c(C64::new(0.3, 0.1));
        let b = laplacian(GroupId::Su2);
        let ab = compose(&a, &b).unwrap();
        let lhs = apply_multiplier(&ab, &coeffs).unwrap();
        let rhs = apply_multiplier(&a, &apply_multiplier(&b, &coeffs).unwrap()).unwrap();
        for xi in &duals {
            assert!(hs_norm(&(lhs.get(xi).unwrap() - rhs.get(xi).unwrap())) < 1e-12);
        }
    }

    #[test]
    fn extract_identity_and_scaling() {
        let duals = enumerate_dual(GroupId::Su2, 2.0);
        let grid = Arc::new(build_grid(GroupId::Su2, 4.0));
        let id_op = |f: &GridFunction| Ok(f.clone());
        let sym = extract_symbol(id_op, &duals, &grid, 0).unwrap();
        for xi in &duals {
            let d = xi.dim();
            assert!(hs_norm(&(sym.eval(xi).unwrap() - CMat::identity(d, d))) < 1e-10);
        }
        let scale_op = |f: &GridFunction| {
            let values = f.values.iter().map(|v| v * C64::new(2.0, 0.0)).collect();
            GridFunction::from_values(f.grid.clone(), values)
        };
        let sym = extract_symbol(scale_op, &duals, &grid, 0).unwrap();
        for xi in &duals {
            let d = xi.dim();
            let expect = CMat::identity(d, d) * C64::new(2.0, 0.0);
            assert!(hs_norm(&(sym.eval(xi).unwrap() - expect)) < 1e-10);
        }
    }

    #[test]
    fn extract_torus_spectral_laplacian() {
        let duals = enumerate_dual(GroupId::Torus(1), 3.5);
        let grid = Arc::new(build_grid(GroupId::Torus(1), 8.0));
        let lap = laplacian(GroupId::Torus(1));
        let all = enumerate_dual(GroupId::Torus(1), 8.0);
        let op = multiplier_on_grid(&lap, &all);
        let sym = extract_symbol(op, &duals, &grid, 1).unwrap();
        for xi in &duals {
            let n = match xi {
                DualIndex::Torus(v) => v[0],
                _ => unreachable!(),
            };
            let got = sym.eval(xi).unwrap()[(0, 0)];
            assert!((got - C64::new((n * n) as f64, 0.0)).norm() < 1e-10, "{xi}");
        }
    }

    #[test]
    fn extract_recovers_su2_symbol() {
        let duals = enumerate_dual(GroupId::Su2, DualIndex::su2(4).eigenvalue() + 1e-9);
        let grid = Arc::new(build_grid(GroupId::Su2, 2.0 * DualIndex::su2(4).eigenvalue() + 1e-9));
        let target = neutral_plus_c(C64::new(0.4, -0.3));
        let all = enumerate_dual(GroupId::Su2, grid.band_limit);
        let op = multiplier_on_grid(&target, &all);
        let sym = extract_symbol(op, &duals, &grid, 7).unwrap();
        for xi in &duals {
            let defect = hs_norm(&(sym.eval(xi).unwrap() - target.eval(xi).unwrap()));
            assert!(defect < 1e-8, "{xi}: {defect:.3e}");
        }
    }

    #[test]
    fn extract_rejects_pointwise_multiplication() {
        // multiplication by a nonconstant function is not left-invariant
        let duals = enumerate_dual(GroupId::Torus(1), 2.5);
        let grid = Arc::new(build_grid(GroupId::Torus(1), 6.0));
        let op = |f: &GridFunction| {
            let values = f
                .grid
                .nodes
                .iter()
                .zip(&f.values)
                .map(|(x, v)| match x {
                    GroupPoint::Torus(t) => v * C64::new(t[0].cos(), 0.0),
                    _ => unreachable!(),
                })
                .collect();
            GridFunction::from_values(f.grid.clone(), values)
        };
        let err = extract_symbol(op, &duals, &grid, 2).unwrap_err();
        assert!(matches!(err, Error::NotAMultiplier { .. }), "{err}");
    }

    #[test]
    fn extract_enforces_band_margin() {
        let duals = enumerate_dual(GroupId::Su2, 4.0);
        let grid = Arc::new(build_grid(GroupId::Su2, 4.0));
        let err = extract_symbol(|f| Ok(f.clone()), &duals, &grid, 0).unwrap_err();
        assert!(matches!(err, Error::BandLimitExceeded { .. }));
    }

    #[test]
    fn spec_parsing_builtin_and_explicit() {
        let spec = spec_json(
            r#"{"group": "su2", "symbol": {"builtin": "neutral_plus_c", "params": {"c": 0.5}}}"#,
        );
        let sym = builtin_symbol(&spec).unwrap();
        let m = sym.eval(&DualIndex::su2(1)).unwrap();
        assert_eq!(m[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(m[(1, 1)], C64::new(1.0, 0.0));

        let spec = spec_json(
            r#"{"group": "torus:1",
                "symbol": {"explicit": [
                    {"xi": [0], "matrix": [[[1.0, 0.0]]]},
                    {"xi": [3], "matrix": [[[9.0, 0.5]]]}]}}"#,
        );
        let sym = builtin_symbol(&spec).unwrap();
        assert_eq!(sym.eval(&DualIndex::torus(vec![3])).unwrap()[(0, 0)], C64::new(9.0, 0.5));
        // missing entries default to zero
        assert_eq!(sym.eval(&DualIndex::torus(vec![1])).unwrap()[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn spec_rejects_mismatches() {
        let spec = spec_json(
            r#"{"group": "torus:1", "symbol": {"builtin": "neutral_plus_c", "params": {"c": 0}}}"#,
        );
        assert!(builtin_symbol(&spec).is_err());
        let spec = spec_json(
            r#"{"group": "su2", "symbol": {"explicit": [{"xi": "1", "matrix": [[[1,0]]]}]}}"#,
        );
        assert!(builtin_symbol(&spec).is_err(), "1x1 matrix at spin 1 must be rejected");
        assert!(parse_group("so3").is_err());
        assert!(parse_su2_spin("4/2").is_err());
        assert_eq!(parse_su2_spin("3/2").unwrap(), DualIndex::su2(3));
    }

    #[test]
    fn diagonal_formula_symbol() {
        let spec = spec_json(
            r#"{"group": "su2",
                "symbol": {"builtin": "diagonal_formula",
                           "params": {"expression": "nu + abs(j)"}}}"#,
        );
        let sym = builtin_symbol(&spec).unwrap();
        let m = sym.eval(&DualIndex::su2(2)).unwrap();
        assert_relative_eq!(m[(0, 0)].re, 3.0); // nu = 2, |j| = 1
        assert_relative_eq!(m[(1, 1)].re, 2.0);
        assert_relative_eq!(m[(2, 2)].re, 3.0);
    }

    #[test]
    fn operator_spec_round_trips_through_json() {
        let mut map = BTreeMap::new();
        map.insert(DualIndex::su2(1), CMat::identity(2, 2) * C64::new(0.0, 2.0));
        let spec = explicit_spec(GroupId::Su2, "table", &map);
        let text = serde_json::to_string(&spec).unwrap();
        let back: OperatorSpec = serde_json::from_str(&text).unwrap();
        let sym = builtin_symbol(&back).unwrap();
        assert_eq!(sym.eval(&DualIndex::su2(1)).unwrap()[(1, 1)], C64::new(0.0, 2.0));
    }
}
