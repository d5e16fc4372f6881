//! Scenario documents: a constructible set and a morphism to `P^n` written
//! with integer coefficients, instantiated over any field `GF(q)`.

use serde::{Deserialize, Serialize};

use hyperslice::fields::{field_of_order, prime_power, Elem, Field};
use hyperslice::irreddetect::{CensusConfig, Mode, DEFAULT_MAX_EXTENSION};
use hyperslice::polyexpr::{make_vars, parse_poly, Poly, Vars};
use hyperslice::projgeom::Hyperplane;
use hyperslice::variety::{Ambient, AmbientKind, ConstructibleSet, CountOptions, MorphismToPn};
use hyperslice::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub e: u32,
}

fn one() -> u32 {
    1
}

impl FieldSpec {
    pub fn order(&self) -> u64 {
        self.p.pow(self.e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSpec {
    pub kind: AmbientKind,
    pub dim: usize,
    pub variables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub target_dim: usize,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOptions {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_max_extension")]
    pub max_extension: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default)]
    pub characteristic_blacklist: Vec<u64>,
}

fn default_mode() -> Mode {
    Mode::Threshold
}

fn default_max_extension() -> u32 {
    DEFAULT_MAX_EXTENSION
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions {
            mode: default_mode(),
            max_extension: default_max_extension(),
            budget: None,
            characteristic_blacklist: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Field used when no `q` is given.
    pub field: FieldSpec,
    /// Default census field orders.
    #[serde(default)]
    pub q_list: Vec<u64>,
    pub ambient: AmbientSpec,
    #[serde(default)]
    pub equations: Vec<String>,
    #[serde(default)]
    pub inequations: Vec<String>,
    pub morphism: MorphismSpec,
    /// Declared `dim X`.
    pub r: u32,
    /// Declared `codim phi(X)`.
    pub codim: u32,
    #[serde(default)]
    pub options: ScenarioOptions,
    /// Constant `C` in `|N_m - q^(mr)| <= C q^(m(r - 1/2))`, for geometrically irreducible `X`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang_weil_c: Option<f64>,
}

/// A scenario over one concrete field.
#[derive(Debug, Clone)]
pub struct Instance {
    pub field: Field,
    pub x: ConstructibleSet,
    pub phi: MorphismToPn,
}

const BUNDLED: [(&str, &str); 5] = [
    ("quadric-y2x1", include_str!("../scenarios/quadric-y2x1.json")),
    ("blowup-chart", include_str!("../scenarios/blowup-chart.json")),
    ("quadric-surface-p3", include_str!("../scenarios/quadric-surface-p3.json")),
    ("conic-p2", include_str!("../scenarios/conic-p2.json")),
    ("line-pairs", include_str!("../scenarios/line-pairs.json")),
];

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|b| b.0)
}

/// Text of a bundled scenario, by name with or without `.json`.
pub fn bundled(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    BUNDLED.iter().find(|b| b.0 == name).map(|b| b.1)
}

impl Scenario {
    /// Parses and validates over the default field.
    pub fn from_json(text: &str) -> Result<Scenario, Error> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes") + "\n"
    }

    pub fn validate(&self) -> Result<(), Error> {
        let nvars = self.ambient.variables.len();
        let expected = match self.ambient.kind {
            AmbientKind::Affine => self.ambient.dim,
            AmbientKind::Projective => self.ambient.dim + 1,
        };
        if self.ambient.dim == 0 || nvars != expected {
            return Err(Error::Scenario(format!(
                "{:?} ambient of dimension {} needs {expected} variables, got {nvars}",
                self.ambient.kind, self.ambient.dim
            )));
        }
        if self.morphism.components.len() != self.morphism.target_dim + 1 {
            return Err(Error::Scenario(format!(
                "target dimension {} needs {} components, got {}",
                self.morphism.target_dim,
                self.morphism.target_dim + 1,
                self.morphism.components.len()
            )));
        }
        if self.options.max_extension == 0 {
            return Err(Error::Scenario("max_extension must be at least 1".into()));
        }
        self.instantiate(self.field.order())?;
        Ok(())
    }

    pub fn vars(&self) -> Result<Vars, Error> {
        Ok(make_vars(&self.ambient.variables)?)
    }

    /// Builds `(X, phi)` over `GF(q)`, reducing coefficients mod `p`.
    pub fn instantiate(&self, q: u64) -> Result<Instance, Error> {
        let (p, _) = prime_power(q)?;
        if self.options.characteristic_blacklist.contains(&p) {
            return Err(Error::Scenario(format!("scenario '{}' excludes characteristic {p}", self.name)));
        }
        let field = field_of_order(q)?;
        let vars = self.vars()?;
        let parse = |list: &[String]| -> Result<Vec<Poly>, Error> {
            list.iter().map(|t| parse_poly(t, &vars, &field).map_err(Error::from)).collect()
        };
        let ambient = Ambient::new(self.ambient.kind, vars.clone())?;
        let x = ConstructibleSet::new(&field, ambient, parse(&self.equations)?, parse(&self.inequations)?)?;
        let phi = MorphismToPn::new(&x, parse(&self.morphism.components)?)?;
        Ok(Instance { field, x, phi })
    }

    /// Census settings; `budget` overrides the scenario's own.
    pub fn census_config(&self, mode: Option<Mode>, max_extension: Option<u32>, budget: Option<u64>) -> CensusConfig {
        let mut cfg = CensusConfig::new(self.r, self.codim);
        cfg.mode = mode.unwrap_or(self.options.mode);
        cfg.max_extension = max_extension.unwrap_or(self.options.max_extension);
        cfg.opts = self.count_options(budget);
        cfg
    }

    pub fn count_options(&self, budget: Option<u64>) -> CountOptions {
        let mut opts = CountOptions::default();
        if let Some(b) = budget.or(self.options.budget) {
            opts.budget = b;
        }
        opts
    }
}

/// Parses `"c0,c1,...,cn"`; each entry is a constant expression (`-4`, `g+1`, ...).
pub fn parse_hyperplane(text: &str, field: &Field, n: usize) -> Result<Hyperplane, Error> {
    let vars = make_vars::<&str>(&[])?;
    let coeffs = text
        .split(',')
        .map(|part| {
            let p = parse_poly(part.trim(), &vars, field)?;
            Ok(p.as_constant().unwrap_or(Elem::ZERO))
        })
        .collect::<Result<Vec<Elem>, Error>>()?;
    if coeffs.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, got: coeffs.len() });
    }
    Hyperplane::new(field, &coeffs)
}
