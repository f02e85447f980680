//! Run configuration: named recipes, `key = value` files and flags, merged in
//! that order of increasing precedence.

use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use mlcoulomb::{
    AlgebraContext, DeformationFamily, ExtensionParam, PhysicalParams, QuadratureSpec, RootSpec,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(CliError::config(format!(
                "unknown format `{s}` (csv | json)"
            ))),
        }
    }
}

/// Every setting a subcommand may read; unset values fall back to defaults
/// in [`RunConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    pub family: Option<String>,
    pub beta: Option<f64>,
    pub k: Option<f64>,
    pub delta: Option<f64>,
    pub a: Option<f64>,
    pub levels: Option<(u32, u32)>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub alpha: Option<f64>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub samples: Option<usize>,
    pub truncation: Option<usize>,
}

impl Layer {
    /// `other` wins wherever it is set. `delta` and `A` replace each other
    /// as a pair so that a later layer can switch between them.
    pub fn overlay(mut self, other: &Layer) -> Layer {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(family, beta, k, levels, hbar, mass, alpha, tol, format, output, samples, truncation);
        if other.delta.is_some() || other.a.is_some() {
            self.delta = other.delta;
            self.a = other.a;
        }
        self
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| CliError::config(format!("`{key}` expects a number, got `{v}`")))
        };
        let count = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| CliError::config(format!("`{key}` expects a count, got `{v}`")))
        };
        match key {
            "family" => self.family = Some(value.to_string()),
            "beta" => self.beta = Some(num(value)?),
            "k" => self.k = Some(num(value)?),
            "delta" => self.delta = Some(num(value)?),
            "A" | "a" => self.a = Some(num(value)?),
            "levels" => self.levels = Some(parse_levels(value)?),
            "hbar" => self.hbar = Some(num(value)?),
            "mass" => self.mass = Some(num(value)?),
            "alpha" => self.alpha = Some(num(value)?),
            "tol" => self.tol = Some(num(value)?),
            "format" => self.format = Some(Format::parse(value)?),
            "output" => self.output = Some(PathBuf::from(value)),
            "samples" => self.samples = Some(count(value)?),
            "truncation" => self.truncation = Some(count(value)?),
            _ => return Err(CliError::config(format!("unknown setting `{key}`"))),
        }
        Ok(())
    }

    /// Lines of `key = value`; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Layer, CliError> {
        let mut layer = Layer::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {}: expected `key = value`", i + 1))
            })?;
            layer
                .set(key.trim(), value.trim())
                .map_err(|e| CliError::config(format!("line {}: {}", i + 1, e.message)))?;
        }
        if layer.delta.is_some() && layer.a.is_some() {
            return Err(CliError::config("`delta` and `A` are mutually exclusive"));
        }
        Ok(layer)
    }

    pub fn load(path: &Path) -> Result<Layer, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_file(&text)
    }
}

/// `a..b` (inclusive) or a single level.
pub fn parse_levels(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::config(format!("levels must look like `0..3` or `2`, got `{s}`"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo.trim(), hi.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let lo: u32 = lo.parse().map_err(|_| bad())?;
    let hi: u32 = hi.parse().map_err(|_| bad())?;
    if hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// A named reproduction of one of the worked examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Recipe {
    pub name: &'static str,
    pub summary: &'static str,
    settings: &'static [(&'static str, &'static str)],
}

pub const RECIPES: &[Recipe] = &[
    Recipe {
        name: "1a",
        summary: "Kempf deformation (1 + βP²): explicit spectrum",
        settings: &[
            ("family", "kempf"),
            ("beta", "0.01"),
            ("delta", "0.5"),
            ("levels", "0..5"),
        ],
    },
    Recipe {
        name: "1b",
        summary: "(1 + βP²)^{3/2}: transcendental level equation",
        settings: &[
            ("family", "polyplus"),
            ("k", "1.5"),
            ("beta", "0.01"),
            ("delta", "0.5"),
            ("levels", "0..5"),
        ],
    },
    Recipe {
        name: "1c",
        summary: "(1 + βP²)^k: Γ-function leading correction",
        settings: &[
            ("family", "polyplus"),
            ("k", "1.5"),
            ("beta", "1e-4"),
            ("delta", "0.5"),
            ("levels", "0..2"),
        ],
    },
    Recipe {
        name: "2a",
        summary: "1 - βP²: transcendental level equation",
        settings: &[
            ("family", "polyminus"),
            ("k", "-1"),
            ("beta", "0.01"),
            ("delta", "0.5"),
            ("levels", "0..5"),
        ],
    },
    Recipe {
        name: "2b",
        summary: "(1 - βP²)^{1/2}: explicit spectrum, correction linear in β",
        settings: &[
            ("family", "polyminus"),
            ("k", "0.5"),
            ("beta", "0.01"),
            ("delta", "0.5"),
            ("levels", "0..5"),
        ],
    },
    Recipe {
        name: "2c",
        summary: "(1 - βP²)^k: Γ-function leading correction, negative for k > 1/2",
        settings: &[
            ("family", "polyminus"),
            ("k", "0.75"),
            ("beta", "1e-4"),
            ("delta", "0.5"),
            ("levels", "0..2"),
        ],
    },
    Recipe {
        name: "3a",
        summary: "exp(√β|P|): √β·ln√β leading correction",
        settings: &[
            ("family", "expsqrt"),
            ("beta", "1e-4"),
            ("delta", "0.5"),
            ("levels", "1..1"),
        ],
    },
    Recipe {
        name: "3b",
        summary: "exp((βP²)^{1/3}): β^{1/3} leading correction",
        settings: &[
            ("family", "expcbrt"),
            ("beta", "1e-4"),
            ("delta", "0.5"),
            ("levels", "1..1"),
        ],
    },
];

pub fn recipe(name: &str) -> Result<&'static Recipe, CliError> {
    let name = if name == "3" { "3a" } else { name };
    RECIPES.iter().find(|r| r.name == name).ok_or_else(|| {
        let known: Vec<_> = RECIPES.iter().map(|r| r.name).collect();
        CliError::config(format!(
            "unknown recipe `{name}` (known: {})",
            known.join(", ")
        ))
    })
}

impl Recipe {
    pub fn layer(&self) -> Layer {
        let mut layer = Layer::default();
        for (k, v) in self.settings {
            layer.set(k, v).expect("built-in recipe settings parse");
        }
        layer
    }
}

/// The extension, given either as `δ` or as the kernel constant `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtensionChoice {
    Delta(f64),
    A(f64),
}

impl fmt::Display for ExtensionChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Delta(d) => write!(f, "delta={d}"),
            Self::A(a) => write!(f, "A={a}"),
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: DeformationFamily,
    pub params: PhysicalParams,
    pub ext: ExtensionParam,
    pub ext_choice: ExtensionChoice,
    pub levels: RangeInclusive<u32>,
    pub quad: QuadratureSpec,
    pub root: RootSpec,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub samples: Option<usize>,
    pub truncation: Option<usize>,
}

impl RunConfig {
    pub fn resolve(layer: &Layer) -> Result<Self, CliError> {
        let name = layer.family.as_deref().unwrap_or("kempf");
        let beta = layer.beta.unwrap_or(0.01);
        let family = match name {
            "none" | "undeformed" => Ok(DeformationFamily::Undeformed),
            "kempf" => DeformationFamily::kempf(beta),
            "polyplus" => DeformationFamily::poly_plus(beta, layer.k.unwrap_or(1.0)),
            "polyminus" => DeformationFamily::poly_minus(beta, layer.k.unwrap_or(0.5)),
            "expsqrt" => DeformationFamily::exp_sqrt(beta),
            "expcbrt" => DeformationFamily::exp_cbrt(beta),
            other => {
                return Err(CliError::config(format!(
                    "unknown family `{other}` (none | kempf | polyplus | polyminus | expsqrt | expcbrt)"
                )))
            }
        }
        .map_err(CliError::from_core)?;
        if name == "kempf" && layer.k.is_some_and(|k| k != 1.0) {
            return Err(CliError::config("kempf fixes k = 1; use --family polyplus"));
        }
        let params = PhysicalParams::new(
            layer.hbar.unwrap_or(1.0),
            layer.mass.unwrap_or(1.0),
            layer.alpha.unwrap_or(1.0),
        )
        .map_err(CliError::from_core)?;
        let (ext, ext_choice) = match (layer.delta, layer.a) {
            (Some(_), Some(_)) => {
                return Err(CliError::config("`delta` and `A` are mutually exclusive"))
            }
            (_, Some(a)) => (
                ExtensionParam::from_a(a).map_err(CliError::from_core)?,
                ExtensionChoice::A(a),
            ),
            (d, None) => {
                let d = d.unwrap_or(0.5);
                (
                    ExtensionParam::new(d).map_err(CliError::from_core)?,
                    ExtensionChoice::Delta(d),
                )
            }
        };
        let (lo, hi) = layer.levels.unwrap_or((0, 0));
        let tol = layer.tol.unwrap_or(1e-12);
        let quad = QuadratureSpec {
            rel_tol: tol,
            ..QuadratureSpec::default()
        };
        let root = RootSpec {
            tol,
            ..RootSpec::default()
        };
        quad.validate().map_err(CliError::from_core)?;
        root.validate().map_err(CliError::from_core)?;
        Ok(Self {
            family,
            params,
            ext,
            ext_choice,
            levels: lo..=hi,
            quad,
            root,
            format: layer.format.unwrap_or(Format::Csv),
            output: layer.output.clone(),
            samples: layer.samples,
            truncation: layer.truncation,
        })
    }

    pub fn context(&self) -> Result<AlgebraContext, CliError> {
        AlgebraContext::with_specs(self.params, self.family.clone(), self.quad, self.root)
            .map_err(CliError::from_core)
    }
}
