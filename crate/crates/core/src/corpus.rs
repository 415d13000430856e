//! Named test functions with known sup norms, Hölder exponents and, where
//! available, closed-form moduli of continuity.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::basis::d_max;
use crate::error::{Error, Result};
use crate::operators1d::Function1D;
use crate::tensor::ScalarField;

pub type ModulusFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Smooth,
    /// Member of `Lip(alpha)`.
    Lipschitz(f64),
    /// Fixed exactly by the exponential operators.
    Reproduced,
    NonSeparable,
}

#[derive(Clone)]
pub struct CorpusEntry {
    pub field: ScalarField,
    pub tags: Vec<Tag>,
    pub exact_modulus: Option<ModulusFn>,
}

impl CorpusEntry {
    pub fn new(field: ScalarField, tags: Vec<Tag>) -> Self {
        Self {
            field,
            tags,
            exact_modulus: None,
        }
    }

    pub fn with_exact_modulus(mut self, omega: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact_modulus = Some(Arc::new(omega));
        self
    }

    pub fn name(&self) -> &str {
        self.field.name()
    }

    pub fn has_tag(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }

    pub fn is_reproduced(&self) -> bool {
        self.has_tag(Tag::Reproduced)
    }

    /// The Hölder exponent from the tags, if any.
    pub fn lip_alpha(&self) -> Option<f64> {
        self.tags.iter().find_map(|t| match t {
            Tag::Lipschitz(a) => Some(*a),
            _ => None,
        })
    }
}

impl fmt::Debug for CorpusEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CorpusEntry")
            .field("field", &self.field)
            .field("tags", &self.tags)
            .field("exact_modulus", &self.exact_modulus.is_some())
            .finish()
    }
}

/// A registry of corpus entries for one dimension and rate.
#[derive(Debug, Clone)]
pub struct Corpus {
    d: usize,
    mu: f64,
    entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn empty(d: usize, mu: f64) -> Result<Self> {
        let max = d_max();
        if d == 0 || d > max {
            return Err(Error::InvalidParameter(format!("dimension d must be in 1..={max}, got {d}")));
        }
        Ok(Self {
            d,
            mu,
            entries: Vec::new(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(CorpusEntry::name).collect()
    }

    pub fn lookup(&self, name: &str) -> Result<&CorpusEntry> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| Error::UnknownFunction(name.to_string()))
    }

    /// Adds an entry. Rejects duplicate names, dimension mismatches,
    /// exponents outside `(0, 1]`, and `Reproduced` tags on fields that are
    /// not `exp_mu` or `exp_mu^2`.
    pub fn register(&mut self, entry: CorpusEntry) -> Result<()> {
        if self.entries.iter().any(|e| e.name() == entry.name()) {
            return Err(Error::DuplicateName(entry.name().to_string()));
        }
        if entry.field.d() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: entry.field.d(),
            });
        }
        if let Some(alpha) = entry.lip_alpha() {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "Hölder exponent of `{}` must lie in (0, 1], got {alpha}",
                    entry.name()
                )));
            }
        }
        if entry.is_reproduced() && !self.is_exp_or_exp_sq(&entry.field) {
            return Err(Error::InvalidParameter(format!(
                "`{}` is tagged reproduced but is neither exp_mu nor exp_mu^2",
                entry.name()
            )));
        }
        self.entries.push(entry);
        Ok(())
    }

    fn is_exp_or_exp_sq(&self, f: &ScalarField) -> bool {
        let probes: Vec<Vec<f64>> = (0..7)
            .map(|j| (0..self.d).map(|i| ((3 * j + 5 * i) % 11) as f64 / 10.0).collect())
            .collect();
        [1.0, 2.0].iter().any(|&m| {
            probes.iter().all(|x| {
                let target = (m * self.mu * x.iter().sum::<f64>()).exp();
                (f.eval(x) - target).abs() <= 1e-12 * target
            })
        })
    }
}

/// The built-in corpus: `e0`, coordinate projections `pr1..prd`, `sumsq`,
/// `exp`, `exp2`, `exp3`, `exp4`, `sinsum`, `bump`, `kink_half`, `kink`,
/// and `osc` when `d >= 2`.
pub fn builtin_corpus(d: usize, mu: f64) -> Result<Corpus> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::InvalidParameter(format!("rate mu must be finite and >= 0, got {mu}")));
    }
    let mut corpus = Corpus::empty(d, mu)?;
    let df = d as f64;
    let ones = || vec![Function1D::constant(1.0); d];

    corpus.register(
        CorpusEntry::new(
            ScalarField::from_factors("e0", ones()).with_sup_norm(1.0),
            vec![Tag::Smooth],
        )
        .with_exact_modulus(|_| 0.0),
    )?;

    for i in 0..d {
        let mut factors = ones();
        factors[i] = Function1D::monomial(1);
        corpus.register(
            CorpusEntry::new(
                ScalarField::from_factors(format!("pr{}", i + 1), factors)
                    .with_sup_norm(1.0)
                    .with_lip_alpha(1.0),
                vec![Tag::Smooth, Tag::Lipschitz(1.0)],
            )
            .with_exact_modulus(|delta| delta.min(1.0)),
        )?;
    }

    corpus.register(CorpusEntry::new(
        ScalarField::new("sumsq", d, |x| x.iter().map(|v| v * v).sum())
            .with_sup_norm(df)
            .with_lip_alpha(1.0),
        vec![Tag::Smooth, Tag::Lipschitz(1.0)],
    ))?;

    for m in 1..=4u32 {
        let name = if m == 1 { "exp".to_string() } else { format!("exp{m}") };
        let field = ScalarField::from_factors(name, vec![Function1D::exp_power(mu, m); d])
            .with_sup_norm((m as f64 * mu * df).exp())
            .with_lip_alpha(1.0);
        let mut tags = vec![Tag::Smooth, Tag::Lipschitz(1.0)];
        if m <= 2 {
            tags.push(Tag::Reproduced);
        }
        corpus.register(CorpusEntry::new(field, tags))?;
    }

    corpus.register(CorpusEntry::new(
        ScalarField::new("sinsum", d, |x| (PI * x.iter().sum::<f64>()).sin())
            .with_sup_norm(1.0)
            .with_lip_alpha(1.0),
        vec![Tag::Smooth, Tag::Lipschitz(1.0)],
    ))?;

    let bump = Function1D::new("t(1-t)", |t| t * (1.0 - t)).with_sup_norm(0.25);
    corpus.register(CorpusEntry::new(
        ScalarField::from_factors("bump", vec![bump; d])
            .with_sup_norm(0.25f64.powi(d as i32))
            .with_lip_alpha(1.0),
        vec![Tag::Smooth, Tag::Lipschitz(1.0)],
    ))?;

    // |mean(x) - 1/2|^alpha: moving a Euclidean distance delta shifts the
    // mean by at most delta / sqrt(d), and the mean ranges over [0, 1].
    for (name, alpha) in [("kink_half", 0.5), ("kink", 1.0)] {
        let sqrt_d = df.sqrt();
        corpus.register(
            CorpusEntry::new(
                ScalarField::new(name, d, move |x| {
                    (x.iter().sum::<f64>() / x.len() as f64 - 0.5).abs().powf(alpha)
                })
                .with_sup_norm(0.5f64.powf(alpha))
                .with_lip_alpha(alpha),
                vec![Tag::Lipschitz(alpha)],
            )
            .with_exact_modulus(move |delta| (delta / sqrt_d).min(0.5).powf(alpha)),
        )?;
    }

    if d >= 2 {
        corpus.register(CorpusEntry::new(
            ScalarField::new("osc", d, |x| {
                let s: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
                (2.0 * PI * s).sin()
            })
            .with_sup_norm(1.0)
            .with_lip_alpha(1.0),
            vec![Tag::Smooth, Tag::Lipschitz(1.0), Tag::NonSeparable],
        ))?;
    }

    Ok(corpus)
}
