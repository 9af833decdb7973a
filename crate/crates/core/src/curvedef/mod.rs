//! Plane-filling traversal definitions.
//!
//! A definition is a set of *generators*. Each generator is a polyline of
//! segments and jumps; every segment is replaced, on refinement, by a
//! similar copy of its target generator (optionally reversed and/or
//! mirrored). The net displacement of a generator is normalized to the unit
//! segment `(0,0)→(1,0)` before any geometry is derived from it.

mod catalogue;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::geom::{Similarity, Vec2};

pub use catalogue::{builtin, builtin_source, CatalogueError, BUILTIN_NAMES};
pub use parse::{parse_definition, ParseError, ParseErrorKind};

/// Coordinate basis in which generator displacements are written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Unit axes `(1,0)` and `(0,1)`.
    Square,
    /// Axes `(1,0)` and `(1/2, √3/2)`.
    Triangular,
}

impl Basis {
    pub fn to_world(self, v: Vec2) -> Vec2 {
        match self {
            Basis::Square => v,
            Basis::Triangular => Vec2::new(v.x + 0.5 * v.y, v.y * 3f64.sqrt() * 0.5),
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Basis::Square => "square",
            Basis::Triangular => "triangular",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorItem {
    Segment {
        displacement: Vec2,
        reversed: bool,
        mirrored: bool,
        target: String,
    },
    Jump {
        displacement: Vec2,
    },
}

impl GeneratorItem {
    pub fn displacement(&self) -> Vec2 {
        match self {
            GeneratorItem::Segment { displacement, .. } | GeneratorItem::Jump { displacement } => {
                *displacement
            }
        }
    }

    pub fn is_segment(&self) -> bool {
        matches!(self, GeneratorItem::Segment { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub id: String,
    pub basis: Basis,
    pub items: Vec<GeneratorItem>,
}

impl Generator {
    /// Sum of all item displacements (jumps included), in world axes.
    pub fn net_displacement(&self) -> Vec2 {
        self.items
            .iter()
            .fold(Vec2::ZERO, |acc, it| acc + self.basis.to_world(it.displacement()))
    }

    pub fn segment_count(&self) -> usize {
        self.items.iter().filter(|i| i.is_segment()).count()
    }

    /// Gate points in the normalized frame, where the first gate is `(0,0)`
    /// and the last one `(1,0)`. Returns one more point than there are items.
    pub fn normalized_gates(&self) -> Result<Vec<Vec2>, DefinitionError> {
        let net = self.net_displacement();
        if net.norm() == 0.0 || !net.is_finite() {
            return Err(DefinitionError::ZeroNetDisplacement(self.id.clone()));
        }
        let mut gates = Vec::with_capacity(self.items.len() + 1);
        let mut at = Vec2::ZERO;
        gates.push(Vec2::ZERO);
        for it in &self.items {
            at += self.basis.to_world(it.displacement());
            gates.push(at.cdiv(net));
        }
        // Pin the exit gate exactly.
        *gates.last_mut().unwrap() = Vec2::ONE;
        Ok(gates)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveDefinition {
    pub name: String,
    pub generators: BTreeMap<String, Generator>,
    pub start: String,
    /// Closed parameter interval `[t0, t1]` of the full curve to keep.
    pub restriction: Option<(f64, f64)>,
}

impl CurveDefinition {
    pub fn start_generator(&self) -> Option<&Generator> {
        self.generators.get(&self.start)
    }

    /// Equality ignoring the definition's name.
    pub fn structurally_eq(&self, other: &CurveDefinition) -> bool {
        self.generators == other.generators
            && self.start == other.start
            && self.restriction == other.restriction
    }

    /// Largest contraction factor over all segments of all generators.
    pub fn max_contraction(&self) -> Result<f64, DefinitionError> {
        let mut c_max: f64 = 0.0;
        for g in self.generators.values() {
            for it in segment_transforms(g, self)? {
                if let ItemTransform::Segment { similarity, .. } = it {
                    c_max = c_max.max(similarity.scale());
                }
            }
        }
        Ok(c_max)
    }

    /// Magnification per full turn of the spiral traced by repeatedly
    /// zooming into the first child of the start generator: each level
    /// rotates by that child's angle and scales by the inverse of its
    /// contraction. `None` if the first item is a jump or does not rotate.
    pub fn spiral_magnification(&self) -> Result<Option<f64>, DefinitionError> {
        let Some(g) = self.start_generator() else {
            return Ok(None);
        };
        let first = segment_transforms(g, self)?.into_iter().next();
        let Some(ItemTransform::Segment { similarity, .. }) = first else {
            return Ok(None);
        };
        let turn = similarity.rotation().abs();
        if turn < 1e-12 {
            return Ok(None);
        }
        Ok(Some(similarity.scale().recip().powf(std::f64::consts::TAU / turn)))
    }
}

/// Problems that make a definition unusable for geometry.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum DefinitionError {
    #[error("generator `{0}` has zero net displacement")]
    ZeroNetDisplacement(String),
    #[error("generator `{0}` has no segments")]
    EmptyGenerator(String),
    #[error("generator `{generator}` item {index} is a zero-length segment")]
    DegenerateSegment { generator: String, index: usize },
    #[error("generator `{generator}` refers to unknown generator `{target}`")]
    UnknownGenerator { generator: String, target: String },
    #[error("start generator `{0}` is not defined")]
    UnknownStart(String),
    #[error("generator `{generator}` segment {index} is non-contracting (scale {scale})")]
    NonContracting {
        generator: String,
        index: usize,
        scale: f64,
    },
    #[error("invalid restriction [{0}, {1}]")]
    BadRestriction(f64, f64),
}

/// Per-item geometry of a generator in its normalized frame.
#[derive(Clone, Debug, PartialEq)]
pub enum ItemTransform {
    Segment {
        similarity: Similarity,
        weight: f64,
        reversed: bool,
        target: String,
    },
    Jump {
        from: Vec2,
        to: Vec2,
    },
}

impl ItemTransform {
    pub fn weight(&self) -> f64 {
        match self {
            ItemTransform::Segment { weight, .. } => *weight,
            ItemTransform::Jump { .. } => 0.0,
        }
    }
}

/// Derive the similarity, parameter weight and flags of every item of `g`.
///
/// Segment `i` maps the unit segment onto its gates; its weight is
/// `c_i² / Σ c_j²`. The weights of a generator sum to exactly `1.0` when
/// added in item order.
pub fn segment_transforms(
    g: &Generator,
    def: &CurveDefinition,
) -> Result<Vec<ItemTransform>, DefinitionError> {
    let gates = g.normalized_gates()?;
    let mut out = Vec::with_capacity(g.items.len());
    let mut total = 0.0;
    for (i, it) in g.items.iter().enumerate() {
        let (a, b) = (gates[i], gates[i + 1]);
        match it {
            GeneratorItem::Segment {
                reversed,
                mirrored,
                target,
                ..
            } => {
                if !def.generators.contains_key(target) {
                    return Err(DefinitionError::UnknownGenerator {
                        generator: g.id.clone(),
                        target: target.clone(),
                    });
                }
                let similarity = Similarity::from_segment(a, b, *mirrored);
                let c = similarity.scale();
                if c == 0.0 || !c.is_finite() {
                    return Err(DefinitionError::DegenerateSegment {
                        generator: g.id.clone(),
                        index: i,
                    });
                }
                total += c * c;
                out.push(ItemTransform::Segment {
                    similarity,
                    weight: c * c,
                    reversed: *reversed,
                    target: target.clone(),
                });
            }
            GeneratorItem::Jump { .. } => out.push(ItemTransform::Jump { from: a, to: b }),
        }
    }
    if total == 0.0 {
        return Err(DefinitionError::EmptyGenerator(g.id.clone()));
    }
    let last_seg = out
        .iter()
        .rposition(|t| matches!(t, ItemTransform::Segment { .. }))
        .expect("total > 0 implies a segment");
    let mut acc = 0.0;
    for (i, t) in out.iter_mut().enumerate() {
        if let ItemTransform::Segment { weight, .. } = t {
            if i == last_seg {
                *weight = 1.0 - acc;
            } else {
                *weight /= total;
                acc += *weight;
            }
        }
    }
    Ok(out)
}

/// Findings of [`validate`]; errors make the definition unusable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub errors: Vec<DefinitionError>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.errors.is_empty() && self.warnings.is_empty() {
            return write!(f, "ok");
        }
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

const AREA_BALANCE_TOLERANCE: f64 = 1e-9;

pub fn validate(def: &CurveDefinition) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !def.generators.contains_key(&def.start) {
        report
            .errors
            .push(DefinitionError::UnknownStart(def.start.clone()));
    }
    if let Some((t0, t1)) = def.restriction {
        if !(0.0..=1.0).contains(&t0) || !(0.0..=1.0).contains(&t1) || t0 >= t1 {
            report.errors.push(DefinitionError::BadRestriction(t0, t1));
        }
    }
    for g in def.generators.values() {
        let transforms = match segment_transforms(g, def) {
            Ok(t) => t,
            Err(e) => {
                report.errors.push(e);
                continue;
            }
        };
        let mut sum_sq = 0.0;
        for (i, t) in transforms.iter().enumerate() {
            if let ItemTransform::Segment { similarity, .. } = t {
                let c = similarity.scale();
                sum_sq += c * c;
                if c >= 1.0 {
                    report.errors.push(DefinitionError::NonContracting {
                        generator: g.id.clone(),
                        index: i,
                        scale: c,
                    });
                }
            }
        }
        if (sum_sq - 1.0).abs() > AREA_BALANCE_TOLERANCE {
            report.warnings.push(format!(
                "generator `{}`: sum of squared contractions is {sum_sq:.12} (not 1); \
                 the traversal over- or under-fills its tile",
                g.id
            ));
        }
    }
    report
}

/// Toggle the `reversed` flag of every segment, moving each arrowhead to the
/// other end. An involution.
pub fn inner_flip(def: &CurveDefinition) -> CurveDefinition {
    let mut out = def.clone();
    for g in out.generators.values_mut() {
        for it in &mut g.items {
            if let GeneratorItem::Segment { reversed, .. } = it {
                *reversed = !*reversed;
            }
        }
    }
    out
}
