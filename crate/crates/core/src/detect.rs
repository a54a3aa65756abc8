//! Tree ordering, sequential detection under occlusion, detection
//! probabilities, and the visible-area weights of the benchmark estimators.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{
    arc_fraction, shadow_of, GeomError, MorphTransform, PlanePoint, ShadowSet, ShadowUnion, StemDisc,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("tree {index}: diameter must be positive and finite, got {dbh}")]
    InvalidDbh { index: usize, dbh: f64 },
    #[error("tree {index}: stem disc covers the plot centre")]
    OriginCovered { index: usize },
    #[error("detection parameter must lie in [-1, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("visible-area weights are defined only for full, centre and any visibility, got alpha {0}")]
    NotAPreset(f64),
    #[error("tree index {index} out of range for a plot of {len} trees")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("tree {index} is hidden at every angle (detection probability 0)")]
    DegenerateProbability { index: usize },
    #[error("tree {index}: the transformed nonvisible area fills the window (weight {weight})")]
    DegenerateWeight { index: usize, weight: f64 },
}

/// A stem: centre location in meters, diameter at breast height in cm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub location: PlanePoint,
    pub dbh: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl Tree {
    pub fn new(x: f64, y: f64, dbh: f64) -> Self {
        Self {
            location: PlanePoint::new(x, y),
            dbh,
            tag: None,
        }
    }

    /// Stem radius in meters.
    pub fn radius(&self) -> f64 {
        self.dbh / 200.0
    }

    /// Distance from the origin to the bark.
    pub fn bark_distance(&self) -> f64 {
        self.location.norm() - self.radius()
    }

    pub fn disc(&self) -> Result<StemDisc, GeomError> {
        StemDisc::new(self.location, self.radius())
    }

    /// Whether the stem centre lies in the window `B(o, R)`.
    pub fn in_window(&self, radius: f64) -> bool {
        self.location.norm() <= radius
    }
}

/// Trees of one circular plot sorted by distance to the bark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedPlot {
    radius: f64,
    trees: Vec<Tree>,
    shadows: Vec<ShadowSet>,
    input_index: Vec<usize>,
}

/// Sort trees by distance to the bark, breaking ties by polar angle and
/// then by input position.
pub fn order_trees(trees: Vec<Tree>, radius: f64) -> Result<OrderedPlot, DetectError> {
    let mut keyed = Vec::with_capacity(trees.len());
    for (index, tree) in trees.into_iter().enumerate() {
        if !(tree.dbh > 0.0) || !tree.dbh.is_finite() {
            return Err(DetectError::InvalidDbh { index, dbh: tree.dbh });
        }
        let disc = tree.disc().map_err(|e| match e {
            GeomError::OriginCovered { .. } => DetectError::OriginCovered { index },
            other => DetectError::Geom(other),
        })?;
        let shadow = shadow_of(disc)?;
        keyed.push((tree.bark_distance(), tree.location.angle(), index, tree, shadow));
    }
    keyed.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut plot = OrderedPlot {
        radius,
        trees: Vec::with_capacity(keyed.len()),
        shadows: Vec::with_capacity(keyed.len()),
        input_index: Vec::with_capacity(keyed.len()),
    };
    for (_, _, index, tree, shadow) in keyed {
        plot.trees.push(tree);
        plot.shadows.push(shadow);
        plot.input_index.push(index);
    }
    Ok(plot)
}

impl OrderedPlot {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn shadows(&self) -> &[ShadowSet] {
        &self.shadows
    }

    /// Position of each ordered tree in the input list.
    pub fn input_index(&self) -> &[usize] {
        &self.input_index
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    fn check_index(&self, i: usize) -> Result<(), DetectError> {
        if i >= self.trees.len() {
            return Err(DetectError::IndexOutOfRange {
                index: i,
                len: self.trees.len(),
            });
        }
        Ok(())
    }
}

/// Visibility rule: `α = 1` full, `α = 0` centre, `α = -1` any visibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionCondition {
    alpha: f64,
}

impl DetectionCondition {
    pub const FULL: DetectionCondition = DetectionCondition { alpha: 1.0 };
    pub const CENTRE: DetectionCondition = DetectionCondition { alpha: 0.0 };
    pub const ANY: DetectionCondition = DetectionCondition { alpha: -1.0 };

    pub fn new(alpha: f64) -> Result<Self, DetectError> {
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(DetectError::InvalidAlpha(alpha));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn transform_for(&self, dbh_cm: f64) -> MorphTransform {
        MorphTransform::from_alpha(self.alpha, dbh_cm)
    }

    /// `full`, `centre` or `any` for the presets, otherwise `alpha=<value>`.
    pub fn name(&self) -> String {
        match self.alpha {
            a if a == 1.0 => "full".into(),
            a if a == 0.0 => "centre".into(),
            a if a == -1.0 => "any".into(),
            a => format!("alpha={a}"),
        }
    }

    pub fn is_preset(&self) -> bool {
        [1.0, 0.0, -1.0].contains(&self.alpha)
    }
}

impl std::str::FromStr for DetectionCondition {
    type Err = DetectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Self::FULL),
            "centre" | "center" => Ok(Self::CENTRE),
            "any" => Ok(Self::ANY),
            other => {
                let v = other.strip_prefix("alpha=").unwrap_or(other);
                let alpha = v.parse::<f64>().map_err(|_| DetectError::InvalidAlpha(f64::NAN))?;
                Self::new(alpha)
            }
        }
    }
}

/// Whether the centre `c` of a tree with transform `t` falls in the
/// transformed union.
fn hidden(union: &ShadowUnion, c: PlanePoint, t: MorphTransform) -> Result<bool, GeomError> {
    Ok(match t {
        MorphTransform::Identity => union.contains(c),
        MorphTransform::Dilate(b) => union.dilated_membership(c, b),
        MorphTransform::Erode(b) => union.eroded_membership(c, b)?,
    })
}

/// Sequential detection flags. Every stem occludes later ones whether or
/// not it was detected itself.
pub fn classify_detection(plot: &OrderedPlot, cond: DetectionCondition) -> Result<Vec<bool>, DetectError> {
    let mut union = ShadowUnion::new();
    let mut out = Vec::with_capacity(plot.len());
    for (tree, shadow) in plot.trees.iter().zip(&plot.shadows) {
        let t = cond.transform_for(tree.dbh);
        out.push(union.is_empty() || !hidden(&union, tree.location, t)?);
        union.push(*shadow);
    }
    Ok(out)
}

fn probability_given(union: &ShadowUnion, tree: &Tree, cond: DetectionCondition, index: usize) -> Result<f64, DetectError> {
    if union.is_empty() {
        return Ok(1.0);
    }
    let r = tree.location.norm();
    let arcs = match cond.transform_for(tree.dbh).normalized()? {
        MorphTransform::Erode(b) => union.eroded_arcs_exact(r, b)?,
        t => union.occluded_arcs(r, t)?,
    };
    let p = 1.0 - arc_fraction(&arcs);
    if p <= 0.0 {
        return Err(DetectError::DegenerateProbability { index });
    }
    Ok(p)
}

/// Probability that tree `i` is detected, given the trees closer to the
/// centre, when its angle is uniform on its circle.
pub fn detection_probability(plot: &OrderedPlot, i: usize, cond: DetectionCondition) -> Result<f64, DetectError> {
    plot.check_index(i)?;
    let union = ShadowUnion::from_shadows(plot.shadows[..i].iter().copied());
    probability_given(&union, &plot.trees[i], cond, i)
}

/// Detection probabilities of every tree; the union is grown incrementally.
pub fn detection_probabilities(plot: &OrderedPlot, cond: DetectionCondition) -> Vec<Result<f64, DetectError>> {
    let mut union = ShadowUnion::new();
    let mut out = Vec::with_capacity(plot.len());
    for (i, (tree, shadow)) in plot.trees.iter().zip(&plot.shadows).enumerate() {
        out.push(probability_given(&union, tree, cond, i));
        union.push(*shadow);
    }
    out
}

/// How areas of transformed unions are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaMethod {
    /// Boundary integral over exact union boundaries.
    #[default]
    Exact,
    /// Radial quadrature of probe-circle arc lengths.
    Quadrature,
}

fn weight_from_area(area: f64, radius: f64, index: usize) -> Result<f64, DetectError> {
    let w = 1.0 - area / (PI * radius * radius);
    if w <= 0.0 {
        return Err(DetectError::DegenerateWeight { index, weight: w });
    }
    Ok(w.min(1.0))
}

fn preset_transform(cond: DetectionCondition, dbh: f64) -> Result<MorphTransform, DetectError> {
    if !cond.is_preset() {
        return Err(DetectError::NotAPreset(cond.alpha));
    }
    Ok(cond.transform_for(dbh))
}

/// Share of the window left visible after transforming the nonvisible area
/// of all stems by tree `i`'s disc.
pub fn kuronen_weight(
    plot: &OrderedPlot,
    i: usize,
    cond: DetectionCondition,
    method: AreaMethod,
) -> Result<f64, DetectError> {
    plot.check_index(i)?;
    let t = preset_transform(cond, plot.trees[i].dbh)?;
    let union = ShadowUnion::from_shadows(plot.shadows.iter().copied());
    let area = match method {
        AreaMethod::Exact => union.morph_area_exact(t, plot.radius)?,
        AreaMethod::Quadrature => union.morph_area(t, plot.radius)?,
    };
    weight_from_area(area, plot.radius, i)
}

/// Weights of every tree, sharing the union and, for erosion, its boundary.
pub fn kuronen_weights(
    plot: &OrderedPlot,
    cond: DetectionCondition,
    method: AreaMethod,
    wanted: &[bool],
) -> Vec<Result<f64, DetectError>> {
    let union = ShadowUnion::from_shadows(plot.shadows.iter().copied());
    let radius = plot.radius;
    let boundary = if cond.alpha < 0.0 && method == AreaMethod::Exact {
        let bmax = plot.trees.iter().map(|t| t.radius()).fold(0.0, f64::max) * cond.alpha.abs();
        Some(union.boundary(radius + bmax + 1.0))
    } else {
        None
    };
    let identity = std::cell::OnceCell::new();
    plot.trees
        .iter()
        .enumerate()
        .map(|(i, tree)| {
            if !wanted.get(i).copied().unwrap_or(true) {
                return Ok(f64::NAN);
            }
            let t = preset_transform(cond, tree.dbh)?.normalized()?;
            let area = match (t, method) {
                (MorphTransform::Identity, _) => *identity
                    .get_or_init(|| union_area(&union, t, radius, method))
                    .as_ref()
                    .map_err(|e: &GeomError| e.clone())?,
                (MorphTransform::Erode(b), AreaMethod::Exact) => {
                    union.eroded_area_from_boundary(boundary.as_ref().unwrap(), b, radius)
                }
                _ => union_area(&union, t, radius, method)?,
            };
            weight_from_area(area, radius, i)
        })
        .collect()
}

fn union_area(union: &ShadowUnion, t: MorphTransform, radius: f64, method: AreaMethod) -> Result<f64, GeomError> {
    match method {
        AreaMethod::Exact => union.morph_area_exact(t, radius),
        AreaMethod::Quadrature => union.morph_area(t, radius),
    }
}

/// Share of the window visible from the centre; the same for every tree.
pub fn oo_weight(plot: &OrderedPlot, method: AreaMethod) -> Result<f64, DetectError> {
    let union = ShadowUnion::from_shadows(plot.shadows.iter().copied());
    let area = union_area(&union, MorphTransform::Identity, plot.radius, method)?;
    weight_from_area(area, plot.radius, 0)
}

/// Per-tree outcome under one detection condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub detected: bool,
    pub probability: f64,
    pub kuronen: f64,
    pub oo: f64,
}

/// Which benchmark weights `detect_plot` computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WeightRequest {
    pub kuronen: bool,
    pub oo: bool,
}

impl WeightRequest {
    pub const NONE: WeightRequest = WeightRequest { kuronen: false, oo: false };
    pub const ALL: WeightRequest = WeightRequest { kuronen: true, oo: true };
}

/// Flags, probabilities and weights for every tree of a plot.
///
/// Probabilities and Kuronen weights are computed only for detected trees
/// with centre in the window, the trees an estimator sums over; other
/// entries are `NaN`. Weights are also `NaN` when not requested or the
/// condition is not a preset.
pub fn detect_plot(
    plot: &OrderedPlot,
    cond: DetectionCondition,
    method: AreaMethod,
    weights: WeightRequest,
) -> Result<Vec<DetectionRecord>, DetectError> {
    let detected = classify_detection(plot, cond)?;
    let wanted: Vec<bool> = detected
        .iter()
        .zip(&plot.trees)
        .map(|(d, t)| *d && t.in_window(plot.radius))
        .collect();
    let mut union = ShadowUnion::new();
    let mut probs = Vec::with_capacity(plot.len());
    for (i, (tree, shadow)) in plot.trees.iter().zip(&plot.shadows).enumerate() {
        probs.push(if wanted[i] { probability_given(&union, tree, cond, i)? } else { f64::NAN });
        union.push(*shadow);
    }
    let weighted = cond.is_preset() && !plot.is_empty();
    let kuronen = if weighted && weights.kuronen {
        kuronen_weights(plot, cond, method, &wanted)
    } else {
        vec![Ok(f64::NAN); plot.len()]
    };
    let oo = if weighted && weights.oo { oo_weight(plot, method)? } else { f64::NAN };
    detected
        .into_iter()
        .zip(probs)
        .zip(kuronen)
        .map(|((d, p), k)| {
            Ok(DetectionRecord {
                detected: d,
                probability: p,
                kuronen: k?,
                oo,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn random_plot(rng: &mut ChaCha8Rng, n: usize) -> OrderedPlot {
        let mut trees = Vec::new();
        while trees.len() < n {
            let p = PlanePoint::from_polar(10.5 * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU));
            let dbh = rng.random_range(5.0..45.0);
            if p.norm() > dbh / 200.0 + 0.05 {
                trees.push(Tree::new(p.x, p.y, dbh));
            }
        }
        order_trees(trees, 10.0).unwrap()
    }

    #[test]
    fn ordering_by_bark_distance() {
        let trees = vec![
            Tree::new(4.6, 0.0, 20.0),
            Tree::new(0.0, 2.1, 20.0),
            Tree::new(-7.2, 0.0, 20.0),
        ];
        let plot = order_trees(trees, 10.0).unwrap();
        assert_eq!(plot.input_index(), &[1, 0, 2]);
        let d: Vec<f64> = plot.trees().iter().map(|t| t.bark_distance()).collect();
        assert!((d[0] - 2.0).abs() < 1e-12 && (d[1] - 4.5).abs() < 1e-12 && (d[2] - 7.1).abs() < 1e-12);
    }

    #[test]
    fn ties_break_by_angle() {
        let a = PlanePoint::from_polar(3.1, 2.0);
        let b = PlanePoint::from_polar(3.1, 0.1);
        let plot = order_trees(vec![Tree::new(a.x, a.y, 20.0), Tree::new(b.x, b.y, 20.0)], 10.0).unwrap();
        assert_eq!(plot.input_index(), &[1, 0]);
    }

    #[test]
    fn singleton_and_covering_stem() {
        let plot = order_trees(vec![Tree::new(3.0, 0.0, 30.0)], 10.0).unwrap();
        assert_eq!(plot.len(), 1);
        for cond in [DetectionCondition::FULL, DetectionCondition::CENTRE, DetectionCondition::ANY] {
            assert_eq!(classify_detection(&plot, cond).unwrap(), vec![true]);
            assert_eq!(detection_probability(&plot, 0, cond).unwrap(), 1.0);
        }
        let err = order_trees(vec![Tree::new(0.1, 0.0, 30.0)], 10.0).unwrap_err();
        assert_eq!(err, DetectError::OriginCovered { index: 0 });
    }

    #[test]
    fn collinear_pair_classification() {
        let plot = order_trees(vec![Tree::new(5.0, 0.0, 50.0), Tree::new(8.0, 0.0, 50.0)], 10.0).unwrap();
        assert_eq!(classify_detection(&plot, DetectionCondition::CENTRE).unwrap(), vec![true, false]);
        // worst boundary point (8, 0.25) of the second disc
        let perp = 5.0 * 0.25f64.atan2(8.0).sin();
        assert!((perp - 0.156).abs() < 1e-3);
        assert_eq!(classify_detection(&plot, DetectionCondition::ANY).unwrap(), vec![true, false]);
        assert_eq!(classify_detection(&plot, DetectionCondition::FULL).unwrap(), vec![true, false]);
    }

    #[test]
    fn probability_examples() {
        // prior disc radius 0.5 (dbh 100 cm); tree at r = 8
        let plot = order_trees(vec![Tree::new(5.0, 0.0, 100.0), Tree::new(0.0, 8.0, 40.0)], 10.0).unwrap();
        let p = detection_probability(&plot, 1, DetectionCondition::CENTRE).unwrap();
        assert!((p - (1.0 - 2.0 * 0.1f64.asin() / TAU)).abs() < 1e-12);
        assert!((p - 0.9681157).abs() < 1e-7);
        let p = detection_probability(&plot, 1, DetectionCondition::FULL).unwrap();
        assert!((p - (1.0 - 2.0 * (0.1f64.asin() + 0.025f64.asin()) / TAU)).abs() < 1e-12);
        assert!((p - 0.9601571).abs() < 1e-7);
        assert_eq!(detection_probability(&plot, 0, DetectionCondition::FULL).unwrap(), 1.0);
    }

    #[test]
    fn weight_examples() {
        let plot = order_trees(vec![Tree::new(5.0, 0.0, 100.0)], 10.0).unwrap();
        for m in [AreaMethod::Exact, AreaMethod::Quadrature] {
            let w = kuronen_weight(&plot, 0, DetectionCondition::CENTRE, m).unwrap();
            assert!((w - (1.0 - 7.88 / (100.0 * PI))).abs() < 5e-4, "{w}");
            let o = oo_weight(&plot, m).unwrap();
            assert!((o - w).abs() < 1e-12);
        }
        let empty = order_trees(vec![], 10.0).unwrap();
        assert_eq!(oo_weight(&empty, AreaMethod::Exact).unwrap(), 1.0);
        assert!(matches!(
            kuronen_weight(&plot, 0, DetectionCondition::new(0.5).unwrap(), AreaMethod::Exact),
            Err(DetectError::NotAPreset(_))
        ));
    }

    #[test]
    fn full_occlusion_is_degenerate() {
        let ring: Vec<Tree> = (0..12)
            .map(|k| {
                let p = PlanePoint::from_polar(0.2, TAU * k as f64 / 12.0);
                Tree::new(p.x, p.y, 30.0)
            })
            .collect();
        let plot = order_trees(ring, 10.0).unwrap();
        let w = kuronen_weight(&plot, 0, DetectionCondition::FULL, AreaMethod::Exact);
        assert!(matches!(w, Err(DetectError::DegenerateWeight { .. })), "{w:?}");
    }

    #[test]
    fn centre_weights_equal_oo_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let plot = random_plot(&mut rng, 15);
            let oo = oo_weight(&plot, AreaMethod::Exact).unwrap();
            let ws = kuronen_weights(&plot, DetectionCondition::CENTRE, AreaMethod::Exact, &[]);
            for w in ws {
                assert_eq!(w.unwrap(), oo);
            }
        }
    }

    #[test]
    fn batch_weights_match_single_tree_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let plot = random_plot(&mut rng, 30);
        for cond in [DetectionCondition::FULL, DetectionCondition::ANY] {
            let batch = kuronen_weights(&plot, cond, AreaMethod::Exact, &[]);
            for i in [0, 7, 29] {
                let single = kuronen_weight(&plot, i, cond, AreaMethod::Exact).unwrap();
                assert!((batch[i].clone().unwrap() - single).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn later_trees_do_not_change_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let plot = random_plot(&mut rng, 30);
        for cond in [DetectionCondition::FULL, DetectionCondition::CENTRE, DetectionCondition::ANY] {
            let all = detection_probabilities(&plot, cond);
            let truncated = OrderedPlot {
                radius: plot.radius,
                trees: plot.trees[..16].to_vec(),
                shadows: plot.shadows[..16].to_vec(),
                input_index: plot.input_index[..16].to_vec(),
            };
            for i in 0..16 {
                assert_eq!(
                    all[i].clone().unwrap(),
                    detection_probability(&truncated, i, cond).unwrap()
                );
            }
        }
    }

    #[test]
    fn probability_nonincreasing_in_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let plot = random_plot(&mut rng, 25);
            let mut prev: Option<Vec<f64>> = None;
            for a in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                let cond = DetectionCondition::new(a).unwrap();
                let ps: Vec<f64> = detection_probabilities(&plot, cond)
                    .into_iter()
                    .map(|p| p.unwrap_or(0.0))
                    .collect();
                if let Some(prev) = &prev {
                    for (p, q) in ps.iter().zip(prev) {
                        assert!(*p <= q + 1e-12);
                    }
                }
                prev = Some(ps);
            }
        }
    }

    #[test]
    fn undetected_shadows_do_not_matter_for_any_visibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let plot = random_plot(&mut rng, 40);
            let cond = DetectionCondition::ANY;
            let flags = classify_detection(&plot, cond).unwrap();
            let mut detected_only = ShadowUnion::new();
            for (i, tree) in plot.trees().iter().enumerate() {
                let full = detection_probability(&plot, i, cond).unwrap();
                let part = probability_given(&detected_only, tree, cond, i).unwrap();
                assert!((full - part).abs() < 1e-9, "tree {i}: {full} vs {part}");
                if flags[i] {
                    detected_only.push(plot.shadows()[i]);
                }
            }
        }
    }

    #[test]
    fn empirical_detection_rate_matches_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let plot = random_plot(&mut rng, 25);
        let i = 20;
        let tree = &plot.trees()[i];
        let r = tree.location.norm();
        let union = ShadowUnion::from_shadows(plot.shadows()[..i].iter().copied());
        for cond in [DetectionCondition::FULL, DetectionCondition::CENTRE, DetectionCondition::ANY] {
            let p = detection_probability(&plot, i, cond).unwrap();
            let t = cond.transform_for(tree.dbh);
            let m = 100_000;
            let mut hits = 0;
            for _ in 0..m {
                let c = PlanePoint::from_polar(r, rng.random_range(0.0..TAU));
                if !hidden(&union, c, t).unwrap() {
                    hits += 1;
                }
            }
            let rate = hits as f64 / m as f64;
            let se = (p * (1.0 - p) / m as f64).sqrt();
            assert!((rate - p).abs() <= 3.0 * se + 1e-9, "{cond:?}: {rate} vs {p}");
        }
    }
}
