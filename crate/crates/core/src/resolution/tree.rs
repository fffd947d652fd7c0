use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::blowup::blowup_once;
use super::classify::{classify_origin, SingularityClass, SingularityKind};
use super::germ::{family_restriction, ChartLabel, PlaneFoliationGerm};
use super::ResolutionError;
use crate::series_core::{GaussianRational, VectorFieldGerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetKind {
    Blowups,
    Truncation,
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetKind::Blowups => "blow-up",
            BudgetKind::Truncation => "truncation",
        })
    }
}

/// A singular point, possibly blown up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionNode {
    /// Chart of the parent blow-up this point lies in; `None` at the root.
    pub chart: Option<ChartLabel>,
    /// Coordinates in that chart.
    pub center: [GaussianRational; 2],
    pub class: SingularityClass,
    pub blowup: Option<BlowupRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupRecord {
    /// 1-based label of the exceptional component, in depth-first order.
    pub divisor: usize,
    pub multiplicity: u32,
    pub dicritical: bool,
    pub unlocated_roots: u32,
    pub children: Vec<ResolutionNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionTree {
    pub root: ResolutionNode,
    pub dicritical_components: Vec<usize>,
    pub blowups: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TreeDecodeError {
    #[error("malformed tree: {0}")]
    Syntax(String),
    #[error("inconsistent tree: {0}")]
    Inconsistent(&'static str),
}

impl ResolutionNode {
    fn walk<'a>(&'a self, out: &mut Vec<&'a ResolutionNode>) {
        out.push(self);
        if let Some(b) = &self.blowup {
            for c in &b.children {
                c.walk(out);
            }
        }
    }

    fn canonical(&self, out: &mut String) {
        out.push_str(self.class.kind.as_str());
        if let Some((p, q)) = self.class.linear_type {
            let _ = write!(out, "({p},{q})");
        }
        if let Some(b) = &self.blowup {
            let _ = write!(out, "[{}{}{}", b.multiplicity, if b.dicritical { "D" } else { "I" }, b.unlocated_roots);
            let mut kids: Vec<String> = b
                .children
                .iter()
                .map(|c| {
                    let mut s = String::new();
                    c.canonical(&mut s);
                    s
                })
                .collect();
            kids.sort();
            for k in kids {
                out.push(':');
                out.push_str(&k);
            }
            out.push(']');
        }
    }

    fn write_text(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let at = match self.chart {
            None => "root".to_string(),
            Some(ChartLabel::Chart1) => "chart1".to_string(),
            Some(ChartLabel::Chart2) => "chart2".to_string(),
        };
        let _ = write!(out, "{pad}{at} ({}, {}): {}", self.center[0], self.center[1], self.class.kind.as_str());
        if let Some((p, q)) = self.class.linear_type {
            let _ = write!(out, " ({p},{q})");
        }
        out.push('\n');
        match &self.blowup {
            Some(b) => {
                let _ = write!(
                    out,
                    "{pad}  E{} multiplicity {} {}",
                    b.divisor,
                    b.multiplicity,
                    if b.dicritical { "dicritical" } else { "invariant" }
                );
                if b.unlocated_roots > 0 {
                    let _ = write!(out, " unlocated {}", b.unlocated_roots);
                }
                out.push('\n');
                for c in &b.children {
                    c.write_text(out, depth + 2);
                }
            }
            None if self.class.kind == SingularityKind::NonReduced => {
                let _ = writeln!(out, "{pad}  unresolved");
            }
            None => {}
        }
    }
}

impl ResolutionTree {
    /// Every node in depth-first order.
    pub fn nodes(&self) -> Vec<&ResolutionNode> {
        let mut out = Vec::new();
        self.root.walk(&mut out);
        out
    }

    pub fn has_dicritical(&self) -> bool {
        !self.dicritical_components.is_empty()
    }

    /// Every non-reduced point was blown up.
    pub fn is_complete(&self) -> bool {
        self.nodes().iter().all(|n| n.blowup.is_some() || n.class.kind.is_terminal())
    }

    /// Isomorphism key: node kinds, linear types and divisor data, with
    /// children sorted and chart labels and centres ignored.
    pub fn canonical_form(&self) -> String {
        let mut s = String::new();
        self.root.canonical(&mut s);
        s
    }

    /// Indented text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let comps: Vec<String> = self.dicritical_components.iter().map(|c| format!("E{c}")).collect();
        let _ = writeln!(out, "blow-ups: {}", self.blowups);
        let _ = writeln!(out, "dicritical components: {}", if comps.is_empty() { "none".into() } else { comps.join(", ") });
        self.root.write_text(&mut out, 0);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trees serialize")
    }

    /// Decodes the structured form and checks its internal consistency.
    pub fn from_json(text: &str) -> Result<Self, TreeDecodeError> {
        let tree: ResolutionTree = serde_json::from_str(text).map_err(|e| TreeDecodeError::Syntax(e.to_string()))?;
        tree.validate()?;
        Ok(tree)
    }

    pub fn validate(&self) -> Result<(), TreeDecodeError> {
        if self.root.chart.is_some() {
            return Err(TreeDecodeError::Inconsistent("root must not carry a chart"));
        }
        let records: Vec<&BlowupRecord> = self.nodes().iter().filter_map(|n| n.blowup.as_ref()).collect();
        if records.len() != self.blowups {
            return Err(TreeDecodeError::Inconsistent("blow-up count"));
        }
        for (i, r) in records.iter().enumerate() {
            if r.divisor != i + 1 {
                return Err(TreeDecodeError::Inconsistent("divisor labels must follow depth-first order"));
            }
            if r.dicritical && !r.children.is_empty() {
                return Err(TreeDecodeError::Inconsistent("dicritical blow-ups have no recorded children"));
            }
        }
        let dicritical: Vec<usize> = records.iter().filter(|r| r.dicritical).map(|r| r.divisor).collect();
        if dicritical != self.dicritical_components {
            return Err(TreeDecodeError::Inconsistent("dicritical component list"));
        }
        for n in self.nodes() {
            if n.blowup.is_some() && n.class.kind != SingularityKind::NonReduced {
                return Err(TreeDecodeError::Inconsistent("only non-reduced points are blown up"));
            }
            if n.class.kind != SingularityKind::NonReduced && n.class.linear_type.is_some() {
                return Err(TreeDecodeError::Inconsistent("linear type on a terminal point"));
            }
            if let Some((p, q)) = n.class.linear_type {
                if p == 0 || q == 0 {
                    return Err(TreeDecodeError::Inconsistent("linear type entries must be positive"));
                }
            }
        }
        Ok(())
    }
}

struct Walker {
    max_blowups: usize,
    count: usize,
    dicritical: Vec<usize>,
    exhausted: Option<BudgetKind>,
    error: Option<ResolutionError>,
}

impl Walker {
    fn expand(&mut self, germ: &PlaneFoliationGerm, chart: Option<ChartLabel>, center: [GaussianRational; 2]) -> ResolutionNode {
        let class = classify_origin(germ);
        let mut node = ResolutionNode { chart, center, class, blowup: None };
        if class.kind != SingularityKind::NonReduced || self.exhausted.is_some() || self.error.is_some() {
            return node;
        }
        if self.count >= self.max_blowups {
            self.exhausted = Some(BudgetKind::Blowups);
            return node;
        }
        let b = match blowup_once(germ) {
            Ok(b) => b,
            Err(ResolutionError::TruncationBudget) => {
                self.exhausted = Some(BudgetKind::Truncation);
                return node;
            }
            Err(e) => {
                self.error = Some(e);
                return node;
            }
        };
        self.count += 1;
        let divisor = self.count;
        if b.dicritical {
            self.dicritical.push(divisor);
        }
        let children = b.singular_points.into_iter().map(|p| self.expand(&p.germ, Some(p.chart), p.center)).collect();
        node.blowup = Some(BlowupRecord {
            divisor,
            multiplicity: b.multiplicity,
            dicritical: b.dicritical,
            unlocated_roots: b.unlocated_roots,
            children,
        });
        node
    }
}

fn origin() -> [GaussianRational; 2] {
    [GaussianRational::from_int(0), GaussianRational::from_int(0)]
}

/// Blows up every non-reduced point, depth-first with chart 1 first. On a
/// budget failure the partial tree is returned inside the error.
pub fn resolve(g: &PlaneFoliationGerm, max_blowups: usize) -> Result<ResolutionTree, ResolutionError> {
    if !g.is_singular_at_origin() {
        return Err(ResolutionError::NotSingular);
    }
    let root_class = classify_origin(g);
    if let Some((p, q)) = root_class.linear_type {
        let needed = euclid_length(p, q) as u64 + 2;
        if (g.order() as u64) < needed {
            let partial = ResolutionTree {
                root: ResolutionNode { chart: None, center: origin(), class: root_class, blowup: None },
                dicritical_components: Vec::new(),
                blowups: 0,
            };
            return Err(ResolutionError::Budget { kind: BudgetKind::Truncation, blowups: 0, partial: Box::new(partial) });
        }
    }
    let mut w = Walker { max_blowups, count: 0, dicritical: Vec::new(), exhausted: None, error: None };
    let root = w.expand(g, None, origin());
    if let Some(e) = w.error {
        return Err(e);
    }
    let tree = ResolutionTree { root, dicritical_components: w.dicritical, blowups: w.count };
    match w.exhausted {
        Some(kind) => Err(ResolutionError::Budget { kind, blowups: tree.blowups, partial: Box::new(tree) }),
        None => Ok(tree),
    }
}

/// Number of blow-ups predicted for `m x dy − n y dx`: subtractive Euclid
/// steps from `(m, n)` to equality, plus one.
pub fn euclid_length(m: u64, n: u64) -> usize {
    let (mut a, mut b) = (m, n);
    let mut steps = 1;
    while a != b {
        if a > b {
            a -= b;
        } else {
            b -= a;
        }
        steps += 1;
    }
    steps
}

/// The linear chain expected from resolving `m x dy − n y dx`.
pub fn euclid_skeleton(m: u64, n: u64) -> ResolutionTree {
    assert!(m >= 1 && n >= 1, "m and n must be positive");
    let g = num_integer::gcd(m, n);
    let mut count = 0;
    let root = skeleton_node(m / g, n / g, None, &mut count);
    ResolutionTree { root, dicritical_components: vec![count], blowups: count }
}

fn skeleton_node(p: u64, q: u64, chart: Option<ChartLabel>, count: &mut usize) -> ResolutionNode {
    *count += 1;
    let divisor = *count;
    let class = SingularityClass::non_reduced(p, q);
    let reduced = |chart| ResolutionNode { chart: Some(chart), center: origin(), class: SingularityClass::REDUCED, blowup: None };
    let children = if p == q {
        Vec::new()
    } else if p > q {
        vec![reduced(ChartLabel::Chart1), skeleton_node(p - q, q, Some(ChartLabel::Chart2), count)]
    } else {
        vec![skeleton_node(p, q - p, Some(ChartLabel::Chart1), count), reduced(ChartLabel::Chart2)]
    };
    ResolutionNode {
        chart,
        center: origin(),
        class,
        blowup: Some(BlowupRecord { divisor, multiplicity: 1, dicritical: p == q, unlocated_roots: 0, children }),
    }
}

pub fn compare_trees(a: &ResolutionTree, b: &ResolutionTree) -> bool {
    a.canonical_form() == b.canonical_form()
}

/// Resolves `ω_{z₀}` for every candidate, in candidate order.
pub fn scan_parameters(
    x: &VectorFieldGerm,
    candidates: &[GaussianRational],
    max_blowups: usize,
) -> Vec<(GaussianRational, Result<ResolutionTree, ResolutionError>)> {
    candidates
        .par_iter()
        .map(|z0| (z0.clone(), family_restriction(x, z0).and_then(|g| resolve(&g, max_blowups))))
        .collect()
}

/// The candidates whose slice foliation resolves with a dicritical component.
pub fn dicritical_parameter_search(
    x: &VectorFieldGerm,
    candidates: &[GaussianRational],
    max_blowups: usize,
) -> Vec<(GaussianRational, ResolutionTree)> {
    scan_parameters(x, candidates, max_blowups)
        .into_iter()
        .filter_map(|(z0, r)| r.ok().filter(|t| t.has_dicritical()).map(|t| (z0, t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series_core::text::parse_series;
    use crate::series_core::{TruncatedSeries2, TruncatedSeries3};

    #[test]
    fn euclid_lengths() {
        assert_eq!(euclid_length(1, 1), 1);
        assert_eq!(euclid_length(3, 2), 3);
        assert_eq!(euclid_length(7, 4), 5);
        assert_eq!(euclid_length(5, 3), 4);
        assert_eq!(euclid_skeleton(7, 4).blowups, 5);
        assert_eq!(euclid_skeleton(4, 2).blowups, 2);
    }

    #[test]
    fn resolves_linear_chain() {
        let t = resolve(&PlaneFoliationGerm::omega_mn(1, 1, 4), 10).unwrap();
        assert_eq!(t.blowups, 1);
        assert_eq!(t.dicritical_components, vec![1]);
        let t = resolve(&PlaneFoliationGerm::omega_mn(2, 1, 5), 10).unwrap();
        assert_eq!(t.blowups, 2);
        assert!(compare_trees(&t, &euclid_skeleton(2, 1)));
        assert!(t.is_complete());
        let t53 = resolve(&PlaneFoliationGerm::omega_mn(5, 3, 8), 10).unwrap();
        assert_eq!(t53.blowups, 4);
        assert!(compare_trees(&t53, &euclid_skeleton(5, 3)));
        let t31 = resolve(&PlaneFoliationGerm::omega_mn(3, 1, 6), 10).unwrap();
        assert!(!compare_trees(&t, &t31));
    }

    #[test]
    fn every_chain_up_to_seven() {
        for m in 1..=7 {
            for n in 1..=7 {
                let order = euclid_length(m, n) as u32 + 2;
                let t = resolve(&PlaneFoliationGerm::omega_mn(m as i64, n as i64, order), 20).unwrap();
                assert!(compare_trees(&t, &euclid_skeleton(m, n)), "({m},{n})");
                assert_eq!(t.dicritical_components.len(), 1);
            }
        }
    }

    #[test]
    fn perturbed_form_resolves_like_omega() {
        let pert = |s: &str| parse_series::<2>(s, 6).unwrap();
        let g = PlaneFoliationGerm::perturbed_form(
            3,
            2,
            [pert("1/2 + x*y"), pert("-y^2 + 3*x"), pert("2 - x^3"), pert("i*y")],
            8,
        )
        .unwrap();
        let t = resolve(&g, 10).unwrap();
        assert!(compare_trees(&t, &euclid_skeleton(3, 2)));
    }

    #[test]
    fn budget_errors_carry_partial_tree() {
        match resolve(&PlaneFoliationGerm::omega_mn(7, 4, 20), 2) {
            Err(ResolutionError::Budget { kind: BudgetKind::Blowups, blowups: 2, partial }) => {
                assert!(!partial.is_complete());
                assert!(partial.validate().is_ok());
            }
            other => panic!("unexpected {other:?}"),
        }
        match resolve(&PlaneFoliationGerm::omega_mn(7, 4, 5), 20) {
            Err(ResolutionError::Budget { kind: BudgetKind::Truncation, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(resolve(&PlaneFoliationGerm::new(TruncatedSeries2::one(3), TruncatedSeries2::zero(3)).unwrap(), 3), Err(ResolutionError::NotSingular));
    }

    #[test]
    fn text_and_json_forms() {
        let t = resolve(&PlaneFoliationGerm::omega_mn(2, 1, 5), 10).unwrap();
        let text = t.to_text();
        assert_eq!(
            text,
            "blow-ups: 2\ndicritical components: E2\nroot (0, 0): non_reduced (2,1)\n  E1 multiplicity 1 invariant\n    chart1 (0, 0): reduced\n    chart2 (0, 0): non_reduced (1,1)\n      E2 multiplicity 1 dicritical\n"
        );
        let back = ResolutionTree::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let mut bad = t.clone();
        bad.dicritical_components.clear();
        assert!(ResolutionTree::from_json(&bad.to_json()).is_err());
        assert!(ResolutionTree::from_json("{").is_err());
    }

    #[test]
    fn parameter_search() {
        let order = 6;
        let x = VectorFieldGerm::linear_int([1, 1, -1], order).unwrap();
        let cands = [GaussianRational::from_ratio(1, 2), GaussianRational::from_ratio(1, 4)];
        assert_eq!(dicritical_parameter_search(&x, &cands, 12).len(), 2);

        // a₁ = z: the slice ratio is 1 + z₀, dicritical exactly for positive rational ratios.
        let a1 = TruncatedSeries3::var(2, order);
        let x = VectorFieldGerm::new([1, 1, -1].map(GaussianRational::from_int), [a1, TruncatedSeries3::zero(order), TruncatedSeries3::zero(order)]).unwrap();
        let cands = [
            GaussianRational::from_int(0),
            GaussianRational::from_ratio(1, 2),
            GaussianRational::from_ratio(-1, 2),
            GaussianRational::i(),
            GaussianRational::from_int(-2),
        ];
        let found: Vec<GaussianRational> = dicritical_parameter_search(&x, &cands, 12).into_iter().map(|(z, _)| z).collect();
        assert_eq!(found, cands[..3].to_vec());
        assert!(dicritical_parameter_search(&x, &[], 12).is_empty());
    }
}
