//! Degeneration trees: each node is a count, its children the weighted
//! terms it was computed from.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::engine::{Engine, EngineError, Expansion, Factor, Product, Rule};
use crate::fibration::dim_z;
use crate::problem::Problem;
use crate::Count;

/// How a node's count is obtained from its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Leaf,
    /// `count = sum weight * child.count`
    Sum,
    /// `count = weight * prod child.count`, the weight stored on the node
    Product,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceNode {
    pub problem: String,
    pub dim: i64,
    /// Exact value; integral except on product nodes carrying `1/d(0)!`.
    pub count: BigRational,
    pub rule: Rule,
    pub combine: Combine,
    pub coeff: BigRational,
    pub children: Vec<(BigRational, TraceNode)>,
    /// Set when the depth limit cut off the expansion below this node.
    pub truncated: bool,
}

impl TraceNode {
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|(_, c)| c.node_count()).sum::<usize>()
    }

    /// The value implied by the children, `None` on leaves and truncated nodes.
    pub fn recombined(&self) -> Option<BigRational> {
        if self.truncated {
            return None;
        }
        match self.combine {
            Combine::Leaf => None,
            Combine::Sum => Some(
                self.children
                    .iter()
                    .fold(BigRational::zero(), |acc, (w, c)| acc + w * &c.count),
            ),
            Combine::Product => Some(
                self.children
                    .iter()
                    .fold(self.coeff.clone(), |acc, (w, c)| acc * w * &c.count),
            ),
        }
    }

    /// First node (pre-order) whose count differs from its recombined value.
    pub fn identity_violation(&self) -> Option<&TraceNode> {
        if let Some(v) = self.recombined() {
            if v != self.count {
                return Some(self);
            }
        }
        self.children.iter().find_map(|(_, c)| c.identity_violation())
    }

    /// Leaves in pre-order.
    pub fn leaves(&self) -> Vec<&TraceNode> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children.iter().flat_map(|(_, c)| c.leaves()).collect()
    }
}

fn ratio_text(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Engine {
    /// Expand `p` down to `max_depth` levels of counts (unbounded on `None`).
    pub fn trace(&self, p: &Problem, max_depth: Option<usize>) -> Result<TraceNode, EngineError> {
        Engine::check(p)?;
        self.trace_factor(&Factor::problem(p.clone()), max_depth)
    }

    fn trace_factor(&self, f: &Factor, depth: Option<usize>) -> Result<TraceNode, EngineError> {
        let count = BigRational::from_integer(self.factor_value(f)?);
        let (problem, dim) = match f {
            Factor::X(p) | Factor::W(p) => (p.to_string(), p.dim()),
            Factor::Z(z) => (z.to_string(), dim_z(z)),
        };
        let mut node = TraceNode {
            problem,
            dim,
            count,
            rule: Rule::ZEvaluation,
            combine: Combine::Leaf,
            coeff: BigRational::one(),
            children: Vec::new(),
            truncated: false,
        };
        let p = match f {
            Factor::Z(_) => return Ok(node),
            Factor::X(p) | Factor::W(p) => p,
        };
        let exp = self.expand(p)?;
        match exp {
            Expansion::Leaf { rule, .. } => node.rule = rule,
            Expansion::Sum { rule, terms, .. } => {
                node.rule = rule;
                node.combine = Combine::Sum;
                if depth == Some(0) {
                    node.truncated = true;
                    return Ok(node);
                }
                let next = depth.map(|k| k - 1);
                for t in &terms {
                    for prod in &t.products {
                        if rule == Rule::DivisorAxiom {
                            // a single factor: no product node in between
                            let child = self.trace_factor(&prod.factors[0], next)?;
                            node.children.push((&t.weight * &prod.coeff, child));
                        } else {
                            let child = self.trace_product(t.rule, prod, next)?;
                            node.children.push((t.weight.clone(), child));
                        }
                    }
                }
            }
        }
        Ok(node)
    }

    fn trace_product(&self, rule: Rule, prod: &Product, depth: Option<usize>) -> Result<TraceNode, EngineError> {
        let mut node = TraceNode {
            problem: prod.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" * "),
            dim: 0,
            count: self.product_value(prod)?,
            rule,
            combine: Combine::Product,
            coeff: prod.coeff.clone(),
            children: Vec::new(),
            truncated: false,
        };
        if depth == Some(0) {
            node.truncated = true;
            return Ok(node);
        }
        let next = depth.map(|k| k - 1);
        for f in &prod.factors {
            node.children.push((BigRational::one(), self.trace_factor(f, next)?));
        }
        Ok(node)
    }
}

pub fn to_json(node: &TraceNode) -> Value {
    let children: Vec<Value> = node
        .children
        .iter()
        .map(|(w, c)| json!({ "weight": ratio_text(w), "node": to_json(c) }))
        .collect();
    let mut v = json!({
        "problem": node.problem,
        "dim": node.dim,
        "count": ratio_text(&node.count),
        "rule": node.rule.name(),
        "children": children,
    });
    if node.combine == Combine::Product {
        v["coeff"] = json!(ratio_text(&node.coeff));
    }
    if node.truncated {
        v["truncated"] = json!(true);
    }
    v
}

pub fn render_json(node: &TraceNode) -> String {
    serde_json::to_string_pretty(&to_json(node)).expect("json values always serialize")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn render_dot(node: &TraceNode) -> String {
    let mut out = String::from("digraph trace {\n  node [shape=box, fontname=\"monospace\"];\n");
    let mut next = 0usize;
    dot_node(node, &mut next, &mut out);
    out.push_str("}\n");
    out
}

fn dot_node(node: &TraceNode, next: &mut usize, out: &mut String) -> usize {
    let id = *next;
    *next += 1;
    let mut label = format!("{}\\n{} = {}", dot_escape(&node.problem), node.rule, ratio_text(&node.count));
    if node.combine == Combine::Product && !node.coeff.is_one() {
        let _ = write!(label, "\\ncoeff {}", ratio_text(&node.coeff));
    }
    if node.truncated {
        label.push_str("\\n(truncated)");
    }
    let _ = writeln!(out, "  n{id} [label=\"{label}\"];");
    for (w, c) in &node.children {
        let cid = dot_node(c, next, out);
        let _ = writeln!(out, "  n{id} -> n{cid} [label=\"{}\"];", ratio_text(w));
    }
    id
}

/// Indented text rendering, one node per line.
pub fn render_text(node: &TraceNode) -> String {
    let mut out = String::new();
    text_node(node, None, 0, &mut out);
    out
}

fn text_node(node: &TraceNode, weight: Option<&BigRational>, depth: usize, out: &mut String) {
    let w = weight.map(|w| format!("{} x ", ratio_text(w))).unwrap_or_default();
    let _ = writeln!(
        out,
        "{:indent$}{w}[{}] {} = {}{}",
        "",
        node.rule,
        node.problem,
        ratio_text(&node.count),
        if node.truncated { " ..." } else { "" },
        indent = 2 * depth
    );
    for (cw, c) in &node.children {
        text_node(c, Some(cw), depth + 1, out);
    }
}

/// Integer count at the root.
pub fn root_count(node: &TraceNode) -> Option<Count> {
    node.count.is_integer().then(|| node.count.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p(text: &str) -> Problem {
        text.parse().unwrap()
    }

    #[test]
    fn four_lines_has_two_limit_types() {
        let e = Engine::default();
        let t = e.trace(&p("g=0 n=3 d=1 h=1,2:1 i=1:4"), None).unwrap();
        assert_eq!(root_count(&t), Some(BigInt::from(2)));
        assert_eq!(t.rule, Rule::Degeneration);
        let rules: Vec<Rule> = t.children.iter().map(|(_, c)| c.rule).collect();
        assert_eq!(rules, vec![Rule::TypeI, Rule::TypeIIPlain]);
        assert!(t.identity_violation().is_none());
    }

    #[test]
    fn identities_hold_on_conics_and_cubics() {
        let e = Engine::default();
        for text in ["g=0 n=3 d=2 h=1,2:2 i=1:8", "g=1 n=3 d=3 h=1,2:3 i=1:12", "g=1 n=2 d=3 h=1,1:3 i=0:9"] {
            let t = e.trace(&p(text), None).unwrap();
            assert!(t.identity_violation().is_none(), "{text}");
        }
    }

    #[test]
    fn depth_limit_marks_truncation() {
        let e = Engine::default();
        let t = e.trace(&p("g=0 n=3 d=2 h=1,2:2 i=1:8"), Some(1)).unwrap();
        assert!(t.children.iter().all(|(_, c)| c.truncated));
        assert!(t.identity_violation().is_none());
        assert_eq!(root_count(&t), Some(BigInt::from(184)));
    }

    #[test]
    fn renderings() {
        let e = Engine::default();
        let t = e.trace(&p("g=0 n=3 d=1 h=1,2:1 i=1:4"), None).unwrap();
        let v: Value = serde_json::from_str(&render_json(&t)).unwrap();
        assert_eq!(v["count"], "2");
        assert_eq!(v["rule"], "degeneration");
        assert_eq!(v["children"].as_array().unwrap().len(), 2);
        let dot = render_dot(&t);
        assert!(dot.starts_with("digraph trace {"));
        assert_eq!(dot.matches(" -> ").count(), t.node_count() - 1);
        assert!(render_text(&t).lines().count() == t.node_count());
    }
}
