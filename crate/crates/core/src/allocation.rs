//! Hypergraphs, allocation lists and performance functionals.
//!
//! An allocation assigns a nonnegative resource value to every hyperedge. The
//! performance of an allocation is a sum of per-edge monotone functions; the
//! two standard choices are the logarithm (proportional fairness) and a
//! prior-weighted identity (reliability under independent device failures).

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Vertex labels plus a list of hyperedges over them.
///
/// Edges are sets: [`Hypergraph::new`] sorts each edge by vertex position and
/// drops repeated members, so an edge's identity is its sorted vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<String>>,
}

impl Hypergraph {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[Vec<S>]) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let position: BTreeMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut normalized = Vec::with_capacity(edges.len());
        for edge in edges {
            let mut idx = Vec::with_capacity(edge.len());
            for v in edge {
                let v = v.as_ref();
                let i = *position
                    .get(v)
                    .ok_or_else(|| Error::InvalidEdge(format!("unknown vertex {v:?}")))?;
                idx.push(i);
            }
            idx.sort_unstable();
            idx.dedup();
            normalized.push(idx.into_iter().map(|i| vertices[i].clone()).collect::<Vec<_>>());
        }
        let h = Hypergraph {
            vertices,
            edges: normalized,
        };
        if !validate_hypergraph(&h) {
            return Err(Error::InvalidEdge("hypergraph fails validation".into()));
        }
        Ok(h)
    }

    /// Vertices {a,b,c,d}; edges {a,b,c,d} and {a,b,c}.
    pub fn h1() -> Self {
        Self::new(&["a", "b", "c", "d"], &[vec!["a", "b", "c", "d"], vec!["a", "b", "c"]]).expect("h1")
    }

    /// Vertices {a,b}; edges {a,b}, {a} and {b}.
    pub fn h2() -> Self {
        Self::new(&["a", "b"], &[vec!["a", "b"], vec!["a"], vec!["b"]]).expect("h2")
    }

    /// Vertices {a,b}; edges {a,b} and {b}.
    pub fn h3() -> Self {
        Self::new(&["a", "b"], &[vec!["a", "b"], vec!["b"]]).expect("h3")
    }

    /// Site indices (positions in `vertices`) of every edge.
    pub fn edge_indices(&self) -> Vec<Vec<usize>> {
        self.edges
            .iter()
            .map(|e| {
                e.iter()
                    .filter_map(|v| self.vertices.iter().position(|w| w == v))
                    .collect()
            })
            .collect()
    }
}

/// True iff every edge is a non-empty subset of the (distinct) vertices, no
/// edge repeats, and there is at least one edge.
pub fn validate_hypergraph(h: &Hypergraph) -> bool {
    let vertices: HashSet<&str> = h.vertices.iter().map(String::as_str).collect();
    if vertices.len() != h.vertices.len() || h.edges.is_empty() {
        return false;
    }
    let mut seen = HashSet::new();
    for edge in &h.edges {
        if edge.is_empty() || !edge.iter().all(|v| vertices.contains(v.as_str())) {
            return false;
        }
        let mut key: Vec<&str> = edge.iter().map(String::as_str).collect();
        key.sort_unstable();
        key.dedup();
        if !seen.insert(key) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationEntry {
    pub edge: Vec<String>,
    pub value: f64,
}

/// Resource value per hyperedge, in hypergraph edge order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationList {
    pub entries: Vec<AllocationEntry>,
}

impl AllocationList {
    pub fn new(entries: Vec<AllocationEntry>) -> Result<Self> {
        for e in &entries {
            if !e.value.is_finite() || e.value < 0.0 {
                return Err(Error::Domain(format!("allocation value {} on {:?}", e.value, e.edge)));
            }
        }
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(sorted(&e.edge)) {
                return Err(Error::InvalidEdge(format!("edge {:?} listed twice", e.edge)));
            }
        }
        Ok(Self { entries })
    }

    /// One value per edge of `h`, in edge order.
    pub fn from_values(h: &Hypergraph, values: &[f64]) -> Result<Self> {
        if values.len() != h.edges.len() {
            return Err(Error::Shape(format!(
                "{} values for {} edges",
                values.len(),
                h.edges.len()
            )));
        }
        Self::new(
            h.edges
                .iter()
                .zip(values)
                .map(|(e, &value)| AllocationEntry {
                    edge: e.clone(),
                    value,
                })
                .collect(),
        )
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn get(&self, edge: &[String]) -> Option<f64> {
        let key = sorted(edge);
        self.entries.iter().find(|e| sorted(&e.edge) == key).map(|e| e.value)
    }
}

fn sorted(edge: &[String]) -> Vec<String> {
    let mut k = edge.to_vec();
    k.sort();
    k.dedup();
    k
}

/// Independent per-vertex success probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Priors {
    pub probabilities: BTreeMap<String, f64>,
}

impl Priors {
    pub fn new(probabilities: BTreeMap<String, f64>) -> Result<Self> {
        for (v, &p) in &probabilities {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidPriors(format!("p[{v}] = {p} outside [0,1]")));
            }
        }
        Ok(Self { probabilities })
    }

    /// The same probability for every vertex of `h`.
    pub fn uniform(h: &Hypergraph, p: f64) -> Result<Self> {
        Self::new(h.vertices.iter().map(|v| (v.clone(), p)).collect())
    }
}

/// Probability that exactly the parties in `edge` work: `∏_{v∈α} p_v ∏_{v∉α} (1 − p_v)`.
pub fn edge_prior(priors: &Priors, edge: &[String], vertices: &[String]) -> Result<f64> {
    for v in edge {
        if !vertices.contains(v) {
            return Err(Error::InvalidEdge(format!("edge vertex {v:?} not among vertices")));
        }
    }
    let mut pi = 1.0;
    for v in vertices {
        let p = *priors
            .probabilities
            .get(v)
            .ok_or_else(|| Error::InvalidPriors(format!("no probability for vertex {v:?}")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPriors(format!("p[{v}] = {p} outside [0,1]")));
        }
        pi *= if edge.contains(v) { p } else { 1.0 - p };
    }
    Ok(pi)
}

/// `Σ_α ln M(σ_α)`. Any nonpositive value is a domain error.
pub fn performance_fairness(alloc: &AllocationList) -> Result<f64> {
    let mut total = 0.0;
    for e in &alloc.entries {
        if e.value <= 0.0 {
            return Err(Error::Domain(format!(
                "edge {:?} has no resource (value {}); log undefined",
                e.edge, e.value
            )));
        }
        total += e.value.ln();
    }
    Ok(total)
}

/// `Σ_α π_α M(σ_α)` with the priors of [`edge_prior`]. Every edge of `h` must be allocated.
pub fn performance_reliability(h: &Hypergraph, alloc: &AllocationList, priors: &Priors) -> Result<f64> {
    let mut total = 0.0;
    for edge in &h.edges {
        let value = alloc
            .get(edge)
            .ok_or_else(|| Error::InvalidEdge(format!("no allocation for edge {edge:?}")))?;
        total += edge_prior(priors, edge, &h.vertices)? * value;
    }
    Ok(total)
}

/// `Σ_α Φ_α(M(σ_α))` with one monotone function per allocation entry.
pub fn performance_generic(alloc: &AllocationList, per_edge: &[&dyn Fn(f64) -> f64]) -> Result<f64> {
    if per_edge.len() != alloc.entries.len() {
        return Err(Error::Shape(format!(
            "{} functions for {} edges",
            per_edge.len(),
            alloc.entries.len()
        )));
    }
    Ok(alloc.entries.iter().zip(per_edge).map(|(e, f)| f(e.value)).sum())
}

/// Aggregate proportional change `Σ_α (M(σ_α) − M(σ*_α)) / M(σ_α)`.
///
/// A nonpositive result certifies `alloc_star` is proportionally fair with
/// respect to `alloc`.
pub fn fairness_dominance(alloc_star: &AllocationList, alloc: &AllocationList) -> Result<f64> {
    if alloc_star.entries.len() != alloc.entries.len() {
        return Err(Error::Shape("allocations cover different edge sets".into()));
    }
    let mut total = 0.0;
    for e in &alloc.entries {
        let star = alloc_star
            .get(&e.edge)
            .ok_or_else(|| Error::Shape(format!("edge {:?} missing from reference allocation", e.edge)))?;
        if e.value == 0.0 {
            return Err(Error::Domain(format!("zero allocation on {:?}", e.edge)));
        }
        total += (e.value - star) / e.value;
    }
    Ok(total)
}

/// Optimal per-edge value for an edge of `size` qudits of dimension `d`:
/// `(d^{size/2} − 1)/(d^{size/2} + 1)`.
pub fn optimal_edge_value(d: usize, size: usize) -> f64 {
    let root = (d as f64).powf(size as f64 / 2.0);
    (root - 1.0) / (root + 1.0)
}

/// Allocation of the product unbiased-basis measurement on qudits of dimension `d`.
pub fn theorem1_allocation(h: &Hypergraph, d: usize) -> Result<AllocationList> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("qudit dimension must be >= 2, got {d}")));
    }
    AllocationList::new(
        h.edges
            .iter()
            .map(|e| AllocationEntry {
                edge: e.clone(),
                value: optimal_edge_value(d, e.len()),
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn hypergraph_validation() {
        assert!(validate_hypergraph(&Hypergraph::h2()));
        let bad = Hypergraph {
            vertices: s(&["a", "b"]),
            edges: vec![s(&["a", "z"])],
        };
        assert!(!validate_hypergraph(&bad));
        let empty = Hypergraph {
            vertices: s(&["a", "b"]),
            edges: vec![],
        };
        assert!(!validate_hypergraph(&empty));
        let dup = Hypergraph {
            vertices: s(&["a", "b"]),
            edges: vec![s(&["a", "b"]), s(&["b", "a"])],
        };
        assert!(!validate_hypergraph(&dup));
        let empty_edge = Hypergraph {
            vertices: s(&["a"]),
            edges: vec![vec![]],
        };
        assert!(!validate_hypergraph(&empty_edge));
        assert!(Hypergraph::new(&["a", "b"], &[vec!["b", "a"]]).unwrap().edges == vec![s(&["a", "b"])]);
        assert!(matches!(
            Hypergraph::new(&["a"], &[vec!["q"]]),
            Err(Error::InvalidEdge(_))
        ));
    }

    #[test]
    fn edge_prior_values() {
        let h = Hypergraph::h2();
        let p = Priors::uniform(&h, 0.9).unwrap();
        assert!((edge_prior(&p, &s(&["a", "b"]), &h.vertices).unwrap() - 0.81).abs() < 1e-12);
        assert!((edge_prior(&p, &s(&["a"]), &h.vertices).unwrap() - 0.09).abs() < 1e-12);
        let one = Priors::uniform(&h, 1.0).unwrap();
        assert_eq!(edge_prior(&one, &s(&["a", "b"]), &h.vertices).unwrap(), 1.0);

        let partial = Priors::new([("a".to_string(), 0.5)].into_iter().collect()).unwrap();
        assert!(matches!(
            edge_prior(&partial, &s(&["a"]), &h.vertices),
            Err(Error::InvalidPriors(_))
        ));
        assert!(matches!(
            Priors::new([("a".to_string(), 1.5)].into_iter().collect()),
            Err(Error::InvalidPriors(_))
        ));
    }

    #[test]
    fn fairness_values() {
        let h = Hypergraph::h2();
        let ones = AllocationList::from_values(&h, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(performance_fairness(&ones).unwrap(), 0.0);

        let h3 = Hypergraph::h3();
        let cancel = AllocationList::from_values(&h3, &[0.5, 2.0]).unwrap();
        assert!(performance_fairness(&cancel).unwrap().abs() < 1e-15);

        let zero = AllocationList::from_values(&h3, &[0.0, 2.0]).unwrap();
        assert!(matches!(performance_fairness(&zero), Err(Error::Domain(_))));

        let a = theorem1_allocation(&Hypergraph::h1(), 2).unwrap();
        let r = 2f64.powf(1.5);
        let expect = (3.0f64 / 5.0).ln() + ((r - 1.0) / (r + 1.0)).ln();
        assert!((performance_fairness(&a).unwrap() - expect).abs() < 1e-12);
        // the formula gives -1.249824; the commonly quoted -1.2497 is a rounding slip
        assert!((expect - (-1.249824)).abs() < 1e-6);
    }

    #[test]
    fn reliability_values() {
        let h = Hypergraph::h2();
        let p = Priors::uniform(&h, 0.9).unwrap();
        let a = theorem1_allocation(&h, 2).unwrap();
        let r2 = 2f64.sqrt();
        let expect = 0.81 / 3.0 + 0.18 * (r2 - 1.0) / (r2 + 1.0);
        assert!((performance_reliability(&h, &a, &p).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.30088).abs() < 5e-6);

        let zero = Priors::uniform(&h, 0.0).unwrap();
        assert_eq!(performance_reliability(&h, &a, &zero).unwrap(), 0.0);

        let single = Hypergraph::new(&["a"], &[vec!["a"]]).unwrap();
        let v = AllocationList::from_values(&single, &[0.37]).unwrap();
        let sure = Priors::uniform(&single, 1.0).unwrap();
        assert_eq!(performance_reliability(&single, &v, &sure).unwrap(), 0.37);

        let partial = AllocationList::from_values(&Hypergraph::h3(), &[0.1, 0.2]).unwrap();
        assert!(performance_reliability(&h, &partial, &p).is_err());
    }

    #[test]
    fn generic_reduces_to_named_functionals() {
        let h = Hypergraph::h2();
        let p = Priors::uniform(&h, 0.7).unwrap();
        let a = theorem1_allocation(&h, 3).unwrap();
        let id = |x: f64| x;
        let fns: Vec<&dyn Fn(f64) -> f64> = vec![&id, &id, &id];
        assert!((performance_generic(&a, &fns).unwrap() - a.values().iter().sum::<f64>()).abs() < 1e-15);

        let ln = |x: f64| x.ln();
        let fns: Vec<&dyn Fn(f64) -> f64> = vec![&ln, &ln, &ln];
        assert_eq!(performance_generic(&a, &fns).unwrap(), performance_fairness(&a).unwrap());

        let pis: Vec<f64> = h.edges.iter().map(|e| edge_prior(&p, e, &h.vertices).unwrap()).collect();
        let closures: Vec<Box<dyn Fn(f64) -> f64>> = pis.iter().map(|&pi| Box::new(move |x| pi * x) as Box<dyn Fn(f64) -> f64>).collect();
        let fns: Vec<&dyn Fn(f64) -> f64> = closures.iter().map(|b| b.as_ref()).collect();
        assert!(
            (performance_generic(&a, &fns).unwrap() - performance_reliability(&h, &a, &p).unwrap()).abs() < 1e-15
        );
        assert!(performance_generic(&a, &fns[..2]).is_err());
    }

    #[test]
    fn dominance_cases() {
        let h = Hypergraph::h2();
        let a = AllocationList::from_values(&h, &[0.3, 0.2, 0.1]).unwrap();
        assert_eq!(fairness_dominance(&a, &a).unwrap(), 0.0);
        let better = AllocationList::from_values(&h, &[0.3, 0.25, 0.1]).unwrap();
        assert!(fairness_dominance(&better, &a).unwrap() < 0.0);
        let zero = AllocationList::from_values(&h, &[0.3, 0.0, 0.1]).unwrap();
        assert!(matches!(fairness_dominance(&a, &zero), Err(Error::Domain(_))));
    }

    #[test]
    fn theorem1_values() {
        let a = theorem1_allocation(&Hypergraph::h2(), 2).unwrap();
        let v = a.values();
        assert!((v[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((v[1] - 0.171573).abs() < 1e-6);
        assert_eq!(v[1], v[2]);

        let a = theorem1_allocation(&Hypergraph::h1(), 2).unwrap();
        assert!((a.values()[0] - 0.6).abs() < 1e-15);
        let r = 2f64.powf(1.5);
        assert!((a.values()[1] - (r - 1.0) / (r + 1.0)).abs() < 1e-15);

        assert!(matches!(theorem1_allocation(&Hypergraph::h2(), 1), Err(Error::InvalidDimension(_))));

        let mut prev = 0.0;
        for d in 2..=64 {
            let v = optimal_edge_value(d, 1);
            assert!(v > prev && v < 1.0);
            prev = v;
        }
        assert!(optimal_edge_value(1 << 20, 1) > 0.998);
    }
}
