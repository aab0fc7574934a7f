//! Multigraphs with circles and k-fragments with labeled open ends.
//!
//! A fragment is a multigraph plus `k` labeled degree-one open ends; the edge
//! at an open end is a half edge. Open ends are typed nodes, not ordinary
//! vertices, so "the vertices of a fragment" never accidentally include them.
//! The three combinatorial operations are gluing (fuse equally labeled half
//! edges of two k-fragments into a graph), product (disjoint union with label
//! shift) and contraction (fuse the half edges at two chosen labels).
//!
//! No isomorphism canonicalization is performed anywhere: duplicate encodings
//! of isomorphic objects are harmless for rank computations and are deduped
//! downstream by exact tensor equality.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Undirected multigraph: vertices `0..num_vertices`, a multiset of edges
/// (loops allowed), and a number of circles (edges with no endpoints).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    circles: usize,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>, circles: usize) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= num_vertices || b >= num_vertices {
                return Err(Error::pre(format!(
                    "edge ({a},{b}) references a vertex outside 0..{num_vertices}"
                )));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        Ok(Graph {
            num_vertices,
            edges: norm,
            circles,
        })
    }

    pub fn empty() -> Self {
        Graph {
            num_vertices: 0,
            edges: Vec::new(),
            circles: 0,
        }
    }

    pub fn circles_only(count: usize) -> Self {
        Graph {
            num_vertices: 0,
            edges: Vec::new(),
            circles: count,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn circles(&self) -> usize {
        self.circles
    }

    pub fn with_circles(mut self, circles: usize) -> Self {
        self.circles = circles;
        self
    }

    /// Degree of a vertex; a loop contributes 2.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.num_vertices;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(a, b)| (a + shift, b + shift)));
        Graph::new(
            self.num_vertices + other.num_vertices,
            edges,
            self.circles + other.circles,
        )
        .expect("shifted edges stay in range")
    }

    pub fn parse(text: &str) -> Result<Graph> {
        let f = Fragment::parse(text)?;
        if f.arity() != 0 {
            return Err(Error::pre(
                "expected a graph, found a fragment with open ends",
            ));
        }
        Ok(f.into_graph())
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            FragmentBody {
                graph: self,
                attachments: &[],
                header: "graph"
            }
        )
    }
}

/// Where the half edge of an open end lands: on an internal vertex, or on
/// another open end (the two half edges then form one edge).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attachment {
    Vertex(usize),
    /// 1-based label of the partner open end.
    Pair(usize),
}

/// A multigraph with `k` labeled open ends, each of degree exactly one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fragment {
    graph: Graph,
    attachments: Vec<Attachment>,
}

impl Fragment {
    pub fn new(graph: Graph, attachments: Vec<Attachment>) -> Result<Self> {
        let k = attachments.len();
        for (idx, att) in attachments.iter().enumerate() {
            let label = idx + 1;
            match *att {
                Attachment::Vertex(v) => {
                    if v >= graph.num_vertices() {
                        return Err(Error::pre(format!(
                            "open end {label} attaches to missing vertex {v}"
                        )));
                    }
                }
                Attachment::Pair(m) => {
                    if m == 0 || m > k || m == label {
                        return Err(Error::pre(format!(
                            "open end {label} pairs with invalid label {m}"
                        )));
                    }
                    if attachments[m - 1] != Attachment::Pair(label) {
                        return Err(Error::pre(format!(
                            "open ends {label} and {m} do not pair mutually"
                        )));
                    }
                }
            }
        }
        Ok(Fragment { graph, attachments })
    }

    pub fn from_graph(graph: Graph) -> Self {
        Fragment {
            graph,
            attachments: Vec::new(),
        }
    }

    pub fn into_graph(self) -> Graph {
        debug_assert!(self.attachments.is_empty());
        self.graph
    }

    /// One vertex carrying `k` half edges labeled 1..k.
    pub fn basic(k: usize) -> Self {
        Fragment {
            graph: Graph::new(1, Vec::new(), 0).unwrap(),
            attachments: vec![Attachment::Vertex(0); k],
        }
    }

    /// The 2-fragment consisting of a single edge between open ends 1 and 2.
    pub fn open_edge() -> Self {
        Fragment {
            graph: Graph::empty(),
            attachments: vec![Attachment::Pair(2), Attachment::Pair(1)],
        }
    }

    pub fn arity(&self) -> usize {
        self.attachments.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn attachments(&self) -> &[Attachment] {
        &self.attachments
    }

    /// Open-end pairs `(i, j)` with `i < j`, 1-based.
    pub fn open_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (idx, att) in self.attachments.iter().enumerate() {
            if let Attachment::Pair(m) = *att {
                if idx + 1 < m {
                    out.push((idx + 1, m));
                }
            }
        }
        out
    }

    /// Glues two k-fragments by fusing the half edges at equal labels into
    /// single edges. Fused half edges that close up without touching any
    /// vertex produce circles.
    pub fn glue(&self, other: &Fragment) -> Result<Graph> {
        let k = self.arity();
        if other.arity() != k {
            return Err(Error::pre(format!(
                "cannot glue fragments of arity {k} and {}",
                other.arity()
            )));
        }
        let off = self.graph.num_vertices();
        let total_vertices = off + other.graph.num_vertices();
        let mut edges = self.graph.edges().to_vec();
        edges.extend(other.graph.edges().iter().map(|&(a, b)| (a + off, b + off)));
        let mut circles = self.graph.circles() + other.graph.circles();

        // Segment endpoints: an internal vertex or a junction. Junction j
        // joins the two half edges labeled j+1.
        #[derive(Clone, Copy, PartialEq)]
        enum End {
            Vert(usize),
            Junc(usize),
        }
        let mut segments: Vec<(End, End)> = Vec::new();
        for (side, offset) in [(self, 0usize), (other, off)] {
            for (idx, att) in side.attachments.iter().enumerate() {
                match *att {
                    Attachment::Vertex(v) => {
                        segments.push((End::Junc(idx), End::Vert(v + offset)));
                    }
                    Attachment::Pair(m) if m > idx + 1 => {
                        segments.push((End::Junc(idx), End::Junc(m - 1)));
                    }
                    Attachment::Pair(_) => {} // recorded at the partner
                }
            }
        }
        // Each junction sees exactly two segment ends (one per side).
        let mut incidence: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
        for (s, (a, b)) in segments.iter().enumerate() {
            if let End::Junc(j) = *a {
                incidence[j].push((s, 0));
            }
            if let End::Junc(j) = *b {
                incidence[j].push((s, 1));
            }
        }
        debug_assert!(incidence.iter().all(|v| v.len() == 2));

        let seg_end = |s: usize, e: usize| if e == 0 { segments[s].0 } else { segments[s].1 };
        let mut visited = vec![false; segments.len()];

        // Chains anchored at vertices collapse to single edges.
        for s in 0..segments.len() {
            for start_end in 0..2 {
                if visited[s] {
                    break;
                }
                let End::Vert(anchor) = seg_end(s, start_end) else {
                    continue;
                };
                visited[s] = true;
                let mut cur_seg = s;
                let mut cur_forward = 1 - start_end;
                let other_vertex = loop {
                    match seg_end(cur_seg, cur_forward) {
                        End::Vert(u) => break u,
                        End::Junc(j) => {
                            let (ns, ne) = incidence[j]
                                .iter()
                                .copied()
                                .find(|&(s2, e2)| (s2, e2) != (cur_seg, cur_forward))
                                .expect("junction has two segment ends");
                            visited[ns] = true;
                            cur_seg = ns;
                            cur_forward = 1 - ne;
                        }
                    }
                };
                edges.push((anchor.min(other_vertex), anchor.max(other_vertex)));
            }
        }
        // Remaining segments form vertex-free cycles: circles.
        for s in 0..segments.len() {
            if visited[s] {
                continue;
            }
            circles += 1;
            visited[s] = true;
            let mut cur_seg = s;
            let mut cur_forward = 1;
            loop {
                let End::Junc(j) = seg_end(cur_seg, cur_forward) else {
                    unreachable!("cycle segments have junction ends only")
                };
                let (ns, ne) = incidence[j]
                    .iter()
                    .copied()
                    .find(|&(s2, e2)| (s2, e2) != (cur_seg, cur_forward))
                    .expect("junction has two segment ends");
                if visited[ns] {
                    break;
                }
                visited[ns] = true;
                cur_seg = ns;
                cur_forward = 1 - ne;
            }
        }
        Graph::new(total_vertices, edges, circles)
    }

    /// Disjoint union; the labels of `other` are shifted past ours.
    pub fn product(&self, other: &Fragment) -> Fragment {
        let k = self.arity();
        let graph = self.graph.disjoint_union(&other.graph);
        let off = self.graph.num_vertices();
        let mut attachments = self.attachments.clone();
        attachments.extend(other.attachments.iter().map(|att| match *att {
            Attachment::Vertex(v) => Attachment::Vertex(v + off),
            Attachment::Pair(m) => Attachment::Pair(m + k),
        }));
        Fragment { graph, attachments }
    }

    /// Fuses the half edges at labels `i < j` into one edge (a circle when
    /// they were the two ends of a single open-end edge) and relabels the
    /// remaining open ends 1..k-2 preserving their order.
    pub fn contract(&self, i: usize, j: usize) -> Result<Fragment> {
        let k = self.arity();
        if !(1 <= i && i < j && j <= k) {
            return Err(Error::pre(format!(
                "contraction labels must satisfy 1 <= i < j <= {k}, got ({i},{j})"
            )));
        }
        let mut graph = self.graph.clone();
        let mut atts = self.attachments.clone();
        match (atts[i - 1], atts[j - 1]) {
            (Attachment::Pair(m), _) if m == j => {
                graph.circles += 1;
            }
            (Attachment::Vertex(u), Attachment::Vertex(v)) => {
                graph.edges.push((u.min(v), u.max(v)));
                graph.edges.sort_unstable();
            }
            (Attachment::Vertex(u), Attachment::Pair(m)) => {
                atts[m - 1] = Attachment::Vertex(u);
            }
            (Attachment::Pair(l), Attachment::Vertex(v)) => {
                atts[l - 1] = Attachment::Vertex(v);
            }
            (Attachment::Pair(l), Attachment::Pair(m)) => {
                atts[l - 1] = Attachment::Pair(m);
                atts[m - 1] = Attachment::Pair(l);
            }
        }
        // Relabel: drop i and j, keep order.
        let mut new_label = vec![0usize; k + 1];
        let mut next = 0;
        for (old, slot) in new_label.iter_mut().enumerate().skip(1) {
            if old != i && old != j {
                next += 1;
                *slot = next;
            }
        }
        let attachments = (1..=k)
            .filter(|&old| old != i && old != j)
            .map(|old| match atts[old - 1] {
                Attachment::Vertex(v) => Attachment::Vertex(v),
                Attachment::Pair(m) => Attachment::Pair(new_label[m]),
            })
            .collect();
        Fragment::new(graph, attachments)
    }

    pub fn parse(text: &str) -> Result<Fragment> {
        let mut header: Option<usize> = None; // arity
        let mut names: BTreeMap<String, usize> = BTreeMap::new();
        let mut order: Vec<String> = Vec::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut circles = 0usize;
        let mut opens: Vec<(usize, usize, String)> = Vec::new(); // line, label, vertex name
        let mut pairs: Vec<(usize, usize, usize)> = Vec::new(); // line, i, j

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let keyword = tokens.next().unwrap();
            let rest: Vec<&str> = tokens.collect();
            if header.is_none() {
                match keyword {
                    "graph" if rest.is_empty() => header = Some(0),
                    "fragment" => {
                        let k = rest
                            .first()
                            .and_then(|t| t.strip_prefix("k="))
                            .and_then(|v| v.parse::<usize>().ok())
                            .ok_or_else(|| Error::parse(line, "expected `fragment k=<arity>`"))?;
                        header = Some(k);
                    }
                    _ => {
                        return Err(Error::parse(
                            line,
                            format!("expected `graph` or `fragment k=<arity>`, found `{keyword}`"),
                        ))
                    }
                }
                continue;
            }
            match keyword {
                "vertex" => {
                    let name = *rest
                        .first()
                        .ok_or_else(|| Error::parse(line, "expected `vertex <name>`"))?;
                    if names.contains_key(name) {
                        return Err(Error::parse(line, format!("duplicate vertex `{name}`")));
                    }
                    names.insert(name.to_string(), order.len());
                    order.push(name.to_string());
                }
                "edge" => {
                    let [a, b] = rest.as_slice() else {
                        return Err(Error::parse(line, "expected `edge <a> <b>`"));
                    };
                    let &ia = names
                        .get(*a)
                        .ok_or_else(|| Error::parse(line, format!("unknown vertex `{a}`")))?;
                    let &ib = names
                        .get(*b)
                        .ok_or_else(|| Error::parse(line, format!("unknown vertex `{b}`")))?;
                    edges.push((ia, ib));
                }
                "loop" => {
                    let name = *rest
                        .first()
                        .ok_or_else(|| Error::parse(line, "expected `loop <name>`"))?;
                    let &iv = names
                        .get(name)
                        .ok_or_else(|| Error::parse(line, format!("unknown vertex `{name}`")))?;
                    edges.push((iv, iv));
                }
                "circle" => circles += 1,
                "open" => {
                    let [lbl, name] = rest.as_slice() else {
                        return Err(Error::parse(line, "expected `open <label> <vertex>`"));
                    };
                    let label: usize = lbl
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad label `{lbl}`")))?;
                    opens.push((line, label, name.to_string()));
                }
                "openpair" => {
                    let [a, b] = rest.as_slice() else {
                        return Err(Error::parse(line, "expected `openpair <i> <j>`"));
                    };
                    let i: usize = a
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad label `{a}`")))?;
                    let j: usize = b
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad label `{b}`")))?;
                    pairs.push((line, i, j));
                }
                _ => return Err(Error::parse(line, format!("unknown directive `{keyword}`"))),
            }
        }
        let k = header.ok_or_else(|| Error::parse(1, "missing `graph`/`fragment` header"))?;
        let graph =
            Graph::new(order.len(), edges, circles).map_err(|e| Error::parse(1, e.to_string()))?;
        let mut attachments: Vec<Option<Attachment>> = vec![None; k];
        let mut set = |line: usize, label: usize, att: Attachment| -> Result<()> {
            if label == 0 || label > k {
                return Err(Error::parse(
                    line,
                    format!("open label {label} outside 1..{k}"),
                ));
            }
            if attachments[label - 1].is_some() {
                return Err(Error::parse(line, format!("open label {label} used twice")));
            }
            attachments[label - 1] = Some(att);
            Ok(())
        };
        for (line, label, name) in opens {
            let &iv = names
                .get(&name)
                .ok_or_else(|| Error::parse(line, format!("unknown vertex `{name}`")))?;
            set(line, label, Attachment::Vertex(iv))?;
        }
        for (line, i, j) in pairs {
            if i == j {
                return Err(Error::parse(line, "openpair labels must differ"));
            }
            set(line, i, Attachment::Pair(j))?;
            set(line, j, Attachment::Pair(i))?;
        }
        let attachments: Vec<Attachment> = attachments
            .into_iter()
            .enumerate()
            .map(|(idx, a)| {
                a.ok_or_else(|| Error::parse(1, format!("open label {} never placed", idx + 1)))
            })
            .collect::<Result<_>>()?;
        Fragment::new(graph, attachments)
    }
}

struct FragmentBody<'a> {
    graph: &'a Graph,
    attachments: &'a [Attachment],
    header: &'a str,
}

impl fmt::Display for FragmentBody<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header)?;
        for v in 0..self.graph.num_vertices() {
            writeln!(f, "vertex v{v}")?;
        }
        for &(a, b) in self.graph.edges() {
            if a == b {
                writeln!(f, "loop v{a}")?;
            } else {
                writeln!(f, "edge v{a} v{b}")?;
            }
        }
        for _ in 0..self.graph.circles() {
            writeln!(f, "circle")?;
        }
        for (idx, att) in self.attachments.iter().enumerate() {
            match *att {
                Attachment::Vertex(v) => writeln!(f, "open {} v{v}", idx + 1)?,
                Attachment::Pair(m) if m > idx + 1 => writeln!(f, "openpair {} {m}", idx + 1)?,
                Attachment::Pair(_) => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = format!("fragment k={}", self.arity());
        write!(
            f,
            "{}",
            FragmentBody {
                graph: &self.graph,
                attachments: &self.attachments,
                header: &header
            }
        )
    }
}

/// All fragments with at most `max_vertices` internal vertices, every internal
/// vertex of degree at most `max_degree`, and no circles. Open-end-to-open-end
/// edges are allowed. Isomorphic duplicates are permitted; the order is
/// deterministic: by vertex count, then edge count, then structural encoding.
pub fn enumerate_fragments(k: usize, max_vertices: usize, max_degree: usize) -> Vec<Fragment> {
    let mut out = Vec::new();
    for v in 0..=max_vertices {
        out.extend(enumerate_fragments_exact(k, v, max_degree, true));
    }
    out
}

/// Fragments with exactly `num_vertices` internal vertices. With
/// `allow_isolated = false`, fragments containing a degree-zero vertex are
/// skipped (their tensor images are scalar multiples of smaller fragments'
/// images, so rank searches lose nothing).
pub(crate) fn enumerate_fragments_exact(
    k: usize,
    num_vertices: usize,
    max_degree: usize,
    allow_isolated: bool,
) -> Vec<Fragment> {
    let mut result = Vec::new();
    for pattern in attachment_patterns(k, num_vertices) {
        let mut base = vec![0usize; num_vertices];
        for att in &pattern {
            if let Attachment::Vertex(v) = *att {
                base[v] += 1;
            }
        }
        if base.iter().any(|&d| d > max_degree) {
            continue;
        }
        let caps: Vec<usize> = base.iter().map(|&d| max_degree - d).collect();
        for edges in edge_multisets(num_vertices, &caps) {
            if !allow_isolated {
                let mut deg = base.clone();
                for &(a, b) in &edges {
                    deg[a] += 1;
                    deg[b] += 1;
                }
                if deg.contains(&0) {
                    continue;
                }
            }
            let graph = Graph::new(num_vertices, edges, 0).expect("generated edges are valid");
            result.push(Fragment::new(graph, pattern.clone()).expect("generated pattern is valid"));
        }
    }
    result.sort_by(|a, b| (a.graph.edge_count(), a).cmp(&(b.graph.edge_count(), b)));
    result
}

/// Every way to attach `k` labeled open ends: each label goes to one of the
/// vertices or pairs up with a later unassigned label.
fn attachment_patterns(k: usize, num_vertices: usize) -> Vec<Vec<Attachment>> {
    let mut out = Vec::new();
    let mut current: Vec<Option<Attachment>> = vec![None; k];
    fn recurse(
        current: &mut Vec<Option<Attachment>>,
        num_vertices: usize,
        out: &mut Vec<Vec<Attachment>>,
    ) {
        let Some(idx) = current.iter().position(Option::is_none) else {
            out.push(current.iter().map(|a| a.unwrap()).collect());
            return;
        };
        for v in 0..num_vertices {
            current[idx] = Some(Attachment::Vertex(v));
            recurse(current, num_vertices, out);
        }
        for partner in idx + 1..current.len() {
            if current[partner].is_none() {
                current[idx] = Some(Attachment::Pair(partner + 1));
                current[partner] = Some(Attachment::Pair(idx + 1));
                recurse(current, num_vertices, out);
                current[partner] = None;
            }
        }
        current[idx] = None;
    }
    recurse(&mut current, num_vertices, &mut out);
    out
}

/// Edge multisets on `n` vertices respecting per-vertex remaining degree
/// capacities (a loop consumes 2 at its vertex).
fn edge_multisets(n: usize, caps: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut slots = Vec::new();
    for a in 0..n {
        for b in a..n {
            slots.push((a, b));
        }
    }
    let mut out = Vec::new();
    let mut caps = caps.to_vec();
    let mut edges = Vec::new();
    fn recurse(
        slots: &[(usize, usize)],
        idx: usize,
        caps: &mut Vec<usize>,
        edges: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if idx == slots.len() {
            out.push(edges.clone());
            return;
        }
        let (a, b) = slots[idx];
        let max_mult = if a == b {
            caps[a] / 2
        } else {
            caps[a].min(caps[b])
        };
        for mult in 0..=max_mult {
            if mult > 0 {
                if a == b {
                    caps[a] -= 2;
                } else {
                    caps[a] -= 1;
                    caps[b] -= 1;
                }
                edges.push((a, b));
            }
            recurse(slots, idx + 1, caps, edges, out);
            // Only undo once the whole multiplicity run is finished.
        }
        for _ in 0..max_mult {
            edges.pop();
            if a == b {
                caps[a] += 2;
            } else {
                caps[a] += 1;
                caps[b] += 1;
            }
        }
    }
    recurse(&slots, 0, &mut caps, &mut edges, &mut out);
    out
}
