//! PACE `.gr` / `.td` text formats and the certificate document.
//!
//! Vertices are 1-based on disk and 0-based in memory.

use std::fmt::Write as _;

use crate::bitset::VertexSet;
use crate::decomposition::{validate, TreeDecomposition, Violation};
use crate::error::{GraphError, ParseError};
use crate::graph::{Contractor, Graph};
use crate::solver::Certificate;

/// A parsed `.gr` file. Comments are kept so that emitting reproduces them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrDocument {
    pub comments: Vec<String>,
    pub graph: Graph,
}

/// A parsed `.td` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdDocument {
    /// Vertex count declared in the header.
    pub n: usize,
    pub decomposition: TreeDecomposition,
}

/// Syntactic content of a certificate file, not yet checked against a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateDocument {
    pub width: usize,
    pub td: TdDocument,
    pub obstruction: Graph,
    /// `preimages[h]` lists the input vertices merged into vertex `h` of the obstruction.
    pub preimages: Vec<Vec<usize>>,
}

fn fields(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

fn num(tok: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| ParseError::new(line, format!("bad {what} '{tok}'")))
}

fn vertex(tok: &str, line: usize, n: usize) -> Result<usize, ParseError> {
    let v = num(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(ParseError::new(
            line,
            format!("vertex {v} out of range 1..{n}"),
        ));
    }
    Ok(v - 1)
}

/// Incremental edge-list reader shared by `.gr` files and the obstruction section.
struct EdgeBody {
    n: usize,
    m: usize,
    graph: Graph,
    header_line: usize,
}

impl EdgeBody {
    fn header(toks: &[&str], line: usize) -> Result<Self, ParseError> {
        if toks.len() != 4 || toks[0] != "p" || toks[1] != "tw" {
            return Err(ParseError::new(line, "expected header 'p tw <n> <m>'"));
        }
        let n = num(toks[2], line, "vertex count")?;
        let m = num(toks[3], line, "edge count")?;
        Ok(EdgeBody {
            n,
            m,
            graph: Graph::new(n),
            header_line: line,
        })
    }

    fn edge(&mut self, toks: &[&str], line: usize) -> Result<(), ParseError> {
        if toks.len() != 2 {
            return Err(ParseError::new(line, "expected edge 'u v'"));
        }
        let u = vertex(toks[0], line, self.n)?;
        let v = vertex(toks[1], line, self.n)?;
        if u == v {
            return Err(ParseError::new(line, format!("self-loop at {}", u + 1)));
        }
        if self.graph.adjacent(u, v) {
            return Err(ParseError::new(
                line,
                format!("duplicate edge {} {}", u + 1, v + 1),
            ));
        }
        if self.graph.m() == self.m {
            return Err(ParseError::new(line, format!("more than {} edges", self.m)));
        }
        self.graph.add_edge(u, v);
        Ok(())
    }

    fn finish(self) -> Result<Graph, ParseError> {
        if self.graph.m() != self.m {
            return Err(ParseError::new(
                self.header_line,
                format!("header declares {} edges, found {}", self.m, self.graph.m()),
            ));
        }
        Ok(self.graph)
    }
}

pub fn parse_gr_document(text: &str) -> Result<GrDocument, ParseError> {
    let mut comments = Vec::new();
    let mut body: Option<EdgeBody> = None;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let toks = fields(raw);
        match toks.first() {
            None => continue,
            Some(&"c") => {
                let rest = raw.trim_start().strip_prefix('c').unwrap_or("");
                comments.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
            }
            Some(&"p") if body.is_some() => {
                return Err(ParseError::new(line, "second header"));
            }
            Some(&"p") => body = Some(EdgeBody::header(&toks, line)?),
            Some(_) => match body.as_mut() {
                Some(b) => b.edge(&toks, line)?,
                None => return Err(ParseError::new(line, "edge before header")),
            },
        }
    }
    let body = body.ok_or_else(|| ParseError::new(last.max(1), "missing header"))?;
    Ok(GrDocument {
        comments,
        graph: body.finish()?,
    })
}

pub fn parse_gr(text: &str) -> Result<Graph, ParseError> {
    parse_gr_document(text).map(|d| d.graph)
}

fn write_edges(out: &mut String, g: &Graph) {
    let _ = writeln!(out, "p tw {} {}", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
}

pub fn emit_gr(g: &Graph) -> String {
    let mut out = String::new();
    write_edges(&mut out, g);
    out
}

impl GrDocument {
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            if c.is_empty() {
                out.push_str("c\n");
            } else {
                let _ = writeln!(out, "c {c}");
            }
        }
        write_edges(&mut out, &self.graph);
        out
    }
}

/// Reader for the `s td` section. Bags may be listed in any order.
struct TdBody {
    n: usize,
    max_bag: usize,
    bags: Vec<Option<VertexSet>>,
    edges: Vec<(usize, usize)>,
    header_line: usize,
}

impl TdBody {
    fn header(toks: &[&str], line: usize) -> Result<Self, ParseError> {
        if toks.len() != 5 || toks[0] != "s" || toks[1] != "td" {
            return Err(ParseError::new(
                line,
                "expected header 's td <bags> <max bag> <n>'",
            ));
        }
        let count = num(toks[2], line, "bag count")?;
        let max_bag = num(toks[3], line, "max bag size")?;
        let n = num(toks[4], line, "vertex count")?;
        Ok(TdBody {
            n,
            max_bag,
            bags: vec![None; count],
            edges: Vec::new(),
            header_line: line,
        })
    }

    fn bag_id(&self, tok: &str, line: usize) -> Result<usize, ParseError> {
        let b = num(tok, line, "bag id")?;
        if b == 0 || b > self.bags.len() {
            return Err(ParseError::new(
                line,
                format!("bag {b} out of range 1..{}", self.bags.len()),
            ));
        }
        Ok(b - 1)
    }

    fn bag(&mut self, toks: &[&str], line: usize) -> Result<(), ParseError> {
        if toks.len() < 2 {
            return Err(ParseError::new(line, "expected 'b <id> <vertices>'"));
        }
        let id = self.bag_id(toks[1], line)?;
        if self.bags[id].is_some() {
            return Err(ParseError::new(
                line,
                format!("bag {} listed twice", id + 1),
            ));
        }
        let mut set = VertexSet::new(self.n);
        for t in &toks[2..] {
            let v = vertex(t, line, self.n)?;
            if !set.insert(v) {
                return Err(ParseError::new(
                    line,
                    format!("vertex {} repeated in bag", v + 1),
                ));
            }
        }
        if set.len() > self.max_bag {
            return Err(ParseError::new(
                line,
                format!(
                    "bag of size {} exceeds declared maximum {}",
                    set.len(),
                    self.max_bag
                ),
            ));
        }
        self.bags[id] = Some(set);
        Ok(())
    }

    fn edge(&mut self, toks: &[&str], line: usize) -> Result<(), ParseError> {
        if toks.len() != 2 {
            return Err(ParseError::new(line, "expected tree edge 'i j'"));
        }
        let a = self.bag_id(toks[0], line)?;
        let b = self.bag_id(toks[1], line)?;
        self.edges.push((a, b));
        Ok(())
    }

    fn finish(self) -> Result<TdDocument, ParseError> {
        let line = self.header_line;
        let mut bags = Vec::with_capacity(self.bags.len());
        for (i, b) in self.bags.into_iter().enumerate() {
            bags.push(b.ok_or_else(|| ParseError::new(line, format!("bag {} missing", i + 1)))?);
        }
        let real_max = bags.iter().map(VertexSet::len).max().unwrap_or(0);
        if real_max != self.max_bag {
            return Err(ParseError::new(
                line,
                format!(
                    "declared max bag size {} but largest bag has {real_max}",
                    self.max_bag
                ),
            ));
        }
        let decomposition = TreeDecomposition::new(bags, self.edges)
            .map_err(|e| ParseError::new(line, e.to_string()))?;
        Ok(TdDocument {
            n: self.n,
            decomposition,
        })
    }
}

pub fn parse_td(text: &str) -> Result<TdDocument, ParseError> {
    let mut body: Option<TdBody> = None;
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let toks = fields(raw);
        match (toks.first(), body.as_mut()) {
            (None, _) | (Some(&"c"), _) => continue,
            (Some(&"s"), None) => body = Some(TdBody::header(&toks, line)?),
            (Some(&"s"), Some(_)) => return Err(ParseError::new(line, "second header")),
            (Some(&"b"), Some(b)) => b.bag(&toks, line)?,
            (Some(_), Some(b)) => b.edge(&toks, line)?,
            (Some(_), None) => return Err(ParseError::new(line, "content before header")),
        }
    }
    body.ok_or_else(|| ParseError::new(last.max(1), "missing header"))?
        .finish()
}

fn write_td(out: &mut String, n: usize, t: &TreeDecomposition) {
    let _ = writeln!(out, "s td {} {} {}", t.len(), t.max_bag(), n);
    for (i, bag) in t.bags().iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in t.tree_edges() {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
}

/// Refuses decompositions that are not valid for `g`.
pub fn emit_td(g: &Graph, t: &TreeDecomposition) -> Result<String, Violation> {
    validate(g, t)?;
    let mut out = String::new();
    write_td(&mut out, g.n(), t);
    Ok(out)
}

/// Sorted bags and sorted tree edges written as bag pairs.
pub type CanonicalForm = (Vec<Vec<usize>>, Vec<(Vec<usize>, Vec<usize>)>);

/// Bags sorted, tree edges oriented and sorted after relabelling: two
/// decompositions that differ only in node order compare equal.
pub fn canonical_form(t: &TreeDecomposition) -> CanonicalForm {
    let bags: Vec<Vec<usize>> = t.bags().iter().map(VertexSet::to_vec).collect();
    let mut sorted = bags.clone();
    sorted.sort();
    let mut edges: Vec<(Vec<usize>, Vec<usize>)> = t
        .tree_edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (bags[a].clone(), bags[b].clone());
            if x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    edges.sort();
    (sorted, edges)
}

pub fn emit_certificate(g: &Graph, c: &Certificate) -> Result<String, Violation> {
    validate(g, &c.decomposition)?;
    let mut out = String::new();
    let _ = writeln!(out, "c treewidth certificate");
    let _ = writeln!(out, "w {}", c.width);
    write_td(&mut out, g.n(), &c.decomposition);
    write_edges(&mut out, &c.obstruction);
    for (h, part) in c.witness.parts().iter().enumerate() {
        let _ = write!(out, "m {}", h + 1);
        for v in part {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_certificate(text: &str) -> Result<CertificateDocument, ParseError> {
    enum Section {
        Start,
        Width(usize),
        Td(usize, TdBody),
        Obstruction(usize, TdDocument, EdgeBody),
    }
    let mut section = Section::Start;
    let mut preimages: Vec<Option<Vec<usize>>> = Vec::new();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let toks = fields(raw);
        let Some(&head) = toks.first() else { continue };
        if head == "c" {
            continue;
        }
        section = match (section, head) {
            (Section::Start, "w") => {
                if toks.len() != 2 {
                    return Err(ParseError::new(line, "expected 'w <width>'"));
                }
                Section::Width(num(toks[1], line, "width")?)
            }
            (Section::Start, _) => return Err(ParseError::new(line, "expected 'w <width>' first")),
            (Section::Width(w), "s") => Section::Td(w, TdBody::header(&toks, line)?),
            (Section::Width(_), _) => return Err(ParseError::new(line, "expected 's td' header")),
            (Section::Td(w, td), "p") => {
                let body = EdgeBody::header(&toks, line)?;
                preimages = vec![None; body.n];
                Section::Obstruction(w, td.finish()?, body)
            }
            (Section::Td(w, mut td), "b") => {
                td.bag(&toks, line)?;
                Section::Td(w, td)
            }
            (Section::Td(w, mut td), _) => {
                td.edge(&toks, line)?;
                Section::Td(w, td)
            }
            (Section::Obstruction(w, td, body), "m") => {
                if toks.len() < 3 {
                    return Err(ParseError::new(line, "expected 'm <h> <vertices>'"));
                }
                let h = vertex(toks[1], line, body.n)?;
                if preimages[h].is_some() {
                    return Err(ParseError::new(
                        line,
                        format!("preimage of {} listed twice", h + 1),
                    ));
                }
                let vs = toks[2..]
                    .iter()
                    .map(|t| vertex(t, line, td.n))
                    .collect::<Result<Vec<_>, _>>()?;
                preimages[h] = Some(vs);
                Section::Obstruction(w, td, body)
            }
            (Section::Obstruction(w, td, mut body), _) => {
                body.edge(&toks, line)?;
                Section::Obstruction(w, td, body)
            }
        };
    }
    let Section::Obstruction(width, td, body) = section else {
        return Err(ParseError::new(last.max(1), "truncated certificate"));
    };
    let obstruction = body.finish()?;
    let preimages = preimages
        .into_iter()
        .enumerate()
        .map(|(h, p)| {
            p.ok_or_else(|| ParseError::new(last, format!("preimage of {} missing", h + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CertificateDocument {
        width,
        td,
        obstruction,
        preimages,
    })
}

impl CertificateDocument {
    /// Builds the in-memory certificate. The witness must be a valid
    /// contractor of `g`; everything else is left to verification.
    pub fn into_certificate(self, g: &Graph) -> Result<Certificate, GraphError> {
        if self.td.n != g.n() {
            return Err(GraphError::UniverseMismatch {
                expected: g.n(),
                actual: self.td.n,
            });
        }
        let parts = self
            .preimages
            .iter()
            .map(|p| g.set_of(p))
            .collect::<Result<Vec<_>, _>>()?;
        let witness = Contractor::from_parts(g, parts)?;
        Ok(Certificate {
            width: self.width,
            decomposition: self.td.decomposition,
            obstruction: self.obstruction,
            witness,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{compute_treewidth, verify_certificate};

    #[test]
    fn gr_examples() {
        let p = parse_gr("p tw 3 2\n1 2\n2 3").unwrap();
        assert_eq!(p.edges(), vec![(0, 1), (1, 2)]);
        let c4 = parse_gr("c x\np tw 4 4\n1 2\n2 3\n3 4\n1 4").unwrap();
        assert_eq!(c4.edges(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        let e = parse_gr("p tw 2 2\n1 2\n1 2").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("duplicate"));
    }

    #[test]
    fn gr_errors_carry_lines() {
        let cases = [
            ("p tw 2 1\n1 1", 2),
            ("p tw 2 1\n1 3", 2),
            ("p tw 3 3\n1 2\n2 3", 1),
            ("1 2\np tw 2 1", 1),
            ("p td 2 1\n1 2", 1),
            ("c only", 1),
            ("p tw 2 1\n1 x", 2),
            ("p tw 3 1\n1 2\n2 3", 3),
        ];
        for (text, line) in cases {
            let e = parse_gr(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
    }

    #[test]
    fn gr_document_keeps_comments() {
        let text = "c hello world\nc\np tw 3 2\n1 2\n2 3\n";
        let d = parse_gr_document(text).unwrap();
        assert_eq!(d.comments, vec!["hello world".to_string(), String::new()]);
        assert_eq!(d.emit(), text);
    }

    #[test]
    fn td_examples() {
        let c4 = parse_gr("p tw 4 4\n1 2\n2 3\n3 4\n1 4").unwrap();
        let cert = compute_treewidth(&c4).unwrap();
        let text = emit_td(&c4, &cert.decomposition).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s td 2 3 4");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines.iter().filter(|l| l.starts_with("b ")).count(), 2);

        let one = Graph::new(1);
        let t = TreeDecomposition::single(VertexSet::full(1));
        assert_eq!(emit_td(&one, &t).unwrap(), "s td 1 1 1\nb 1 1\n");
    }

    #[test]
    fn emit_td_refuses_invalid() {
        let p3 = parse_gr("p tw 3 2\n1 2\n2 3").unwrap();
        let t = TreeDecomposition::single(VertexSet::from_slice(3, &[0, 1]));
        assert!(emit_td(&p3, &t).is_err());
    }

    #[test]
    fn td_round_trip_out_of_order() {
        let text = "c x\ns td 3 2 3\nb 2 2 3\nb 1 1 2\nb 3\n1 2\n2 3\n";
        let d = parse_td(text).unwrap();
        assert_eq!(d.n, 3);
        assert_eq!(d.decomposition.bags()[1].to_vec(), vec![1, 2]);
        assert!(d.decomposition.bags()[2].is_empty());
        let g = parse_gr("p tw 3 2\n1 2\n2 3").unwrap();
        let again = parse_td(&emit_td(&g, &d.decomposition).unwrap()).unwrap();
        assert_eq!(
            canonical_form(&again.decomposition),
            canonical_form(&d.decomposition)
        );
    }

    #[test]
    fn td_errors() {
        for text in [
            "s td 1 2 2\nb 1 1",
            "s td 1 1 2\nb 1 1 2",
            "s td 2 1 2\nb 1 1",
            "s td 1 1 2\nb 2 1",
            "s td 1 1 2\nb 1 1\nb 1 2",
            "s td 1 1 2\nb 1 3",
            "s td 2 1 2\nb 1 1\nb 2 2\n1 3",
            "b 1 1",
        ] {
            assert!(parse_td(text).is_err(), "{text:?}");
        }
    }

    #[test]
    fn certificate_round_trip() {
        let c5 = crate::graph::tests::cycle(5);
        let cert = compute_treewidth(&c5).unwrap();
        let text = emit_certificate(&c5, &cert).unwrap();
        let back = parse_certificate(&text)
            .unwrap()
            .into_certificate(&c5)
            .unwrap();
        assert_eq!(back.width, 2);
        assert!(back.obstruction.same_as(&Graph::complete(3)));
        verify_certificate(&c5, &back).unwrap();
        assert_eq!(emit_certificate(&c5, &back).unwrap(), text);
    }

    #[test]
    fn certificate_rejects_bad_witness() {
        let p3 = parse_gr("p tw 3 2\n1 2\n2 3").unwrap();
        let text = "w 1\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\np tw 2 1\n1 2\nm 1 1 3\nm 2 2\n";
        let doc = parse_certificate(text).unwrap();
        assert!(doc.into_certificate(&p3).is_err());
        assert!(parse_certificate("w 1\ns td 1 1 1\nb 1 1\np tw 1 0\n").is_err());
        assert!(parse_certificate("s td 1 1 1\nb 1 1\n").is_err());
    }
}
