//! JSON and DOT formats for complexes.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

use serde::Deserialize;

use crate::error::Error;
use crate::presentation::Presentation;
use crate::tiled_surface::{Edge, Step, TiledSurface, VertexId};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    id: u64,
    src: u64,
    dst: u64,
    label: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexJson {
    genus: usize,
    vertices: Vec<u64>,
    edges: Vec<EdgeJson>,
    faces: Vec<Vec<(u64, i64)>>,
}

impl TiledSurface {
    /// Renumbered copy: components by least vertex, breadth-first in slot order.
    /// Also returns the new id of each old vertex.
    pub fn canonical(&self) -> (TiledSurface, Vec<VertexId>) {
        let table = self.slot_table();
        let d = self.presentation().degree();
        let n = self.vertex_count();
        let mut vnew = vec![usize::MAX; n];
        let mut enew = vec![usize::MAX; self.edge_count()];
        let mut order = Vec::new();
        let mut eorder = Vec::new();
        for root in 0..n {
            if vnew[root] != usize::MAX {
                continue;
            }
            vnew[root] = order.len();
            order.push(root);
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for slot in 0..d {
                    let Some(s) = table.get(v, slot) else { continue };
                    if enew[s.edge] == usize::MAX {
                        enew[s.edge] = eorder.len();
                        eorder.push(s.edge);
                    }
                    let w = self.head(s);
                    if vnew[w] == usize::MAX {
                        vnew[w] = order.len();
                        order.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        let edges = eorder
            .iter()
            .map(|&e| {
                let x = self.edge(e);
                Edge { src: vnew[x.src], dst: vnew[x.dst], generator: x.generator }
            })
            .collect();
        let mut faces: Vec<Vec<Step>> = self
            .faces()
            .iter()
            .map(|f| f.iter().map(|s| Step::new(enew[s.edge], s.forward)).collect())
            .collect();
        faces.sort();
        (TiledSurface::from_parts(self.presentation().clone(), n, edges, faces), vnew)
    }

    /// Canonical JSON text, one edge or face per line.
    pub fn to_json(&self) -> String {
        let (y, _) = self.canonical();
        y.to_json_raw()
    }

    /// JSON text in the current numbering.
    pub fn to_json_raw(&self) -> String {
        let pres = self.presentation();
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"genus\": {},", pres.genus());
        let vs: Vec<String> = (0..self.vertex_count()).map(|v| v.to_string()).collect();
        let _ = writeln!(out, "  \"vertices\": [{}],", vs.join(", "));
        let _ = write!(out, "  \"edges\": [");
        for (i, e) in self.edges().iter().enumerate() {
            let _ = write!(
                out,
                "{}\n    {{\"id\": {}, \"src\": {}, \"dst\": {}, \"label\": \"{}\"}}",
                if i == 0 { "" } else { "," },
                i,
                e.src,
                e.dst,
                pres.generator_token(e.generator)
            );
        }
        let _ = writeln!(out, "{}],", if self.edge_count() == 0 { "" } else { "\n  " });
        let _ = write!(out, "  \"faces\": [");
        for (i, f) in self.faces().iter().enumerate() {
            let steps: Vec<String> = f
                .iter()
                .map(|s| format!("[{}, {}]", s.edge, if s.forward { 1 } else { -1 }))
                .collect();
            let _ = write!(out, "{}\n    [{}]", if i == 0 { "" } else { "," }, steps.join(", "));
        }
        let _ = writeln!(out, "{}]", if self.face_count() == 0 { "" } else { "\n  " });
        let _ = writeln!(out, "}}");
        out
    }

    /// Parses JSON; rejects malformed text and complexes failing validation.
    pub fn from_json(text: &str) -> Result<TiledSurface, Error> {
        let y = Self::from_json_unchecked(text)?;
        let diag = y.validate();
        if !diag.is_valid() {
            let msgs: Vec<String> = diag.violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::Format(msgs.join("; ")));
        }
        Ok(y)
    }

    pub fn from_json_unchecked(text: &str) -> Result<TiledSurface, Error> {
        let raw: ComplexJson = serde_json::from_str(text)
            .map_err(|e| Error::Format(format!("line {} column {}: {}", e.line(), e.column(), e)))?;
        let pres = Presentation::new(raw.genus)?;
        let mut vid = BTreeMap::new();
        let mut sorted = raw.vertices.clone();
        sorted.sort_unstable();
        for (i, v) in sorted.iter().enumerate() {
            if vid.insert(*v, i).is_some() {
                return Err(Error::Format(format!("vertices: duplicate id {v}")));
            }
        }
        let mut eid = BTreeMap::new();
        let mut edges = Vec::new();
        for (i, e) in raw.edges.iter().enumerate() {
            let src = *vid
                .get(&e.src)
                .ok_or_else(|| Error::Format(format!("edges[{i}].src: unknown vertex {}", e.src)))?;
            let dst = *vid
                .get(&e.dst)
                .ok_or_else(|| Error::Format(format!("edges[{i}].dst: unknown vertex {}", e.dst)))?;
            let generator = pres
                .parse_generator_token(&e.label)
                .ok_or_else(|| Error::Format(format!("edges[{i}].label: unknown generator '{}'", e.label)))?;
            if eid.insert(e.id, i).is_some() {
                return Err(Error::Format(format!("edges[{i}].id: duplicate id {}", e.id)));
            }
            edges.push(Edge { src, dst, generator });
        }
        let mut faces = Vec::new();
        for (i, f) in raw.faces.iter().enumerate() {
            let mut steps = Vec::new();
            for (j, &(e, o)) in f.iter().enumerate() {
                let edge = *eid
                    .get(&e)
                    .ok_or_else(|| Error::Format(format!("faces[{i}][{j}]: unknown edge {e}")))?;
                let forward = match o {
                    1 => true,
                    -1 => false,
                    _ => return Err(Error::Format(format!("faces[{i}][{j}]: orientation must be 1 or -1"))),
                };
                steps.push(Step::new(edge, forward));
            }
            if steps.is_empty() {
                return Err(Error::Format(format!("faces[{i}]: empty face")));
            }
            faces.push(steps);
        }
        Ok(TiledSurface::from_parts(pres, sorted.len(), edges, faces))
    }

    pub fn to_dot(&self) -> String {
        let pres = self.presentation();
        let mut out = String::from("digraph complex {\n");
        for v in 0..self.vertex_count() {
            let _ = writeln!(out, "  v{v};");
        }
        for e in self.edges() {
            let _ = writeln!(out, "  v{} -> v{} [label=\"{}\"];", e.src, e.dst, pres.generator_token(e.generator));
        }
        out.push_str("}\n");
        if self.face_count() > 0 {
            out.push_str("// faces (edge id, +1 forward / -1 backward):\n");
            for (i, f) in self.faces().iter().enumerate() {
                let steps: Vec<String> = f
                    .iter()
                    .map(|s| format!("{}{}", s.edge, if s.forward { "+" } else { "-" }))
                    .collect();
                let _ = writeln!(out, "// f{i}: {}", steps.join(" "));
            }
        }
        out
    }
}
