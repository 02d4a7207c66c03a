//! Structured quadrilateral meshes over a rectangular chart, boundary tags and
//! the plain-text mesh dump.

use std::io::{BufRead, Write};

use crate::error::{Result, ShellError};
use crate::kinematics::{ParamPoint, ReferenceSurface};
use crate::liegroup::{Mat3, Pose, Rotation, Vec3, Wrench};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshNode {
    pub param: ParamPoint,
    pub pose0: Pose,
}

/// Sides of the chart rectangle `[0, lx] x [0, ly]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edge {
    /// `xi1 = 0`
    Root,
    /// `xi1 = lx`
    Tip,
    /// `xi2 = 0`
    Bottom,
    /// `xi2 = ly`
    Top,
}

/// Whether a nodal load keeps its components in the spatial frame (dead) or
/// in the local frame of the node (follower).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadFrame {
    Dead,
    Follower,
}

/// A wrench at full load factor. Dead loads hold a spatial force and a
/// spatial moment; follower loads hold local components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodalLoad {
    pub node: usize,
    pub wrench: Wrench,
    pub frame: LoadFrame,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dirichlet {
    pub node: usize,
    pub mask: [bool; 6],
}

#[derive(Clone, Debug)]
pub struct ShellMesh {
    pub nodes: Vec<MeshNode>,
    /// Counter-clockwise node indices in the chart.
    pub elements: Vec<[usize; 4]>,
    pub lx: f64,
    pub ly: f64,
    pub dirichlet: Vec<Dirichlet>,
    pub neumann: Vec<NodalLoad>,
}

impl ShellMesh {
    /// `nx x ny` rectangular elements over `[0, lx] x [0, ly]`. Nodes are
    /// numbered row by row, `id = j (nx + 1) + i`.
    pub fn structured(
        surface: &dyn ReferenceSurface,
        lx: f64,
        ly: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(ShellError::Mesh(format!(
                "element counts must be positive, got {nx} x {ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(ShellError::Mesh(format!(
                "chart dimensions must be positive, got {lx} x {ly}"
            )));
        }
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let param = ParamPoint::new(lx * i as f64 / nx as f64, ly * j as f64 / ny as f64);
                nodes.push(MeshNode {
                    param,
                    pose0: surface.pose_at(param),
                });
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut elements = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Ok(ShellMesh {
            nodes,
            elements,
            lx,
            ly,
            dirichlet: Vec::new(),
            neumann: Vec::new(),
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_dofs(&self) -> usize {
        6 * self.nodes.len()
    }

    pub fn element_corners(&self, e: usize) -> [ParamPoint; 4] {
        self.elements[e].map(|n| self.nodes[n].param)
    }

    /// Nodes on `edge`, ordered by increasing coordinate along the edge.
    pub fn edge_nodes(&self, edge: Edge) -> Vec<usize> {
        let tol = 1e-9 * self.lx.max(self.ly);
        let (on, along): (Box<dyn Fn(&ParamPoint) -> bool>, fn(&ParamPoint) -> f64) = match edge {
            Edge::Root => (Box::new(move |p| p.xi1.abs() < tol), |p| p.xi2),
            Edge::Tip => {
                let lx = self.lx;
                (Box::new(move |p| (p.xi1 - lx).abs() < tol), |p| p.xi2)
            }
            Edge::Bottom => (Box::new(move |p| p.xi2.abs() < tol), |p| p.xi1),
            Edge::Top => {
                let ly = self.ly;
                (Box::new(move |p| (p.xi2 - ly).abs() < tol), |p| p.xi1)
            }
        };
        let mut ids: Vec<usize> = (0..self.nodes.len())
            .filter(|&n| on(&self.nodes[n].param))
            .collect();
        ids.sort_by(|&a, &b| along(&self.nodes[a].param).total_cmp(&along(&self.nodes[b].param)));
        ids
    }

    /// Share of a uniform line load carried by each node of `edge`, from the
    /// linear trace shape functions. Shares sum to one.
    pub fn edge_weights(&self, edge: Edge) -> Vec<(usize, f64)> {
        let ids = self.edge_nodes(edge);
        let coord = |n: usize| match edge {
            Edge::Root | Edge::Tip => self.nodes[n].param.xi2,
            Edge::Bottom | Edge::Top => self.nodes[n].param.xi1,
        };
        if ids.len() == 1 {
            return vec![(ids[0], 1.0)];
        }
        let total = coord(*ids.last().unwrap()) - coord(ids[0]);
        let mut w = vec![0.0; ids.len()];
        for k in 0..ids.len() - 1 {
            let half = 0.5 * (coord(ids[k + 1]) - coord(ids[k])) / total;
            w[k] += half;
            w[k + 1] += half;
        }
        ids.into_iter().zip(w).collect()
    }

    pub fn clamp_edge(&mut self, edge: Edge) {
        for n in self.edge_nodes(edge) {
            self.dirichlet.push(Dirichlet {
                node: n,
                mask: [true; 6],
            });
        }
    }

    /// Distributes the resultant `total` over `edge` with trace shape functions.
    pub fn add_edge_load(&mut self, edge: Edge, total: Wrench, frame: LoadFrame) {
        for (node, w) in self.edge_weights(edge) {
            self.neumann.push(NodalLoad {
                node,
                wrench: total * w,
                frame,
            });
        }
    }

    pub fn add_nodal_load(&mut self, node: usize, wrench: Wrench, frame: LoadFrame) {
        self.neumann.push(NodalLoad {
            node,
            wrench,
            frame,
        });
    }

    /// Sorted list of unconstrained global DOFs.
    pub fn free_dofs(&self) -> Vec<usize> {
        let mut fixed = vec![false; self.num_dofs()];
        for d in &self.dirichlet {
            for k in 0..6 {
                if d.mask[k] {
                    fixed[6 * d.node + k] = true;
                }
            }
        }
        (0..self.num_dofs()).filter(|&i| !fixed[i]).collect()
    }

    /// Checks index ranges, node usage, and that no load acts on a
    /// constrained DOF.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let mut used = vec![false; n];
        for (e, el) in self.elements.iter().enumerate() {
            for &k in el {
                if k >= n {
                    return Err(ShellError::Mesh(format!(
                        "element {e} references node {k}, mesh has {n} nodes"
                    )));
                }
                used[k] = true;
            }
        }
        if let Some(k) = used.iter().position(|u| !u) {
            return Err(ShellError::Mesh(format!("node {k} belongs to no element")));
        }
        let mut fixed = vec![false; 6 * n];
        for d in &self.dirichlet {
            if d.node >= n {
                return Err(ShellError::Mesh(format!(
                    "constraint on missing node {}",
                    d.node
                )));
            }
            for k in 0..6 {
                fixed[6 * d.node + k] |= d.mask[k];
            }
        }
        for l in &self.neumann {
            if l.node >= n {
                return Err(ShellError::Mesh(format!("load on missing node {}", l.node)));
            }
            let v = l.wrench.to_vector();
            for k in 0..6 {
                if v[k] != 0.0 && fixed[6 * l.node + k] {
                    return Err(ShellError::Mesh(format!(
                        "node {} has a load on constrained DOF {k}",
                        l.node
                    )));
                }
            }
        }
        Ok(())
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    pub fn renumbered(&self, perm: &[usize]) -> Result<Self> {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(ShellError::Mesh(
                "node permutation is not a bijection".into(),
            ));
        }
        let mut nodes = self.nodes.clone();
        for (old, &new) in perm.iter().enumerate() {
            nodes[new] = self.nodes[old];
        }
        Ok(ShellMesh {
            nodes,
            elements: self.elements.iter().map(|el| el.map(|k| perm[k])).collect(),
            lx: self.lx,
            ly: self.ly,
            dirichlet: self
                .dirichlet
                .iter()
                .map(|d| Dirichlet {
                    node: perm[d.node],
                    mask: d.mask,
                })
                .collect(),
            neumann: self
                .neumann
                .iter()
                .map(|l| NodalLoad {
                    node: perm[l.node],
                    ..*l
                })
                .collect(),
        })
    }
}

/// Writes the mesh dump: a node section `id xi1 xi2 px py pz r11 .. r33`
/// (rotation row by row), an element section `id n1 n2 n3 n4` and a
/// triangle section `id n1 n2 n3` splitting each quad along its first
/// diagonal. Section headers are comment lines starting with `#`.
pub fn write_mesh_dump<W: Write>(out: &mut W, mesh: &ShellMesh, poses: &[Pose]) -> Result<()> {
    writeln!(
        out,
        "# nodes {}: id xi1 xi2 px py pz r11 r12 r13 r21 r22 r23 r31 r32 r33",
        poses.len()
    )?;
    for (id, (node, g)) in mesh.nodes.iter().zip(poses).enumerate() {
        let p = g.translation;
        let r = g.rotation.matrix();
        write!(
            out,
            "{id} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
            node.param.xi1, node.param.xi2, p.x, p.y, p.z
        )?;
        for i in 0..3 {
            for j in 0..3 {
                write!(out, " {:.17e}", r[(i, j)])?;
            }
        }
        writeln!(out)?;
    }
    writeln!(out, "# elements {}: id n1 n2 n3 n4", mesh.elements.len())?;
    for (id, el) in mesh.elements.iter().enumerate() {
        writeln!(out, "{id} {} {} {} {}", el[0], el[1], el[2], el[3])?;
    }
    writeln!(out, "# triangles {}: id n1 n2 n3", 2 * mesh.elements.len())?;
    for (id, el) in mesh.elements.iter().enumerate() {
        writeln!(out, "{} {} {} {}", 2 * id, el[0], el[1], el[2])?;
        writeln!(out, "{} {} {} {}", 2 * id + 1, el[0], el[2], el[3])?;
    }
    Ok(())
}

/// Contents of a mesh dump.
#[derive(Clone, Debug, Default)]
pub struct MeshDump {
    pub params: Vec<ParamPoint>,
    pub poses: Vec<Pose>,
    pub elements: Vec<[usize; 4]>,
    pub triangles: Vec<[usize; 3]>,
}

pub fn read_mesh_dump<R: BufRead>(input: R) -> Result<MeshDump> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Nodes,
        Elements,
        Triangles,
    }
    let mut section = Section::None;
    let mut dump = MeshDump::default();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            let header = header.trim_start();
            section = if header.starts_with("nodes") {
                Section::Nodes
            } else if header.starts_with("elements") {
                Section::Elements
            } else if header.starts_with("triangles") {
                Section::Triangles
            } else {
                section
            };
            continue;
        }
        let bad = |what: &str| ShellError::Mesh(format!("line {}: {what}", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        let floats = |from: usize| -> Result<Vec<f64>> {
            fields[from..]
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| bad("invalid number")))
                .collect()
        };
        let ints = || -> Result<Vec<usize>> {
            fields[1..]
                .iter()
                .map(|s| s.parse::<usize>().map_err(|_| bad("invalid node index")))
                .collect()
        };
        match section {
            Section::Nodes => {
                if fields.len() != 15 {
                    return Err(bad("node line needs 15 fields"));
                }
                let v = floats(1)?;
                dump.params.push(ParamPoint::new(v[0], v[1]));
                let r = Mat3::from_row_slice(&v[5..14]);
                dump.poses.push(Pose::new(
                    Rotation::from_matrix(r)?,
                    Vec3::new(v[2], v[3], v[4]),
                ));
            }
            Section::Elements => {
                let v = ints()?;
                if v.len() != 4 {
                    return Err(bad("element line needs 5 fields"));
                }
                dump.elements.push([v[0], v[1], v[2], v[3]]);
            }
            Section::Triangles => {
                let v = ints()?;
                if v.len() != 3 {
                    return Err(bad("triangle line needs 4 fields"));
                }
                dump.triangles.push([v[0], v[1], v[2]]);
            }
            Section::None => return Err(bad("data before any section header")),
        }
    }
    Ok(dump)
}
