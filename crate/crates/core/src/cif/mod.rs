//! The spanning tree of coupled backward chains and its competition interface.
//!
//! Each `y` in `x + Z²₊` picks a parent `y − e_i` by comparing the shared
//! uniform `ϑ(y)` with the backward transition `π̌(y → y − e1)`. The tree
//! path from `x` to `y` then has law `Q_{x,y}`. The competition interface is
//! the path that threads between the subtrees rooted at `x + e1` and `x + e2`.

mod cdf;

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;

use crate::coupling::CouplingField;
use crate::csv;
use crate::env::{Site, WeightField, Window, E1, E2};
use crate::error::{Error, Result};
use crate::gibbs::{PolymerPath, TransitionField, TransitionSource};
use crate::partition::{Mode, PartitionTable};

pub use cdf::{cdf_scan_directions, cif_cdf_check, direction_summary, CdfComparison, CdfRow, DirectionSummary};

/// Parent map `γ(y)` evaluated lazily from the coupling uniforms.
#[derive(Clone, Copy)]
pub struct SpanningTree<'a> {
    root: Site,
    backward: &'a TransitionField,
    thetas: CouplingField,
}

/// Tree over the backward transitions of a point-to-point table rooted at its anchor.
pub fn build_tree(backward: &TransitionField, thetas: CouplingField) -> Result<SpanningTree<'_>> {
    let TransitionSource::Backward { anchor } = *backward.source() else {
        return Err(Error::param("spanning trees need backward transitions"));
    };
    Ok(SpanningTree {
        root: anchor,
        backward,
        thetas,
    })
}

impl<'a> SpanningTree<'a> {
    pub fn root(&self) -> Site {
        self.root
    }

    pub fn window(&self) -> &Window {
        self.backward.window()
    }

    /// `γ(y)`; forced on the two rays through the root.
    pub fn parent(&self, y: Site) -> Result<Site> {
        if !(self.root <= y) || y == self.root {
            return Err(Error::Domain {
                site: y,
                anchor: self.root,
                reason: "only sites strictly above the root have parents",
            });
        }
        let p = self.backward.p(y)?;
        Ok(if self.thetas.theta(y) < p { y - E1 } else { y - E2 })
    }

    /// The tree path from the root to `y`.
    pub fn path_to(&self, y: Site) -> Result<PolymerPath> {
        let mut sites = vec![y];
        let mut u = y;
        while u != self.root {
            u = self.parent(u)?;
            sites.push(u);
        }
        sites.reverse();
        PolymerPath::new(sites)
    }

    /// `1` or `2` according to whether the tree path to `y` passes `root + e_i`.
    pub fn subtree(&self, y: Site) -> Result<u8> {
        let mut memo = HashMap::new();
        self.subtree_memo(y, &mut memo)
    }

    fn subtree_memo(&self, y: Site, memo: &mut HashMap<Site, u8>) -> Result<u8> {
        let mut trail = Vec::new();
        let mut u = y;
        let label = loop {
            if u == self.root + E1 {
                break 1;
            }
            if u == self.root + E2 {
                break 2;
            }
            if let Some(&l) = memo.get(&u) {
                break l;
            }
            trail.push(u);
            u = self.parent(u)?;
        };
        for s in trail {
            memo.insert(s, label);
        }
        Ok(label)
    }
}

/// Interface path `φ_0 = root, φ_1, …` and its terminal direction.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceResult {
    pub path: PolymerPath,
}

impl InterfaceResult {
    /// `(φ_n − φ_0)·e1 / n`.
    pub fn direction(&self) -> f64 {
        let d = self.path.end() - self.path.start();
        d.u as f64 / self.path.len().max(1) as f64
    }

    /// Rows `(k, u, v)`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.path.write_csv(path)
    }
}

/// Thread between the subtrees: with `z = φ_k + (1,1)`, step `e1` when
/// `γ(z) = z − e1` and `e2` otherwise.
pub fn competition_interface(tree: &SpanningTree<'_>, steps: usize) -> Result<InterfaceResult> {
    let need = tree.root + Site::new(steps as i64, steps as i64);
    if steps > 0 && !tree.window().contains(need) {
        return Err(Error::Horizon(format!(
            "tree window {} does not reach {need}, needed for {steps} interface steps",
            tree.window()
        )));
    }
    let mut sites = Vec::with_capacity(steps + 1);
    let mut phi = tree.root;
    sites.push(phi);
    for _ in 0..steps {
        let z = phi + E1 + E2;
        phi = if tree.parent(z)? == z - E1 { phi + E1 } else { phi + E2 };
        sites.push(phi);
    }
    Ok(InterfaceResult {
        path: PolymerPath::new(sites)?,
    })
}

/// Steps `k` at which `φ_k + e1` is not in the `e1` subtree or `φ_k + e2` is
/// not in the `e2` subtree.
pub fn separation_violations(tree: &SpanningTree<'_>, result: &InterfaceResult) -> Result<usize> {
    let mut memo = HashMap::new();
    let mut bad = 0;
    for &phi in result.path.sites() {
        let a = tree.subtree_memo(phi + E1, &mut memo)?;
        let b = tree.subtree_memo(phi + E2, &mut memo)?;
        if a != 1 || b != 2 {
            bad += 1;
        }
    }
    Ok(bad)
}

/// `π^cif(y → y+e1) = (e^{−βω_{y+e1}}/Z_{0,y+e1}) / Σ_i e^{−βω_{y+e_i}}/Z_{0,y+e_i}`
/// from a table of `F_{0,·}`.
pub fn interface_transitions(table: &PartitionTable, field: &WeightField) -> Result<TransitionField> {
    if table.mode() != Mode::FromAnchor {
        return Err(Error::param("interface transitions need free energies from the anchor"));
    }
    let root = table.anchor();
    let c = table.window().corner();
    let w = Window::spanning(root, c - E1 - E2)?;
    let beta = table.beta();
    let grid = crate::env::Grid::from_fn(w, |y| {
        let a1 = -field.at(y + E1) - table.at(y + E1);
        let a2 = -field.at(y + E2) - table.at(y + E2);
        if beta.is_infinite() {
            if a1 >= a2 {
                1.0
            } else {
                0.0
            }
        } else {
            1.0 / (1.0 + (beta.value() * (a2 - a1)).exp())
        }
    });
    Ok(TransitionField::from_grid(grid, TransitionSource::Interface { root }))
}

/// Sample the interface directly from its Markov chain.
pub fn interface_chain<R: Rng + ?Sized>(cif: &TransitionField, steps: usize, rng: &mut R) -> Result<InterfaceResult> {
    let TransitionSource::Interface { root } = *cif.source() else {
        return Err(Error::param("interface_chain needs interface transitions"));
    };
    let mut sites = Vec::with_capacity(steps + 1);
    let mut phi = root;
    sites.push(phi);
    for _ in 0..steps {
        let p = cif
            .p(phi)
            .map_err(|_| Error::Horizon(format!("interface left the table window {} at {phi}", cif.window())))?;
        phi = if rng.random::<f64>() < p { phi + E1 } else { phi + E2 };
        sites.push(phi);
    }
    Ok(InterfaceResult {
        path: PolymerPath::new(sites)?,
    })
}

/// Rows `(k, u, v)` for several interfaces, tagged by replica.
pub fn write_interfaces_csv(results: &[InterfaceResult], path: impl AsRef<Path>) -> Result<()> {
    csv::write(
        path,
        &["replica", "k", "u", "v"],
        results.iter().enumerate().flat_map(|(r, res)| {
            res.path
                .sites()
                .iter()
                .map(move |s| vec![r.to_string(), s.level().to_string(), s.u.to_string(), s.v.to_string()])
        }),
    )
}
