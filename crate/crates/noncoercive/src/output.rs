//! CSV artifacts. Floats carry 17 significant digits so that every value
//! parses back to the same `f64`; files are written to a temporary sibling
//! and renamed into place.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use noncoercive_core::basis::EigenBasis;
use noncoercive_core::galerkin::GalerkinTrajectory;
use noncoercive_core::linalg::CsrMatrix;
use noncoercive_core::mesh::{FacetTag, Mesh};
use noncoercive_core::sharpness::SharpnessSeries;
use noncoercive_core::Complex64;

/// Modes listed individually in `trajectory.csv`.
pub const TRAJECTORY_MODES: usize = 16;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `header` and `rows` to `path` through a temporary file.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> io::Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let result = (|| -> csv::Result<()> {
        let mut w = csv::Writer::from_path(&tmp)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io::Error::other(e));
    }
    fs::rename(&tmp, path)
}

/// Ordered `quantity,value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn float(&mut self, key: &str, v: f64) -> &mut Self {
        self.entries.push((key.into(), fmt_f64(v)));
        self
    }

    pub fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.entries.push((key.into(), v.to_string()));
        self
    }

    pub fn count(&mut self, key: &str, v: usize) -> &mut Self {
        self.entries.push((key.into(), v.to_string()));
        self
    }

    pub fn text(&mut self, key: &str, v: &str) -> &mut Self {
        self.entries.push((key.into(), v.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        write_csv(path, &["quantity", "value"], self.entries.iter().map(|(k, v)| vec![k.clone(), v.clone()]))
    }
}

pub fn write_trajectory(path: &Path, traj: &GalerkinTrajectory) -> io::Result<()> {
    let modes = traj.basis_size().min(TRAJECTORY_MODES);
    let names: Vec<String> = (1..=modes).map(|j| format!("abs_g{j}")).collect();
    let mut header = vec!["t", "norm_plus_sq", "norm_l2_sq", "dual_f_sq"];
    header.extend(names.iter().map(String::as_str));
    let rows = (0..traj.times.len()).map(|m| {
        let mut row = vec![
            fmt_f64(traj.times[m]),
            fmt_f64(traj.norm_plus_sq[m]),
            fmt_f64(traj.norm_l2_sq[m]),
            fmt_f64(traj.dual_f_sq[m]),
        ];
        row.extend(traj.coefficients[m][..modes].iter().map(|g| fmt_f64(g.norm())));
        row
    });
    write_csv(path, &header, rows)
}

pub fn write_nodal(path: &Path, values: &[Complex64]) -> io::Result<()> {
    let rows = values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), fmt_f64(v.re), fmt_f64(v.im)]);
    write_csv(path, &["node", "re", "im"], rows)
}

pub fn write_eigenvalues(path: &Path, basis: &EigenBasis) -> io::Result<()> {
    let rows = (0..basis.len()).map(|j| {
        vec![
            (j + 1).to_string(),
            fmt_f64(basis.eigenvalues[j]),
            fmt_f64(basis.mass_norms[j]),
        ]
    });
    write_csv(path, &["j", "lambda", "mass_norm"], rows)
}

/// Basis vectors over the free degrees of freedom in coordinate format.
pub fn write_eigenvectors(path: &Path, basis: &EigenBasis) -> io::Result<()> {
    let v = &basis.vectors;
    let rows = (0..v.rows()).flat_map(|i| {
        (0..v.cols()).map(move |j| {
            let z = v[(i, j)];
            vec![i.to_string(), j.to_string(), fmt_f64(z.re), fmt_f64(z.im)]
        })
    });
    write_csv(path, &["row", "col", "re", "im"], rows)
}

pub fn write_matrix(path: &Path, m: &CsrMatrix<Complex64>) -> io::Result<()> {
    let rows = m
        .triplets()
        .map(|(i, j, z)| vec![i.to_string(), j.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
    write_csv(path, &["row", "col", "re", "im"], rows)
}

pub fn write_real_matrix(path: &Path, m: &CsrMatrix<f64>) -> io::Result<()> {
    let rows = m
        .triplets()
        .map(|(i, j, v)| vec![i.to_string(), j.to_string(), fmt_f64(v), fmt_f64(0.0)]);
    write_csv(path, &["row", "col", "re", "im"], rows)
}

/// `nodes.csv`, `elements.csv` and `facets.csv` in `dir`.
pub fn write_mesh(dir: &Path, mesh: &Mesh) -> io::Result<()> {
    let planar = mesh.dim == 2;
    let node_header: &[&str] = if planar { &["id", "x", "y"] } else { &["id", "x"] };
    write_csv(
        &dir.join("nodes.csv"),
        node_header,
        mesh.nodes.iter().enumerate().map(|(i, p)| {
            let mut row = vec![i.to_string(), fmt_f64(p[0])];
            if planar {
                row.push(fmt_f64(p[1]));
            }
            row
        }),
    )?;
    let elem_header: &[&str] = if planar { &["id", "n0", "n1", "n2"] } else { &["id", "n0", "n1"] };
    write_csv(
        &dir.join("elements.csv"),
        elem_header,
        mesh.cells.iter().enumerate().map(|(i, c)| {
            let mut row = vec![i.to_string()];
            row.extend(c.nodes().iter().map(usize::to_string));
            row
        }),
    )?;
    let facet_header: &[&str] = if planar { &["id", "n0", "n1", "tag"] } else { &["id", "n0", "tag"] };
    write_csv(
        &dir.join("facets.csv"),
        facet_header,
        mesh.facets.iter().enumerate().map(|(i, f)| {
            let mut row = vec![i.to_string()];
            row.extend(f.nodes().iter().map(usize::to_string));
            row.push(
                match f.tag {
                    FacetTag::Dirichlet => "dirichlet",
                    FacetTag::Robin => "robin",
                }
                .into(),
            );
            row
        }),
    )
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub dt: f64,
    pub error: f64,
    /// `None` on the coarsest level.
    pub order: Option<f64>,
}

pub fn write_convergence(path: &Path, rows: &[ConvergenceRow]) -> io::Result<()> {
    let rows = rows.iter().map(|r| {
        vec![
            r.level.to_string(),
            fmt_f64(r.h),
            fmt_f64(r.dt),
            fmt_f64(r.error),
            r.order.map(fmt_f64).unwrap_or_default(),
        ]
    });
    write_csv(path, &["level", "h", "dt", "error", "order"], rows)
}

/// `partial_B` is left empty and the verdict is `n/a` when no `s` was given.
pub fn write_sharpness(path: &Path, series: &SharpnessSeries, with_b: bool) -> io::Result<()> {
    let rows = series.rows.iter().map(|r| {
        vec![
            r.terms.to_string(),
            fmt_f64(r.partial_a),
            fmt_f64(r.tail_a),
            if with_b { fmt_f64(r.partial_b) } else { String::new() },
            if with_b { r.verdict.as_str().into() } else { "n/a".into() },
        ]
    });
    write_csv(path, &["N", "partial_A", "tail_A", "partial_B", "verdict"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        write_csv(&path, &["a", "b"], vec![vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn report_lookup() {
        let mut r = Report::new();
        r.float("x", 0.5).flag("ok", true).count("n", 3).text("name", "heat");
        assert_eq!(r.get("ok"), Some("true"));
        assert_eq!(r.get("x").unwrap().parse::<f64>().unwrap(), 0.5);
        assert_eq!(r.entries().len(), 4);
    }
}
