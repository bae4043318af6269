//! Mesh JSON: `{"vertices":[[x,y,z,w],...],"triangles":[[i,j,k],...],"fields":{"Asq":[...]}}`.

use std::collections::BTreeMap;
use std::path::Path;

use mhs_core::fem::SurfaceMesh;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: Vec<[f64; 4]>,
    pub triangles: Vec<[usize; 3]>,
    #[serde(default)]
    pub fields: BTreeMap<String, Vec<f64>>,
}

impl MeshFile {
    pub fn from_mesh(mesh: &SurfaceMesh) -> Self {
        let mut fields = BTreeMap::new();
        fields.insert("Asq".to_string(), mesh.vertex_asq.clone());
        MeshFile {
            vertices: mesh.vertices.clone(),
            triangles: mesh.triangles.clone(),
            fields,
        }
    }

    /// Normals are reconstructed per triangle; `Asq` is required.
    pub fn into_mesh(self) -> CliResult<SurfaceMesh> {
        let MeshFile {
            vertices,
            triangles,
            mut fields,
        } = self;
        let asq = fields.remove("Asq").ok_or_else(|| {
            CliError::Validation("mesh file lacks the per-vertex \"Asq\" field".into())
        })?;
        Ok(SurfaceMesh::from_data(vertices, triangles, asq)?)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}
