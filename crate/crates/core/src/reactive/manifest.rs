use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::graph::read_edge_list;

use super::family::GraphFamily;
use super::kernel::{ConstantKernel, LogisticKernel, TransitionKernel};
use super::ReactiveError;

/// Kernel selection in a family manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    Logistic {
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default = "default_rho0")]
        rho0: f64,
        #[serde(default = "default_towards")]
        towards: usize,
        #[serde(default)]
        stickiness: f64,
    },
    Constant {
        matrix: Vec<Vec<f64>>,
    },
}

fn default_beta() -> f64 {
    LogisticKernel::default().beta
}

fn default_rho0() -> f64 {
    LogisticKernel::default().rho0
}

fn default_towards() -> usize {
    LogisticKernel::default().towards
}

impl KernelSpec {
    pub fn build(&self) -> Result<Box<dyn TransitionKernel>, ReactiveError> {
        Ok(match self {
            KernelSpec::Logistic {
                beta,
                rho0,
                towards,
                stickiness,
            } => Box::new(LogisticKernel::new(*beta, *rho0, *towards, *stickiness)?),
            KernelSpec::Constant { matrix } => Box::new(ConstantKernel::new(matrix.clone())?),
        })
    }
}

/// Edge-list paths of the members plus the kernel, as stored in TOML:
///
/// ```toml
/// members = ["assortative.txt", "disassortative.txt"]
///
/// [kernel]
/// kind = "logistic"
/// beta = 10.0
/// rho0 = 0.2
/// ```
///
/// Relative member paths are resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyManifest {
    pub members: Vec<PathBuf>,
    pub kernel: KernelSpec,
}

impl FamilyManifest {
    pub fn from_toml(text: &str) -> Result<Self, ReactiveError> {
        toml::from_str(text).map_err(|e| ReactiveError::Manifest(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, ReactiveError> {
        toml::to_string(self).map_err(|e| ReactiveError::Manifest(e.to_string()))
    }

    /// Reads the manifest and every member graph.
    pub fn load(path: &Path) -> Result<(Self, GraphFamily, Box<dyn TransitionKernel>), ReactiveError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ReactiveError::Manifest(format!("{}: {e}", path.display())))?;
        let manifest = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let graphs = manifest
            .members
            .iter()
            .map(|m| read_edge_list(base.join(m)))
            .collect::<Result<Vec<_>, _>>()?;
        let family = GraphFamily::from_graphs(graphs)?;
        let kernel = manifest.kernel.build()?;
        if kernel.member_count() != family.len() {
            return Err(ReactiveError::Manifest(format!(
                "kernel expects {} members, manifest lists {}",
                kernel.member_count(),
                family.len()
            )));
        }
        Ok((manifest, family, kernel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let m = FamilyManifest::from_toml("members = [\"a\", \"b\"]\n[kernel]\nkind = \"logistic\"\n").unwrap();
        assert_eq!(
            m.kernel,
            KernelSpec::Logistic {
                beta: 10.0,
                rho0: 0.2,
                towards: 1,
                stickiness: 0.0
            }
        );
        assert_eq!(FamilyManifest::from_toml(&m.to_toml().unwrap()).unwrap(), m);
        assert!(FamilyManifest::from_toml("members = []\n[kernel]\nkind = \"nope\"\n").is_err());
    }

    #[test]
    fn loads_members_relative_to_manifest() {
        let dir = std::env::temp_dir().join(format!("contagion-manifest-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("a.txt"), "0 1\n0 2\n0 3\n1 4\n1 5\n6 7\n").unwrap();
        std::fs::write(dir.join("b.txt"), "0 2\n0 3\n0 4\n1 5\n1 6\n1 7\n").unwrap();
        std::fs::write(
            dir.join("family.toml"),
            "members = [\"a.txt\", \"b.txt\"]\n[kernel]\nkind = \"constant\"\nmatrix = [[0.5, 0.5], [0.5, 0.5]]\n",
        )
        .unwrap();
        let (_, family, kernel) = FamilyManifest::load(&dir.join("family.toml")).unwrap();
        assert_eq!(family.len(), 2);
        assert_eq!(kernel.member_count(), 2);
        std::fs::write(
            dir.join("bad.toml"),
            "members = [\"a.txt\"]\n[kernel]\nkind = \"logistic\"\n",
        )
        .unwrap();
        assert!(FamilyManifest::load(&dir.join("bad.toml")).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
