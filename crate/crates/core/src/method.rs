use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{granger_matrix_with, mi_matrix_with, te_matrix_with};
use crate::data::{AnalysisConfig, CausalityMatrix, TimeSeriesEnsemble};
use crate::error::{Error, Result};
use crate::lsxgc::lsxgc_matrix_with;
use crate::parallel::Execution;

/// A causality estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lsxgc,
    Gc,
    Te,
    Mi,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lsxgc, Method::Gc, Method::Te, Method::Mi];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lsxgc => "lsxgc",
            Method::Gc => "gc",
            Method::Te => "te",
            Method::Mi => "mi",
        }
    }

    pub fn estimate(self, ens: &TimeSeriesEnsemble, cfg: &AnalysisConfig, exec: Execution) -> Result<CausalityMatrix> {
        match self {
            Method::Lsxgc => lsxgc_matrix_with(ens, cfg, exec),
            Method::Gc => granger_matrix_with(ens, cfg, exec),
            Method::Te => te_matrix_with(ens, cfg, exec),
            Method::Mi => mi_matrix_with(ens, cfg, exec),
        }
    }

    /// Parse a comma-separated list; `all` expands to every method.
    /// Duplicates are dropped, order is preserved.
    pub fn parse_list(list: &str) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let items: Vec<Method> = if part.eq_ignore_ascii_case("all") {
                Method::ALL.to_vec()
            } else {
                vec![part.parse()?]
            };
            for m in items {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidConfig("no methods selected".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?} (expected lsxgc, gc, te, mi or all)")))
    }
}
