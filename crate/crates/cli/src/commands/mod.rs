//! Command bodies. Each returns the `results` object of the report plus caveats.

mod channel;
mod measure;
mod rate;
mod simulate;

use asymkit::numkit::herm_eig;
use asymkit::repkit::{GroupPoint, RepPair};
use asymkit::HermMatrix;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::Context;

pub use channel::channel;
pub use measure::measure;
pub use rate::rate;
pub use simulate::{scan_csv, simulate};

pub type Outcome = Result<(Value, Vec<String>)>;

fn eigenvalues(m: &HermMatrix) -> Result<Vec<f64>> {
    Ok(herm_eig(m).map_err(|e| Error::core("eigendecomposition", e))?.0.iter().copied().collect())
}

/// `--component` as a group point, checked against the pair.
fn component_point(cx: &Context, pair: &RepPair<f64>) -> Result<GroupPoint<f64>> {
    let c = cx.opts.component.unwrap_or(0);
    if c >= pair.n_components() {
        return Err(Error::Validation(format!("--component {c} out of range ({} components)", pair.n_components())));
    }
    Ok(GroupPoint::component(pair.dim_g(), c))
}
