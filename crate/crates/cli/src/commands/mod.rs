//! The built-in commands.

mod catalog;
mod curvature;
mod flow;
mod structure;
mod su3;
mod torsion;

pub use catalog::Catalog;
pub use curvature::{Einstein, Ricci, Soliton};
pub use flow::{Flow, Oracle};
pub use structure::{Check, MetricCmd};
pub use su3::Su3;
pub use torsion::{Classify, Torsion};

use g2_core::g2::G2Class;
use serde_json::{json, Value};

fn class_json(class: &G2Class) -> Value {
    let [t0, t1, t2, t3] = class.vanishing;
    json!({
        "label": class.label.as_str(),
        "labels": class.labels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
        "vanishing": { "tau0": t0, "tau1": t1, "tau2": t2, "tau3": t3 },
    })
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}
