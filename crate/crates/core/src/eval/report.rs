use serde::{Deserialize, Serialize};

use super::metrics::{depth_indicator, layout_indicator, MetricsReport};

/// Flat evaluation report. Absent values serialize as `null`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub abs_rel: Option<f64>,
    pub sq_rel: Option<f64>,
    pub rmse: Option<f64>,
    pub rmsle: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub delta3: Option<f64>,
    pub i_d: Option<f64>,
    pub rmse_top: Option<f64>,
    pub rmse_bottom: Option<f64>,
    pub i_l: Option<f64>,
    pub pcc: Option<f64>,
}

impl EvalReport {
    pub fn with_depth(mut self, m: &MetricsReport) -> Self {
        self.abs_rel = Some(m.abs_rel);
        self.sq_rel = Some(m.sq_rel);
        self.rmse = Some(m.rmse);
        self.rmsle = Some(m.rmsle);
        self.delta1 = Some(m.delta1);
        self.delta2 = Some(m.delta2);
        self.delta3 = Some(m.delta3);
        self.i_d = Some(depth_indicator(m.delta1, m.rmse));
        self
    }

    pub fn with_layout(mut self, rmse_top: f64, rmse_bottom: f64) -> Self {
        self.rmse_top = Some(rmse_top);
        self.rmse_bottom = Some(rmse_bottom);
        self.i_l = Some(layout_indicator(rmse_top, rmse_bottom));
        self
    }

    pub fn with_pcc(mut self, pcc: f64) -> Self {
        self.pcc = Some(pcc);
        self
    }

    fn entries(&self) -> [(&'static str, Option<f64>); 12] {
        [
            ("abs_rel", self.abs_rel),
            ("sq_rel", self.sq_rel),
            ("rmse", self.rmse),
            ("rmsle", self.rmsle),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("delta3", self.delta3),
            ("i_d", self.i_d),
            ("rmse_top", self.rmse_top),
            ("rmse_bottom", self.rmse_bottom),
            ("i_l", self.i_l),
            ("pcc", self.pcc),
        ]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are plain numbers")
    }

    /// One `key=value` line per field.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            match v {
                Some(x) if x.is_finite() => out.push_str(&format!("{k}={x}\n")),
                _ => out.push_str(&format!("{k}=null\n")),
            }
        }
        out
    }
}
