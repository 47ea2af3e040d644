//! JSON description of a weight function:
//! `{"family": "power_exp"|"bell"|"stretched"|"bell_dual"|"custom_table", "params": {...}, "r_max": 1e6}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{LogTable, WeightFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct WeightConfig {
    pub family: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub r_max: Option<f64>,
    #[serde(default)]
    pub name: Option<String>,
}

fn number(params: &Value, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Config(format!("missing numeric parameter `{key}`")))
}

fn order(params: &Value) -> Result<u32> {
    let k = params
        .get("order")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Config("missing integer parameter `order`".into()))?;
    u32::try_from(k).map_err(|_| Error::Config(format!("order {k} too large")))
}

impl WeightConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Build the weight function. Tables come either inline as
    /// `params.points = [[r, log_u], ...]` or as text in `params.text`.
    pub fn build(&self) -> Result<WeightFunction> {
        let p = &self.params;
        let mut u = match self.family.as_str() {
            "power_exp" => WeightFunction::power_exp(number(p, "beta")?)?,
            "bell" => WeightFunction::bell(order(p)?)?,
            "stretched" => WeightFunction::stretched(number(p, "coef")?, number(p, "power")?)?,
            "bell_dual" => WeightFunction::bell_dual_asymptotic(order(p)?)?,
            "custom_table" => {
                let table = if let Some(points) = p.get("points").and_then(Value::as_array) {
                    let mut rows = Vec::with_capacity(points.len().min(super::MAX_TABLE_POINTS));
                    for row in points {
                        let pair = row
                            .as_array()
                            .filter(|a| a.len() == 2)
                            .and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)))
                            .ok_or_else(|| Error::Config("table rows must be [r, log_u] pairs".into()))?;
                        rows.push(pair);
                    }
                    LogTable::new(rows)?
                } else if let Some(text) = p.get("text").and_then(Value::as_str) {
                    LogTable::parse_text(text)?
                } else {
                    return Err(Error::Config("custom_table needs `points` or `text`".into()));
                };
                WeightFunction::from_table("custom_table", table)
            }
            other => return Err(Error::Config(format!("unknown family `{other}`"))),
        };
        if let Some(r_max) = self.r_max {
            u = u.with_r_max(r_max)?;
        }
        if let Some(name) = &self.name {
            u = u.with_name(name.clone());
        }
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_catalog_entries() {
        let c = WeightConfig::from_json_str(r#"{"family":"power_exp","params":{"beta":0.5},"r_max":1e6}"#).unwrap();
        let u = c.build().unwrap();
        assert_eq!(u.r_max(), 1e6);
        assert!((u.log_eval(8.0).unwrap() - 6.0).abs() < 1e-14);

        let c = WeightConfig::from_json_str(r#"{"family":"bell","params":{"order":2}}"#).unwrap();
        assert_eq!(c.build().unwrap().name(), "u_2");
    }

    #[test]
    fn parses_inline_table() {
        let c = WeightConfig::from_json_str(
            r#"{"family":"custom_table","params":{"points":[[0,0],[1,1],[10,10]]}}"#,
        )
        .unwrap();
        let u = c.build().unwrap();
        assert!(u.is_increasing());
        assert_eq!(u.log_eval(1.0).unwrap(), 1.0);
    }

    #[test]
    fn reports_config_errors() {
        for bad in [
            r#"{"family":"nope"}"#,
            r#"{"family":"power_exp","params":{}}"#,
            r#"{"family":"bell","params":{"order":-1}}"#,
            r#"{"family":"custom_table","params":{"points":[[1]]}}"#,
            r#"{"family":"power_exp","params":{"beta":0.1},"r_max":-3}"#,
            "not json",
        ] {
            let res = WeightConfig::from_json_str(bad).and_then(|c| c.build());
            assert!(matches!(res, Err(Error::Config(_))), "{bad}");
        }
    }
}
