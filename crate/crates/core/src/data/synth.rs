use serde::{Deserialize, Serialize};

use super::Dataset;

/// The four probe sets for the line-pattern experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyntheticFamily {
    A,
    B,
    C,
    S4,
}

impl SyntheticFamily {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "A" | "a" => Some(SyntheticFamily::A),
            "B" | "b" => Some(SyntheticFamily::B),
            "C" | "c" => Some(SyntheticFamily::C),
            "S4" | "s4" => Some(SyntheticFamily::S4),
            _ => None,
        }
    }
}

/// Exact point lists; every point gets its own label x1, x2, ...
pub fn generate_synthetic(family: SyntheticFamily) -> Dataset {
    // Written as (integer)/(integer) so decimal fractions round once.
    let rows: Vec<Vec<f64>> = match family {
        SyntheticFamily::A => (1..=9)
            .map(|k| (0..8).map(|j| if j % 2 == 0 { (10 - k) as f64 / 10.0 } else { k as f64 / 10.0 }).collect())
            .collect(),
        SyntheticFamily::B => (1..=9).map(|k| vec![k as f64 / 10.0; 4]).collect(),
        SyntheticFamily::C => (1..=9)
            .map(|k| {
                let (a, b) = (k as f64 / 10.0, (10 - k) as f64 / 10.0);
                vec![a, b, a, b]
            })
            .collect(),
        SyntheticFamily::S4 => (1..=7)
            .map(|k| {
                let (a, b) = (k as f64 / 8.0, (8 - k) as f64 / 8.0);
                vec![a, a, b, b]
            })
            .collect(),
    };
    let n = rows[0].len();
    let labels = (1..=rows.len()).map(|k| format!("x{k}")).collect();
    Dataset::new((1..=n).map(|i| format!("X{i}")).collect(), rows, labels).expect("fixed shapes")
}
