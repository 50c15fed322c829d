//! File formats, parallel evaluation and the `fcfs-match` command line for
//! directed FCFS bipartite matching models. The computations themselves
//! live in [`fcfs_match_core`].

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod model_file;
pub mod number;
pub mod parallel;
pub mod report;
pub mod table;

pub use commands::execute;
pub use config::{Command, Format, RhoGrid, RunConfig};
pub use error::CliError;
pub use model_file::{model_to_json, parse_model, read_model, ModelFile};

#[cfg(test)]
pub(crate) mod testing {
    use fcfs_match_core::{MatchingModel, ModelSpec};

    fn model(
        agents: &[(&str, f64)],
        goods: &[(&str, f64)],
        edges: &[(&str, &str)],
        lambda_bar: f64,
    ) -> MatchingModel {
        let owned = |v: &[(&str, f64)]| v.iter().map(|(n, x)| (n.to_string(), *x)).collect();
        MatchingModel::new(ModelSpec {
            agents: owned(agents),
            goods: owned(goods),
            edges: edges
                .iter()
                .map(|(g, a)| (g.to_string(), a.to_string()))
                .collect(),
            lambda_bar,
            mu_bar: 1.0,
        })
        .unwrap()
    }

    pub fn three_by_three() -> MatchingModel {
        model(
            &[("c1", 0.3), ("c2", 0.5), ("c3", 0.2)],
            &[("s1", 0.3), ("s2", 0.3), ("s3", 0.4)],
            &[
                ("s1", "c1"),
                ("s1", "c2"),
                ("s2", "c1"),
                ("s2", "c3"),
                ("s3", "c2"),
                ("s3", "c3"),
            ],
            0.7,
        )
    }

    pub fn disjoint_pairs() -> MatchingModel {
        model(
            &[("c1", 0.5), ("c2", 0.5)],
            &[("s1", 0.4), ("s2", 0.6)],
            &[("s1", "c1"), ("s2", "c2")],
            0.7,
        )
    }
}
