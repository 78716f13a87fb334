//! Published hyperparameters per (family, inputs, target).

use super::model::{EnsembleConfig, ModelFamily};
use crate::dataset::{FeatureEntry, FeatureSpec, Field};
use crate::error::{Error, Result};

/// Input sets that have preset hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputSet {
    PowerVelocity,
    PowerVelocityLogVelocity,
    Dims,
    LogDims,
}

impl InputSet {
    pub const ALL: [InputSet; 4] =
        [InputSet::PowerVelocity, InputSet::PowerVelocityLogVelocity, InputSet::Dims, InputSet::LogDims];

    pub fn spec(self) -> FeatureSpec {
        use FeatureEntry as E;
        use Field::*;
        let entries = match self {
            InputSet::PowerVelocity => vec![E::identity(Power), E::identity(Velocity)],
            InputSet::PowerVelocityLogVelocity => {
                vec![E::identity(Power), E::identity(Velocity), E::log(Velocity)]
            }
            InputSet::Dims => vec![E::identity(Length), E::identity(Width), E::identity(Depth)],
            InputSet::LogDims => vec![
                E::log(Length),
                E::identity(Width),
                E::identity(Depth),
                E::log(Width),
                E::log(Depth),
            ],
        };
        FeatureSpec::new(entries).expect("preset input sets are valid")
    }

    /// The preset input set with exactly this feature list, if any.
    pub fn matching(spec: &FeatureSpec) -> Option<InputSet> {
        InputSet::ALL.into_iter().find(|s| s.spec() == *spec)
    }
}

/// `(family, inputs, target, n_estimators, max_depth, n_neighbors, learning_rate)`.
/// A gradient-boosting row with no learning rate uses the default.
type Row = (ModelFamily, InputSet, Field, usize, usize, usize, Option<f64>);

const ROWS: &[Row] = {
    use Field::*;
    use InputSet::*;
    use ModelFamily::*;
    &[
        (RandomForest, PowerVelocity, Length, 5, 8, 0, None),
        (ExtraTrees, PowerVelocity, Length, 5, 7, 0, None),
        (Bagging, PowerVelocity, Length, 3, 7, 0, None),
        (Knn, PowerVelocity, Length, 0, 0, 2, None),
        (GradientBoost, PowerVelocity, Length, 70, 6, 0, Some(0.1)),
        (RandomForest, PowerVelocity, Width, 6, 7, 0, None),
        (ExtraTrees, PowerVelocity, Width, 8, 8, 0, None),
        (Bagging, PowerVelocity, Width, 5, 7, 0, None),
        (Knn, PowerVelocity, Width, 0, 0, 3, None),
        (GradientBoost, PowerVelocity, Width, 80, 4, 0, Some(0.1)),
        (RandomForest, PowerVelocity, Depth, 8, 6, 0, None),
        (ExtraTrees, PowerVelocity, Depth, 5, 7, 0, None),
        (Bagging, PowerVelocity, Depth, 3, 7, 0, None),
        (Knn, PowerVelocity, Depth, 0, 0, 4, None),
        (GradientBoost, PowerVelocity, Depth, 80, 5, 0, Some(0.1)),
        (RandomForest, PowerVelocity, CrossSection, 8, 6, 0, None),
        (ExtraTrees, PowerVelocity, CrossSection, 11, 8, 0, None),
        (Bagging, PowerVelocity, CrossSection, 4, 7, 0, None),
        (Knn, PowerVelocity, CrossSection, 0, 0, 3, None),
        (GradientBoost, PowerVelocity, CrossSection, 4, 9, 0, None),
        (RandomForest, PowerVelocity, Volume, 8, 9, 0, None),
        (ExtraTrees, PowerVelocity, Volume, 11, 8, 0, None),
        (Bagging, PowerVelocity, Volume, 4, 9, 0, None),
        (Knn, PowerVelocity, Volume, 0, 0, 4, None),
        (GradientBoost, PowerVelocity, Volume, 4, 9, 0, None),
        (RandomForest, PowerVelocity, Spatter, 6, 5, 0, None),
        (ExtraTrees, PowerVelocity, Spatter, 10, 6, 0, None),
        (Bagging, PowerVelocity, Spatter, 6, 4, 0, None),
        (Knn, PowerVelocity, Spatter, 0, 0, 5, None),
        (GradientBoost, PowerVelocity, Spatter, 23, 4, 0, Some(0.1)),
        (RandomForest, PowerVelocityLogVelocity, Spatter, 12, 4, 0, None),
        (ExtraTrees, PowerVelocityLogVelocity, Spatter, 2, 6, 0, None),
        (Bagging, PowerVelocityLogVelocity, Spatter, 4, 7, 0, None),
        (Knn, PowerVelocityLogVelocity, Spatter, 0, 0, 5, None),
        (GradientBoost, PowerVelocityLogVelocity, Spatter, 21, 4, 0, None),
        (RandomForest, Dims, Spatter, 6, 4, 0, None),
        (ExtraTrees, Dims, Spatter, 30, 6, 0, None),
        (Bagging, Dims, Spatter, 70, 4, 0, None),
        (Knn, Dims, Spatter, 0, 0, 9, None),
        (GradientBoost, Dims, Spatter, 35, 2, 0, Some(0.1)),
        (RandomForest, LogDims, Spatter, 6, 4, 0, None),
        (ExtraTrees, LogDims, Spatter, 100, 7, 0, None),
        (Bagging, LogDims, Spatter, 7, 5, 0, None),
        (Knn, LogDims, Spatter, 0, 0, 8, None),
        (GradientBoost, LogDims, Spatter, 35, 3, 0, None),
    ]
};

fn to_config(row: &Row) -> EnsembleConfig {
    let &(family, _, _, n_est, depth, k, lr) = row;
    match family {
        ModelFamily::Knn => EnsembleConfig::knn(k),
        ModelFamily::GradientBoost => {
            let c = EnsembleConfig::trees(family, n_est, depth);
            match lr {
                Some(lr) => c.with_learning_rate(lr),
                None => c,
            }
        }
        _ => EnsembleConfig::trees(family, n_est, depth),
    }
}

/// Every preset as `(inputs, target, config)`.
pub fn presets() -> Vec<(InputSet, Field, EnsembleConfig)> {
    ROWS.iter().map(|r| (r.1, r.2, to_config(r))).collect()
}

/// Preset hyperparameters for this family, input list and target.
pub fn preset(family: ModelFamily, inputs: &FeatureSpec, target: Field) -> Result<EnsembleConfig> {
    let set = InputSet::matching(inputs)
        .ok_or_else(|| Error::contract(format!("no preset hyperparameters for inputs [{inputs}]")))?;
    ROWS.iter()
        .find(|r| r.0 == family && r.1 == set && r.2 == target)
        .map(to_config)
        .ok_or_else(|| {
            Error::contract(format!("no preset hyperparameters for {family} [{inputs}] -> {}", target.key()))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_is_valid_and_unique() {
        let all = presets();
        assert_eq!(all.len(), 45);
        for (i, (set, target, cfg)) in all.iter().enumerate() {
            cfg.validate().unwrap();
            let dupes = all.iter().filter(|(s, t, c)| s == set && t == target && c.family == cfg.family).count();
            assert_eq!(dupes, 1, "row {i}");
        }
    }

    #[test]
    fn lookup() {
        let dims = FeatureSpec::parse_list("Length,Width,Depth").unwrap();
        let gb = preset(ModelFamily::GradientBoost, &dims, Field::Spatter).unwrap();
        assert_eq!((gb.n_estimators, gb.max_depth, gb.learning_rate), (Some(35), Some(2), Some(0.1)));
        let rf = preset(ModelFamily::RandomForest, &FeatureSpec::power_velocity(), Field::Spatter).unwrap();
        assert_eq!((rf.n_estimators, rf.max_depth), (Some(6), Some(5)));
        assert!(preset(ModelFamily::Knn, &dims, Field::Depth).is_err());
    }
}
