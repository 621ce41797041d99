/** Section defaults, kept field-for-field equal to the CLI defaults. */

export const DEFAULT_MISSING_MARKERS = ["", "NA", "NaN", "nan"];

export const DEFAULTS = {
  test_frac: 0.2,
  val_frac: 0.2,
  sessions: 4,
  seed: 42,
  user_train_frac: 0.5,
  fit: true,
  adapt: false,
  stratify: false,
} as const;

export const TASKS = ["classification", "regression"] as const;

export const CLASSIFICATION_FAMILIES = [
  "gaussian_nb",
  "sgd_classifier",
  "knn_classifier",
  "decision_tree",
];

export const REGRESSION_FAMILIES = ["sgd_regressor", "knn_regressor"];

export const CLASSIFICATION_CRITERIA = ["macro_f1", "accuracy"];
export const REGRESSION_CRITERIA = ["rmse", "mae", "r2"];

export const IMPUTE_POLICIES = ["mean", "median", "most_frequent", "constant"];
