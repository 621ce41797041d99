/** Form state and its translation into the config document the service accepts.
 *
 * The UI never computes metrics or models anything; this module only maps
 * widget values onto the same document the CLI would produce for equivalent
 * flags, with identical defaults.
 */

import { DEFAULT_MISSING_MARKERS, DEFAULTS, TASKS } from "./defaults.js";
import type { ConfigDocument } from "./types.js";

export interface FormState {
  datasetRef: string | null;
  labelColumn: string;
  personColumn: string;
  task: string;
  // data preprocessing section
  impute: string; // "" = off; policy name; "constant" uses imputeConstant
  imputeConstant: string;
  testSize: number;
  valSize: number;
  normalize: string; // "" = grid both, "on", "off"
  stratify: boolean;
  missingMarkers: string; // comma text; "" = defaults
  // feature engineering section
  featureMode: string; // "" | "selection" | "extraction"
  selectionMethod: string; // "variance" | "top_k"
  selectionValue: string;
  extractionK: string; // "" = auto
  exportFeatures: string; // "" | "csv" | "bundle"
  // classifiers and regressors section
  families: string[]; // [] = all task-compatible
  criterion: string; // "" = task default
  fit: boolean;
  predictPath: string | null;
  partialFitPath: string | null;
  sessions: number;
  adapt: boolean;
  userTrainFrac: number;
  modelPaths: string[];
  seed: number;
}

export function emptyForm(): FormState {
  return {
    datasetRef: null,
    labelColumn: "",
    personColumn: "",
    task: "",
    impute: "",
    imputeConstant: "",
    testSize: DEFAULTS.test_frac,
    valSize: DEFAULTS.val_frac,
    normalize: "",
    stratify: DEFAULTS.stratify,
    missingMarkers: "",
    featureMode: "",
    selectionMethod: "variance",
    selectionValue: "0.0",
    extractionK: "",
    exportFeatures: "",
    families: [],
    criterion: "",
    fit: DEFAULTS.fit,
    predictPath: null,
    partialFitPath: null,
    sessions: DEFAULTS.sessions,
    adapt: DEFAULTS.adapt,
    userTrainFrac: DEFAULTS.user_train_frac,
    modelPaths: [],
    seed: DEFAULTS.seed,
  };
}

export function mandatoryComplete(form: FormState): boolean {
  return Boolean(form.datasetRef && form.labelColumn && form.personColumn && form.task);
}

export function validateForm(form: FormState): Record<string, string> {
  const errors: Record<string, string> = {};
  if (!form.datasetRef) errors.dataset = "upload a dataset first";
  if (!form.labelColumn) errors.labelColumn = "labels column required";
  if (!form.personColumn) errors.personColumn = "personalization column required";
  if (!form.task) errors.task = "task required";
  else if (!TASKS.includes(form.task as (typeof TASKS)[number])) errors.task = "unknown task";
  if (form.labelColumn && form.labelColumn === form.personColumn) {
    errors.personColumn = "personalization column must differ from the labels column";
  }
  for (const [field, value] of [
    ["testSize", form.testSize],
    ["valSize", form.valSize],
    ["userTrainFrac", form.userTrainFrac],
  ] as const) {
    if (!(value >= 0 && value < 1)) errors[field] = "must lie in [0, 1)";
  }
  if (!(form.sessions >= 1)) errors.sessions = "must be at least 1";
  if (form.featureMode === "extraction" && form.extractionK !== "") {
    const k = Number(form.extractionK);
    if (!Number.isInteger(k) || k < 1) errors.extractionK = "component count must be a positive integer";
  }
  if (form.featureMode === "selection" && form.selectionMethod === "top_k") {
    const k = Number(form.selectionValue);
    if (!Number.isInteger(k) || k < 1) errors.selectionValue = "top_k needs a positive integer";
  }
  if (form.impute === "constant" && form.imputeConstant === "") {
    errors.imputeConstant = "constant imputation needs a value";
  }
  const needsModel = Boolean(form.predictPath || form.partialFitPath || form.adapt);
  if (needsModel && !form.fit && form.modelPaths.length === 0) {
    errors.fit = "predict, partial fit or adaptation without fitting requires a loaded model";
  }
  return errors;
}

export function canRun(form: FormState): boolean {
  return mandatoryComplete(form) && Object.keys(validateForm(form)).length === 0;
}

/** Build the config document; equals parse_cli output for equivalent flags. */
export function buildConfig(form: FormState): ConfigDocument {
  let impute: string | null = null;
  if (form.impute === "constant") impute = `constant:${form.imputeConstant}`;
  else if (form.impute !== "") impute = form.impute;

  let extraction: number | string | null = null;
  let selection: string | null = null;
  if (form.featureMode === "extraction") {
    extraction = form.extractionK === "" ? "auto" : Number(form.extractionK);
  } else if (form.featureMode === "selection") {
    selection = `${form.selectionMethod}:${form.selectionValue}`;
  }

  return {
    data_path: form.datasetRef ?? "",
    label_column: form.labelColumn,
    personalization_column: form.personColumn,
    task: form.task,
    impute,
    test_frac: form.testSize,
    val_frac: form.valSize,
    normalize: form.normalize === "" ? null : form.normalize,
    feature_extraction: extraction,
    feature_selection: selection,
    families: form.families.length ? [...form.families] : null,
    criterion: form.criterion === "" ? null : form.criterion,
    fit: form.fit,
    predict_path: form.predictPath,
    partial_fit_path: form.partialFitPath,
    sessions: form.sessions,
    adapt: form.adapt,
    model_paths: [...form.modelPaths],
    out_dir: null,
    seed: form.seed,
    export_features: form.exportFeatures === "" ? null : form.exportFeatures,
    stratify: form.stratify,
    missing_markers:
      form.missingMarkers === "" ? [...DEFAULT_MISSING_MARKERS] : form.missingMarkers.split(","),
    user_train_frac: form.userTrainFrac,
  };
}
