export interface SchemaColumn {
  name: string;
  kind: "numeric" | "categorical";
}

export interface DatasetSchema {
  dataset_ref: string;
  columns: SchemaColumn[];
  n_rows: number;
}

export interface JobProgress {
  stage: string | null;
  candidates_done: number | null;
  candidates_total: number | null;
}

export type JobState = "queued" | "running" | "succeeded" | "failed";

export interface JobView {
  job_id: string;
  state: JobState;
  progress: JobProgress;
  error: string | null;
  artifacts: string[];
}

export interface ArtifactEntry {
  name: string;
  size: number;
  content_type: string;
}

/** Pipeline configuration document; field names match the service contract. */
export interface ConfigDocument {
  data_path: string;
  label_column: string;
  personalization_column: string;
  task: string;
  impute: string | null;
  test_frac: number;
  val_frac: number;
  normalize: string | null;
  feature_extraction: number | string | null;
  feature_selection: string | null;
  families: string[] | null;
  criterion: string | null;
  fit: boolean;
  predict_path: string | null;
  partial_fit_path: string | null;
  sessions: number;
  adapt: boolean;
  model_paths: string[];
  out_dir: string | null;
  seed: number;
  export_features: string | null;
  stratify: boolean;
  missing_markers: string[];
  user_train_frac: number;
}
