import type { ArtifactEntry, ConfigDocument, DatasetSchema, JobView } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string, public detail?: unknown) {
    super(message);
  }
}

async function asError(response: Response): Promise<ApiError> {
  let detail: unknown;
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    detail = body.detail ?? body;
    message = typeof body.detail === "string" ? body.detail : message;
  } catch {
    /* non-JSON error body */
  }
  return new ApiError(response.status, message, detail);
}

export class ApiClient {
  constructor(private base: string = "") {}

  async uploadDataset(content: Blob | string): Promise<string> {
    const response = await fetch(`${this.base}/api/datasets`, { method: "POST", body: content });
    if (!response.ok) throw await asError(response);
    return (await response.json()).dataset_ref;
  }

  async schema(ref: string): Promise<DatasetSchema> {
    const response = await fetch(`${this.base}/api/datasets/${ref}/schema`);
    if (!response.ok) throw await asError(response);
    return response.json();
  }

  async submitJob(config: ConfigDocument): Promise<string> {
    const response = await fetch(`${this.base}/api/jobs`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(config),
    });
    if (!response.ok) throw await asError(response);
    return (await response.json()).job_id;
  }

  async jobStatus(jobId: string): Promise<JobView> {
    const response = await fetch(`${this.base}/api/jobs/${jobId}`);
    if (!response.ok) throw await asError(response);
    return response.json();
  }

  async artifacts(jobId: string): Promise<ArtifactEntry[]> {
    const response = await fetch(`${this.base}/api/jobs/${jobId}/artifacts`);
    if (!response.ok) throw await asError(response);
    return (await response.json()).artifacts;
  }

  artifactUrl(jobId: string, name: string): string {
    return `${this.base}/api/jobs/${jobId}/artifacts/${name}`;
  }

  async artifactText(jobId: string, name: string): Promise<string> {
    const response = await fetch(this.artifactUrl(jobId, name));
    if (!response.ok) throw await asError(response);
    return response.text();
  }

  async parameterDocs(): Promise<Record<string, string>> {
    const response = await fetch(`${this.base}/api/parameter-docs`);
    if (!response.ok) throw await asError(response);
    return response.json();
  }
}
