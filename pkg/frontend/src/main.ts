import { ApiClient } from "./api.js";
import { buildConfig, type FormState } from "./config.js";
import { renderConfigForm, type FormController } from "./form.js";
import { pollJob, progressText } from "./progress.js";
import { renderResults } from "./results.js";

const api = new ApiClient("");

async function start() {
  const doc = document;
  const app = doc.getElementById("app")!;
  const status = doc.getElementById("status")!;

  let hints: Record<string, string> = {};
  try {
    hints = await api.parameterDocs();
  } catch {
    /* hints are cosmetic */
  }

  let submitting = false;
  let controller: FormController;

  const onRun = async (form: FormState) => {
    if (submitting) return; // double-click guard
    submitting = true;
    controller.runButton.disabled = true;
    status.textContent = "submitting…";
    try {
      const jobId = await api.submitJob(buildConfig(form));
      const final = await pollJob(api, jobId, (view) => {
        status.textContent = progressText(view);
      });
      if (final.state === "succeeded") {
        status.textContent = "succeeded";
        const results = await renderResults(doc, api, jobId, final.artifacts);
        doc.getElementById("results")!.replaceChildren(results);
      } else {
        status.textContent = `failed: ${final.error ?? "unknown error"}`;
      }
    } catch (err) {
      status.textContent = `error: ${(err as Error).message}`;
    } finally {
      submitting = false;
      controller.refresh();
    }
  };

  controller = renderConfigForm(doc, hints, onRun);

  const upload = doc.createElement("input");
  upload.type = "file";
  upload.accept = ".csv,text/csv";
  upload.addEventListener("change", async () => {
    const file = upload.files?.[0];
    if (!file) return;
    status.textContent = "uploading dataset…";
    try {
      const ref = await api.uploadDataset(file);
      const schema = await api.schema(ref);
      controller.setSchema(schema);
      status.textContent = `dataset ${ref.slice(0, 12)}… (${schema.n_rows} rows, ${schema.columns.length} columns)`;
    } catch (err) {
      status.textContent = `upload failed: ${(err as Error).message}`;
      const retry = doc.createElement("button");
      retry.textContent = "retry";
      retry.addEventListener("click", () => upload.dispatchEvent(new Event("change")));
      status.appendChild(retry);
    }
  });

  const uploadLabel = doc.createElement("label");
  uploadLabel.className = "field";
  uploadLabel.title = hints["data"] ?? "";
  uploadLabel.append("dataset file ", upload);
  app.appendChild(uploadLabel);
  app.appendChild(controller.root);
}

start();
