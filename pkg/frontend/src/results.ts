/** Results view: server-emitted SVG charts displayed verbatim, CSV artifacts
 * as sortable tables, and a bundle download link. Layout is artifact-driven:
 * panels only appear for artifacts the job actually produced.
 */

import type { ApiClient } from "./api.js";
import { parseCsv } from "./csv.js";
import { renderTable } from "./tables.js";

const CHART_ARTIFACTS = [
  "incremental_precision.svg",
  "incremental_recall.svg",
  "incremental_f1.svg",
  "incremental_support.svg",
  "incremental_accuracy.svg",
  "incremental_kemker_loss.svg",
];

const TABLE_ARTIFACTS = [
  ["results.csv", "Grid search results"],
  ["classification_report.csv", "Classification report"],
  ["adaptation.csv", "Per-user adaptation"],
  ["sessions.csv", "Incremental sessions"],
  ["predictions.csv", "Predictions"],
] as const;

export async function renderResults(
  doc: Document,
  api: ApiClient,
  jobId: string,
  artifactNames: string[],
): Promise<HTMLElement> {
  const root = doc.createElement("section");
  root.className = "results";

  const charts = artifactNames.filter((n) => CHART_ARTIFACTS.includes(n));
  if (charts.length) {
    const chartGrid = doc.createElement("div");
    chartGrid.className = "chart-grid";
    for (const name of CHART_ARTIFACTS) {
      if (!artifactNames.includes(name)) continue;
      const panel = doc.createElement("figure");
      panel.className = "chart-panel";
      panel.dataset.artifact = name;
      try {
        panel.innerHTML = await api.artifactText(jobId, name);
      } catch (err) {
        const note = doc.createElement("p");
        note.className = "artifact-error";
        note.textContent = `could not load ${name}: ${(err as Error).message}`;
        panel.appendChild(note);
      }
      const caption = doc.createElement("figcaption");
      caption.textContent = name.replace("incremental_", "").replace(".svg", "").replace("_", " ");
      panel.appendChild(caption);
      chartGrid.appendChild(panel);
    }
    root.appendChild(chartGrid);
  }

  for (const [name, title] of TABLE_ARTIFACTS) {
    if (!artifactNames.includes(name)) continue;
    try {
      const table = parseCsv(await api.artifactText(jobId, name));
      root.appendChild(renderTable(doc, table, title));
    } catch (err) {
      const note = doc.createElement("p");
      note.className = "artifact-error";
      note.textContent = `could not load ${name}: ${(err as Error).message}`;
      root.appendChild(note);
    }
  }

  if (artifactNames.includes("summary.txt")) {
    try {
      const summary = doc.createElement("pre");
      summary.className = "summary";
      summary.textContent = await api.artifactText(jobId, "summary.txt");
      root.appendChild(summary);
    } catch {
      /* summary is best-effort */
    }
  }

  if (artifactNames.includes("best_model.json")) {
    const link = doc.createElement("a");
    link.className = "bundle-download";
    link.href = api.artifactUrl(jobId, "best_model.json");
    link.textContent = "Download model bundle";
    link.setAttribute("download", "best_model.json");
    root.appendChild(link);
  }
  return root;
}
