// Results rendering against a stubbed succeeded job: chart panels come from
// the six server-emitted SVGs, tables are sortable, and the UI touches the
// API only through the stub (no metric computation of its own).

import { describe, expect, it } from "vitest";

import type { ApiClient } from "../src/api.js";
import { parseCsv } from "../src/csv.js";
import { renderResults } from "../src/results.js";
import { renderTable, sortRows } from "../src/tables.js";

const SVG = '<svg xmlns="http://www.w3.org/2000/svg"><polyline points="0,0 1,1"/></svg>';

const SESSION_ARTIFACTS = [
  "best_model.json",
  "results.csv",
  "classification_report.csv",
  "sessions.csv",
  "summary.txt",
  "incremental_precision.svg",
  "incremental_recall.svg",
  "incremental_f1.svg",
  "incremental_support.svg",
  "incremental_accuracy.svg",
  "incremental_kemker_loss.svg",
];

function stubApi(contents: Record<string, string>): ApiClient {
  return {
    artifactText: async (_job: string, name: string) => {
      if (!(name in contents)) throw new Error(`unexpected artifact fetch: ${name}`);
      return contents[name];
    },
    artifactUrl: (job: string, name: string) => `/api/jobs/${job}/artifacts/${name}`,
  } as unknown as ApiClient;
}

function sessionJobContents(): Record<string, string> {
  const contents: Record<string, string> = {
    "results.csv": "candidate_id,family,hyperparams,split,metric,value\n0,gaussian_nb,-,validation,accuracy,0.9\n1,knn_classifier,k=1,validation,accuracy,0.8\n",
    "classification_report.csv": "label,precision,recall,f1,support\na,1.0,0.5,0.66,2\nb,0.5,1.0,0.66,2\n",
    "sessions.csv": "session,checkpoint,metric,value\n0,base,accuracy,0.9\n",
    "summary.txt": "task: classification\n",
  };
  for (const name of SESSION_ARTIFACTS) {
    if (name.endsWith(".svg")) contents[name] = SVG;
  }
  return contents;
}

describe("results view for a succeeded 4-session job", () => {
  it("renders six chart panels and sortable tables", async () => {
    const view = await renderResults(document, stubApi(sessionJobContents()), "job1", SESSION_ARTIFACTS);
    document.body.appendChild(view);
    const panels = view.querySelectorAll(".chart-panel");
    expect(panels.length).toBe(6);
    expect(view.querySelectorAll(".chart-panel svg").length).toBe(6);
    const tables = view.querySelectorAll("table.sortable");
    expect(tables.length).toBe(3); // results + report + sessions
    expect(view.querySelector(".bundle-download")).toBeTruthy();
  });

  it("hides the chart grid for a predict-only job and shows predictions", async () => {
    const artifacts = ["predictions.csv", "summary.txt"];
    const api = stubApi({
      "predictions.csv": "x,y,predicted_y\n1,a,a\n2,b,a\n",
      "summary.txt": "task: classification\n",
    });
    const view = await renderResults(document, api, "job2", artifacts);
    expect(view.querySelector(".chart-grid")).toBeNull();
    expect(view.querySelectorAll("table.sortable").length).toBe(1);
  });

  it("keeps rendering other artifacts when one fetch fails", async () => {
    const contents = sessionJobContents();
    delete contents["results.csv"];
    const view = await renderResults(document, stubApi(contents), "job3", SESSION_ARTIFACTS);
    expect(view.querySelectorAll(".chart-panel").length).toBe(6);
    expect(view.querySelectorAll(".artifact-error").length).toBe(1);
    expect(view.querySelectorAll("table.sortable").length).toBe(2);
  });
});

describe("sortable tables", () => {
  it("sorts numerically and toggles direction", () => {
    const table = parseCsv("name,value\nb,10\na,2\nc,1\n");
    const el = renderTable(document, table, "t");
    document.body.appendChild(el);
    const header = el.querySelectorAll("th")[1] as HTMLElement;
    header.click();
    let cells = [...el.querySelectorAll("tbody tr td:nth-child(2)")].map((td) => td.textContent);
    expect(cells).toEqual(["1", "2", "10"]); // numeric, not lexicographic
    header.click();
    cells = [...el.querySelectorAll("tbody tr td:nth-child(2)")].map((td) => td.textContent);
    expect(cells).toEqual(["10", "2", "1"]);
  });

  it("sorting is stable for equal keys", () => {
    const rows = [
      ["x", "1"],
      ["y", "1"],
      ["z", "1"],
    ];
    expect(sortRows(rows, 1, false).map((r) => r[0])).toEqual(["x", "y", "z"]);
  });
});
