// Form behaviour: run stays disabled until the four mandatory parameters are
// set, same-column label/personalization is an inline validation error, and
// submission runs exactly once per click while pending.

import { describe, expect, it } from "vitest";

import { buildConfig, canRun, emptyForm, validateForm } from "../src/config.js";
import { renderConfigForm } from "../src/form.js";
import { pollJob } from "../src/progress.js";
import type { DatasetSchema, JobView } from "../src/types.js";

const SCHEMA: DatasetSchema = {
  dataset_ref: "abc123",
  n_rows: 4,
  columns: [
    { name: "a", kind: "numeric" },
    { name: "b", kind: "numeric" },
    { name: "user", kind: "categorical" },
    { name: "y", kind: "categorical" },
  ],
};

describe("form state", () => {
  it("run is disabled until all four mandatory fields are set", () => {
    const form = emptyForm();
    expect(canRun(form)).toBe(false);
    form.datasetRef = "abc123";
    expect(canRun(form)).toBe(false);
    form.labelColumn = "y";
    form.personColumn = "user";
    expect(canRun(form)).toBe(false);
    form.task = "classification";
    expect(canRun(form)).toBe(true);
  });

  it("label equal to personalization column is an inline error", () => {
    const form = emptyForm();
    form.datasetRef = "abc123";
    form.labelColumn = "y";
    form.personColumn = "y";
    form.task = "classification";
    const errors = validateForm(form);
    expect(errors.personColumn).toMatch(/differ/);
    expect(canRun(form)).toBe(false);
  });

  it("dropdowns offer every schema column", () => {
    const controller = renderConfigForm(document, {}, () => {});
    document.body.appendChild(controller.root);
    controller.setSchema(SCHEMA);
    for (const field of ["labelColumn", "personColumn"]) {
      const select = controller.root.querySelector(`select[data-field="${field}"]`)!;
      const values = [...select.querySelectorAll("option")].map((o) => (o as HTMLOptionElement).value);
      expect(values).toEqual(["", "a", "b", "user", "y"]);
    }
  });

  it("run button reflects form validity and stays disabled without a dataset", () => {
    const controller = renderConfigForm(document, {}, () => {});
    document.body.appendChild(controller.root);
    expect(controller.runButton.disabled).toBe(true);
    controller.setSchema(SCHEMA);
    controller.form.labelColumn = "y";
    controller.form.personColumn = "user";
    controller.form.task = "classification";
    controller.refresh();
    expect(controller.runButton.disabled).toBe(false);
    controller.setSchema(null); // dataset cleared -> disabled again
    expect(controller.runButton.disabled).toBe(true);
  });

  it("defaults in the emitted document match the CLI defaults", () => {
    const form = emptyForm();
    form.datasetRef = "ref";
    form.labelColumn = "y";
    form.personColumn = "user";
    form.task = "classification";
    const config = buildConfig(form);
    expect(config.test_frac).toBe(0.2);
    expect(config.val_frac).toBe(0.2);
    expect(config.seed).toBe(42);
    expect(config.sessions).toBe(4);
    expect(config.fit).toBe(true);
    expect(config.missing_markers).toEqual(["", "NA", "NaN", "nan"]);
    expect(config.user_train_frac).toBe(0.5);
    expect(config.out_dir).toBeNull();
  });
});

describe("job polling", () => {
  it("resolves on a terminal state and polls at the base interval", async () => {
    const states: JobView[] = [
      { job_id: "j", state: "queued", progress: { stage: null, candidates_done: null, candidates_total: null }, error: null, artifacts: [] },
      { job_id: "j", state: "running", progress: { stage: "grid_search", candidates_done: 1, candidates_total: 2 }, error: null, artifacts: [] },
      { job_id: "j", state: "succeeded", progress: { stage: "report", candidates_done: 2, candidates_total: 2 }, error: null, artifacts: ["results.csv"] },
    ];
    let call = 0;
    const api = { jobStatus: async () => states[Math.min(call++, states.length - 1)] } as never;
    const intervals: number[] = [];
    const seen: string[] = [];
    const final = await pollJob(api, "j", (v) => seen.push(v.state), (fn, ms) => {
      intervals.push(ms);
      fn();
      return 0;
    });
    expect(final.state).toBe("succeeded");
    expect(seen).toEqual(["queued", "running", "succeeded"]);
    expect(intervals).toEqual([1000, 1000]); // 1 Hz between live polls
  });

  it("backs off and eventually rejects when the service stays unreachable", async () => {
    const api = { jobStatus: async () => { throw new Error("down"); } } as never;
    const intervals: number[] = [];
    await expect(
      pollJob(api, "j", () => {}, (fn, ms) => { intervals.push(ms); fn(); return 0; }),
    ).rejects.toThrow("down");
    expect(intervals).toEqual([2000, 4000]); // doubling up to the cap
  });
});
