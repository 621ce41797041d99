/** Configuration form: mandatory parameter row plus the three collapsible
 * sections (data preprocessing, feature engineering, classifiers and
 * regressors), every control carrying a hover hint from the shared
 * parameter-docs catalog.
 */

import { canRun, emptyForm, validateForm, type FormState } from "./config.js";
import {
  CLASSIFICATION_CRITERIA,
  CLASSIFICATION_FAMILIES,
  IMPUTE_POLICIES,
  REGRESSION_CRITERIA,
  REGRESSION_FAMILIES,
  TASKS,
} from "./defaults.js";
import type { DatasetSchema } from "./types.js";

export interface FormController {
  root: HTMLElement;
  form: FormState;
  runButton: HTMLButtonElement;
  refresh(): void;
  setSchema(schema: DatasetSchema | null): void;
}

type Hints = Record<string, string>;

function labelled(doc: Document, text: string, control: HTMLElement, hint?: string): HTMLElement {
  const wrap = doc.createElement("label");
  wrap.className = "field";
  if (hint) wrap.title = hint;
  const span = doc.createElement("span");
  span.textContent = text;
  wrap.appendChild(span);
  wrap.appendChild(control);
  return wrap;
}

function section(doc: Document, title: string): [HTMLElement, HTMLElement] {
  const details = doc.createElement("details");
  details.className = "section";
  const summary = doc.createElement("summary");
  summary.textContent = title;
  details.appendChild(summary);
  const body = doc.createElement("div");
  details.appendChild(body);
  return [details, body];
}

export function renderConfigForm(
  doc: Document,
  hints: Hints,
  onRun: (form: FormState) => void,
): FormController {
  const form = emptyForm();
  const root = doc.createElement("form");
  root.className = "config-form";
  root.addEventListener("submit", (e) => e.preventDefault());

  const errorsByField = new Map<string, HTMLElement>();

  function errorSlot(field: string): HTMLElement {
    const el = doc.createElement("div");
    el.className = "field-error";
    el.dataset.field = field;
    errorsByField.set(field, el);
    return el;
  }

  function select(field: string, options: string[], withBlank = true): HTMLSelectElement {
    const el = doc.createElement("select");
    el.dataset.field = field;
    if (withBlank) el.appendChild(doc.createElement("option"));
    for (const option of options) {
      const opt = doc.createElement("option");
      opt.value = option;
      opt.textContent = option;
      el.appendChild(opt);
    }
    return el;
  }

  // mandatory parameters
  const mandatory = doc.createElement("fieldset");
  mandatory.className = "mandatory";
  const labelSelect = select("labelColumn", []);
  const personSelect = select("personColumn", []);
  const taskSelect = select("task", [...TASKS]);
  labelSelect.addEventListener("change", () => update(() => (form.labelColumn = labelSelect.value)));
  personSelect.addEventListener("change", () => update(() => (form.personColumn = personSelect.value)));
  taskSelect.addEventListener("change", () => update(() => (form.task = taskSelect.value)));
  mandatory.appendChild(labelled(doc, "labels column", labelSelect, hints["label-col"]));
  mandatory.appendChild(errorSlot("labelColumn"));
  mandatory.appendChild(labelled(doc, "personalization column", personSelect, hints["person-col"]));
  mandatory.appendChild(errorSlot("personColumn"));
  mandatory.appendChild(labelled(doc, "task", taskSelect, hints["task"]));
  mandatory.appendChild(errorSlot("task"));
  root.appendChild(mandatory);

  // data preprocessing section
  const [preSection, pre] = section(doc, "Data Preprocessing");
  const imputeSelect = select("impute", IMPUTE_POLICIES);
  imputeSelect.addEventListener("change", () => update(() => (form.impute = imputeSelect.value)));
  pre.appendChild(labelled(doc, "imputation", imputeSelect, hints["impute"]));
  const imputeConstant = doc.createElement("input");
  imputeConstant.dataset.field = "imputeConstant";
  imputeConstant.addEventListener("input", () => update(() => (form.imputeConstant = imputeConstant.value)));
  pre.appendChild(labelled(doc, "constant fill value", imputeConstant, hints["impute"]));
  pre.appendChild(errorSlot("imputeConstant"));
  const testSize = numberInput(doc, "testSize", form.testSize, 0.01);
  testSize.addEventListener("input", () => update(() => (form.testSize = Number(testSize.value))));
  pre.appendChild(labelled(doc, "test size", testSize, hints["test-size"]));
  pre.appendChild(errorSlot("testSize"));
  const valSize = numberInput(doc, "valSize", form.valSize, 0.01);
  valSize.addEventListener("input", () => update(() => (form.valSize = Number(valSize.value))));
  pre.appendChild(labelled(doc, "validation size", valSize, hints["val-size"]));
  pre.appendChild(errorSlot("valSize"));
  const normalize = select("normalize", ["on", "off"]);
  normalize.addEventListener("change", () => update(() => (form.normalize = normalize.value)));
  pre.appendChild(labelled(doc, "normalization", normalize, hints["normalize"]));
  const stratify = checkbox(doc, "stratify");
  stratify.addEventListener("change", () => update(() => (form.stratify = stratify.checked)));
  pre.appendChild(labelled(doc, "stratified split", stratify, hints["stratify"]));
  const markers = doc.createElement("input");
  markers.dataset.field = "missingMarkers";
  markers.placeholder = ",NA,NaN,nan";
  markers.addEventListener("input", () => update(() => (form.missingMarkers = markers.value)));
  pre.appendChild(labelled(doc, "missing markers", markers, hints["missing-markers"]));
  root.appendChild(preSection);

  // feature engineering section
  const [featSection, feats] = section(doc, "Feature Engineering");
  const mode = select("featureMode", ["selection", "extraction"]);
  mode.addEventListener("change", () => update(() => (form.featureMode = mode.value)));
  feats.appendChild(labelled(doc, "feature engineering", mode, hints["feature-selection"]));
  const selectionMethod = select("selectionMethod", ["variance", "top_k"], false);
  selectionMethod.addEventListener("change", () => update(() => (form.selectionMethod = selectionMethod.value)));
  feats.appendChild(labelled(doc, "selection method", selectionMethod, hints["feature-selection"]));
  const selectionValue = doc.createElement("input");
  selectionValue.dataset.field = "selectionValue";
  selectionValue.value = form.selectionValue;
  selectionValue.addEventListener("input", () => update(() => (form.selectionValue = selectionValue.value)));
  feats.appendChild(labelled(doc, "selection threshold / k", selectionValue, hints["feature-selection"]));
  feats.appendChild(errorSlot("selectionValue"));
  const extractionK = doc.createElement("input");
  extractionK.dataset.field = "extractionK";
  extractionK.placeholder = "auto";
  extractionK.addEventListener("input", () => update(() => (form.extractionK = extractionK.value)));
  feats.appendChild(labelled(doc, "PCA components", extractionK, hints["feature-extraction"]));
  feats.appendChild(errorSlot("extractionK"));
  const exportSel = select("exportFeatures", ["csv", "bundle"]);
  exportSel.addEventListener("change", () => update(() => (form.exportFeatures = exportSel.value)));
  feats.appendChild(labelled(doc, "export processed features", exportSel, hints["export-features"]));
  root.appendChild(featSection);

  // classifiers and regressors section
  const [modelSection, models] = section(doc, "Classifiers and Regressors");
  const familyBox = doc.createElement("div");
  familyBox.className = "families";
  models.appendChild(labelled(doc, "model families (none = all)", familyBox, hints["models"]));
  const criterion = select("criterion", []);
  criterion.addEventListener("change", () => update(() => (form.criterion = criterion.value)));
  models.appendChild(labelled(doc, "assessment criterion", criterion, hints["criterion"]));
  const fit = checkbox(doc, "fit");
  fit.checked = true;
  fit.addEventListener("change", () => update(() => (form.fit = fit.checked)));
  models.appendChild(labelled(doc, "fit (grid search)", fit, hints["no-fit"]));
  models.appendChild(errorSlot("fit"));
  const adapt = checkbox(doc, "adapt");
  adapt.addEventListener("change", () => update(() => (form.adapt = adapt.checked)));
  models.appendChild(labelled(doc, "per-user adaptation", adapt, hints["adapt"]));
  const sessions = numberInput(doc, "sessions", form.sessions, 1);
  sessions.addEventListener("input", () => update(() => (form.sessions = Number(sessions.value))));
  models.appendChild(labelled(doc, "sessions", sessions, hints["sessions"]));
  models.appendChild(errorSlot("sessions"));
  const seed = numberInput(doc, "seed", form.seed, 1);
  seed.addEventListener("input", () => update(() => (form.seed = Number(seed.value))));
  models.appendChild(labelled(doc, "seed", seed, hints["seed"]));
  root.appendChild(modelSection);

  const runButton = doc.createElement("button");
  runButton.type = "button";
  runButton.className = "run-button";
  runButton.textContent = "Run";
  runButton.disabled = true;
  runButton.addEventListener("click", () => {
    if (!runButton.disabled) onRun(form);
  });
  root.appendChild(runButton);

  function rebuildFamilyBoxes() {
    familyBox.innerHTML = "";
    const enabled =
      form.task === "regression" ? REGRESSION_FAMILIES : CLASSIFICATION_FAMILIES;
    for (const family of enabled) {
      const box = checkbox(doc, `family:${family}`);
      box.checked = form.families.includes(family);
      box.addEventListener("change", () =>
        update(() => {
          form.families = box.checked
            ? [...form.families, family]
            : form.families.filter((f) => f !== family);
        }),
      );
      familyBox.appendChild(labelled(doc, family, box));
    }
    const criteria = form.task === "regression" ? REGRESSION_CRITERIA : CLASSIFICATION_CRITERIA;
    criterion.innerHTML = "";
    criterion.appendChild(doc.createElement("option"));
    for (const name of criteria) {
      const opt = doc.createElement("option");
      opt.value = name;
      opt.textContent = name;
      criterion.appendChild(opt);
    }
  }

  function update(mutate: () => void) {
    const previousTask = form.task;
    mutate();
    if (form.task !== previousTask) {
      form.families = [];
      form.criterion = "";
      rebuildFamilyBoxes();
    }
    controller.refresh();
  }

  const controller: FormController = {
    root,
    form,
    runButton,
    refresh() {
      const errors = validateForm(form);
      for (const [field, slot] of errorsByField) {
        slot.textContent = errors[field] ?? "";
      }
      runButton.disabled = !canRun(form);
      const fieldsets = root.querySelectorAll("select, input, button:not(.run-button)");
      fieldsets.forEach((el) => {
        (el as HTMLInputElement).disabled = form.datasetRef === null;
      });
    },
    setSchema(schema) {
      form.datasetRef = schema ? schema.dataset_ref : null;
      form.labelColumn = "";
      form.personColumn = "";
      for (const sel of [labelSelect, personSelect]) {
        sel.innerHTML = "";
        sel.appendChild(doc.createElement("option"));
        for (const column of schema?.columns ?? []) {
          const opt = doc.createElement("option");
          opt.value = column.name;
          opt.textContent = `${column.name} (${column.kind})`;
          sel.appendChild(opt);
        }
      }
      rebuildFamilyBoxes();
      controller.refresh();
    },
  };
  rebuildFamilyBoxes();
  controller.refresh();
  return controller;
}

function numberInput(doc: Document, field: string, value: number, step: number): HTMLInputElement {
  const el = doc.createElement("input");
  el.type = "number";
  el.step = String(step);
  el.value = String(value);
  el.dataset.field = field;
  return el;
}

function checkbox(doc: Document, field: string): HTMLInputElement {
  const el = doc.createElement("input");
  el.type = "checkbox";
  el.dataset.field = field;
  return el;
}
