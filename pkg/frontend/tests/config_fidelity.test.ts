// The UI must emit exactly the config document the CLI builds for equivalent
// flags. The fixture corpus is generated by scripts/gen_fixtures.py, which
// runs the real CLI parser to produce the expected documents.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { buildConfig, canRun, validateForm, type FormState } from "../src/config.js";

interface Fixture {
  name: string;
  form: FormState;
  argv: string[];
  expected: Record<string, unknown>;
}

const fixtures: Fixture[] = JSON.parse(
  readFileSync(join(__dirname, "fixtures", "config_fidelity.json"), "utf-8"),
);

describe("config fidelity against the CLI parser", () => {
  it("covers the required corpus size", () => {
    expect(fixtures.length).toBe(10);
  });

  for (const fixture of fixtures) {
    it(fixture.name, () => {
      const config = buildConfig(fixture.form) as unknown as Record<string, unknown>;
      const expectedFields = Object.keys(fixture.expected).sort();
      expect(Object.keys(config).sort()).toEqual(expectedFields);
      for (const field of expectedFields) {
        expect(config[field], `field ${field}`).toEqual(fixture.expected[field]);
      }
    });
  }

  it("every fixture form state is runnable", () => {
    for (const fixture of fixtures) {
      expect(canRun(fixture.form), fixture.name).toBe(true);
      expect(validateForm(fixture.form)).toEqual({});
    }
  });
});
