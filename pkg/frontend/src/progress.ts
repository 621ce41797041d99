/** Job polling: 1 Hz while the job is live, exponential backoff on fetch errors. */

import type { ApiClient } from "./api.js";
import type { JobView } from "./types.js";

const BASE_INTERVAL_MS = 1000;
const MAX_INTERVAL_MS = 8000;

export function pollJob(
  api: ApiClient,
  jobId: string,
  onUpdate: (view: JobView) => void,
  setTimer: (fn: () => void, ms: number) => unknown = (fn, ms) => setTimeout(fn, ms),
): Promise<JobView> {
  return new Promise((resolve, reject) => {
    let interval = BASE_INTERVAL_MS;
    const tick = async () => {
      let view: JobView;
      try {
        view = await api.jobStatus(jobId);
        interval = BASE_INTERVAL_MS;
      } catch (err) {
        interval = Math.min(interval * 2, MAX_INTERVAL_MS);
        if (interval >= MAX_INTERVAL_MS) {
          reject(err);
          return;
        }
        setTimer(tick, interval);
        return;
      }
      onUpdate(view);
      if (view.state === "succeeded" || view.state === "failed") {
        resolve(view);
        return;
      }
      setTimer(tick, interval);
    };
    tick();
  });
}

export function progressText(view: JobView): string {
  const { stage, candidates_done, candidates_total } = view.progress;
  let text = `${view.state}`;
  if (stage) text += ` — stage: ${stage}`;
  if (candidates_done != null && candidates_total != null) {
    text += ` (${candidates_done}/${candidates_total} candidates)`;
  }
  return text;
}
