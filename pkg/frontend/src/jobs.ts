/** Poll a background job until it settles (1 s interval, matching the
 * non-streaming gateway contract). The sleep function is injectable so
 * tests can run the loop without real delays. */

import { GatewayClient, JobStatus } from "./api.js";

export async function pollJob(
  client: GatewayClient,
  jobId: string,
  options: {
    intervalMs?: number;
    maxPolls?: number;
    sleep?: (ms: number) => Promise<void>;
  } = {},
): Promise<JobStatus> {
  const intervalMs = options.intervalMs ?? 1000;
  const maxPolls = options.maxPolls ?? 120;
  const sleep =
    options.sleep ?? ((ms: number) => new Promise((r) => setTimeout(r, ms)));
  for (let i = 0; i < maxPolls; i += 1) {
    const job = await client.getJob(jobId);
    if (job.state === "succeeded" || job.state === "failed") {
      return job;
    }
    await sleep(intervalMs);
  }
  throw new Error(`job ${jobId} did not settle after ${maxPolls} polls`);
}
