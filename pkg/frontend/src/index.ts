export { ApiError, GatewayClient } from "./api.js";
export type { FetchLike, JobStatus } from "./api.js";
export { ChatController } from "./chat.js";
export type { RenderedTurn } from "./chat.js";
export { DashboardController, coverageBars } from "./dashboard.js";
export { pollJob } from "./jobs.js";
export { segmentAnswer } from "./render.js";
export { ReviewController } from "./review.js";
export { SourceCard, buildSourceCards } from "./sourceReader.js";
export { ViewState, capabilitiesFor } from "./viewState.js";
export * from "./types.js";
