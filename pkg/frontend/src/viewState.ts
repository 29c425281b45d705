/** Page-level navigation state and role-derived capabilities.
 *
 * Capabilities come only from the authenticated principal's role; no
 * privileged logic lives here (the gateway re-checks everything).
 */

import type { Role } from "./types.js";

export type Tab = "chat" | "quizzes" | "dashboard" | "teaching";

export interface Capabilities {
  canReviewQuizzes: boolean;
  canUploadMaterials: boolean;
  canViewLogs: boolean;
  canViewTeachingTab: boolean;
}

export function capabilitiesFor(role: Role): Capabilities {
  const teacherLike = role === "teacher" || role === "admin";
  return {
    canReviewQuizzes: teacherLike,
    canUploadMaterials: teacherLike,
    canViewLogs: teacherLike,
    canViewTeachingTab: teacherLike,
  };
}

export class ViewState {
  activeTab: Tab = "chat";
  readonly capabilities: Capabilities;

  constructor(
    public readonly activeCourse: string,
    public readonly sessionId: string,
    role: Role,
  ) {
    this.capabilities = capabilitiesFor(role);
  }

  visibleTabs(): Tab[] {
    const tabs: Tab[] = ["chat", "quizzes", "dashboard"];
    if (this.capabilities.canViewTeachingTab) {
      tabs.push("teaching");
    }
    return tabs;
  }

  switchTab(tab: Tab): void {
    if (!this.visibleTabs().includes(tab)) {
      throw new Error(`tab ${tab} is not available for this role`);
    }
    this.activeTab = tab;
  }
}
