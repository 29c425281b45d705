/** Source reader: expandable citation cards.
 *
 * Cards start collapsed and display the citation payload verbatim: the
 * title, the exact page number, and the exact fragment. Nothing here
 * rewrites or truncates what the gateway sent.
 */

import type { Citation } from "./types.js";

export class SourceCard {
  expanded = false;

  constructor(public readonly citation: Citation) {}

  toggle(): void {
    this.expanded = !this.expanded;
  }

  /** Collapsed header: title only. Expanded body adds page and fragment. */
  render(): { title: string; page: number | null; fragment: string | null } {
    if (!this.expanded) {
      return { title: this.citation.document_title, page: null, fragment: null };
    }
    return {
      title: this.citation.document_title,
      page: this.citation.page_number,
      fragment: this.citation.fragment,
    };
  }
}

export function buildSourceCards(citations: Citation[]): SourceCard[] {
  return citations.map((c) => new SourceCard(c));
}
