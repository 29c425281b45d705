/** Answer rendering helpers: inline LaTeX segmentation.
 *
 * Answers may interleave prose with $...$ (inline) and $$...$$ (display)
 * math. The renderer splits the text into typed segments so the page layer
 * can hand math segments to a typesetter; unterminated delimiters fall back
 * to literal text rather than swallowing the rest of the answer.
 */

export interface Segment {
  kind: "text" | "inline_math" | "display_math";
  content: string;
}

export function segmentAnswer(answer: string): Segment[] {
  const segments: Segment[] = [];
  let buffer = "";
  let i = 0;
  const flush = () => {
    if (buffer) {
      segments.push({ kind: "text", content: buffer });
      buffer = "";
    }
  };
  while (i < answer.length) {
    if (answer.startsWith("$$", i)) {
      const end = answer.indexOf("$$", i + 2);
      if (end === -1) {
        buffer += answer.slice(i);
        break;
      }
      flush();
      segments.push({ kind: "display_math", content: answer.slice(i + 2, end) });
      i = end + 2;
    } else if (answer[i] === "$") {
      const end = answer.indexOf("$", i + 1);
      if (end === -1) {
        buffer += answer.slice(i);
        break;
      }
      flush();
      segments.push({ kind: "inline_math", content: answer.slice(i + 1, end) });
      i = end + 1;
    } else {
      buffer += answer[i];
      i += 1;
    }
  }
  flush();
  return segments;
}
