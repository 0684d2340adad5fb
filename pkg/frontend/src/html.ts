/**
 * Minimal string-based element builder.
 *
 * Views render to plain HTML/SVG strings so they stay pure functions of
 * payload + state and can be exercised without a browser. Convention:
 * attribute values are always escaped by `el`; child strings are taken
 * as already-rendered markup, so any dynamic text must pass through
 * `esc` first.
 */

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

/** Escape text for use as element content or attribute value. */
export function esc(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ESCAPES[ch]);
}

export type AttrValue = string | number | boolean | null | undefined;

const VOID_TAGS = new Set(["input", "br", "hr", "img", "meta", "link"]);

/**
 * Render one element. Boolean attributes follow HTML semantics: true
 * renders the bare attribute, false/null/undefined drop it.
 */
export function el(
  tag: string,
  attrs: Record<string, AttrValue> = {},
  ...children: (string | string[])[]
): string {
  const parts: string[] = [];
  for (const [name, value] of Object.entries(attrs)) {
    if (value === false || value === null || value === undefined) continue;
    if (value === true) {
      parts.push(` ${name}`);
    } else {
      parts.push(` ${name}="${esc(String(value))}"`);
    }
  }
  const open = `<${tag}${parts.join("")}>`;
  if (VOID_TAGS.has(tag)) return open;
  const body = children.map((c) => (Array.isArray(c) ? c.join("") : c)).join("");
  return `${open}${body}</${tag}>`;
}
