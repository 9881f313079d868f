/**
 * Minimal deterministic SVG assembly. Numbers are formatted with a
 * fixed precision so a rerun over the same table is byte-identical.
 */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error(`cannot place non-finite coordinate ${x}`);
  }
  // toFixed is locale-independent; trim trailing zeros for compactness.
  const s = x.toFixed(3);
  return s.replace(/\.?0+$/, "") || "0";
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface TextOptions {
  size?: number;
  anchor?: "start" | "middle" | "end";
  fill?: string;
  rotate?: number;
  family?: string;
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, stroke?: string): void {
    const edge = stroke ? ` stroke="${stroke}" stroke-width="0.5"` : "";
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"${edge}/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${fmt(width)}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5): void {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${path}" fill="none" stroke="${stroke}" stroke-width="${fmt(width)}"/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, opts: TextOptions = {}): void {
    const size = opts.size ?? 11;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#222222";
    const family = opts.family ?? "sans-serif";
    const transform =
      opts.rotate !== undefined ? ` transform="rotate(${fmt(opts.rotate)} ${fmt(x)} ${fmt(y)})"` : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${fmt(size)}" font-family="${family}" text-anchor="${anchor}" fill="${fill}"${transform}>${esc(content)}</text>`,
    );
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${fmt(this.width)}" height="${fmt(this.height)}" viewBox="0 0 ${fmt(this.width)} ${fmt(this.height)}">`,
      `<rect x="0" y="0" width="${fmt(this.width)}" height="${fmt(this.height)}" fill="#ffffff"/>`,
      ...this.parts,
      `</svg>`,
    ].join("\n");
  }
}

/**
 * Piecewise-linear approximation of a perceptually uniform dark-to-bright
 * color ramp. t is clamped to [0, 1].
 */
const RAMP: Array<[number, number, number]> = [
  [68, 1, 84],
  [71, 44, 122],
  [59, 81, 139],
  [44, 113, 142],
  [33, 144, 141],
  [39, 173, 129],
  [92, 200, 99],
  [170, 220, 50],
  [253, 231, 37],
];

export function rampColor(t: number): string {
  const u = Math.min(1, Math.max(0, t));
  const scaled = u * (RAMP.length - 1);
  const lo = Math.min(RAMP.length - 2, Math.floor(scaled));
  const frac = scaled - lo;
  const a = RAMP[lo]!;
  const b = RAMP[lo + 1]!;
  const mix = (i: 0 | 1 | 2) => Math.round(a[i] + (b[i] - a[i]) * frac);
  const hex = (v: number) => v.toString(16).padStart(2, "0");
  return `#${hex(mix(0))}${hex(mix(1))}${hex(mix(2))}`;
}
