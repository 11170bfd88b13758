/** Color scales shared by every view: a four-step dark-to-light depth scale
 * (bin 0 = most central = darkest) and a sequential dark-high similarity
 * ramp for the heatmap. */

export const DEPTH_COLORS = ["#08306b", "#2171b5", "#6baed6", "#c6dbef"] as const;
export const OUTLIER_RING = "#d62728";
export const SELECTION = "#ff7f0e";

export function depthColor(bin: number): string {
  return DEPTH_COLORS[Math.max(0, Math.min(3, bin))];
}

/** similarity 0 -> near white, 1 -> dark; returns [r, g, b]. */
export function similarityRgb(value: number): [number, number, number] {
  const v = Math.max(0, Math.min(1, value));
  const light = [247, 251, 255];
  const dark = [8, 48, 107];
  return [
    Math.round(light[0] + (dark[0] - light[0]) * v),
    Math.round(light[1] + (dark[1] - light[1]) * v),
    Math.round(light[2] + (dark[2] - light[2]) * v),
  ];
}

export function similarityCss(value: number): string {
  const [r, g, b] = similarityRgb(value);
  return `rgb(${r},${g},${b})`;
}
