/** Single source of the discrete color assignment shared by both views:
 * six fixed hues for the displayed features, gray for the grouped rest. */

export const FEATURE_COLORS = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
] as const;

export const OTHERS_COLOR = "#9aa0a6";
export const BASE_COLOR = "#d3d8e0";
export const PATH_COLOR = "#2b2f3a";
export const MEAN_DOT_COLOR = "#111111";

export function colorFor(displayed: string[], label: string): string {
  const index = displayed.indexOf(label);
  return index >= 0 ? FEATURE_COLORS[index % FEATURE_COLORS.length] : OTHERS_COLOR;
}
