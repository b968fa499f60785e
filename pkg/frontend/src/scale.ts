// Trackpad pane <-> tablet-cm mapping.
//
// The pane shows the tablet's active area plus the 2 cm bezel strips on
// the left, right and bottom edges (there is no top bezel). Pane pixels
// have the origin at the top-left; tablet cm have the origin at the
// bottom-left corner of the active area, y growing upward. The mapping
// is a uniform affine scale, so px -> cm -> px is exact to rounding.

export interface PaneGeometry {
  tabletWcm: number;
  tabletHcm: number;
  bezelCm: number;
  widthPx: number; // pane width in CSS pixels
}

export function paneHeightPx(g: PaneGeometry): number {
  return ((g.tabletHcm + g.bezelCm) * g.widthPx) / (g.tabletWcm + 2 * g.bezelCm);
}

export function pxPerCm(g: PaneGeometry): number {
  return g.widthPx / (g.tabletWcm + 2 * g.bezelCm);
}

export function paneToCm(g: PaneGeometry, px: number, py: number): { x: number; y: number } {
  const s = pxPerCm(g);
  return { x: px / s - g.bezelCm, y: g.tabletHcm - py / s };
}

export function cmToPane(g: PaneGeometry, x: number, y: number): { px: number; py: number } {
  const s = pxPerCm(g);
  return { px: (x + g.bezelCm) * s, py: (g.tabletHcm - y) * s };
}
