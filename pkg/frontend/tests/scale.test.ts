import { describe, expect, it } from "vitest";

import { cmToPane, PaneGeometry, paneHeightPx, paneToCm, pxPerCm } from "../src/scale.js";

const PANE: PaneGeometry = {
  tabletWcm: 21.754548,
  tabletHcm: 13.596593,
  bezelCm: 2.0,
  widthPx: 520,
};

describe("pane scaling", () => {
  it("maps the pane corners onto the bezel ring", () => {
    // top-left pixel = left bezel at the top edge of the active area
    expect(paneToCm(PANE, 0, 0)).toEqual({ x: -2.0, y: PANE.tabletHcm });
    // bottom-right pixel = right bezel at the bottom bezel edge
    const br = paneToCm(PANE, PANE.widthPx, paneHeightPx(PANE));
    expect(br.x).toBeCloseTo(PANE.tabletWcm + 2.0, 9);
    expect(br.y).toBeCloseTo(-2.0, 9);
  });

  it("maps the active-area origin correctly", () => {
    const { px, py } = cmToPane(PANE, 0, 0);
    expect(paneToCm(PANE, px, py)).toEqual({ x: 0, y: 0 });
    const s = pxPerCm(PANE);
    expect(px).toBeCloseTo(2.0 * s, 9);
  });

  it("a full-width pane drag spans the active width plus both bezels", () => {
    const left = paneToCm(PANE, 0, 100);
    const right = paneToCm(PANE, PANE.widthPx, 100);
    expect(right.x - left.x).toBeCloseTo(PANE.tabletWcm + 4.0, 9);
  });

  it("px -> cm -> px round trip is identity within one pixel", () => {
    // acceptance: input scaling round-trip within 1 px (it is exact here)
    const h = paneHeightPx(PANE);
    for (let i = 0; i <= 50; i++) {
      for (let j = 0; j <= 30; j++) {
        const px = (i / 50) * PANE.widthPx;
        const py = (j / 30) * h;
        const cm = paneToCm(PANE, px, py);
        const back = cmToPane(PANE, cm.x, cm.y);
        expect(Math.abs(back.px - px)).toBeLessThan(1.0);
        expect(Math.abs(back.py - py)).toBeLessThan(1.0);
        expect(back.px).toBeCloseTo(px, 9);
        expect(back.py).toBeCloseTo(py, 9);
      }
    }
  });

  it("cm -> px -> cm round trips exactly too", () => {
    for (const [x, y] of [[-2, -2], [0, 0], [10.3, 6.7], [23.75, 13.59]] as const) {
      const { px, py } = cmToPane(PANE, x, y);
      const back = paneToCm(PANE, px, py);
      expect(back.x).toBeCloseTo(x, 9);
      expect(back.y).toBeCloseTo(y, 9);
    }
  });
});
