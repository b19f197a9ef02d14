/** UI loop against a live service: select a case, click its ground-truth
 * centre, receive a dashed estimate and a ranked gallery, then supersede it
 * with a second click. The service runs a synthetic index built on the fly.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { displayToImage, fitScale, imageToDisplay, type ViewTransform } from "../src/coords.js";
import { drawBox, ESTIMATE_STYLE, GT_STYLE, type DrawContext } from "../src/overlay.js";
import {
  applyResult,
  beginQuery,
  galleryItems,
  initialState,
  selectCase,
  type ViewState,
} from "../src/state.js";
import type { CaseInfo } from "../src/types.js";

const PORT = 8741;
const BASE = `http://127.0.0.1:${PORT}`;
const FAST_CONFIG = [
  "--global-side", "32", "--global-angles", "8",
  "--roi-side", "16", "--roi-angles", "4",
];

let workDir: string;
let server: ChildProcess | null = null;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const resp = await fetch(`${BASE}/api/cases`);
      if (resp.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "radonroi-ui-"));
  const dataDir = join(workDir, "data");
  const indexPath = join(workDir, "index.json");
  execFileSync("python3", [
    "-m", "radonroi", "synth", "--out", dataDir,
    "--seed", "11", "--clusters", "2", "--per-cluster", "3", "--dims", "48x48",
  ]);
  execFileSync("python3", [
    "-m", "radonroi", "index",
    "--manifest", join(dataDir, "manifest.jsonl"),
    "--out", indexPath,
    ...FAST_CONFIG,
  ]);
  server = spawn("python3", [
    "-m", "radonroi", "serve", "--index", indexPath, "--port", String(PORT),
  ], { stdio: "ignore" });
  await waitForService();
}, 60_000);

afterAll(() => {
  server?.kill("SIGTERM");
  rmSync(workDir, { recursive: true, force: true });
});

function recordingContext() {
  const calls: { dash: number[]; color: string }[] = [];
  let dash: number[] = [];
  const ctx: DrawContext = {
    strokeStyle: "",
    lineWidth: 1,
    setLineDash(segments: number[]) {
      dash = segments;
    },
    strokeRect() {
      calls.push({ dash: [...dash], color: String(this.strokeStyle) });
    },
  };
  return { ctx, calls };
}

function renderOverlays(state: ViewState, ctx: DrawContext, view: ViewTransform): void {
  if (state.selectedCase && state.showGt) {
    drawBox(ctx, state.selectedCase.bbox, view.scale, GT_STYLE);
  }
  if (state.result && state.showEstimate) {
    drawBox(ctx, state.result.estimated_bbox, view.scale, ESTIMATE_STYLE);
  }
}

describe("click-to-query loop against the live service", () => {
  const api = new ApiClient(BASE);

  it("select, click gt centre, see dashed estimate and ranked gallery; re-click replaces", async () => {
    const cases = await api.listCases();
    expect(cases.length).toBe(6);

    const info: CaseInfo = cases[0]!;
    let state = selectCase(initialState(), info);
    expect(state.selectedCase?.case_id).toBe(info.case_id);

    // fit a 480x480 viewport and click at the ground-truth centre through
    // the display mapping, as the page does
    const [rows, cols] = info.dims;
    const view: ViewTransform = {
      scale: fitScale(cols, rows, 480, 480),
      imageWidth: cols,
      imageHeight: rows,
    };
    const [xs, ys, xe, ye] = info.bbox;
    const centre = { x: Math.round((xs + xe) / 2), y: Math.round((ys + ye) / 2) };
    const display = imageToDisplay(centre, view);
    const clicked = displayToImage(display.x, display.y, view);
    expect(clicked).toEqual(centre);

    const [pending, token] = beginQuery(state, clicked);
    const result = await api.query(info.case_id, clicked, pending.m);
    state = applyResult(pending, token, result);

    expect(state.result).not.toBeNull();
    expect(state.result!.estimated_bbox).toHaveLength(4);

    // gallery: M entries, ranked ascending by distance, self excluded
    const gallery = galleryItems(state);
    expect(gallery.length).toBe(pending.m);
    const totals = gallery.map((g) => g.dTotal);
    expect([...totals].sort((a, b) => a - b)).toEqual(totals);
    expect(gallery.map((g) => g.caseId)).not.toContain(info.case_id);

    // thumbnails are fetchable PNGs
    const thumb = await fetch(api.imageUrl(gallery[0]!.caseId));
    expect(thumb.status).toBe(200);
    expect(thumb.headers.get("content-type")).toBe("image/png");

    // drawing: ground truth solid plus a dashed estimate
    const { ctx, calls } = recordingContext();
    renderOverlays(state, ctx, view);
    expect(calls.length).toBe(2);
    expect(calls[0]!.dash).toEqual([]);
    expect(calls[1]!.dash.length).toBeGreaterThan(0);

    // second click at the far corner replaces the first result
    const firstResult = state.result!;
    const corner = displayToImage(1, 1, view);
    const [pending2, token2] = beginQuery(state, corner);
    expect(token2).toBeGreaterThan(token);
    const result2 = await api.query(info.case_id, corner, pending2.m);
    state = applyResult(pending2, token2, result2);
    expect(state.result).not.toBe(firstResult);
    expect(state.result!.query_bbox).not.toEqual(firstResult.query_bbox);
  }, 30_000);

  it("bad clicks surface a service error message", async () => {
    const cases = await api.listCases();
    await expect(api.query(cases[0]!.case_id, { x: -5, y: -5 }, 3)).rejects.toThrow(/bounds/);
  });

  it("unknown cases are reported distinctly", async () => {
    await expect(api.query("ghost", { x: 1, y: 1 }, 3)).rejects.toThrow(/unknown/);
  });
});
