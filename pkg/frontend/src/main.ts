/** DOM wiring for the click-to-query viewer. All math stays server-side:
 * the page only maps click coordinates, posts queries, and draws boxes. */

import { ApiClient } from "./api.js";
import { displayToImage, fitScale, type ViewTransform } from "./coords.js";
import { drawBox, ESTIMATE_STYLE, GT_STYLE, QUERY_BOX_STYLE } from "./overlay.js";
import {
  applyError,
  applyResult,
  beginQuery,
  galleryItems,
  initialState,
  selectCase,
  setToggle,
  setTopM,
  type ViewState,
} from "./state.js";
import type { CaseInfo } from "./types.js";

const api = new ApiClient();
let state: ViewState = initialState();
let cases: CaseInfo[] = [];
let loadedImage: HTMLImageElement | null = null;

const caseList = document.getElementById("case-list") as HTMLUListElement;
const canvas = document.getElementById("viewer") as HTMLCanvasElement;
const viewerWrap = document.getElementById("viewer-wrap") as HTMLDivElement;
const gallery = document.getElementById("gallery") as HTMLDivElement;
const banner = document.getElementById("error-banner") as HTMLDivElement;
const mInput = document.getElementById("m-input") as HTMLInputElement;
const gtToggle = document.getElementById("toggle-gt") as HTMLInputElement;
const estToggle = document.getElementById("toggle-estimate") as HTMLInputElement;
const qboxToggle = document.getElementById("toggle-querybox") as HTMLInputElement;

function showError(message: string | null): void {
  banner.textContent = message ?? "";
  banner.hidden = message === null;
}

function currentView(): ViewTransform | null {
  if (!state.selectedCase || !loadedImage) {
    return null;
  }
  const [rows, cols] = state.selectedCase.dims;
  const scale = fitScale(cols, rows, viewerWrap.clientWidth || cols, viewerWrap.clientHeight || rows);
  return { scale, imageWidth: cols, imageHeight: rows };
}

function redraw(): void {
  const view = currentView();
  const ctx = canvas.getContext("2d");
  if (!ctx || !view || !loadedImage || !state.selectedCase) {
    return;
  }
  canvas.width = Math.ceil(view.imageWidth * view.scale);
  canvas.height = Math.ceil(view.imageHeight * view.scale);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(loadedImage, 0, 0, canvas.width, canvas.height);
  if (state.showGt) {
    drawBox(ctx, state.selectedCase.bbox, view.scale, GT_STYLE);
  }
  if (state.result && state.showQueryBox) {
    drawBox(ctx, state.result.query_bbox, view.scale, QUERY_BOX_STYLE);
  }
  if (state.result && state.showEstimate) {
    drawBox(ctx, state.result.estimated_bbox, view.scale, ESTIMATE_STYLE);
  }
}

function renderGallery(): void {
  gallery.replaceChildren();
  for (const item of galleryItems(state)) {
    const card = document.createElement("div");
    card.className = "match-card";
    const img = document.createElement("img");
    img.src = item.imagePath;
    img.alt = item.caseId;
    const label = document.createElement("div");
    label.className = "match-label";
    label.textContent = `${item.caseId} · d=${item.dTotal} · w=${item.weight.toFixed(3)}`;
    card.append(img, label);
    gallery.append(card);
  }
}

function renderCaseList(): void {
  caseList.replaceChildren();
  for (const info of cases) {
    const li = document.createElement("li");
    li.textContent = info.case_id;
    li.className = info.case_id === state.selectedCase?.case_id ? "selected" : "";
    li.addEventListener("click", () => {
      void showCase(info);
    });
    caseList.append(li);
  }
}

async function showCase(info: CaseInfo): Promise<void> {
  state = selectCase(state, info);
  renderCaseList();
  renderGallery();
  try {
    loadedImage = await loadImage(api.imageUrl(info.case_id));
    showError(null);
  } catch (err) {
    loadedImage = null;
    showError(err instanceof Error ? err.message : String(err));
    return;
  }
  redraw();
}

function loadImage(url: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => reject(new Error(`cannot load image ${url}`));
    img.src = url;
  });
}

async function handleClick(event: MouseEvent): Promise<void> {
  const view = currentView();
  if (!view || !state.selectedCase) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const point = displayToImage(event.clientX - rect.left, event.clientY - rect.top, view);
  const caseId = state.selectedCase.case_id;
  const [next, token] = beginQuery(state, point);
  state = next;
  try {
    const result = await api.query(caseId, point, state.m);
    state = applyResult(state, token, result);
    if (state.result === result) {
      showError(null);
    }
  } catch (err) {
    state = applyError(state, token, err instanceof Error ? err.message : String(err));
    if (state.error) {
      showError(state.error);
    }
  }
  redraw();
  renderGallery();
}

async function init(): Promise<void> {
  mInput.addEventListener("change", () => {
    state = setTopM(state, Number(mInput.value));
  });
  gtToggle.addEventListener("change", () => {
    state = setToggle(state, "showGt", gtToggle.checked);
    redraw();
  });
  estToggle.addEventListener("change", () => {
    state = setToggle(state, "showEstimate", estToggle.checked);
    redraw();
  });
  qboxToggle.addEventListener("change", () => {
    state = setToggle(state, "showQueryBox", qboxToggle.checked);
    redraw();
  });
  canvas.addEventListener("click", (event) => {
    void handleClick(event);
  });
  window.addEventListener("resize", redraw);

  try {
    cases = await api.listCases();
    renderCaseList();
    showError(null);
  } catch (err) {
    showError(err instanceof Error ? err.message : String(err));
  }
}

void init();
