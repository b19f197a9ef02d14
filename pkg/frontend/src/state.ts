/** View state and the pure transitions the UI runs on.
 *
 * Every click gets a token from a monotonically increasing counter; a
 * response is applied only while its token is still the pending one, so a
 * superseded request can never overwrite a newer result.
 */

import type { CaseInfo, ImagePoint, QueryResult } from "./types.js";

export interface ViewState {
  selectedCase: CaseInfo | null;
  lastClick: ImagePoint | null;
  result: QueryResult | null;
  m: number;
  showGt: boolean;
  showEstimate: boolean;
  showQueryBox: boolean;
  nextToken: number;
  pendingToken: number | null;
  error: string | null;
}

export function initialState(m = 5): ViewState {
  return {
    selectedCase: null,
    lastClick: null,
    result: null,
    m,
    showGt: true,
    showEstimate: true,
    showQueryBox: false,
    nextToken: 1,
    pendingToken: null,
    error: null,
  };
}

export function selectCase(state: ViewState, info: CaseInfo): ViewState {
  return {
    ...state,
    selectedCase: info,
    lastClick: null,
    result: null,
    pendingToken: null,
    error: null,
  };
}

/** Start a query; returns the new state and the token the response must carry. */
export function beginQuery(state: ViewState, click: ImagePoint): [ViewState, number] {
  const token = state.nextToken;
  return [
    { ...state, lastClick: click, pendingToken: token, nextToken: token + 1 },
    token,
  ];
}

/** Apply a response; stale tokens leave the state untouched. */
export function applyResult(state: ViewState, token: number, result: QueryResult): ViewState {
  if (token !== state.pendingToken) {
    return state;
  }
  return { ...state, result, pendingToken: null, error: null };
}

export function applyError(state: ViewState, token: number, message: string): ViewState {
  if (token !== state.pendingToken) {
    return state;
  }
  return { ...state, pendingToken: null, error: message };
}

export function setTopM(state: ViewState, m: number): ViewState {
  if (!Number.isInteger(m) || m < 1) {
    return state;
  }
  return { ...state, m };
}

export function setToggle(
  state: ViewState,
  which: "showGt" | "showEstimate" | "showQueryBox",
  value: boolean,
): ViewState {
  return { ...state, [which]: value };
}

export interface GalleryItem {
  caseId: string;
  dTotal: number;
  weight: number;
  imagePath: string;
}

/** Ranked gallery entries, in exactly the order the service returned. */
export function galleryItems(state: ViewState): GalleryItem[] {
  if (!state.result) {
    return [];
  }
  return state.result.matches.map((m) => ({
    caseId: m.case_id,
    dTotal: m.d_total,
    weight: m.weight,
    imagePath: `/api/image/${encodeURIComponent(m.case_id)}`,
  }));
}
