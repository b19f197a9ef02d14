/** Shapes exchanged with the query service. */

/** Inclusive pixel box [x_s, y_s, x_e, y_e] in image coordinates. */
export type Box = [number, number, number, number];

export interface CaseInfo {
  case_id: string;
  /** [height, width] */
  dims: [number, number];
  bbox: Box;
}

export interface MatchInfo {
  case_id: string;
  d_total: number;
  weight: number;
}

export interface QueryResult {
  estimated_bbox: Box;
  query_bbox: Box;
  matches: MatchInfo[];
}

export interface ImagePoint {
  x: number;
  y: number;
}
