/**
 * Wire types for the crowd-consensus HTTP service.
 *
 * These mirror the JSON payloads field for field. The UI never derives
 * a statistic of its own: every number rendered comes straight out of
 * one of these shapes.
 */

/** Consensus label assigned to a segment at the active threshold. */
export type SegmentLabel = "polyp" | "polyp_free" | "unviewed";

/** Matrix cell legend in response mode. */
export type ResponseElement = "polyp" | "polyp_free";

/** Matrix cell legend in statistics mode ("absent" = no ground truth). */
export type StatisticsElement =
  | "correct"
  | "false_positive"
  | "false_negative"
  | "absent";

export type CellElement = ResponseElement | StatisticsElement;

export type MatrixMode = "response" | "statistics";

/** The four row orders offered by the consensus matrix. */
export type SortKey = "time" | "polyps" | "accuracy" | "fn";

export type EmbeddingMethod = "mds" | "tsne";

export type EmbeddingItems = "workers" | "segments";

export type GlyphKind = "polyps" | "accuracy";

/** Error envelope returned by the service on every failure path. */
export interface ErrorEnvelope {
  code: string;
  message: string;
  detail: unknown;
}

export interface WorkerProfile {
  id: string;
  age_bracket: string;
  gender: string;
  education_level: string;
  medical_expertise: string;
  visualization_expertise: string;
  reward_tier: string;
  location: string;
}

export interface UserAggregate {
  worker_id: string;
  n_responses: number;
  n_polyp_answers: number;
  n_polyp_free_answers: number;
  n_correct: number | null;
  n_false_positive: number | null;
  n_false_negative: number | null;
  accuracy: number | null;
  total_task_time_ms: number;
  normalized_task_time: number;
}

export interface SegmentMargin {
  segment_id: string;
  n_viewers: number;
  n_polyp_votes: number;
  n_polyp_free_votes: number;
  n_correct: number | null;
  n_false_positive: number | null;
  n_false_negative: number | null;
  mean_response_time_ms: number;
  normalized_time: number;
}

export interface MatrixCell {
  segment_id: string;
  element: CellElement;
  relative_time: number;
}

export interface MatrixRow {
  worker_id: string;
  profile: WorkerProfile;
  aggregate: UserAggregate;
  cells: MatrixCell[];
}

export interface MatrixColumn {
  segment_id: string;
  ordinal: number;
  direction: string;
  label: SegmentLabel;
  margin: SegmentMargin | null;
}

export interface VoteSummary {
  segment_id: string;
  n_viewers: number;
  n_polyp_votes: number;
  polyp_ratio: number;
}

export interface ConfusionCounts {
  tp: number;
  fp: number;
  tn: number;
  fn: number;
}

/** Body of GET /datasets/{id}/consensus. */
export interface ConsensusPayload {
  dataset_id: string;
  threshold: number;
  mode: MatrixMode;
  sort: SortKey;
  exclude: boolean;
  labels: Record<string, SegmentLabel>;
  confusion: ConfusionCounts;
  sensitivity: number | null;
  specificity: number | null;
  n_polyp_labels: number;
  votes: VoteSummary[];
  unviewed: string[];
  columns: MatrixColumn[];
  rows: MatrixRow[];
}

export interface SweepPoint {
  threshold: number;
  sensitivity: number | null;
  specificity: number | null;
  n_polyp_labels: number;
}

/** Body of GET /datasets/{id}/sweep. */
export interface SweepPayload {
  dataset_id: string;
  step: number;
  exclude: boolean;
  points: SweepPoint[];
}

export interface SimilarHit {
  worker_id: string;
  score: number;
  exact_match: boolean;
  signature: string;
}

/** Body of GET /datasets/{id}/similar-workers. */
export interface SimilarPayload {
  dataset_id: string;
  worker_id: string;
  k: number;
  signature: string;
  similar: SimilarHit[];
}

export interface EmbeddingPoint {
  id: string;
  x: number;
  y: number;
  lightness: number;
  arc_fraction: number;
}

/** Body of GET /datasets/{id}/embedding. */
export interface EmbeddingPayload {
  dataset_id: string;
  items: EmbeddingItems;
  method: EmbeddingMethod;
  glyph: GlyphKind;
  weights: Record<string, number> | null;
  available_axes: string[];
  exclude: boolean;
  radius: number;
  layout_converged: boolean;
  layout_iterations: number;
  points: EmbeddingPoint[];
  stress?: number;
  mds_iterations?: number;
  kl_divergence?: number;
  perplexity?: number;
  seed?: number;
}

export interface CategoryNode {
  category: string;
  count: number;
  children: CategoryNode[];
}

export interface Ribbon {
  source: string;
  target: string;
  count: number;
}

/** Body of GET /datasets/{id}/parallel-sets. */
export interface ParallelSetsPayload {
  dataset_id: string;
  axes: string[];
  total: number;
  exclude: boolean;
  nodes: CategoryNode[];
  ribbons: Ribbon[][];
}

export interface WordEntry {
  word: string;
  count: number;
  worker_ids: string[];
}

/** Body of GET /datasets/{id}/wordcloud. */
export interface WordCloudPayload {
  dataset_id: string;
  top_k: number;
  exclude: boolean;
  words: WordEntry[];
}

/** Body of GET /datasets/{id}/overview. */
export interface OverviewPayload {
  dataset_id: string;
  n_workers: number;
  n_segments: number;
  n_responses: number;
  n_comments: number;
  mean_polyp_answers: number | null;
  mean_polyp_free_answers: number | null;
  mean_correct: number | null;
  mean_false_positive: number | null;
  mean_false_negative: number | null;
  mean_accuracy: number | null;
  mean_total_time_ms: number | null;
  mean_normalized_time: number | null;
  sweep_step: number;
  exclude: boolean;
  sweep: SweepPoint[];
}

export interface DatasetSummary {
  id: string;
  created_on: string;
  fov_degrees: number;
  flythrough_speed: number;
  n_segments: number;
  n_workers: number;
  n_responses: number;
  n_comments: number;
  has_ground_truth: boolean;
  n_annotations: number;
}

export interface TimelineBar {
  dataset_id: string;
  created_on: string;
  n_workers: number;
  n_responses: number;
  mean_accuracy: number | null;
}

/** Body of GET /datasets. */
export interface TimelinePayload {
  bars: TimelineBar[];
  datasets: DatasetSummary[];
}

export interface WorkerResponse {
  presentation_index: number;
  segment_id: string;
  ordinal: number;
  answer: "POLYP" | "POLYP_FREE";
  response_time_ms: number;
  correct: boolean | null;
  running_accuracy: number | null;
}

/** Body of GET /datasets/{id}/workers/{worker}/details. */
export interface WorkerDetailsPayload {
  dataset_id: string;
  profile: WorkerProfile;
  aggregate: UserAggregate | null;
  comment: string | null;
  signature: string;
  responses: WorkerResponse[];
  similar: { worker_id: string; score: number }[];
}

export interface Annotation {
  target: "worker" | "segment";
  target_id: string;
  marked_by: string;
  marked_at: string;
  note: string;
}

/** Body of GET /datasets/{id}/annotations. */
export interface AnnotationsPayload {
  dataset_id: string;
  annotations: Annotation[];
  marked_workers: string[];
  marked_segments: string[];
}

/** Body of POST /datasets/{id}/annotations (201). */
export interface AnnotationCreated {
  dataset_id: string;
  annotation: Annotation;
  marked_workers: string[];
  marked_segments: string[];
}

/** Request body of POST /datasets/{id}/annotations. */
export interface AnnotationRequest {
  target: "worker" | "segment";
  target_id: string;
  marked_by: string;
  note?: string;
}

/** Union of every payload a view query can return. */
export type ViewPayload =
  | ConsensusPayload
  | SimilarPayload
  | EmbeddingPayload
  | ParallelSetsPayload
  | WordCloudPayload
  | OverviewPayload
  | TimelinePayload
  | WorkerDetailsPayload;
