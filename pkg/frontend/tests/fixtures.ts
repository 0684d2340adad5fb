/** Handmade payloads mirroring the service wire format. */

import type {
  ConsensusPayload,
  EmbeddingPayload,
  OverviewPayload,
  ParallelSetsPayload,
  SimilarPayload,
  TimelinePayload,
  WordCloudPayload,
  WorkerProfile,
} from "../src/types.js";

export function profile(id: string, gender = "female"): WorkerProfile {
  return {
    id,
    age_bracket: "25-34",
    gender,
    education_level: "bachelor",
    medical_expertise: "none",
    visualization_expertise: "some",
    reward_tier: "standard",
    location: "US",
  };
}

export const CONSENSUS: ConsensusPayload = {
  dataset_id: "TINY",
  threshold: 50,
  mode: "response",
  sort: "time",
  exclude: false,
  labels: { S1: "polyp", S2: "polyp_free", S3: "unviewed" },
  confusion: { tp: 1, fp: 0, tn: 1, fn: 0 },
  sensitivity: 0.5,
  specificity: 1,
  n_polyp_labels: 1,
  votes: [
    { segment_id: "S1", n_viewers: 2, n_polyp_votes: 2, polyp_ratio: 1 },
    { segment_id: "S2", n_viewers: 2, n_polyp_votes: 0, polyp_ratio: 0 },
  ],
  unviewed: ["S3"],
  columns: [
    {
      segment_id: "S1",
      ordinal: 1,
      direction: "antegrade",
      label: "polyp",
      margin: {
        segment_id: "S1",
        n_viewers: 2,
        n_polyp_votes: 2,
        n_polyp_free_votes: 0,
        n_correct: 2,
        n_false_positive: 0,
        n_false_negative: 0,
        mean_response_time_ms: 1500,
        normalized_time: 1,
      },
    },
    {
      segment_id: "S2",
      ordinal: 2,
      direction: "retrograde",
      label: "polyp_free",
      margin: {
        segment_id: "S2",
        n_viewers: 2,
        n_polyp_votes: 0,
        n_polyp_free_votes: 2,
        n_correct: 2,
        n_false_positive: 0,
        n_false_negative: 0,
        mean_response_time_ms: 900,
        normalized_time: 0.6,
      },
    },
    { segment_id: "S3", ordinal: 3, direction: "antegrade", label: "unviewed", margin: null },
  ],
  rows: [
    {
      worker_id: "W1",
      profile: profile("W1"),
      aggregate: {
        worker_id: "W1",
        n_responses: 2,
        n_polyp_answers: 1,
        n_polyp_free_answers: 1,
        n_correct: 2,
        n_false_positive: 0,
        n_false_negative: 0,
        accuracy: 1,
        total_task_time_ms: 3000,
        normalized_task_time: 1,
      },
      cells: [
        { segment_id: "S1", element: "polyp", relative_time: 1 },
        { segment_id: "S2", element: "polyp_free", relative_time: 0.25 },
      ],
    },
    {
      worker_id: "W2",
      profile: profile("W2", "male"),
      aggregate: {
        worker_id: "W2",
        n_responses: 2,
        n_polyp_answers: 1,
        n_polyp_free_answers: 1,
        n_correct: 2,
        n_false_positive: 0,
        n_false_negative: 0,
        accuracy: 1,
        total_task_time_ms: 2000,
        normalized_task_time: 0.6667,
      },
      cells: [
        { segment_id: "S1", element: "polyp", relative_time: 0.5 },
        { segment_id: "S2", element: "polyp_free", relative_time: 1 },
      ],
    },
  ],
};

export const STATISTICS_CONSENSUS: ConsensusPayload = {
  ...CONSENSUS,
  mode: "statistics",
  rows: CONSENSUS.rows.map((row) => ({
    ...row,
    cells: [
      { segment_id: "S1", element: "correct", relative_time: 0.5 },
      { segment_id: "S2", element: "false_positive", relative_time: 1 },
    ],
  })),
};

export const EMPTY_CONSENSUS: ConsensusPayload = {
  ...CONSENSUS,
  labels: { S1: "unviewed", S2: "unviewed", S3: "unviewed" },
  sensitivity: null,
  specificity: null,
  n_polyp_labels: 0,
  votes: [],
  unviewed: ["S1", "S2", "S3"],
  columns: CONSENSUS.columns.map((column) => ({
    ...column,
    label: "unviewed" as const,
    margin: null,
  })),
  rows: [],
};

export const SIMILAR: SimilarPayload = {
  dataset_id: "TINY",
  worker_id: "W1",
  k: 5,
  signature: "PN",
  similar: [
    { worker_id: "W2", score: 1, exact_match: true, signature: "PN" },
    { worker_id: "W3", score: 0.8333, exact_match: false, signature: "PP" },
  ],
};

export const EMBEDDING: EmbeddingPayload = {
  dataset_id: "TINY",
  items: "workers",
  method: "mds",
  glyph: "polyps",
  weights: null,
  available_axes: ["age_bracket", "gender", "education_level", "location"],
  exclude: false,
  radius: 0,
  layout_converged: true,
  layout_iterations: 0,
  points: [
    { id: "W1", x: -1.2, y: 0.4, lightness: 0.25, arc_fraction: 0.5 },
    { id: "W2", x: 0.8, y: -0.6, lightness: 0.75, arc_fraction: 1 },
    { id: "W3", x: 0.1, y: 0.9, lightness: 0.5, arc_fraction: 0 },
  ],
  stress: 0.0012,
  mds_iterations: 0,
};

export const PARALLEL_SETS: ParallelSetsPayload = {
  dataset_id: "TINY",
  axes: ["gender", "education_level"],
  total: 5,
  exclude: false,
  nodes: [
    {
      category: "female",
      count: 3,
      children: [
        { category: "bachelor", count: 2, children: [] },
        { category: "master", count: 1, children: [] },
      ],
    },
    {
      category: "male",
      count: 2,
      children: [{ category: "bachelor", count: 2, children: [] }],
    },
  ],
  ribbons: [
    [
      { source: "female", target: "bachelor", count: 2 },
      { source: "female", target: "master", count: 1 },
      { source: "male", target: "bachelor", count: 2 },
    ],
  ],
};

export const TIMELINE: TimelinePayload = {
  bars: [
    {
      dataset_id: "TINY",
      created_on: "2026-03-01",
      n_workers: 3,
      n_responses: 9,
      mean_accuracy: 0.5,
    },
    {
      dataset_id: "BIG",
      created_on: "2026-04-01",
      n_workers: 12,
      n_responses: 240,
      mean_accuracy: null,
    },
  ],
  datasets: [
    {
      id: "TINY",
      created_on: "2026-03-01",
      fov_degrees: 90,
      flythrough_speed: 1,
      n_segments: 4,
      n_workers: 3,
      n_responses: 9,
      n_comments: 2,
      has_ground_truth: true,
      n_annotations: 0,
    },
    {
      id: "BIG",
      created_on: "2026-04-01",
      fov_degrees: 120,
      flythrough_speed: 2,
      n_segments: 30,
      n_workers: 12,
      n_responses: 240,
      n_comments: 0,
      has_ground_truth: false,
      n_annotations: 1,
    },
  ],
};

export const WORDCLOUD: WordCloudPayload = {
  dataset_id: "TINY",
  top_k: 50,
  exclude: false,
  words: [
    { word: "fast", count: 3, worker_ids: ["W1", "W2"] },
    { word: "video", count: 2, worker_ids: ["W1", "W2"] },
    { word: "difficult", count: 1, worker_ids: ["W2"] },
  ],
};

export const OVERVIEW: OverviewPayload = {
  dataset_id: "TINY",
  n_workers: 3,
  n_segments: 4,
  n_responses: 9,
  n_comments: 2,
  mean_polyp_answers: 1.3333,
  mean_polyp_free_answers: 1.6667,
  mean_correct: 1.5,
  mean_false_positive: 0.5,
  mean_false_negative: 1,
  mean_accuracy: 0.5,
  mean_total_time_ms: 2500,
  mean_normalized_time: 0.8,
  sweep_step: 5,
  exclude: false,
  sweep: [
    { threshold: 0, sensitivity: 1, specificity: 0, n_polyp_labels: 4 },
    { threshold: 50, sensitivity: 0.5, specificity: 1, n_polyp_labels: 2 },
    { threshold: 100, sensitivity: null, specificity: null, n_polyp_labels: 0 },
  ],
};
