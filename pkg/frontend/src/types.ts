// Wire formats of the workbench service. Field names mirror the JSON
// documents exactly; lengths are meters, angles radians.

export interface PointXY {
  x: number;
  y: number;
}

export interface PedestrianDoc {
  x: number;
  y: number;
  heading: number;
  speed: number;
  body_radius: number;
}

export interface ScenarioSummary {
  id: string;
  width: number;
  height: number;
  resolution: number;
  pedestrians: number;
  has_demo: boolean;
}

export interface ScenarioDoc {
  id: string;
  width: number;
  height: number;
  resolution: number;
  occupancy_rle: [number, number][];
  pedestrians: PedestrianDoc[];
  start: PointXY;
  goal: PointXY;
  goal_radius: number;
  robot_radius: number;
}

export type PathSource = "demo_human" | "demo_oracle" | "rrt" | "rrt_star" | "gan_rrt_star";

export interface PathDoc {
  scenario_id: string;
  source: PathSource;
  points: PointXY[];
}

export interface PathMetrics {
  length: number;
  max_front: number;
  max_back: number;
  max_side: number;
  dissimilarity?: number;
  feature_difference?: number;
  homotopic?: boolean;
  path_length_demo?: number;
}

export interface PlanResponse {
  path: PathDoc;
  metrics: PathMetrics;
}

export interface DemoResponse {
  path: PathDoc;
  snapped: { start: boolean; end: boolean };
}

export interface TrainEpochRow {
  epoch: number;
  d_loss: number;
  g_loss: number;
  train_homotopy: number;
  val_homotopy: number;
  val_dissimilarity: number;
  failed_scenarios: number;
}

export type TrainJobState = "queued" | "running" | "done" | "failed" | "cancelled";

export interface TrainJobDoc {
  id: string;
  state: TrainJobState;
  progress: { epochs_done: number; epochs_max: number };
  rows: TrainEpochRow[];
  error: string | null;
  best_epoch: number;
  best_val_homotopy: number;
}

export interface ApiErrorDoc {
  error: string;
  detail: string;
}
