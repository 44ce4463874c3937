//! Cost graph between adjacent frames and forward path extraction.

mod dijkstra;
mod edges;

pub use dijkstra::{link_dijkstra, link_dijkstra_with, LinkGraph};
pub use edges::{
    angle_deviation, assign_costs, build_edges, direction_deg, dominant_angle, edge_cost,
    shortest_outgoing, AngleEdges, DominantAngle, GraphWeights, LinkEdge, ObjectRef,
    HISTOGRAM_BIN_DEG, SINGULAR_ANGLE_DEG,
};
