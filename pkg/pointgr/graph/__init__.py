"""
Построение графа k ближайших соседей и признаков рёбер.
"""
from .bench import bench_knn
from .edges import EdgeFeatureBlock, assemble_edge_features, build_edge_features, multiscale_graph
from .knn import NeighborGraph, knn_batch, knn_bruteforce, knn_indexed

__all__ = [
    'EdgeFeatureBlock',
    'NeighborGraph',
    'assemble_edge_features',
    'bench_knn',
    'build_edge_features',
    'knn_batch',
    'knn_bruteforce',
    'knn_indexed',
    'multiscale_graph',
]
