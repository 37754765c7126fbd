"""Learned betweenness ranking toolkit (Python bindings)."""

from ._brava import (
    BravaError,
    ComponentFilter,
    Graph,
    Hyperparams,
    Model,
    PipelineConfig,
    betweenness,
    brute_force_betweenness,
    cmd_generate,
    cmd_ground_truth,
    cmd_pipeline,
    cmd_train,
    degree_mass,
    estimate_gamma,
    forward,
    generate_hyperbolic,
    generate_scale_free,
    infer,
    init_model,
    kendall_tau_b,
    largest_component,
    load_graph,
    load_model,
    min_rank,
    num_threads,
    pearson,
    prune,
    save_edge_list,
    set_num_threads,
    train,
)

__version__ = "0.1.0"
