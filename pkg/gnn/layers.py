import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gnn.model import (CLASSIFIER, GnnModel, ParameterBinding,
                       attention_name, transform_name)
from netbuild.graphs import BuiltGraph
from numerics.autodiff import (Node, add, constant, cross_entropy, dropout,
                               leaky_relu, matmul, mean_rows, slice_rows,
                               softmax_probabilities, softmax_row,
                               sorted_matmul, transpose)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Prediction:
    label: int
    probabilities: np.ndarray


def _gcn_layer(model: GnnModel, binding: ParameterBinding, layer: int,
               aggregation: Node, hidden: Node) -> Node:
    aggregated = sorted_matmul(sorted_matmul(aggregation, hidden),
                               binding[transform_name(layer)])
    return leaky_relu(aggregated, model.props.slope)


def gat_attention(model: GnnModel, binding: ParameterBinding, layer: int,
                  transformed: Node, mask: np.ndarray) -> Node:
    """
    Attention weights of one GAT layer.

    Scores are (h_i T (+) h_j T) q, passed through leaky-ReLU and a row
    softmax over the masked neighborhood.
    """
    d = model.props.dimension
    q = binding[attention_name(layer)]
    source = sorted_matmul(transformed, slice_rows(q, 0, d))
    target = sorted_matmul(transformed, slice_rows(q, d, 2 * d))
    scores = leaky_relu(add(source, transpose(target)), model.props.slope)
    return softmax_row(scores, mask)


def _gat_layer(model: GnnModel, binding: ParameterBinding, layer: int,
               mask: np.ndarray, hidden: Node) -> Node:
    transformed = sorted_matmul(hidden, binding[transform_name(layer)])
    attention = gat_attention(model, binding, layer, transformed, mask)
    return leaky_relu(sorted_matmul(attention, transformed),
                      model.props.slope)


def _forward(model: GnnModel, graph: BuiltGraph, depth: int, training: bool,
             rng: Optional[np.random.Generator],
             binding: Optional[ParameterBinding], skip: bool) -> Node:
    model.check_depth(depth)
    if graph.features.shape[1] != model.props.num_features:
        raise ValueError(
            f"Graph '{graph.graph_id}' has {graph.features.shape[1]} input "
            f"features, model expects {model.props.num_features}")
    binding = binding or model.bind()
    aggregation = constant(graph.aggregation)

    hidden = constant(graph.features)
    for layer in range(1, depth + 1):
        if model.props.kind == "gcn":
            output = _gcn_layer(model, binding, layer, aggregation, hidden)
        else:
            output = _gat_layer(
                model, binding, layer, graph.attention_mask, hidden)
        # Residuals start at layer 2; layer 1 changes the width
        hidden = add(output, hidden) if skip and layer > 1 else output
        if layer < depth:
            hidden = dropout(hidden, model.props.dropout, training, rng)
    return hidden


def gcn_forward(model: GnnModel, graph: BuiltGraph, depth: int,
                training: bool = False,
                rng: Optional[np.random.Generator] = None,
                binding: Optional[ParameterBinding] = None) -> Node:
    if model.props.kind != "gcn":
        raise ValueError(f"gcn_forward called on a '{model.props.kind}' model")
    return _forward(model, graph, depth, training, rng, binding, skip=False)


def gat_forward(model: GnnModel, graph: BuiltGraph, depth: int,
                training: bool = False,
                rng: Optional[np.random.Generator] = None,
                binding: Optional[ParameterBinding] = None) -> Node:
    if model.props.kind != "gat":
        raise ValueError(f"gat_forward called on a '{model.props.kind}' model")
    return _forward(model, graph, depth, training, rng, binding, skip=False)


def skip_forward(model: GnnModel, graph: BuiltGraph, depth: int,
                 training: bool = False,
                 rng: Optional[np.random.Generator] = None,
                 binding: Optional[ParameterBinding] = None) -> Node:
    """Forward pass with identity residuals around layers 2..depth."""
    return _forward(model, graph, depth, training, rng, binding, skip=True)


def node_features(model: GnnModel, graph: BuiltGraph, depth: int,
                  training: bool = False,
                  rng: Optional[np.random.Generator] = None,
                  binding: Optional[ParameterBinding] = None,
                  skip: bool = False) -> Node:
    return _forward(model, graph, depth, training, rng, binding, skip)


def pool_mean(features: Node) -> Node:
    """Global average pooling of node features into one row."""
    return mean_rows(features)


def classify_logits(model: GnnModel, pooled: Node,
                    binding: Optional[ParameterBinding] = None) -> Node:
    binding = binding or model.bind()
    return matmul(pooled, binding[CLASSIFIER])


def classify_loss(model: GnnModel, pooled: Node, label: int,
                  binding: Optional[ParameterBinding] = None) -> Node:
    """Cross entropy of softmax(E T) against the instance label."""
    return cross_entropy(classify_logits(model, pooled, binding), label)


def instance_loss(model: GnnModel, graph: BuiltGraph, depth: int,
                  training: bool, rng: Optional[np.random.Generator],
                  binding: ParameterBinding, skip: bool = False) -> Node:
    features = node_features(
        model, graph, depth, training, rng, binding, skip)
    return classify_loss(model, pool_mean(features), graph.label, binding)


def predict(model: GnnModel, graph: BuiltGraph, depth: int,
            skip: bool = False) -> Prediction:
    """Argmax class (ties to the lower index) and class probabilities."""
    binding = model.bind()
    pooled = pool_mean(node_features(
        model, graph, depth, training=False, binding=binding, skip=skip))
    logits = classify_logits(model, pooled, binding).value[0]
    probabilities = softmax_probabilities(logits)
    return Prediction(label=int(np.argmax(logits)),
                      probabilities=probabilities)
