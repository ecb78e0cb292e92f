import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from gnn.model import GnnModel
from mdp.run_config import MdpConfig, run_seeds
from mdp.runlog import RunLog, TimestepRecord
from mdp.trainer import build_model, evaluate, greedy_depths, train_step
from mdp.transition import transition
from netbuild.graphs import BuiltGraph, Splits
from netbuild.subject_graph import SubjectGraph
from numerics.initializers import seed_streams
from policy.memory import Experience, ReplayMemory, store_and_sample
from policy.qnetwork import (PolicyNets, PolicyNetsProps, encode_state,
                             select_action, state_size, train_policy)
from policy.schedule import EpsilonSchedule, RewardWindow, epsilon_at, reward

logger = logging.getLogger(__name__)

MDP_STREAMS = ("start", "action", "dropout", "transition", "replay")


@dataclass
class MdpResult:
    policy: PolicyNets
    gnn1: GnnModel
    memory: ReplayMemory
    schedule: EpsilonSchedule
    run_log: RunLog
    experiences: int


def build_policy(config: MdpConfig, num_nodes: int, seed: int) -> PolicyNets:
    return PolicyNets(props=PolicyNetsProps(
        input_size=state_size(num_nodes, config.state_encoding),
        num_actions=config.actions,
        hidden=config.hidden,
        slope=config.slope,
        learning_rate=config.policy_lr,
        sync_period=config.sync_period,
        loss_mode=config.q_loss_mode,
        seed=seed,
    ))


def validation_depths(config: MdpConfig, nets: PolicyNets, action: int,
                      graphs: List[BuiltGraph]) -> List[int]:
    """Depths for the PER evaluation: greedy per instance, or the action."""
    if config.per_mode == "action":
        return [action] * len(graphs)
    policy = greedy_depths(nets, config.state_encoding)
    return [policy(graph, 0, None) for graph in graphs]


def train_gnn1(config: MdpConfig, model: GnnModel, splits: Splits,
               graph: BuiltGraph, action: int,
               rng: np.random.Generator) -> float:
    """GNN1 update for one timestep; returns the mean training loss."""
    if config.gnn1_mode == "step":
        return train_step(model, graph, action, rng)
    losses = [train_step(model, g, action, rng) for g in splits.train]
    return float(np.mean(losses))


def run_mdp(config: MdpConfig, splits: Splits, subject_graph: SubjectGraph,
            run_log: Optional[RunLog] = None,
            seeds: Optional[Dict[str, int]] = None) -> MdpResult:
    """
    Co-train GNN1 and the meta-policy for `config.timesteps` steps.

    Each step picks a depth epsilon-greedily for the current subject, takes
    a GNN1 step at that depth, scores GNN1 on the validation split, turns
    the score into a windowed reward, moves to a subject `action` hops away
    on the subject graph and trains q_eval on a replay batch.
    """
    if not splits.train or not splits.val:
        raise ValueError("The MDP needs non-empty training and validation splits")
    run_log = run_log if run_log is not None else RunLog()
    seeds = seeds or run_seeds(config.seed)
    streams = {
        name: np.random.default_rng(value)
        for name, value in seed_streams(seeds["mdp"], MDP_STREAMS).items()
    }

    num_nodes = splits.train[0].num_nodes
    gnn1 = build_model(config, num_nodes, config.actions, seeds["gnn1_init"])
    nets = build_policy(config, num_nodes, seeds["mdp"])
    schedule = EpsilonSchedule(start=config.epsilon_start,
                               end=config.epsilon_end,
                               horizon=config.epsilon_horizon)
    window = RewardWindow(config.window)
    memory = ReplayMemory(config.replay_capacity, config.batch_size)

    by_id = {graph.graph_id: graph for graph in splits.train}
    train_ids = [graph.graph_id for graph in splits.train]
    val_graphs = list(splits.val)
    current_id = train_ids[int(streams["start"].integers(len(train_ids)))]
    experiences = 0

    logger.info(
        f"Starting MDP: {config.timesteps} timesteps, {config.actions} "
        f"actions, {config.gnn.upper()} with d={config.dimension}")
    try:
        for timestep in range(1, config.timesteps + 1):
            graph = by_id[current_id]
            state = encode_state(graph, config.state_encoding)
            epsilon = epsilon_at(schedule, timestep)
            action = select_action(nets, state, epsilon, streams["action"])

            gnn_loss = train_gnn1(
                config, gnn1, splits, graph, action, streams["dropout"])

            depths = validation_depths(config, nets, action, val_graphs)
            per = evaluate(gnn1, val_graphs, depths).accuracy
            step_reward = reward(window, per)

            next_id = transition(subject_graph, current_id, action,
                                 streams["transition"], train_ids)
            next_state = encode_state(by_id[next_id], config.state_encoding)
            batch = store_and_sample(memory, Experience(
                state_id=current_id, state=state, action=action,
                reward=step_reward, next_state_id=next_id,
                next_state=next_state), streams["replay"])
            experiences += 1
            loss = train_policy(nets, batch, config.gamma)

            run_log.add_timestep(TimestepRecord(
                timestep=timestep, state_id=current_id, action=action,
                epsilon=epsilon, per=per, reward=step_reward,
                policy_loss=loss, gnn_loss=gnn_loss,
                next_state_id=next_id, val_depths=depths))
            if timestep % config.log_every == 0:
                logger.info(
                    f"Timestep {timestep}: action {action}, PER {per:.3f}, "
                    f"reward {step_reward:+.3f}, policy loss {loss:.4f}, "
                    f"GNN loss {gnn_loss:.4f}")
            current_id = next_id
    finally:
        run_log.flush()

    return MdpResult(policy=nets, gnn1=gnn1, memory=memory,
                     schedule=schedule, run_log=run_log,
                     experiences=experiences)
