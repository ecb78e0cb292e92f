from dataclasses import asdict

from gnn.checkpoint import read_checkpoint, write_checkpoint
from policy.qnetwork import PolicyNets, PolicyNetsProps
from policy.schedule import EpsilonSchedule

EVAL_PREFIX = "q_eval."
TARGET_PREFIX = "q_target."


def save_policy(nets: PolicyNets, schedule: EpsilonSchedule, path: str) -> None:
    """Both Q-networks, the epsilon schedule and the step counter."""
    params = {EVAL_PREFIX + k: v for k, v in nets.eval_parameters.items()}
    params.update(
        {TARGET_PREFIX + k: v for k, v in nets.target_parameters.items()})
    header = {
        "config": nets.config(),
        "schedule": asdict(schedule),
        "steps": nets.steps,
    }
    write_checkpoint(path, "policy", header, params)


def load_policy(path: str):
    """Return (nets, schedule) from a policy checkpoint."""
    header, params = read_checkpoint(path)
    if header.get("kind") != "policy":
        raise ValueError(
            f"{path} holds a '{header.get('kind')}' checkpoint, not a policy")
    nets = PolicyNets(props=PolicyNetsProps(**header["config"]))

    def strip(prefix):
        return {
            name[len(prefix):]: value
            for name, value in params.items() if name.startswith(prefix)
        }

    nets.load(strip(EVAL_PREFIX), strip(TARGET_PREFIX), header["steps"])
    return nets, EpsilonSchedule(**header["schedule"])
