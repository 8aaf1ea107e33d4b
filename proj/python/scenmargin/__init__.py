"""Margin-based scenario optimization: certificates, solvers and audits.

Chains, constants and distributions are passed as plain dicts (the same JSON
schema the command-line tool reads); reports come back as dicts.
"""
import json

from . import _core
from ._core import ConfigError, InvalidArgument, PreconditionError, convex_scenario_delta, exact_violation_circle

__all__ = [
    "ConfigError",
    "InvalidArgument",
    "PreconditionError",
    "circle_chain",
    "compute_constants",
    "constants_single",
    "convex_sample_complexity",
    "convex_scenario_delta",
    "dimension_crossover",
    "evaluate",
    "exact_violation_circle",
    "fast_rate_bound",
    "margin_bound",
    "margin_complexity",
    "margin_sample_complexity",
    "monte_carlo_violation",
    "replay_certificate",
    "reproduce_figures",
    "run_config",
    "sample_scenarios",
    "solve",
    "vc_bound",
]


def _s(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def circle_chain():
    return json.loads(_core.circle_chain())


def evaluate(chain, x, theta):
    return _core.evaluate(_s(chain), list(x), list(theta))


def compute_constants(chain, distribution, sample_budget=0, seed=0):
    return json.loads(_core.compute_constants(_s(chain), _s(distribution), sample_budget, seed))


def constants_single(tau, lam):
    return json.loads(_core.constants_single(tau, lam))


def margin_bound(vhat_gamma, constants, gamma, delta, n):
    return json.loads(_core.margin_bound(vhat_gamma, _s(constants), gamma, delta, n))


def fast_rate_bound(constants, gamma, delta, n, vhat=0.0):
    return json.loads(_core.fast_rate_bound(_s(constants), gamma, delta, n, vhat))


def vc_bound(d_vc, vhat, delta, n):
    return json.loads(_core.vc_bound(d_vc, vhat, delta, n))


def replay_certificate(certificate):
    return json.loads(_core.replay_certificate(_s(certificate)))


def margin_sample_complexity(epsilon, delta, constants, gamma):
    return json.loads(_core.margin_sample_complexity(epsilon, delta, _s(constants), gamma))


def convex_sample_complexity(epsilon, delta, d):
    return json.loads(_core.convex_sample_complexity(epsilon, delta, d))


def dimension_crossover(epsilon, delta, constants, gamma):
    return _core.dimension_crossover(epsilon, delta, _s(constants), gamma)


def margin_complexity(n, epsilon, delta, constants):
    return json.loads(_core.margin_complexity(n, epsilon, delta, _s(constants)))


def sample_scenarios(distribution, n, seed=0):
    return _core.sample_scenarios(_s(distribution), n, seed)


def monte_carlo_violation(chain, x, distribution, samples, seed=0, alpha=0.05):
    return json.loads(_core.monte_carlo_violation(_s(chain), list(x), _s(distribution), samples, seed, alpha))


def solve(kind, chain, scenarios, gamma=0.0, solver=None):
    return json.loads(_core.solve(kind, _s(chain), [list(r) for r in scenarios], gamma,
                                  "" if solver is None else _s(solver)))


def run_config(command, path):
    return json.loads(_core.run_config(command, str(path)))


def reproduce_figures(out_dir, seed=0, mc_samples=1_000_000):
    return json.loads(_core.reproduce_figures(str(out_dir), seed, mc_samples))
