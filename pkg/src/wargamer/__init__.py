"""Campaign wargaming engine and planning service.

Core pieces:

- :mod:`wargamer.model` -- parameterizable component models composed into a
  coupled multi-resolution model graph.
- :mod:`wargamer.plan` -- multi-agency campaign plans (actions, lines of
  effort, resources) and the synchronization matrix view.
- :mod:`wargamer.engine` -- deterministic discrete-time simulation, baseline
  generation, effect detection, batch sweeps.
- :mod:`wargamer.coa` -- course-of-action evaluation, comparison, robustness
  across competing situation hypotheses.
- :mod:`wargamer.analytics` -- assessment analytics: proximity-derived
  knowledge networks, workload scoring, interaction-network metrics, trust.
- :mod:`wargamer.store` / :mod:`wargamer.server` -- versioned document store
  and the HTTP planning service.
- :mod:`wargamer.cli` -- headless entry point.
"""

__version__ = "0.1.0"
