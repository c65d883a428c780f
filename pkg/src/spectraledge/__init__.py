"""Spectral edge of sparse Erdos-Renyi graphs.

Library layout:
  graph        sampling, storage, degree benchmarks
  local        BFS balls, local statistics, degree regimes, structural event
  tree_eig     continued-fraction eigenpairs on tree balls, estimator family
  sparse_eigen restarted Lanczos on the full adjacency operator
  prune        edge pruning around high-degree vertices, rough test vectors
  probdist     Poisson / binomial pmfs and sharp tail bounds
  pointproc    edge eigenvalue point process, intensity, Prokhorov distance
  pipeline     per-seed experiment orchestration
  cli          command-line entry points
"""

__version__ = "0.1.0"
