"""Experiment harness for ttp-forge.

This package contains the pieces the command line drives:
- suite: Benchmark-suite generation from TSPLIB or synthetic coordinates
- pipeline: Analysis stages (ea-data, nlbc, meta-data, fit-model)
- model_build: Rebuilds the packaged parameter model from a generated suite
- compare: Trial execution of learned heuristics and baselines
- ranking: Per-trial rank tables and rank frequencies
- records: CSV layouts shared by the stages
- charts: SVG charts rendered with matplotlib
"""
