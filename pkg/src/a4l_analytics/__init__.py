"""Configuration-driven analytics pipeline for tabular learner data.

One codebase, many research domains: every run is fully described by a
JSON analysis-configuration payload naming the statistic, dataset,
variables and output location. A scheduled sync cycle watches a
published data store, versions datasets by content hash, archives
superseded files and re-runs exactly the payloads that depend on what
changed.
"""

__version__ = "0.1.0"
