"""
CLI Module - Pipeline Orchestration and Command Line

This module handles:
- Pipeline configuration (YAML/TOML files plus command-line overrides)
- The LangGraph stage graph with per-stage content-hash caching
- Atomic report writes, the JSON bundle and the checksum manifest
- The narrative-miner subcommands
"""

from .config import PipelineConfig, load_config, parse_overrides, read_config_file
from .artifacts import build_manifest, sha256_file, write_frame, write_json
from .pipeline import STAGES, PipelineRunner, StageCache, arun_pipeline, create_pipeline_workflow, run_pipeline

__all__ = [
    "STAGES",
    "PipelineConfig",
    "PipelineRunner",
    "StageCache",
    "arun_pipeline",
    "build_manifest",
    "create_pipeline_workflow",
    "load_config",
    "parse_overrides",
    "read_config_file",
    "run_pipeline",
    "sha256_file",
    "write_frame",
    "write_json",
]
