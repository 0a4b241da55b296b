from spectrim.treebuilder import PipelineOptions, execute_pipeline
from spectrim.report import build_report


def run_state(generated, **kwargs):
    return execute_pipeline(generated.project_dir, PipelineOptions(repo=generated.repo, **kwargs))


def run_report(generated, **kwargs):
    return build_report(run_state(generated, **kwargs))
