"""Run orchestration and input loading."""
