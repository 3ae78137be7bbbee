"""ringfit test suite: model, physics, synthesis, fitting, analysis, file formats and CLI."""
