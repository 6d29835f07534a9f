"""Command-line frontend: job configuration, command dispatch and run reports."""
