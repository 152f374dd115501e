"""Service modules for the command-line driver."""
