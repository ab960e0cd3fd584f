"""JSON and CSV input/output"""
