"""Figures from soliton laboratory runs.

This package never imports the laboratory itself: it consumes the run
directories through their file contract alone (schema-tagged CSVs plus
JSON summaries), so figures can be regenerated from archived outputs
with nothing else installed.
"""

from solitonplots.readers import MissingInput, SchemaMismatch, Table, read_table

__all__ = ["MissingInput", "SchemaMismatch", "Table", "read_table"]
