"""Core library: tables, information measures, dimensions, rectangles, protocols, quantum and extractor checks."""
