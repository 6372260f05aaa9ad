"""
Static SVG figures rendered from result CSVs
"""
