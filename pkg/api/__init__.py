# Output surfaces: CSV tables, SVG plots, JSON reports
