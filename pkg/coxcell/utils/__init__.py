# Quadrature, random streams, statistics, validation and output helpers
