# Slow Monte Carlo reproductions
