# Analytic, Monte Carlo, configuration and experiment services
