"""
vilenkin-mra
Refinable step functions, masks and orthogonal multiresolution analysis on
p-adic Vilenkin groups.
"""
