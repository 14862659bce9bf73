"""vpbounds: city and regional boundaries from Valeriepieris circle profiles."""

__version__ = "0.1.0"
