"""stockbench: a price-forecasting workbench.

Five forecasting models built from first principles (BiLSTM, ARIMA, CNN+LSTM,
stacked GRU, LSTM+GRU), a benchmark harness that writes score tables and
prediction exports with figures, and an oracle service that collects human
predictions, ranks forecasters, and blends their consensus with the models.
"""

from . import arima, nn, series, synth, zoo

__version__ = "0.1.0"

__all__ = ["arima", "nn", "series", "synth", "zoo", "__version__"]
