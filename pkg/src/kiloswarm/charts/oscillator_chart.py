import numpy as np

from .base_chart import BaseChart
from ..core.constants import Color


class RatioChart(BaseChart):
    """Blue share of the population per sample, red share stacked on top"""
    def __init__(self, history, width=8, height=3, dpi=100):
        super().__init__(history, width, height, dpi, title='Population ratio')

    def update_chart(self):
        self.clear()
        blue = (self.data['color'] == Color.BLUE).groupby(self.data['t']).mean()
        t = blue.index.to_numpy()
        self.axes.fill_between(t, 0.0, blue.to_numpy(), color='#1976D2', step='post', linewidth=0)
        self.axes.fill_between(t, blue.to_numpy(), np.ones_like(t), color='#D32F2F', step='post',
                               linewidth=0)
        self.axes.set_ylim(0, 1)
        self.set_labels('t (s)', 'fraction')


class OrderChart(BaseChart):
    """Kuramoto order parameter over time"""
    def __init__(self, series, width=8, height=3, dpi=100):
        super().__init__(series, width, height, dpi, title='Order parameter')

    def update_chart(self):
        self.clear()
        self.axes.plot(self.data['t'], self.data['r'], color='black', linewidth=1)
        self.axes.set_ylim(0, 1.05)
        self.set_labels('t (s)', 'r')
