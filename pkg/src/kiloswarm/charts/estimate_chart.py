import numpy as np

from .base_chart import BaseChart
from ..core.constants import LEFT_BIAS_COLOR, RIGHT_BIAS_COLOR


class EstimateChart(BaseChart):
    """Per-robot turning-rate estimates sorted by mean, left-biased in red, right in blue"""
    def __init__(self, estimates, width=7, height=4, dpi=100):
        super().__init__(estimates, width, height, dpi, title='Heading bias by robot')

    def update_chart(self):
        self.clear()
        table = self.data.sort_values('mu_i', kind='mergesort').reset_index(drop=True)
        colors = np.where(table['mu_i'] > 0, LEFT_BIAS_COLOR, RIGHT_BIAS_COLOR)
        for rank, row in table.iterrows():
            self.axes.errorbar(rank, row['mu_i'], yerr=row['sigma_i'], fmt='o',
                               color=colors[rank], markersize=3, capsize=2)
        self.axes.axhline(y=0, color='#cccccc', linestyle='-', alpha=0.7)
        self.axes.set_xticks(range(len(table)))
        self.axes.set_xticklabels(table['robot_id'].astype(str), rotation=90, fontsize='x-small')
        self.set_labels('robot id', 'turning rate (rad/s)')
