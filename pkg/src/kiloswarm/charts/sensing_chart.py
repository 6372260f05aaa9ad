from .base_chart import BaseChart
from ..core.constants import CHART_COLORS


class ResponseChart(BaseChart):
    """Every sensor's reading over the stimulus sweep, with the per-sample median"""
    def __init__(self, responses, width=7, height=4, dpi=100):
        super().__init__(responses, width, height, dpi, title='Sensor response')

    def update_chart(self):
        self.clear()
        for i, (robot_id, group) in enumerate(self.data.groupby('robot_id')):
            self.axes.plot(group['sample_index'], group['reading'], linewidth=0.8, alpha=0.6,
                           color=CHART_COLORS[i % len(CHART_COLORS)])
        median = self.data.groupby('sample_index')['reading'].median()
        self.axes.plot(median.index, median.values, color='black', linewidth=1.5, label='median')
        self.axes.legend(fontsize='small')
        self.set_labels('sample', 'reading')


class AgreementChart(BaseChart):
    """Number of robots deciding 'above' per threshold"""
    def __init__(self, curve, width=7, height=4, dpi=100):
        super().__init__(curve, width, height, dpi, title='Threshold agreement')

    def update_chart(self):
        self.clear()
        self.axes.step(self.data['threshold'], self.data['count'], where='post',
                       color=CHART_COLORS[0])
        self.set_labels('threshold', 'robots at or above threshold')
