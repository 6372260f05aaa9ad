from .base_chart import BaseChart
from ..core.constants import CHART_COLORS, DEFAULT_DELTA_ACC


class BiasScatterChart(BaseChart):
    """Per-trial metric against heading bias with the per-bias mean line"""
    def __init__(self, results, column='cost', curve=None, delta_acc=None,
                 width=7, height=4, dpi=100, title=None):
        super().__init__(results, width, height, dpi, title=title or f'{column} vs heading bias')
        self.column = column
        self.curve = curve
        self.delta_acc = delta_acc

    def update_chart(self):
        self.clear()
        self.axes.scatter(self.data['bias'], self.data[self.column], s=2, alpha=0.3,
                          color=CHART_COLORS[0])
        curve = self.curve
        if curve is None:
            curve = self.data.groupby('bias')[self.column].mean().reset_index()
        value = curve.columns[1]
        self.axes.plot(curve['bias'], curve[value], color='black', linewidth=1.5, label='mean')
        if self.delta_acc is not None:
            self.axes.axhline(y=self.delta_acc, color=CHART_COLORS[1], linestyle='--',
                              label=f'delta_acc = {self.delta_acc:g}')
        self.axes.legend(fontsize='small')
        self.set_labels('heading bias', self.column)


class CostChart(BiasScatterChart):
    def __init__(self, results, curve=None, delta_acc=DEFAULT_DELTA_ACC, **kwargs):
        super().__init__(results, 'cost', curve, delta_acc, title='Phototaxis cost vs heading bias',
                         **kwargs)

    def update_chart(self):
        super().update_chart()
        self.set_labels(y_label='cost (m)')


class CoverageChart(BiasScatterChart):
    def __init__(self, results, curve=None, **kwargs):
        super().__init__(results, 'coverage', curve, None, title='Coverage vs heading bias',
                         **kwargs)


class AcceptabilityChart(BaseChart):
    """R_acc and N_acc against the acceptability threshold on twin axes"""
    def __init__(self, curves, width=7, height=4, dpi=100):
        super().__init__(curves, width, height, dpi, title='Acceptability vs threshold')
        self.count_axes = self.axes.twinx()

    def clear(self):
        super().clear()
        self.count_axes.clear()

    def update_chart(self):
        self.clear()
        self.axes.step(self.data['delta_acc'], self.data['r_acc'], where='post',
                       color=CHART_COLORS[0], label='R_acc')
        self.count_axes.step(self.data['delta_acc'], self.data['n_acc'], where='post',
                             color=CHART_COLORS[2], label='N_acc')
        self.set_labels('delta_acc (m)', 'R_acc (bias range)')
        self.count_axes.set_ylabel('N_acc (trials)')
        self.axes.yaxis.label.set_color(CHART_COLORS[0])
        self.count_axes.yaxis.label.set_color(CHART_COLORS[2])
