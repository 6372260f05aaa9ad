from .base_chart import BaseChart
from ..core.constants import CHART_COLORS


class TrajectoryChart(BaseChart):
    """Robot paths in the plane, one line per trajectory table"""
    def __init__(self, trajectories, labels=None, width=6, height=6, dpi=100):
        super().__init__(trajectories, width, height, dpi, title='Trajectories')
        self.labels = labels or [None] * len(trajectories)

    def update_chart(self):
        """Plot every trajectory with its start marked"""
        self.clear()
        for i, (frame, label) in enumerate(zip(self.data, self.labels)):
            color = CHART_COLORS[i % len(CHART_COLORS)]
            self.axes.plot(frame['x'], frame['y'], color=color, linewidth=1, label=label)
            self.axes.plot(frame['x'].iloc[0], frame['y'].iloc[0], marker='o', color=color)
        self.axes.set_aspect('equal', adjustable='datalim')
        self.set_labels('x (m)', 'y (m)')
        if any(self.labels):
            self.axes.legend(fontsize='small')
