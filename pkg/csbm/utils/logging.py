"""
Logging utilities.
==================
Callback objects recording the trajectory of a refinement run.
"""

from datetime import datetime

import numpy as np


class RefinementTrace:
    """Trace callback for :func:`csbm.refine.ir_cluster`.

    Called with the ``locals()`` of the refinement loop after every iteration
    (and once before the first one). Records, every ``freq`` calls, the
    partition, the number of nodes that changed cluster, the criterion value,
    the elapsed time, and, when a reference partition is known, the Hamming
    distance and the loss l(z^(t), z_true).

    Args:
      z_true: np.ndarray, optional
        reference partition

      profile: csbm.metrics.SeparationProfile, optional
        separation table used for the loss; defaults to the one passed to
        ``ir_cluster``.

      log_labels: bool
        whether to store a copy of every partition.

      freq: int

      callable: function, optional
        evaluated on the loop's locals, stored in ``trace_callable``.
    """

    def __init__(self, z_true=None, profile=None, log_labels=True, freq=1, callable=None):
        self.freq = int(freq)
        self.z_true = None if z_true is None else np.asarray(z_true)
        self.profile = profile
        self.log_labels = log_labels

        self.trace_labels = []
        self.trace_changed = []
        self.trace_objective = []
        self.trace_hamming = []
        self.trace_loss = []
        self.trace_time = []
        if callable is not None:
            self.callable = callable
            self.trace_callable = []
        self.converged = False
        self.start = datetime.now()
        self._counter = 0

    def __call__(self, kwargs):
        z = kwargs['z']
        self.converged = bool(kwargs.get('converged', False))
        if self._counter % self.freq == 0:
            if self.log_labels:
                self.trace_labels.append(np.array(z))
            self.trace_changed.append(int(kwargs.get('changed', 0)))
            self.trace_objective.append(kwargs.get('objective', np.nan))

            z_true = self.z_true if self.z_true is not None else kwargs.get('z_true')
            if z_true is not None:
                # Local import: metrics depends on this package.
                from csbm import metrics
                self.trace_hamming.append(metrics.hamming(z, z_true))
                profile = self.profile if self.profile is not None else kwargs.get('profile')
                if profile is not None:
                    self.trace_loss.append(metrics.loss_l(z, z_true, profile))
            try:
                self.trace_callable.append(self.callable(kwargs))
            except AttributeError:
                pass

            delta = (datetime.now() - self.start).total_seconds()
            self.trace_time.append(delta)

        self._counter += 1

    @property
    def n_iter(self):
        """Number of refinement iterations recorded (the initial call excluded)."""
        return max(self._counter - 1, 0)

    def __len__(self):
        return len(self.trace_time)
