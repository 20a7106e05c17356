import threading
from typing import Optional

import pandas as pd


class ShootingEventLogger:
    """Event log of shooting attempts, one row per integration

    A case groups the attempts of one threshold search or one sweep speed.
    """

    def __init__(self):
        self.events = []
        self.case_counter = 0
        self.event_counter = 0
        self._sequence = {}
        self._lock = threading.Lock()

    def new_case(self, label: str) -> str:
        with self._lock:
            self.case_counter += 1
            case_id = f"case_{self.case_counter:03d}_{label}"
            self._sequence[case_id] = 0
            return case_id

    def log_event(self, case_id: Optional[str], interval: int, speed: float, delta0: float, outcome: str,
                  z_end: float, slope_alpha: float, slope_beta: float, n_steps: int, reflected: bool = False):
        """Log a single shooting attempt"""
        with self._lock:
            case_id = case_id or 'case_000_adhoc'
            sequence = self._sequence.get(case_id, 0) + 1
            self._sequence[case_id] = sequence
            self.events.append({
                'case_id': case_id,
                'event_id': f"evt_{self.event_counter:06d}",
                'sequence_number': sequence,
                'interval': interval,
                'reflected': reflected,
                'speed': speed,
                'delta0': delta0,
                'outcome': outcome,
                'z_end': z_end,
                'slope_alpha': slope_alpha,
                'slope_beta': slope_beta,
                'n_steps': n_steps,
            })
            self.event_counter += 1

    def get_dataframe(self) -> pd.DataFrame:
        """Return events as pandas DataFrame"""
        with self._lock:
            return pd.DataFrame(list(self.events))

    def export_to_csv(self, filename: str):
        """Export events to CSV file"""
        self.get_dataframe().to_csv(filename, index=False)
