"""In-memory DuckDB index over the flat files of a sweep."""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import duckdb
import pandas as pd

from ..core.errors import EmptyTrajectoryError

logger = logging.getLogger(__name__)

INDEX_COLUMNS = [
    "name",
    "outcome",
    "t_end",
    "blowup_time_estimate",
    "s_minus_entry",
    "n_samples",
    "min_I",
    "max_energy_residual",
    "max_linf",
]


class ResultsIndex:
    """Registers run CSVs as views and answers SQL over them."""

    def __init__(self):
        self._connection: Optional[duckdb.DuckDBPyConnection] = None
        self.views: List[str] = []

    def connect(self) -> duckdb.DuckDBPyConnection:
        if self._connection is None:
            self._connection = duckdb.connect(database=":memory:")
            logger.debug("Opened in-memory DuckDB for the results index")
        return self._connection

    def execute(self, query: str, params: Optional[List[Any]] = None) -> Any:
        conn = self.connect()
        try:
            return conn.execute(query, params) if params else conn.execute(query)
        except Exception as e:
            logger.error(f"Index query failed: {e}")
            raise

    def register_csv(self, filepath: Path, view_name: str) -> None:
        """Expose a trajectory CSV as a view."""
        filepath = Path(filepath).resolve()
        if not filepath.exists():
            raise FileNotFoundError(f"CSV file not found: {filepath}")
        safe_path = str(filepath).replace("'", "''")
        self.execute(f'CREATE OR REPLACE VIEW "{view_name}" AS SELECT * FROM read_csv_auto(\'{safe_path}\')')
        self.views.append(view_name)
        logger.debug(f"Registered {filepath} as view {view_name}")

    def register_frame(self, df: pd.DataFrame, view_name: str) -> None:
        self.connect().register(view_name, df)

    def close(self) -> None:
        if self._connection:
            self._connection.close()
            self._connection = None

    def __enter__(self):
        self.connect()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()


def _run_statistics_query(views: List[str]) -> str:
    parts = [
        f"SELECT '{view}' AS name, COUNT(*) AS n_samples, MIN(\"I\") AS min_I, "
        f"MAX(energy_residual) AS max_energy_residual, MAX(linf) AS max_linf FROM \"{view}\""
        for view in views
    ]
    return " UNION ALL ".join(parts)


def build_sweep_index(runs: List[Dict[str, Any]], out_path: Path) -> pd.DataFrame:
    """One row per finished run: outcome from its summary, statistics by SQL over its CSV.

    ``runs`` holds dicts with ``name``, ``csv``, ``outcome``, ``t_end``,
    ``blowup_time_estimate`` and ``s_minus_entry``.
    """
    finished = [run for run in runs if run.get("csv")]
    if not finished:
        raise EmptyTrajectoryError("No finished runs to index")
    outcomes = pd.DataFrame(
        [
            {
                "name": run["name"],
                "outcome": run["outcome"],
                "t_end": run["t_end"],
                "blowup_time_estimate": run.get("blowup_time_estimate"),
                "s_minus_entry": run.get("s_minus_entry"),
            }
            for run in finished
        ]
    )
    numeric = ["t_end", "blowup_time_estimate", "s_minus_entry"]
    outcomes[numeric] = outcomes[numeric].astype(float)
    with ResultsIndex() as index:
        for run in finished:
            index.register_csv(Path(run["csv"]), run["name"])
        index.register_frame(outcomes, "outcomes")
        query = (
            "SELECT o.name, o.outcome, o.t_end, o.blowup_time_estimate, o.s_minus_entry, "
            "s.n_samples, s.min_I, s.max_energy_residual, s.max_linf "
            f"FROM outcomes o JOIN ({_run_statistics_query(index.views)}) s ON o.name = s.name "
            "ORDER BY o.name"
        )
        table = index.execute(query).df()
    table = table[INDEX_COLUMNS]
    table.to_csv(out_path, index=False, float_format="%.17g")
    logger.info(f"Indexed {len(table)} runs into {out_path}")
    return table
