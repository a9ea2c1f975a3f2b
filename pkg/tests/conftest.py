import datetime as dt
import http.server
import threading

import pytest

import cryptodynamics as cd
from cryptodynamics.simulate import PhaseSpec

# A compact two-phase synthetic market small enough for exhaustive checks.
# The entry moments (0.438, 0.308) are exactly representable for six assets.
SMALL_START = dt.date(2019, 6, 1)
SMALL_END = dt.date(2019, 12, 31)
SMALL_PERIODS = cd.PeriodPartition((
    cd.Period("calm", dt.date(2019, 6, 1), dt.date(2019, 9, 30)),
    cd.Period("storm", dt.date(2019, 10, 1), dt.date(2019, 12, 31)),
))
SMALL_PHASES = {
    "calm": PhaseSpec(0.438, 0.308, +0.0010, 0.0040, 0.0300),
    "storm": PhaseSpec(0.438, 0.308, -0.0040, 0.0160, 0.1200),
}


def small_market(seed=7, n_assets=6):
    return cd.simulated_market(seed=seed, n_assets=n_assets,
                               start=SMALL_START, end=SMALL_END,
                               periods=SMALL_PERIODS, phases=SMALL_PHASES)


@pytest.fixture(scope="session")
def small_panel():
    return small_market()


@pytest.fixture(scope="session")
def small_returns(small_panel):
    return cd.log_returns(small_panel)


@pytest.fixture(scope="session")
def small_vol(small_returns):
    return cd.rolling_volatility(small_returns, 30)


@pytest.fixture(scope="session")
def sim_panel():
    """The full default synthetic market (52 assets, 2019-01-01..2021-06-30)."""
    return cd.simulated_market()


@pytest.fixture(scope="session")
def sim_returns(sim_panel):
    return cd.log_returns(sim_panel)


@pytest.fixture(scope="session")
def sim_dataset_dir(tmp_path_factory, sim_panel):
    """price.csv + marketcap.csv for the default synthetic market."""
    d = tmp_path_factory.mktemp("dataset")
    cd.write_panel(sim_panel, d / "price.csv", d / "marketcap.csv")
    return d


@pytest.fixture(scope="session")
def small_dataset_dir(tmp_path_factory, small_panel):
    """price.csv + marketcap.csv for the six-asset two-phase market."""
    d = tmp_path_factory.mktemp("small_dataset")
    cd.write_panel(small_panel, d / "price.csv", d / "marketcap.csv")
    return d


@pytest.fixture()
def local_http():
    """A loopback HTTP server backed by a mutable {path: (status, body)} map."""
    routes = {}

    class Handler(http.server.BaseHTTPRequestHandler):
        def do_GET(self):
            path = self.path.split("?", 1)[0]
            status, body = routes.get(path, (404, "no such route"))
            payload = body.encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "text/csv")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *_args):
            pass  # keep test output quiet

    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}", routes
    finally:
        server.shutdown()
        thread.join()
