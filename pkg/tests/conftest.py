import threading

import pytest

from tlpool.backend import available_backends, get_backend


@pytest.fixture(params=available_backends())
def backend(request):
    """Run the test once per built backend (compiled and/or pure)."""
    return get_backend(request.param)


def call_in_thread(fn, *args, **kwargs):
    """Run ``fn`` on a fresh thread and return its result (or re-raise)."""
    box: list = []
    error: list = []

    def runner():
        try:
            box.append(fn(*args, **kwargs))
        except BaseException as exc:
            error.append(exc)

    t = threading.Thread(target=runner)
    t.start()
    t.join()
    if error:
        raise error[0]
    return box[0]
