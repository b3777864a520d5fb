import threading
import time

from remix_originality.parallel import iter_bounded_indexed_results, ordered_map


def test_ordered_map_keeps_input_order():
    def slow_square(x: int) -> int:
        time.sleep(0.001 * (10 - x))
        return x * x

    assert ordered_map(slow_square, list(range(10)), max_workers=4) == [x * x for x in range(10)]


def test_never_more_than_max_workers_in_flight():
    lock = threading.Lock()
    state = {"active": 0, "peak": 0}

    def work(_idx: int, item: int) -> int:
        with lock:
            state["active"] += 1
            state["peak"] = max(state["peak"], state["active"])
        time.sleep(0.002)
        with lock:
            state["active"] -= 1
        return item

    results = dict(iter_bounded_indexed_results(enumerate(range(20)), work, max_workers=3))

    assert results == {i: i for i in range(20)}
    assert state["peak"] <= 3


def test_serial_path():
    assert ordered_map(str, [1, 2], max_workers=1) == ["1", "2"]
