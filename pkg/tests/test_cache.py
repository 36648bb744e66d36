import json

from cache import ResultCache


ARGS = {"n": 6, "v": [1, 1, 1, 1, 1, 1], "field": "q"}


def entry_path(cache, args=ARGS):
    key = cache.key("invring", "graded_dimension", args)
    return cache.directory / key[:2] / f"{key}.json"


def test_put_then_get(tmp_cache):
    tmp_cache.put("invring", "graded_dimension", ARGS, 5)
    assert tmp_cache.get("invring", "graded_dimension", ARGS) == 5
    assert entry_path(tmp_cache).exists()


def test_key_ignores_argument_order(tmp_cache):
    a = tmp_cache.key("m", "op", {"x": 1, "y": [2, 3]})
    b = tmp_cache.key("m", "op", {"y": [2, 3], "x": 1})
    assert a == b
    assert a != tmp_cache.key("m", "other", {"x": 1, "y": [2, 3]})


def test_miss(tmp_cache):
    assert tmp_cache.get("invring", "graded_dimension", ARGS) is None


def test_corrupt_entry_is_deleted(tmp_cache):
    tmp_cache.put("invring", "graded_dimension", ARGS, 5)
    path = entry_path(tmp_cache)
    path.write_text("{not json", encoding="utf-8")
    assert tmp_cache.get("invring", "graded_dimension", ARGS) is None
    assert not path.exists()


def test_checksum_mismatch(tmp_cache):
    tmp_cache.put("invring", "graded_dimension", ARGS, 5)
    path = entry_path(tmp_cache)
    entry = json.loads(path.read_text(encoding="utf-8"))
    entry["payload"] = 6
    path.write_text(json.dumps(entry), encoding="utf-8")
    assert tmp_cache.get("invring", "graded_dimension", ARGS) is None
    assert not path.exists()


def test_fetch_counts_hits_and_misses(tmp_cache):
    calls = []

    def compute():
        calls.append(1)
        return {"dimension": 14}

    first = tmp_cache.fetch("invring", "graded_dimension", ARGS, compute)
    second = tmp_cache.fetch("invring", "graded_dimension", ARGS, compute)
    assert first == second == {"dimension": 14}
    assert len(calls) == 1
    assert (tmp_cache.hits, tmp_cache.misses) == (1, 1)


def test_disabled_cache_always_computes(tmp_path):
    cache = ResultCache(tmp_path / "unused", enabled=False)
    calls = []
    for _ in range(2):
        cache.fetch("m", "op", {}, lambda: calls.append(1) or 3)
    assert len(calls) == 2
    assert not (tmp_path / "unused").exists()


def test_no_directory_means_disabled():
    cache = ResultCache(None)
    assert not cache.enabled
    assert cache.clear() == 0


def test_clear(tmp_cache):
    tmp_cache.put("m", "op", {"k": 1}, 1)
    tmp_cache.put("m", "op", {"k": 2}, 2)
    assert tmp_cache.clear() == 2
    assert tmp_cache.get("m", "op", {"k": 1}) is None
