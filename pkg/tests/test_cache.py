"""Tests for the persistent constant cache."""
import json
import os
import shutil
import tempfile
import unittest
from pathlib import Path

from banana.cache import (
    ALGORITHM_VERSION,
    CacheEntry,
    ConstantCache,
    cached_constant,
    make_key,
    parse_key,
    set_active_cache,
)
from banana.exceptions import CacheError
from banana.mpcore import gamma_product_15, make_context


class TestKeys(unittest.TestCase):

    def test_round_trip(self):
        self.assertEqual(parse_key(make_key('gamma_1_15', 200)), ('gamma_1_15', 200))

    def test_name_may_contain_at(self):
        self.assertEqual(parse_key('a@b@30'), ('a@b', 30))

    def test_malformed_keys(self):
        for key in ('gamma', '@30', 'gamma@', 'gamma@x'):
            with self.assertRaises(CacheError):
                parse_key(key)


class TestConstantCache(unittest.TestCase):
    """Store, lookup and maintenance of cached constants."""

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()
        self.cache = ConstantCache(Path(self.test_dir) / 'cache')

    def tearDown(self):
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_put_then_get(self):
        self.assertTrue(self.cache.put(CacheEntry('gamma_1_15', 200, '14.5')))
        entry = self.cache.get('gamma_1_15@200')
        self.assertIsNotNone(entry)
        self.assertEqual(entry.value, '14.5')
        self.assertEqual(entry.pid, os.getpid())

    def test_lower_precision_request_hits(self):
        self.cache.put(CacheEntry('gamma_1_15', 200, '14.5'))
        self.assertIsNotNone(self.cache.get('gamma_1_15@50'))

    def test_higher_precision_request_misses(self):
        self.cache.put(CacheEntry('gamma_1_15', 200, '14.5'))
        self.assertIsNone(self.cache.get('gamma_1_15@300'))

    def test_less_precise_entry_not_written(self):
        self.cache.put(CacheEntry('zeta3', 200, '1.2'))
        self.assertFalse(self.cache.put(CacheEntry('zeta3', 100, '1.2')))
        self.assertTrue(self.cache.put(CacheEntry('zeta3', 400, '1.2')))
        self.assertEqual(self.cache.get('zeta3@1').digits, 400)

    def test_stale_algorithm_version_ignored(self):
        self.cache.put(CacheEntry('zeta3', 200, '1.2', algorithm_version=ALGORITHM_VERSION - 1))
        self.assertIsNone(self.cache.get('zeta3@100'))

    def test_corrupt_entry_discarded(self):
        path = self.cache.constants_dir / f"zeta3.v{ALGORITHM_VERSION}.json"
        path.write_text('{not json')
        self.assertIsNone(self.cache.get('zeta3@10'))
        self.assertFalse(path.exists())

    def test_mismatched_name_discarded(self):
        path = self.cache.constants_dir / f"zeta3.v{ALGORITHM_VERSION}.json"
        path.write_text(json.dumps({'name': 'pi', 'digits': 10, 'value': '3.14'}))
        self.assertIsNone(self.cache.get('zeta3@10'))

    def test_no_temporary_files_left(self):
        self.cache.put(CacheEntry('zeta3', 200, '1.2'))
        self.assertEqual(list(self.cache.constants_dir.glob('*.tmp')), [])

    def test_lock_records_pid(self):
        self.cache.put(CacheEntry('zeta3', 200, '1.2'))
        self.assertEqual(self.cache._lock_holder(), os.getpid())

    def test_stat_and_clear(self):
        self.cache.put(CacheEntry('zeta3', 200, '1.2'))
        self.cache.put(CacheEntry('gamma_1_3', 100, '2.6'))
        stat = self.cache.stat()
        self.assertEqual(stat['entries'], 2)
        self.assertEqual(stat['constants'], {'gamma_1_3': 100, 'zeta3': 200})
        self.assertEqual(self.cache.clear(), 2)
        self.assertEqual(self.cache.stat()['entries'], 0)


class TestCachedConstant(unittest.TestCase):

    def setUp(self):
        self.test_dir = tempfile.mkdtemp()
        self.cache = ConstantCache(Path(self.test_dir) / 'cache')
        self.previous = set_active_cache(self.cache)

    def tearDown(self):
        set_active_cache(self.previous)
        shutil.rmtree(self.test_dir, ignore_errors=True)

    def test_miss_computes_and_stores(self):
        ctx = make_context(30)
        calls = []

        def compute():
            calls.append(1)
            return ctx.ball(ctx.mp.pi)

        first = cached_constant('pi_test', ctx, compute)
        second = cached_constant('pi_test', make_context(30), compute)
        self.assertEqual(len(calls), 1)
        self.assertTrue(second.matches(first, 30))

    def test_higher_precision_recomputes(self):
        ctx = make_context(30)
        cached_constant('pi_test', ctx, lambda: ctx.ball(ctx.mp.pi))
        hi = make_context(80)
        calls = []
        cached_constant('pi_test', hi, lambda: calls.append(1) or hi.ball(hi.mp.pi))
        self.assertEqual(calls, [1])
        self.assertGreater(self.cache.get('pi_test@1').digits, 80)

    def test_gamma_product_through_cache(self):
        ctx = make_context(40)
        value = gamma_product_15(ctx)
        self.assertTrue(gamma_product_15(make_context(40)).matches(value, 38))


if __name__ == '__main__':
    unittest.main()
