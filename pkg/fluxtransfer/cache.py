import os
from functools import lru_cache as memorycache

from appdirs import user_cache_dir
from joblib import Memory

if 'FLUXTRANSFER_CACHE_DIR' in os.environ:
    cache_dir = os.environ['FLUXTRANSFER_CACHE_DIR']
else:
    cache_dir = user_cache_dir('fluxtransfer')

# full-engine trajectories, keyed by (schedule, integrator settings, space)
disk_cache = Memory(cache_dir, verbose=0).cache

__all__ = ['memorycache', 'disk_cache', 'cache_dir']

# Disable disk cache:
# disk_cache = lambda o: o
