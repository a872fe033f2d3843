import os
import sys

SCRIPT_FOLDER = os.path.dirname(os.path.realpath(__file__))

# Trajectories of the full engine are memoised on disk - keep test runs away from the user cache
os.environ.setdefault('FLUXTRANSFER_CACHE_DIR', os.path.join(SCRIPT_FOLDER, '_local_tmp', 'cache'))
sys.path.insert(0, SCRIPT_FOLDER)


def add_path_to_ignore(path):
    if not os.path.exists(path):
        return
    global collect_ignore
    collect_ignore += [os.path.join(SCRIPT_FOLDER, path, f) for f in os.listdir(os.path.join(SCRIPT_FOLDER, path))]


collect_ignore = [os.path.join(SCRIPT_FOLDER, "doc", "conf.py"),
                  os.path.join(SCRIPT_FOLDER, "doc", "version_from_git.py"),
                  os.path.join(SCRIPT_FOLDER, "fluxtransfer", "__main__.py"),
                  os.path.join(SCRIPT_FOLDER, "setup.py")]
add_path_to_ignore('_local_tmp')
add_path_to_ignore('examples')
