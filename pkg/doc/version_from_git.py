import subprocess


def _git(*args):
    return subprocess.getoutput('git ' + ' '.join(args)).strip()


def version_number_from_git(tag_prefix='v', sha_length=8, version_format="{version}.dev{commits}+g{sha}"):
    """Version string from the latest ``v<major>.<minor>.<patch>`` tag.

    Untagged commits get the next patch version with a dev suffix; uncommitted changes append ``.dirty``.
    Raises IndexError when no release tag exists, so callers can fall back to ``RELEASE-VERSION``.
    """
    tags = [t for t in _git('tag', '--list', "'{}*'".format(tag_prefix)).split('\n') if t]
    releases = sorted((tuple(int(p) for p in t[len(tag_prefix):].split('.')), t) for t in tags)
    latest, latest_tag = releases[-1]

    commits = int(_git('rev-list', '{}..HEAD'.format(latest_tag), '--count'))
    if commits == 0:
        version = '.'.join(str(p) for p in latest)
    else:
        following = latest[:-1] + (latest[-1] + 1,)
        version = version_format.format(version='.'.join(str(p) for p in following), commits=commits,
                                        sha=_git('rev-parse', 'HEAD')[:sha_length])
    if _git('status', '--untracked-files=no', '-s'):
        version += '.dirty'
    return version
