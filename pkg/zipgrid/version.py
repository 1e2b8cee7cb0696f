"""Version information of the zipgrid package."""
__all__ = ['version', 'version_info', 'release']

major = 0
minor = 1
bugfix = 0

version_info = (major, minor, bugfix)
release = False

version = f"{major}.{minor}.{bugfix}" + ("" if release else ".dev0")
