from wecr.cli import run

run()
