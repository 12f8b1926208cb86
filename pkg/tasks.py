from typing import Any

from os import environ, getcwd, pathsep
from os.path import exists, join, dirname
import sys
import subprocess

from invoke import task, Context

project_folder = dirname(__file__)
dist_folder = join(project_folder, "dist")

sources = (
    join(project_folder, "gvrisk"),
    join(project_folder, "tests"),
)

env_path = join(getcwd(), ".venv")
env_vars = [
    "PATH",
    "_OLD_VIRTUAL_PATH",
    "VIRTUAL_ENV",
    "VIRTUAL_ENV_PROMPT",
]

IS_WINDOWS = sys.platform == "win32"
scripts_folder = join(env_path, "Scripts" if IS_WINDOWS else "bin")


def extract_env_from_venv(
    scripts: str,
    environment_vars: list[str],
) -> dict[str, Any]:
    if not IS_WINDOWS:
        # NOTE: On POSIX activation only prepends the venv scripts to PATH.
        return {"PATH": f"{scripts}{pathsep}{environ.get('PATH', '')}"}

    process = subprocess.Popen(
        [join(scripts, "activate.bat"), "&&", "set"], stdout=subprocess.PIPE
    )
    assert process.stdout is not None
    output = process.stdout.read().decode("utf-8")

    env = {
        item[0].upper(): item[1]
        for item in (line.split("=", 1) for line in output.splitlines())
        if len(item) == 2 and item[0].upper() in environment_vars
    }

    return env


@task
def configure(c: Context, dev=False, clean=False):
    with c.cd(getcwd()):
        pip_path = join(scripts_folder, "pip.exe" if IS_WINDOWS else "pip")

        if clean and exists(env_path):
            if IS_WINDOWS:
                c.run(f"rmdir /S /Q {env_path}")
            else:
                c.run(f"rm -rf {env_path}")

        if not exists(pip_path) or clean:
            c.run(f"python -m venv {env_path}")

        env = extract_env_from_venv(scripts_folder, env_vars)
        c.run("python -m pip install --upgrade pip", env=env)

        if dev:
            c.run(
                f"python -m pip install --editable {c.cwd}[dev,types]",
                env=env,
            )
        else:
            c.run(f"python -m pip install {c.cwd}", env=env)


@task()
def format(c: Context) -> None:
    env = extract_env_from_venv(scripts_folder, env_vars)

    c.run(f"ruff format {' '.join(sources)}", env=env)


@task()
def lint(c: Context) -> None:
    env = extract_env_from_venv(scripts_folder, env_vars)

    c.run(f"mypy {' '.join(sources)}", env=env)
    c.run(f"ruff check {' '.join(sources)}", env=env)
    c.run(f"ruff format --check --diff {' '.join(sources)}", env=env)


@task(help={"fast": "Skip the Monte Carlo scenarios marked slow."})
def test(c: Context, fast=False) -> None:
    env = extract_env_from_venv(scripts_folder, env_vars)

    marker = ' -m "not slow"' if fast else ""
    c.run(f"pytest{marker} {join(project_folder, 'tests')}", env=env)
