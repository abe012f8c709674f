# 命令行入口
from .main import run, build_parser

__all__ = ["run", "build_parser"]
