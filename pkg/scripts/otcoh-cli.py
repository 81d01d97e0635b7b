#!/usr/bin/env python3
"""OT 流形上同调命令行工具"""

import sys
from pathlib import Path

# 添加 src 目录到路径，以便导入本地模块
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from otcoh.cli import main

if __name__ == "__main__":
    main()
