"""
WACA 簇头选举仿真主程序
等价于安装后的 waca-simulator 命令
"""

import sys

from waca_simulator.cli import main

if __name__ == "__main__":
    sys.exit(main())
