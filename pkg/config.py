import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


class SwarmConfig:
    # 实验默认值
    SWARM_SIZE = 50
    TIME_STEPS = 10000
    RUNS = 25
    INTERMEDIATE_CHECKPOINT = 1000
    SUCCESS_THRESHOLD = 1e-4
    DEFAULT_SEED = 0

    # 初始化
    LHS_CANDIDATES = 1000

    # pb_me 窗口长度 (t_ref)
    T_REF = 100

    # 持久化
    HISTORY_STRIDE = 10
    STORE_FILENAME = "reports.db"
    CONFIG_FORMAT = "swarmtopo-json/1"
    ARTIFACT_VERSION = "1.0.0"

    # 并行
    THREADS_ENV = "SWARM_TOPO_THREADS"
    THREADS = 1


def threads_from_env() -> int:
    """读取 SWARM_TOPO_THREADS，未设置时使用默认线程数"""
    load_dotenv()
    raw = os.getenv(SwarmConfig.THREADS_ENV)
    if not raw:
        return SwarmConfig.THREADS
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("%s=%r 不是整数, 使用默认值 %d", SwarmConfig.THREADS_ENV, raw, SwarmConfig.THREADS)
        return SwarmConfig.THREADS
