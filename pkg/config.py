import os
from dotenv import load_dotenv

# .env 파일 로드
load_dotenv()

# 로깅 설정
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('LOG_FILE', 'ssf_lab.log')

# 실행 설정
SSF_THREADS = int(os.getenv('SSF_THREADS', '1'))
SSF_OUTPUT_DIR = os.getenv('SSF_OUTPUT_DIR', 'results')
SSF_SEED = int(os.getenv('SSF_SEED', '0'))
SSF_SHOW_PROGRESS = os.getenv('SSF_SHOW_PROGRESS', 'false').lower() in ('1', 'true', 'yes')

# 수치 설정 (defect basis 절단 기준)
SSF_RANK_TOL = float(os.getenv('SSF_RANK_TOL', '1e-10'))
