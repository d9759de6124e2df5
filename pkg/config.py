# ============================================
# FILE: config.py
# ============================================
import logging
import os
from dotenv import load_dotenv

load_dotenv()

# Classification / geometry
LIGHT_CYLINDER_TOL = float(os.getenv('LIGHT_CYLINDER_TOL', 1e-12))
SURFACE_TOL = float(os.getenv('SURFACE_TOL', 1e-10))

# Grid Configuration
MIN_RESOLUTION = int(os.getenv('MIN_RESOLUTION', 16))
MIN_CYLINDER_NODES = int(os.getenv('MIN_CYLINDER_NODES', 8))
DEFAULT_N_PHI = int(os.getenv('DEFAULT_N_PHI', 32))

# Mode Configuration
DEFAULT_MODES = int(os.getenv('DEFAULT_MODES', 8))
CONJUGATE_TOL = float(os.getenv('CONJUGATE_TOL', 1e-10))
IMAG_RESIDUE_TOL = float(os.getenv('IMAG_RESIDUE_TOL', 1e-12))

# Solver Configuration
SOLVER_RTOL = float(os.getenv('SOLVER_RTOL', 1e-10))
ITERATIVE_RTOL = float(os.getenv('ITERATIVE_RTOL', 1e-13))
ILU_DROP_TOL = float(os.getenv('ILU_DROP_TOL', 1e-8))
ILU_FILL_FACTOR = float(os.getenv('ILU_FILL_FACTOR', 30))
COMPAT_FACTOR = float(os.getenv('COMPAT_FACTOR', 10))
WORKERS = int(os.getenv('WORKERS', 1))

# Null space probe
NULLSPACE_K = int(os.getenv('NULLSPACE_K', 3))
NULLSPACE_RATIO = float(os.getenv('NULLSPACE_RATIO', 1e-6))
DENSE_SVD_MAX = int(os.getenv('DENSE_SVD_MAX', 2500))
CONDITION_DENSE_MAX = int(os.getenv('CONDITION_DENSE_MAX', 800))
GMRES_RESTART = int(os.getenv('GMRES_RESTART', 60))
GMRES_MAXITER = int(os.getenv('GMRES_MAXITER', 200))
NULLSPACE_SOLVE_MAX = int(os.getenv('NULLSPACE_SOLVE_MAX', 2500))

# Verification Configuration
DEFAULT_SEED = int(os.getenv('DEFAULT_SEED', 42))
TEST_FIELD_DEGREE = int(os.getenv('TEST_FIELD_DEGREE', 3))
MIN_ORDER = float(os.getenv('MIN_ORDER', 1.8))
MIN_HALVING_RATIO = float(os.getenv('MIN_HALVING_RATIO', 3.5))
CERTIFICATE_RTOL = float(os.getenv('CERTIFICATE_RTOL', 1e-8))
ROUNDOFF_SCALE = float(os.getenv('ROUNDOFF_SCALE', 1e-12))
IBP_RTOL = float(os.getenv('IBP_RTOL', 1e-4))
INEQUALITY_TOL = float(os.getenv('INEQUALITY_TOL', 1e-12))
CONORMAL_TOL = float(os.getenv('CONORMAL_TOL', 1e-12))
CONSTANT_COSINE_MIN = float(os.getenv('CONSTANT_COSINE_MIN', 0.999))
EULER_FIELDS = int(os.getenv('EULER_FIELDS', 100))

# Energy identity
IDENTITY_N_PHI = int(os.getenv('IDENTITY_N_PHI', 8))
IDENTITY_BASE_RESOLUTION = int(os.getenv('IDENTITY_BASE_RESOLUTION', 64))
IDENTITY_LEVELS = int(os.getenv('IDENTITY_LEVELS', 3))

# Output
REPORT_SCHEMA_VERSION = 1
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')


def setup_logging(level=None):
    """Configure the root handler; called by the command line front end only."""
    logging.basicConfig(
        level=(level or LOG_LEVEL).upper(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
