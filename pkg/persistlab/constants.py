"""
Constantes numéricas do pipeline de persistência.
Centraliza magic numbers e valores default expostos na configuração.
"""

# =============================================================================
# ÁLGEBRA LINEAR SOBRE F2
# =============================================================================

# Tamanho da palavra usada no empacotamento de bits
WORD_BITS = 64

# =============================================================================
# FILTRAÇÕES
# =============================================================================

# Dimensão máxima dos simplexos na filtração de Rips
RIPS_MAXDIM = 2

# Passo relativo das diferenças finitas (multiplica a escala da nuvem)
FD_STEP_SCALE = 1e-5

# =============================================================================
# MÓDULOS EM GRADE
# =============================================================================

# Número máximo de parâmetros suportado nas resoluções
MAX_PARAMETERS = 2

# Dimensão total máxima aceita por is_indecomposable
INDECOMPOSABLE_CAP = 30

# Até esta dimensão End(M) é enumerado por completo
ENDOMORPHISM_ENUMERATION_DIM = 16

# Amostras aleatórias de End(M) acima do limite de enumeração
ENDOMORPHISM_SAMPLES = 512
ENDOMORPHISM_SEED = 0

# =============================================================================
# DISTÂNCIAS
# =============================================================================

# Limite do oráculo de força bruta (|B1| + |B2|)
BRUTEFORCE_CAP = 8

# Constante de estabilidade do bottleneck com sinal para n = 2: (2n - 1)^2
SIGNED_STABILITY_HOOKS = 9
# Famílias de upsets principais: n^2 - 1
SIGNED_STABILITY_UPSETS = 3

# =============================================================================
# GRADIENTES
# =============================================================================

# Tolerância do erro relativo entre gradiente analítico e diferenças finitas
GRAD_TOLERANCE = 1e-6

# =============================================================================
# DESCIDA POR SUBGRADIENTE
# =============================================================================

SCHEDULE_GAMMA = 1.0
SCHEDULE_GAMMA_MIN = 0.5  # exclusivo
SCHEDULE_GAMMA_MAX = 1.0
NOISE_SIGMA = 0.01

# Perturbação de Clarke = fator * escala, com tentativas limitadas
CLARKE_PERTURBATION = 1e-9
CLARKE_MAX_ATTEMPTS = 32

# Monitor de limitação: bound = fator * max(1, ||x_0||_2)
BOUNDEDNESS_FACTOR = 10.0
# No experimento: bound = fator * raio da caixa * sqrt(m)
EXPERIMENT_BOUND_FACTOR = 1.5
BOX_RADIUS = 1.0

# =============================================================================
# EXPERIMENTO DE BURACOS
# =============================================================================

EXPERIMENT_MIN_POINTS = 4
EXPERIMENT_DIMENSION = 2
EXPERIMENT_DEGREE = 1

# Passos do experimento: alpha_0 = fator * diâmetro da nuvem inicial
EXPERIMENT_ALPHA0_FACTOR = 0.3
EXPERIMENT_GAMMA = 0.6

# =============================================================================
# SAÍDA
# =============================================================================

CSV_FLOAT_FORMAT = "%.17g"
POSITIVE_COLOR = "tab:blue"
NEGATIVE_COLOR = "tab:red"
