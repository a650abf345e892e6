"""
persistlab: filtrações monótonas, módulos de persistência, códigos de barras
(com sinal), distâncias por emparelhamento e descida por subgradiente
estocástico sobre funcionais de persistência.
"""
