"""
Aplicação table_detection: localização de tabelas em páginas digitalizadas.
"""
