# Pydantic schemas for run configuration and emitted documents
