# Immutable numeric domain types
