"""Shared configuration, schemas and errors."""
