"""Value types, report models and the exception hierarchy."""
