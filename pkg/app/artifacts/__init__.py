"""Pydantic schemas of every persisted JSON artifact"""
