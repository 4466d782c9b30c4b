"""
URL configuration for Curveflow project.

The JSON report service lives in Curveflowapp/url.py.
"""
from django.urls import path, include

urlpatterns = [
    path('', include('Curveflowapp.url')),
]
