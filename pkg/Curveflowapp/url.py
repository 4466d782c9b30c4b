from django.urls import path
from . import views


urlpatterns = [
    path('api/report', views.curve_report, name='curve_report'),
    path('api/counterexample', views.counterexample, name='counterexample'),
]
