import logging

from rest_framework import status
from rest_framework.decorators import api_view
from rest_framework.response import Response

from .exceptions import CurveflowError
from .experiments import counterexample_certificate
from .functionals import geometry_report
from .generators import generate
from .serializers import CounterexampleSerializer, CurveReportSerializer
from .spaceform import SpaceForm
from .utils import json_safe

logger = logging.getLogger(__name__)


@api_view(['POST'])
def curve_report(request):
    serializer = CurveReportSerializer(data=request.data)
    if not serializer.is_valid():
        return Response({'error': serializer.errors}, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data
    spec = serializer.to_spec()
    try:
        c = generate(spec, SpaceForm(data['K']), data['N'], data['stencil_order'])
        report = geometry_report(c)
    except CurveflowError as e:
        logger.info("report rejected: %s", e)
        return Response({'error': str(e)}, status=status.HTTP_422_UNPROCESSABLE_ENTITY)
    return Response(json_safe({'curve': spec.describe(), 'report': report.to_dict()}), status=status.HTTP_200_OK)


@api_view(['POST'])
def counterexample(request):
    serializer = CounterexampleSerializer(data=request.data)
    if not serializer.is_valid():
        return Response({'error': serializer.errors}, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data
    try:
        certificate = counterexample_certificate(
            SpaceForm(1), data['r0'], data['eps'], data['m'], data['N'], data['stencil_order']
        )
    except CurveflowError as e:
        logger.info("counterexample rejected: %s", e)
        return Response({'error': str(e)}, status=status.HTTP_422_UNPROCESSABLE_ENTITY)
    return Response(json_safe({**certificate, 'r0': data['r0'], 'eps': data['eps'], 'm': data['m']}))
