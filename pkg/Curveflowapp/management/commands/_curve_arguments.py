from Curveflowapp.generators import CurveKind


def add_curve_arguments(parser):
    parser.add_argument('--kind', choices=CurveKind.values)
    parser.add_argument('--r0', type=float, help='base radius')
    parser.add_argument('--modes', help='comma-separated Fourier modes')
    parser.add_argument('--cos', help='comma-separated cosine coefficients, one per mode')
    parser.add_argument('--sin', help='comma-separated sine coefficients, one per mode')
    parser.add_argument('--a', type=float, help='ellipse semi-axis along x')
    parser.add_argument('--b', type=float, help='ellipse semi-axis along y')
    parser.add_argument('--curve', help='read the curve from a CSV file instead')
