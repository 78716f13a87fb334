//! Coefficients exactly as printed, intercept first, graded-lex order.

pub(super) const LENGTH_PV: [f64; 10] = [
    170.3876, 0.7513, -0.5552, -0.0032, 0.0034, 5.40e-4, 4.19e-6, -4.83e-6, 4.49e-7,
    -3.46e-7,
];

pub(super) const WIDTH_PV: [f64; 15] = [
    14.7778, -0.0065, 0.3516, 0.0173, -0.0056, 1.94e-4, -9.14e-5, 3.31e-5, -4.99e-6,
    -1.35e-7, 1.96e-7, -1.12e-7, 3.67e-8, -4.82e-9, 7.74e-10,
];

pub(super) const DEPTH_PV: [f64; 6] = [
    53.7694, 1.5055, -0.3504, -2.92e-4, -7.54e-4, 2.12e-4,
];

pub(super) const AREA_PV: [f64; 6] = [
    4176.5581, 224.9810, -54.3024, -0.0011, -0.1333, 0.0353,
];

pub(super) const VOLUME_PV: [f64; 6] = [
    -1262141.6793, 21113.6671, 7.5091, 17.3061, -9.5400, -0.4026,
];

pub(super) const SPATTER_PV: [f64; 28] = [
    -47591.2675, -0.2616, -0.0237, -0.0944, 0.2825, 3.0756, 0.2039, -0.1063, 0.0093,
    -0.0102, -0.0014, 5.58e-4, 3.93e-5, -1.76e-5, 1.47e-5, 3.68e-6, -1.14e-6, -2.27e-7,
    6.23e-8, -2.26e-9, -8.52e-9, -3.32e-9, 1.26e-9, -2.78e-10, 2.47e-10, -8.39e-11,
    1.11e-11, 1.42e-12,
];

pub(super) const SPATTER_DIMS: [f64; 20] = [
    -73673.5843, 60.4532, 1719.4559, 424.9562, 1.6502, -23.3099, 14.7747, 48.4069, -77.2674,
    24.4086, -0.0070, 0.0752, -0.0317, -0.1816, 0.1530, -0.0400, 0.0515, 0.0234, -0.0140,
    -0.0023,
];

pub(super) const SPATTER_LOGDIMS: [f64; 21] = [
    -1262141.6793, -34.2697, 46.6761, 3.3128, 1832.5419, -19.5423, 2.0622, -0.0189, 6.79e-4,
    1.5434, 1.1827, 0.0032, 0.0011, -6.1771, -0.1413, 1.73e-5, -0.3015, -0.2274, -347.0129,
    40.4521, -26.0121,
];

pub(super) const SPATTER_PVLOGV: [f64; 84] = [
    -94877.9016, 0.0016, -0.0113, -0.0131, 0.0192, -0.0054, 0.0023, -0.0043, -2.81e-4,
    -6.35e-4, 0.3343, 0.0824, 0.0351, -0.0297, -0.0093, 1.98e-4, -0.0378, -0.0140, -0.0019,
    -1.05e-4, -0.0303, 0.7149, 0.2123, 0.0801, 0.0937, 0.0668, -0.1631, -0.0153, -0.0357,
    -0.0020, 0.0014, -0.0473, -0.0347, -0.0075, -5.44e-4, 6.57e-6, 2.25e-4, 0.0143,
    -7.38e-4, -0.2463, -0.6532, 1.34e-4, -0.0214, 0.0456, 0.0618, -1.87e-5, 0.0427, 0.1350,
    -0.0936, -0.0160, -1.04e-6, -0.0018, -0.0172, -0.0543, -0.0257, -0.0026, 2.08e-9,
    6.55e-9, -2.34e-6, 8.67e-9, -2.98e-5, -0.0020, -1.53e-8, 8.50e-5, 0.0244, 0.0579,
    5.18e-9, -1.74e-5, 0.0010, -0.0073, -0.1802, -1.17e-9, 2.95e-6, -0.0029, 0.0018,
    -0.0679, -0.0785, 9.03e-11, 1.59e-8, 2.22e-4, 0.0071, 0.0482, -0.0750, -0.0110,
];
