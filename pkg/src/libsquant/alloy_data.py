"""Certified intensity table for the seven aluminum standards.

Each row is (concentration in weight-percent, ten averaged spectral-line
intensities in detector counts, element symbol). Six elements, seven
alloys each, 42 rows total. Values are stored verbatim; nothing here is
rescaled or rounded.
"""

ALLOY_ROWS = (
    (0.098, (316.190, 262.019, 473.325, 482.161, 408.012, 515.970, 434.137, 312.732, 373.819, 315.422), "Zn"),
    (0.029, (218.221, 274.313, 302.743, 233.973, 306.585, 288.528, 354.993, 263.940, 250.109, 646.980), "Zn"),
    (0.360, (383.039, 415.312, 474.093, 373.819, 391.107, 536.332, 427.222, 379.582, 404.170, 438.747), "Zn"),
    (0.180, (353.072, 411.470, 333.863, 577.057, 389.187, 476.782, 431.448, 400.712, 297.749, 327.332), "Zn"),
    (0.020, (465.641, 371.898, 350.767, 426.069, 335.015, 424.532, 372.666, 358.835, 237.815, 308.122), "Zn"),
    (4.150, (374.971, 1152.962, 1089.570, 1367.725, 1458.010, 1359.273, 1147.967, 1323.159, 1699.667, 1366.572), "Zn"),
    (0.320, (563.994, 473.709, 441.821, 616.628, 474.093, 487.156, 508.670, 1378.098, 466.793, 426.453), "Zn"),
    (0.045, (3061.234, 1597.296, 2295.551, 2742.574, 1206.213, 1221.697, 2233.118, 3446.823, 2762.054, 1996.370), "Mn"),
    (0.225, (1411.994, 1360.549, 1202.218, 1191.229, 1412.493, 662.293, 1224.194, 591.369, 1380.028, 1703.183), "Mn"),
    (1.680, (1708.178, 1719.666, 1675.213, 2460.375, 1159.763, 2142.215, 1304.608, 1809.070, 2480.854, 2457.878), "Mn"),
    (0.070, (1680.208, 1334.576, 928.509, 1730.154, 1648.242, 1553.842, 866.076, 1799.081, 4012.720, 2971.331), "Mn"),
    (0.240, (1458.944, 1170.252, 1082.845, 1626.265, 1876.998, 1322.090, 1647.243, 863.578, 732.718, 3446.823), "Mn"),
    (0.170, (1302.111, 606.852, 1273.142, 712.240, 1113.812, 785.162, 898.042, 707.245, 976.458, 1751.132), "Mn"),
    (0.440, (1924.947, 886.554, 1083.844, 2101.758, 1608.784, 1946.424, 2090.271, 1124.301, 1202.218, 2080.281), "Mn"),
    (0.240, (1014.158, 897.481, 669.780, 854.686, 951.177, 989.127, 882.947, 928.972, 947.139, 1000.835), "Cu"),
    (3.430, (1525.275, 1918.100, 1444.933, 1449.778, 1754.591, 2034.373, 2660.147, 2025.895, 1508.722, 2425.986), "Cu"),
    (0.330, (336.707, 771.519, 258.384, 513.942, 455.806, 642.731, 304.812, 491.333, 448.942, 467.917), "Cu"),
    (0.300, (724.687, 337.918, 560.774, 1202.698, 582.172, 631.022, 279.378, 268.477, 1201.083, 1017.792), "Cu"),
    (0.070, (186.924, 173.198, 267.670, 275.340, 254.347, 263.632, 335.899, 274.937, 163.912, 869.220), "Cu"),
    (0.670, (474.377, 659.687, 864.780, 637.078, 857.109, 442.483, 457.824, 549.874, 2585.05, 714.997), "Cu"),
    (0.360, (449.346, 430.775, 536.147, 552.296, 669.377, 792.513, 855.090, 349.626, 414.222, 517.172), "Cu"),
    (0.280, (3479.575, 2303.816, 1123.199, 2729.156, 1480.078, 422.690, 878.948, 1023.378, 907.215, 933.716), "Si"),
    (0.895, (1952.678, 2492.415, 3092.219, 2700.005, 2480.931, 1336.531, 2426.162, 761.460, 1051.646, 1475.661), "Si"),
    (0.230, (323.753, 729.217, 610.846, 1378.491, 973.026, 951.384, 1451.811, 499.984, 917.374, 652.365), "Si"),
    (4.550, (6953.850, 4964.070, 3889.015, 6835.038, 5008.238, 7526.712, 5709.630, 244.692, 12772.580, 11498.320), "Si"),
    (0.097, (422.248, 455.816, 459.791, 555.636, 512.793, 432.407, 624.980, 274.726, 292.393, 765.435), "Si"),
    (0.180, (1245.103, 1071.080, 878.064, 729.217, 442.565, 447.424, 489.825, 464.649, 1486.262, 1067.547), "Si"),
    (0.930, (2259.648, 1028.679, 1385.116, 3829.829, 1838.283, 3394.331, 6363.762, 903.682, 781.778, 1460.644), "Si"),
    (0.018, (16851.146, 10991.425, 11853.185, 17809.466, 11444.508, 232125.87, 10716.269, 10041.967, 10292.861, 10276.444), "Mg"),
    (0.650, (31644.717, 34098.631, 22182.74, 33117.336, 47032.388, 67816.18, 126219.86, 78561.805, 80118.748, 71668.301), "Mg"),
    (1.090, (62023.574, 64539.35, 75499.074, 149048.682, 59871.804, 144481.024, 120623.024, 131659.362, 169302.99, 197056.92), "Mg"),
    (0.250, (24293.757, 22938.243, 30672.428, 36515.511, 27624.576, 47500.270, 33667.860, 185665.69, 41917.400, 46365.905), "Mg"),
    (1.160, (46549.483, 67713.182, 97734.763, 71724.571, 122933.176, 126012.642, 165566.778, 128445.955, 101874.803, 144687.400), "Mg"),
    (4.390, (100894.648, 62335.73, 159684.84, 134512.8, 96640.512, 54371.483, 82788.15, 92948.03, 127553.944, 198249.22), "Mg"),
    (1.030, (84699.079, 80979.841, 54954.889, 51390.995, 45114.971, 35457.896, 37590.724, 134577.581, 129538.161, 120826.330), "Mg"),
    (0.190, (1530.424, 844.079, 3736.825, 3781.063, 2354.246, 909.361, 631.356, 762.788, 644.718, 635.271), "Fe"),
    (0.582, (975.460, 609.071, 597.905, 842.038, 2189.064, 2637.533, 1489.704, 829.850, 2410.728, 2022.350), "Fe"),
    (0.517, (2495.121, 2828.675, 3114.237, 2921.697, 2188.524, 2510.694, 1762.119, 1554.622, 1299.690, 1505.292), "Fe"),
    (0.750, (2669.283, 3125.012, 4960.184, 4956.810, 4366.445, 3603.951, 2372.376, 3426.975, 3089.659, 2602.944), "Fe"),
    (0.180, (2737.363, 2172.434, 1261.031, 2523.076, 1134.198, 1939.567, 1835.604, 831.562, 773.407, 989.706), "Fe"),
    (0.320, (1827.014, 1989.893, 1543.233, 1426.326, 1624.295, 1308.388, 1236.243, 1386.408, 1361.749, 1588.361), "Fe"),
    (0.410, (3283.010, 2193.647, 2505.571, 3432.501, 4049.765, 3651.207, 2541.616, 2008.822, 1751.850, 1358.266), "Fe"),
)
