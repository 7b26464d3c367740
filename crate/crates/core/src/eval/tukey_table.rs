//! Studentized range critical values q(alpha; k, df), rows by df, columns by k.

pub(crate) const K_POINTS: [usize; 28] = [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 24, 30, 40, 50, 60, 70, 80, 90, 100];
pub(crate) const DF_POINTS: [f64; 25] = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0, 19.0, 20.0, 24.0, 30.0, 40.0, 60.0, 120.0, f64::INFINITY];
pub(crate) const Q_05: [[f64; 28]; 25] = [
    [6.0849, 8.3308, 9.7980, 10.8811, 11.7343, 12.4349, 13.0273, 13.5390, 13.9885, 14.3886, 14.7487, 15.0757, 15.3748, 15.6503, 15.9054, 16.1428, 16.3646, 16.5728, 16.7688, 17.4539, 18.2690, 19.2844, 20.0465, 20.6537, 21.1569, 21.5855, 21.9582, 22.2875],
    [4.5007, 5.9096, 6.8245, 7.5017, 8.0371, 8.4783, 8.8525, 9.1766, 9.4620, 9.7166, 9.9460, 10.1547, 10.3459, 10.5222, 10.6856, 10.8378, 10.9802, 11.1140, 11.2400, 11.6811, 12.2073, 12.8647, 13.3593, 13.7541, 14.0816, 14.3609, 14.6039, 14.8187],
    [3.9265, 5.0402, 5.7571, 6.2870, 6.7064, 7.0526, 7.3465, 7.6015, 7.8263, 8.0271, 8.2083, 8.3732, 8.5245, 8.6640, 8.7935, 8.9142, 9.0272, 9.1333, 9.2334, 9.5842, 10.0034, 10.5283, 10.9239, 11.2400, 11.5026, 11.7267, 11.9218, 12.0944],
    [3.6354, 4.6017, 5.2183, 5.6731, 6.0329, 6.3299, 6.5823, 6.8014, 6.9947, 7.1674, 7.3234, 7.4655, 7.5959, 7.7163, 7.8280, 7.9322, 8.0298, 8.1215, 8.2080, 8.5115, 8.8747, 9.3302, 9.6740, 9.9491, 10.1777, 10.3729, 10.5430, 10.6935],
    [3.4605, 4.3392, 4.8956, 5.3049, 5.6284, 5.8953, 6.1222, 6.3192, 6.4931, 6.6485, 6.7890, 6.9169, 7.0344, 7.1428, 7.2436, 7.3375, 7.4256, 7.5084, 7.5864, 7.8605, 8.1889, 8.6012, 8.9128, 9.1624, 9.3699, 9.5472, 9.7017, 9.8385],
    [3.3441, 4.1649, 4.6813, 5.0601, 5.3591, 5.6057, 5.8153, 5.9973, 6.1579, 6.3016, 6.4314, 6.5497, 6.6583, 6.7586, 6.8518, 6.9387, 7.0202, 7.0968, 7.1691, 7.4230, 7.7275, 8.1101, 8.3995, 8.6314, 8.8244, 8.9894, 9.1332, 9.2606],
    [3.2612, 4.0410, 4.5288, 4.8858, 5.1672, 5.3991, 5.5962, 5.7673, 5.9183, 6.0533, 6.1753, 6.2866, 6.3887, 6.4831, 6.5707, 6.6525, 6.7292, 6.8013, 6.8694, 7.1085, 7.3953, 7.7560, 8.0291, 8.2481, 8.4304, 8.5863, 8.7222, 8.8426],
    [3.1992, 3.9485, 4.4149, 4.7554, 5.0235, 5.2444, 5.4319, 5.5947, 5.7384, 5.8669, 5.9830, 6.0888, 6.1860, 6.2758, 6.3592, 6.4371, 6.5100, 6.5787, 6.6435, 6.8711, 7.1444, 7.4883, 7.7488, 7.9577, 8.1318, 8.2806, 8.4105, 8.5256],
    [3.1511, 3.8768, 4.3266, 4.6543, 4.9120, 5.1242, 5.3042, 5.4605, 5.5984, 5.7217, 5.8331, 5.9346, 6.0279, 6.1141, 6.1941, 6.2689, 6.3389, 6.4048, 6.4670, 6.6856, 6.9480, 7.2784, 7.5289, 7.7298, 7.8973, 8.0405, 8.1655, 8.2763],
    [3.1127, 3.8196, 4.2561, 4.5736, 4.8230, 5.0281, 5.2021, 5.3531, 5.4863, 5.6054, 5.7130, 5.8111, 5.9012, 5.9844, 6.0617, 6.1339, 6.2015, 6.2652, 6.3252, 6.5364, 6.7900, 7.1094, 7.3515, 7.5460, 7.7080, 7.8466, 7.9676, 8.0749],
    [3.0813, 3.7729, 4.1987, 4.5077, 4.7502, 4.9496, 5.1187, 5.2653, 5.3946, 5.5102, 5.6146, 5.7098, 5.7973, 5.8780, 5.9531, 6.0231, 6.0888, 6.1506, 6.2089, 6.4138, 6.6600, 6.9702, 7.2054, 7.3943, 7.5518, 7.6866, 7.8042, 7.9085],
    [3.0552, 3.7341, 4.1509, 4.4529, 4.6897, 4.8842, 5.0491, 5.1921, 5.3181, 5.4308, 5.5326, 5.6253, 5.7105, 5.7892, 5.8623, 5.9306, 5.9946, 6.0547, 6.1116, 6.3113, 6.5511, 6.8535, 7.0828, 7.2670, 7.4206, 7.5521, 7.6669, 7.7686],
    [3.0332, 3.7014, 4.1105, 4.4066, 4.6385, 4.8290, 4.9903, 5.1301, 5.2534, 5.3636, 5.4631, 5.5538, 5.6370, 5.7139, 5.7854, 5.8521, 5.9146, 5.9735, 6.0290, 6.2242, 6.4586, 6.7542, 6.9784, 7.1586, 7.3088, 7.4374, 7.5497, 7.6493],
    [3.0143, 3.6734, 4.0760, 4.3670, 4.5947, 4.7816, 4.9399, 5.0770, 5.1979, 5.3059, 5.4034, 5.4923, 5.5739, 5.6493, 5.7193, 5.7847, 5.8460, 5.9036, 5.9580, 6.1492, 6.3790, 6.6686, 6.8884, 7.0650, 7.2123, 7.3384, 7.4486, 7.5462],
    [2.9980, 3.6491, 4.0461, 4.3327, 4.5568, 4.7406, 4.8962, 5.0310, 5.1498, 5.2559, 5.3517, 5.4390, 5.5191, 5.5932, 5.6620, 5.7261, 5.7863, 5.8429, 5.8963, 6.0841, 6.3097, 6.5941, 6.8100, 6.9835, 7.1281, 7.2520, 7.3603, 7.4562],
    [2.9837, 3.6280, 4.0200, 4.3027, 4.5237, 4.7048, 4.8580, 4.9907, 5.1077, 5.2121, 5.3064, 5.3923, 5.4712, 5.5440, 5.6117, 5.6748, 5.7340, 5.7897, 5.8422, 6.0270, 6.2489, 6.5286, 6.7410, 6.9117, 7.0541, 7.1760, 7.2825, 7.3769],
    [2.9712, 3.6093, 3.9970, 4.2763, 4.4944, 4.6731, 4.8243, 4.9552, 5.0705, 5.1735, 5.2664, 5.3511, 5.4288, 5.5006, 5.5672, 5.6295, 5.6878, 5.7426, 5.7944, 5.9764, 6.1950, 6.4706, 6.6799, 6.8480, 6.9883, 7.1085, 7.2134, 7.3065],
    [2.9600, 3.5927, 3.9766, 4.2528, 4.4685, 4.6450, 4.7944, 4.9236, 5.0375, 5.1391, 5.2308, 5.3144, 5.3911, 5.4619, 5.5277, 5.5891, 5.6466, 5.7007, 5.7518, 5.9313, 6.1470, 6.4189, 6.6253, 6.7912, 6.9296, 7.0481, 7.1517, 7.2436],
    [2.9500, 3.5779, 3.9583, 4.2319, 4.4452, 4.6199, 4.7676, 4.8954, 5.0079, 5.1083, 5.1990, 5.2815, 5.3573, 5.4273, 5.4923, 5.5529, 5.6097, 5.6632, 5.7136, 5.8909, 6.1039, 6.3724, 6.5762, 6.7401, 6.8768, 6.9939, 7.0962, 7.1869],
    [2.9188, 3.5317, 3.9013, 4.1663, 4.3727, 4.5413, 4.6838, 4.8069, 4.9152, 5.0119, 5.0991, 5.1785, 5.2514, 5.3186, 5.3810, 5.4393, 5.4939, 5.5452, 5.5936, 5.7638, 5.9682, 6.2257, 6.4213, 6.5785, 6.7096, 6.8220, 6.9202, 7.0073],
    [2.8882, 3.4864, 3.8454, 4.1021, 4.3015, 4.4642, 4.6014, 4.7199, 4.8241, 4.9170, 5.0008, 5.0770, 5.1469, 5.2114, 5.2713, 5.3271, 5.3794, 5.4286, 5.4750, 5.6379, 5.8335, 6.0798, 6.2668, 6.4170, 6.5424, 6.6499, 6.7437, 6.8270],
    [2.8582, 3.4421, 3.7907, 4.0391, 4.2316, 4.3885, 4.5205, 4.6345, 4.7345, 4.8236, 4.9039, 4.9769, 5.0439, 5.1056, 5.1628, 5.2162, 5.2662, 5.3132, 5.3575, 5.5131, 5.6996, 5.9343, 6.1123, 6.2553, 6.3747, 6.4769, 6.5662, 6.6454],
    [2.8288, 3.3987, 3.7371, 3.9774, 4.1632, 4.3141, 4.4411, 4.5504, 4.6463, 4.7317, 4.8085, 4.8783, 4.9422, 5.0011, 5.0557, 5.1066, 5.1543, 5.1990, 5.2412, 5.3892, 5.5663, 5.7889, 5.9576, 6.0929, 6.2058, 6.3024, 6.3868, 6.4617],
    [2.8000, 3.3561, 3.6846, 3.9169, 4.0960, 4.2412, 4.3630, 4.4678, 4.5595, 4.6411, 4.7144, 4.7809, 4.8418, 4.8979, 4.9498, 4.9982, 5.0434, 5.0859, 5.1259, 5.2661, 5.4336, 5.6436, 5.8022, 5.9294, 6.0353, 6.1259, 6.2049, 6.2750],
    [2.7718, 3.3145, 3.6332, 3.8577, 4.0301, 4.1696, 4.2863, 4.3865, 4.4741, 4.5519, 4.6217, 4.6849, 4.7427, 4.7959, 4.8452, 4.8910, 4.9337, 4.9739, 5.0117, 5.1439, 5.3013, 5.4979, 5.6460, 5.7644, 5.8627, 5.9467, 6.0199, 6.0846],
];
pub(crate) const Q_01: [[f64; 28]; 25] = [
    [14.0358, 19.0189, 22.2937, 24.7172, 26.6290, 28.2006, 29.5301, 30.6794, 31.6894, 32.5887, 33.3983, 34.1335, 34.8064, 35.4261, 36.0000, 36.5343, 37.0337, 37.5023, 37.9435, 39.4861, 41.3221, 43.6101, 45.3279, 46.6970, 47.8315, 48.7981, 49.6387, 50.3814],
    [8.2603, 10.6185, 12.1695, 13.3243, 14.2407, 14.9978, 15.6410, 16.1990, 16.6908, 17.1299, 17.5261, 17.8866, 18.2171, 18.5219, 18.8047, 19.0682, 19.3148, 19.5465, 19.7648, 20.5297, 21.4429, 22.5850, 23.4451, 24.1320, 24.7021, 25.1884, 25.6117, 25.9860],
    [6.5112, 8.1198, 9.1729, 9.9583, 10.5832, 11.1009, 11.5418, 11.9251, 12.2637, 12.5665, 12.8402, 13.0895, 13.3184, 13.5298, 13.7261, 13.9092, 14.0807, 14.2419, 14.3939, 14.9275, 15.5662, 16.3673, 16.9720, 17.4559, 17.8580, 18.2014, 18.5006, 18.7653],
    [5.7023, 6.9757, 7.8042, 8.4215, 8.9131, 9.3209, 9.6687, 9.9715, 10.2393, 10.4790, 10.6959, 10.8938, 11.0756, 11.2436, 11.3997, 11.5454, 11.6820, 11.8105, 11.9318, 12.3578, 12.8688, 13.5112, 13.9972, 14.3866, 14.7107, 14.9876, 15.2290, 15.4428],
    [5.2431, 6.3305, 7.0333, 7.5560, 7.9723, 8.3177, 8.6125, 8.8693, 9.0966, 9.3003, 9.4847, 9.6530, 9.8077, 9.9508, 10.0838, 10.2081, 10.3246, 10.4343, 10.5378, 10.9019, 11.3393, 11.8903, 12.3078, 12.6428, 12.9218, 13.1604, 13.3685, 13.5529],
    [4.9490, 5.9193, 6.5424, 7.0050, 7.3730, 7.6784, 7.9390, 8.1662, 8.3674, 8.5477, 8.7110, 8.8602, 8.9973, 9.1242, 9.2423, 9.3526, 9.4560, 9.5534, 9.6454, 9.9692, 10.3586, 10.8498, 11.2226, 11.5220, 11.7715, 11.9851, 12.1716, 12.3368],
    [4.7452, 5.6354, 6.2038, 6.6248, 6.9594, 7.2369, 7.4738, 7.6803, 7.8632, 8.0272, 8.1757, 8.3114, 8.4362, 8.5517, 8.6592, 8.7597, 8.8539, 8.9427, 9.0265, 9.3218, 9.6773, 10.1262, 10.4674, 10.7416, 10.9703, 11.1662, 11.3372, 11.4889],
    [4.5960, 5.4280, 5.9567, 6.3473, 6.6574, 6.9145, 7.1339, 7.3251, 7.4945, 7.6463, 7.7839, 7.9096, 8.0253, 8.1323, 8.2320, 8.3251, 8.4125, 8.4948, 8.5726, 8.8466, 9.1767, 9.5941, 9.9116, 10.1669, 10.3801, 10.5627, 10.7222, 10.8637],
    [4.4820, 5.2702, 5.7686, 6.1361, 6.4275, 6.6690, 6.8749, 7.0544, 7.2133, 7.3559, 7.4850, 7.6030, 7.7116, 7.8121, 7.9057, 7.9931, 8.0752, 8.1526, 8.2256, 8.4831, 8.7936, 9.1863, 9.4853, 9.7260, 9.9269, 10.0992, 10.2497, 10.3833],
    [4.3923, 5.1460, 5.6208, 5.9701, 6.2468, 6.4759, 6.6713, 6.8414, 6.9921, 7.1272, 7.2497, 7.3615, 7.4645, 7.5598, 7.6485, 7.7314, 7.8093, 7.8826, 7.9519, 8.1962, 8.4908, 8.8639, 9.1480, 9.3768, 9.5680, 9.7319, 9.8752, 10.0023],
    [4.3198, 5.0459, 5.5016, 5.8363, 6.1011, 6.3202, 6.5069, 6.6696, 6.8136, 6.9426, 7.0596, 7.1665, 7.2648, 7.3558, 7.4406, 7.5198, 7.5942, 7.6643, 7.7305, 7.9639, 8.2456, 8.6024, 8.8743, 9.0933, 9.2764, 9.4335, 9.5708, 9.6927],
    [4.2600, 4.9635, 5.4036, 5.7262, 5.9812, 6.1920, 6.3717, 6.5280, 6.6664, 6.7905, 6.9029, 7.0056, 7.1001, 7.1876, 7.2691, 7.3452, 7.4167, 7.4841, 7.5477, 7.7721, 8.0429, 8.3861, 8.6477, 8.8586, 9.0349, 9.1861, 9.3184, 9.4359],
    [4.2099, 4.8945, 5.3215, 5.6340, 5.8808, 6.0847, 6.2583, 6.4095, 6.5432, 6.6631, 6.7716, 6.8708, 6.9621, 7.0466, 7.1252, 7.1988, 7.2678, 7.3328, 7.3943, 7.6110, 7.8726, 8.2042, 8.4570, 8.6609, 8.8314, 8.9777, 9.1057, 9.2194],
    [4.1673, 4.8359, 5.2518, 5.5558, 5.7956, 5.9936, 6.1621, 6.3087, 6.4384, 6.5547, 6.6600, 6.7562, 6.8447, 6.9266, 7.0028, 7.0741, 7.1411, 7.2041, 7.2637, 7.4738, 7.7275, 8.0490, 8.2943, 8.4921, 8.6576, 8.7996, 8.9239, 9.0343],
    [4.1306, 4.7855, 5.1919, 5.4885, 5.7223, 5.9152, 6.0793, 6.2221, 6.3483, 6.4615, 6.5639, 6.6575, 6.7436, 6.8233, 6.8975, 6.9668, 7.0319, 7.0932, 7.1512, 7.3556, 7.6023, 7.9151, 8.1538, 8.3463, 8.5074, 8.6457, 8.7667, 8.8742],
    [4.0987, 4.7418, 5.1399, 5.4301, 5.6586, 5.8471, 6.0074, 6.1468, 6.2700, 6.3804, 6.4804, 6.5717, 6.6557, 6.7334, 6.8058, 6.8734, 6.9369, 6.9967, 7.0533, 7.2526, 7.4932, 7.7983, 8.0312, 8.2190, 8.3762, 8.5112, 8.6293, 8.7343],
    [4.0707, 4.7034, 5.0942, 5.3788, 5.6028, 5.7874, 5.9443, 6.0807, 6.2013, 6.3093, 6.4071, 6.4964, 6.5785, 6.6546, 6.7253, 6.7914, 6.8535, 6.9120, 6.9673, 7.1621, 7.3973, 7.6956, 7.9233, 8.1070, 8.2607, 8.3928, 8.5083, 8.6110],
    [4.0460, 4.6694, 5.0539, 5.3336, 5.5535, 5.7346, 5.8886, 6.0223, 6.1406, 6.2465, 6.3423, 6.4298, 6.5103, 6.5848, 6.6541, 6.7189, 6.7797, 6.8370, 6.8911, 7.0820, 7.3124, 7.6046, 7.8276, 8.0076, 8.1582, 8.2876, 8.4008, 8.5015],
    [4.0239, 4.6392, 5.0180, 5.2933, 5.5095, 5.6876, 5.8389, 5.9703, 6.0865, 6.1905, 6.2846, 6.3705, 6.4495, 6.5226, 6.5906, 6.6542, 6.7139, 6.7701, 6.8232, 7.0105, 7.2366, 7.5233, 7.7421, 7.9188, 8.0666, 8.1936, 8.3047, 8.4035],
    [3.9555, 4.5456, 4.9068, 5.1684, 5.3735, 5.5420, 5.6850, 5.8092, 5.9187, 6.0168, 6.1054, 6.1864, 6.2608, 6.3296, 6.3936, 6.4534, 6.5095, 6.5624, 6.6123, 6.7884, 7.0008, 7.2700, 7.4756, 7.6415, 7.7804, 7.8997, 8.0042, 8.0971],
    [3.8891, 4.4549, 4.7992, 5.0476, 5.2418, 5.4012, 5.5361, 5.6531, 5.7563, 5.8485, 5.9318, 6.0079, 6.0777, 6.1423, 6.2023, 6.2584, 6.3111, 6.3606, 6.4074, 6.5722, 6.7710, 7.0228, 7.2149, 7.3700, 7.4998, 7.6113, 7.7090, 7.7958],
    [3.8247, 4.3672, 4.6951, 4.9308, 5.1145, 5.2648, 5.3920, 5.5020, 5.5989, 5.6855, 5.7636, 5.8348, 5.9002, 5.9606, 6.0168, 6.0692, 6.1183, 6.1646, 6.2083, 6.3620, 6.5471, 6.7813, 6.9599, 7.1039, 7.2244, 7.3279, 7.4186, 7.4992],
    [3.7622, 4.2822, 4.5944, 4.8178, 4.9913, 5.1330, 5.2525, 5.3558, 5.4466, 5.5276, 5.6007, 5.6672, 5.7282, 5.7845, 5.8368, 5.8856, 5.9313, 5.9743, 6.0149, 6.1575, 6.3290, 6.5456, 6.7103, 6.8431, 6.9541, 7.0493, 7.1327, 7.2068],
    [3.7016, 4.1999, 4.4970, 4.7085, 4.8722, 5.0055, 5.1176, 5.2143, 5.2992, 5.3748, 5.4429, 5.5048, 5.5615, 5.6138, 5.6623, 5.7075, 5.7499, 5.7897, 5.8272, 5.9589, 6.1168, 6.3156, 6.4664, 6.5876, 6.6888, 6.7755, 6.8513, 6.9187],
    [3.6428, 4.1203, 4.4028, 4.6028, 4.7570, 4.8822, 4.9872, 5.0775, 5.1566, 5.2270, 5.2902, 5.3476, 5.4001, 5.4485, 5.4933, 5.5350, 5.5740, 5.6107, 5.6452, 5.7661, 5.9106, 6.0916, 6.2284, 6.3380, 6.4292, 6.5072, 6.5752, 6.6355],
];
