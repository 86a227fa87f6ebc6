//! High-precision reference values computed offline with mpmath (50
//! significant digits), frozen for oracle comparisons.

// 128 oracle points
pub const BESSEL_ORACLE: &[(u32, f64, f64, f64)] = &[
    (0, 9.9999999999999995e-7, 0.99999999999975, -8.8690314816594437),
    (1, 9.9999999999999995e-7, 4.9999999999993748e-7, -636619.77237217504),
    (2, 9.9999999999999995e-7, 1.2499999999998957e-13, -1273239544735.4811),
    (3, 9.9999999999999995e-7, 2.0833333333332028e-20, -5.0929581789412881e+18),
    (5, 9.9999999999999995e-7, 2.6041666666665576e-34, -2.4446199258916657e+32),
    (10, 9.9999999999999995e-7, 2.6911444554673098e-70, -1.1828049049433827e+68),
    (20, 9.9999999999999995e-7, 3.9199043496247408e-145, -4.0601741495843314e+142),
    (0, 0.001, 0.99999975000001562, -4.4714166113759233),
    (1, 0.001, 0.00049999993750000261, -636.62216723113941),
    (3, 0.001, 2.0833332031250034e-11, -5092958815.5605024),
    (10, 0.001, 2.6911443943049993e-40, -1.1828049377990414e+38),
    (40, 0.001, 1.1146925604908664e-180, -7.1389613953993215e+177),
    (0, 0.5, 0.9384698072408129, -0.44451873350670656),
    (1, 0.5, 0.24226845767487389, -1.4714723926702431),
    (2, 0.5, 0.030604023458682641, -5.4413708371742657),
    (5, 0.5, 8.0536272413574741e-6, -7946.3014788074733),
    (20, 0.5, 3.7272019617047145e-31, -4.2714301215659064e+28),
    (60, 0.5, 9.0319327113893073e-119, -5.8739908800922681e+115),
    (0, 1.0, 0.76519768655796655, 0.088256964215676958),
    (1, 1.0, 0.44005058574493352, -0.78121282130028872),
    (2, 1.0, 0.11490348493190048, -1.6506826068162544),
    (5, 1.0, 0.00024975773021123443, -260.40586662581222),
    (20, 1.0, 3.8735030085246577e-25, -4.1139703148355053e+22),
    (60, 1.0, 1.0381149765645213e-100, -5.1110927753066711e+97),
    (0, 2.0, 0.22389077914123567, 0.51037567264974512),
    (1, 2.0, 0.57672480775687339, -0.10703243154093755),
    (2, 2.0, 0.35283402861563772, -0.61740810419068267),
    (5, 2.0, 0.0070396297558716855, -9.935989128481975),
    (20, 2.0, 3.9189728050907538e-19, -40816513889983666.0),
    (60, 2.0, 1.1822372183209694e-82, -4.4898902537939942e+79),
    (150, 2.0, 1.7387230198888471e-263, -1.2205823154350847e+260),
    (0, 5.0, -0.1775967713143383, -0.30851762524903378),
    (1, 5.0, -0.32757913759146522, 0.14786314339122684),
    (3, 5.0, 0.36483123061366699, 0.14626716269319277),
    (10, 5.0, 0.0014678026473104741, -25.129110095610097),
    (40, 5.0, 8.7022416173888181e-33, -9.2168165716493142e+29),
    (100, 5.0, 6.2677893955418761e-119, -5.0848639160202229e+115),
    (0, 10.0, -0.24593576445134834, 0.055671167283599391),
    (1, 10.0, 0.043472746168861437, 0.24901542420695388),
    (2, 10.0, 0.25463031368512062, -0.0058680824422086146),
    (5, 10.0, -0.23406152818679364, 0.1354030476893623),
    (10, 10.0, 0.20748610663335886, -0.35981415218340272),
    (20, 10.0, 1.1513369247813398e-5, -1597.483848269626),
    (60, 10.0, 6.9094332494399619e-41, -7.7870957750152609e+37),
    (150, 10.0, 1.0391182286617033e-158, -2.046733029818539e+155),
    (0, 13.0, 0.20692610237706781, -0.078207864527875911),
    (1, 13.0, -0.070318052121778371, -0.21008140842069351),
    (2, 13.0, -0.21774426424195679, 0.045887647847769218),
    (5, 13.0, 0.13161955992748079, -0.18876093622860954),
    (10, 13.0, 0.23378201020301889, 0.14180994879660074),
    (20, 13.0, 0.00089714062967778547, -23.422320040066873),
    (60, 13.0, 3.5654873368027451e-34, -1.5241376130398949e+31),
    (150, 13.0, 1.1441469236656292e-141, -1.8617198041094754e+138),
    (0, 14.0, 0.17107347611045866, 0.12719256858218369),
    (1, 14.0, 0.13337515469879325, -0.16664484185617227),
    (2, 14.0, -0.15201988258205962, -0.15099897456163687),
    (5, 14.0, 0.2203776482919637, -0.006971693612555867),
    (10, 14.0, 0.085006705446061018, 0.23854272714494474),
    (20, 14.0, 0.0027527249952277696, -8.1454986518721065),
    (60, 14.0, 2.7198738748910135e-32, -2.0059057599548494e+29),
    (150, 14.0, 7.3575247488291122e-137, -2.8968573113605678e+133),
    (0, 15.0, -0.014224472826780773, 0.20546429603891826),
    (1, 15.0, 0.20510403861352276, 0.021073628036873512),
    (2, 15.0, 0.041571677975250475, -0.20265447896733513),
    (5, 15.0, 0.13045613456502955, 0.1671727157594002),
    (20, 15.0, 0.0073602340792234853, -3.3087330924737645),
    (60, 15.0, 1.5135144647476608e-30, -3.6201895637382637e+27),
    (150, 15.0, 2.18935063594689e-132, -9.7415048032285244e+128),
    (0, 20.0, 0.16702466434058315, 0.062640596809383831),
    (1, 20.0, 0.066833124175850046, -0.1655116143625213),
    (2, 20.0, -0.16034135192299815, -0.079191758245635961),
    (5, 20.0, 0.15116976798239497, -0.10003576788953243),
    (20, 20.0, 0.16474777377532653, -0.28548945860020349),
    (60, 20.0, 2.2809263887335596e-23, -2.4670257583513079e+20),
    (150, 20.0, 9.0128916955875923e-114, -2.3756913696088472e+110),
    (270, 20.0, 1.0375828054720024e-271, -1.1393531950008394e+268),
    (0, 50.0, 0.055812327669251815, -0.098064995470077079),
    (1, 50.0, -0.097511828125175138, -0.056795668562014768),
    (3, 50.0, 0.092734804061634432, 0.064459122060222487),
    (10, 50.0, -0.11384784914946939, 0.0057238971820535135),
    (40, 50.0, -0.13817628120116143, -0.045308011195609008),
    (60, 50.0, 0.0010485195995314181, -9.194397418995578),
    (100, 50.0, 1.1159273690838093e-21, -3.2938001882026666e+18),
    (200, 50.0, 2.1383690042391174e-97, -7.6869182252789711e+93),
    (270, 50.0, 4.1142790838940474e-165, -2.9158834725171159e+161),
    (300, 50.0, 9.8015896382595329e-197, -1.0978668156903745e+193),
    (0, 100.0, 0.019985850304223122, -0.077244313365083152),
    (1, 100.0, -0.077145352014112158, -0.020372312002759793),
    (3, 100.0, 0.076284201720331943, 0.023445786687760912),
    (10, 100.0, -0.054732176935472015, 0.058331574236414929),
    (40, 100.0, 0.072701754822811057, 0.040746852168803442),
    (100, 100.0, 0.09636667329586156, -0.16692141141757651),
    (200, 100.0, 2.0594424939411679e-41, -8.9236648125530524e+37),
    (270, 100.0, 6.6171638030263527e-87, -1.9180219683476528e+83),
    (300, 100.0, 3.5203666218469364e-109, -3.1968159362664298e+105),
    (0, 200.0, -0.015437439930565092, -0.054265775249817911),
    (1, 200.0, -0.054304538182378223, 0.015301824580389989),
    (3, 200.0, 0.054602426073353049, -0.014213448710477553),
    (10, 200.0, 0.0015301688136801641, 0.056433444517996072),
    (40, 200.0, -0.031932993297986605, 0.047212363855706128),
    (100, 200.0, 0.0093332141865575865, -0.059902943572273547),
    (150, 200.0, -0.031593559273458418, -0.061754822635910959),
    (200, 200.0, 0.07648760893095332, -0.13248339734061201),
    (270, 200.0, 6.2437553967598979e-19, -2810777958155782.3),
    (300, 200.0, 1.3941183954632936e-30, -1.021109739784169e+27),
    (0, 350.0, -0.037479568421573194, -0.020351750053983197),
    (1, 350.0, -0.020405312952145482, 0.037450532796227404),
    (3, 350.0, 0.020832318285097198, -0.037215495617958454),
    (10, 350.0, 0.034207011447806959, 0.025485976620955261),
    (40, 350.0, 0.040107195904384709, -0.014910422190754112),
    (100, 350.0, 0.029555647742613856, -0.032007714987784749),
    (200, 350.0, 0.044747960258076323, -0.014629714117331678),
    (270, 350.0, -0.022171999168123117, -0.04864937053160491),
    (300, 350.0, -0.007133149540536094, -0.058988922714410043),
    (0, 500.0, -0.034100556880731998, 0.010506708739831374),
    (1, 500.0, 0.010472613470372293, 0.034111080629137136),
    (2, 500.0, 0.034142447334613487, -0.010370264417314826),
    (3, 500.0, -0.010199473891695385, -0.034194042744475654),
    (5, 500.0, 0.0096512364353543636, 0.034353401718945752),
    (10, 500.0, 0.034982637503815107, -0.0070504399730159793),
    (20, 500.0, -0.035514222915127349, -0.0036053691568370722),
    (40, 500.0, -0.009492444896341524, -0.034456151776833841),
    (60, 500.0, 0.035332404831978475, 0.0058418781448366494),
    (100, 500.0, 0.034329532854951521, 0.010998954077227787),
    (150, 500.0, -0.03388114891571987, -0.013666903527272653),
    (200, 500.0, 0.031202198153727847, -0.020387229938128042),
    (270, 500.0, 0.025762105018636763, -0.029138842752986524),
    (300, 500.0, -0.0029540008506893707, 0.039784618934117593),
];
