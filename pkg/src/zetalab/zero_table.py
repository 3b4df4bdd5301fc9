"""First 100 ordinates of the nontrivial zeta zeros (generated file).

Regenerate with tools/make_zero_table.py; do not edit by hand. The list
is complete below COMPLETE_UPPER: every zero with ordinate up to that
bound is present (the 101st ordinate exceeds 237.5).
"""

COMPLETE_UPPER = 237.0

ORDINATES = (
    14.134725141734694,
    21.022039638771555,
    25.010857580145689,
    30.424876125859513,
    32.93506158773919,
    37.586178158825671,
    40.918719012147495,
    43.327073280915,
    48.00515088116716,
    49.773832477672302,
    52.970321477714461,
    56.446247697063395,
    59.347044002602353,
    60.83177852460981,
    65.112544048081607,
    67.079810529494174,
    69.546401711173979,
    72.067157674481908,
    75.704690699083933,
    77.144840068874805,
    79.337375020249368,
    82.91038085408603,
    84.73549298051705,
    87.425274613125229,
    88.809111207634465,
    92.491899270558484,
    94.651344040519887,
    95.87063422824531,
    98.831194218193692,
    101.31785100573139,
    103.72553804047834,
    105.44662305232609,
    107.16861118427641,
    111.02953554316967,
    111.87465917699264,
    114.32022091545271,
    116.22668032085755,
    118.79078286597622,
    121.37012500242065,
    122.94682929355259,
    124.25681855434577,
    127.5166838795965,
    129.57870419995605,
    131.08768853093266,
    133.49773720299759,
    134.75650975337387,
    138.11604205453344,
    139.73620895212139,
    141.12370740402112,
    143.11184580762063,
    146.00098248676552,
    147.4227653425596,
    150.05352042078488,
    150.92525761224147,
    153.0246938111989,
    156.11290929423787,
    157.59759181759406,
    158.8499881714205,
    161.18896413759603,
    163.03070968718199,
    165.53706918790042,
    167.18443997817451,
    169.09451541556882,
    169.9119764794117,
    173.41153651959155,
    174.75419152336573,
    176.44143429771042,
    178.37740777609998,
    179.916484020257,
    182.20707848436646,
    184.87446784838751,
    185.59878367770747,
    187.22892258350185,
    189.41615865601694,
    192.02665636071379,
    193.0797266038457,
    195.26539667952924,
    196.87648184095832,
    198.01530967625191,
    201.26475194370379,
    202.49359451414053,
    204.18967180310455,
    205.39469720216329,
    207.90625888780621,
    209.57650971685626,
    211.69086259536531,
    213.34791935971267,
    214.54704478349142,
    216.1695385082637,
    219.06759634902138,
    220.714918839314,
    221.43070555469334,
    224.00700025460434,
    224.98332466958229,
    227.42144427967929,
    229.33741330552535,
    231.25018870049916,
    231.98723525318025,
    233.6934041789083,
    236.52422966581621,
)
