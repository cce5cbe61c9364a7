"""Single table of run-time defaults shared by the library, CLI and tests.

=====================  ===================  ==========================================
name                   value                meaning
=====================  ===================  ==========================================
STRENGTH_B             40.0                 MMBEC adjusting strength factor
THRESHOLD              0.9                  SR needed to accept an authorship claim
HASH_NAME              "sha256"             digest for keyword / image hashing
PAIR_STRATEGY          "all"                same bit in all five pairs, majority read
ALGORITHM              "MMBEC"              embedding algorithm
MBEC_EXCHANGE_MARGIN   7.0                  fixed gap kept by the MBEC baseline
KEYWORD_ENV            "AUTHMARK_KEYWORD"   environment variable read for keywords
BENCH_QFS              5, 15, ..., 100      quality factors swept by ``bench``
CALIBRATION_BS         10, 20, ..., 100     strengths tried by ``calibrate``
=====================  ===================  ==========================================
"""

STRENGTH_B = 40.0
THRESHOLD = 0.9
HASH_NAME = "sha256"
PAIR_STRATEGY = "all"
ALGORITHM = "MMBEC"
# Half the luminance-table entry (14) at the MBEC pair: the quantizer step at QF 75.
MBEC_EXCHANGE_MARGIN = 7.0
KEYWORD_ENV = "AUTHMARK_KEYWORD"
BENCH_QFS = (5, 15, 25, 30, 35, 40, 50, 75, 85, 90, 95, 100)
CALIBRATION_BS = tuple(float(b) for b in range(10, 101, 10))
# Bounded number of re-embedding passes used to undo rounding/clamping damage.
CORRECTION_PASSES = 10
