"""QR symbol tables: codeword counts, block structure, alignment, remainders.

All values are fixed by the QR standard. BLOCKS and EC_PER_BLOCK are indexed
[version][level]; EC_TOTAL is carried redundantly so a test can assert
blocks * ec_per_block == ec_total for every cell, catching transcription
slips. Data codewords split into blocks short-first: the first
(blocks - rem) blocks carry floor(data/blocks) codewords, the rest one more.
"""

LEVELS = ("L", "M", "Q", "H")

TOTAL_CODEWORDS = (
    None, 26, 44, 70, 100, 134, 172, 196, 242, 292, 346,
    404, 466, 532, 581, 655, 733, 815, 901, 991, 1085,
    1156, 1258, 1364, 1474, 1588, 1706, 1828, 1921, 2051, 2185,
    2323, 2465, 2611, 2761, 2876, 3034, 3196, 3362, 3532, 3706,
)

# {level: total error-correction codewords} per version
EC_TOTAL = (
    None,
    {"L": 7, "M": 10, "Q": 13, "H": 17},
    {"L": 10, "M": 16, "Q": 22, "H": 28},
    {"L": 15, "M": 26, "Q": 36, "H": 44},
    {"L": 20, "M": 36, "Q": 52, "H": 64},
    {"L": 26, "M": 48, "Q": 72, "H": 88},
    {"L": 36, "M": 64, "Q": 96, "H": 112},
    {"L": 40, "M": 72, "Q": 108, "H": 130},
    {"L": 48, "M": 88, "Q": 132, "H": 156},
    {"L": 60, "M": 110, "Q": 160, "H": 192},
    {"L": 72, "M": 130, "Q": 192, "H": 224},
    {"L": 80, "M": 150, "Q": 224, "H": 264},
    {"L": 96, "M": 176, "Q": 260, "H": 308},
    {"L": 104, "M": 198, "Q": 288, "H": 352},
    {"L": 120, "M": 216, "Q": 320, "H": 384},
    {"L": 132, "M": 240, "Q": 360, "H": 432},
    {"L": 144, "M": 280, "Q": 408, "H": 480},
    {"L": 168, "M": 308, "Q": 448, "H": 532},
    {"L": 180, "M": 338, "Q": 504, "H": 588},
    {"L": 196, "M": 364, "Q": 546, "H": 650},
    {"L": 224, "M": 416, "Q": 600, "H": 700},
    {"L": 224, "M": 442, "Q": 644, "H": 750},
    {"L": 252, "M": 476, "Q": 690, "H": 816},
    {"L": 270, "M": 504, "Q": 750, "H": 900},
    {"L": 300, "M": 560, "Q": 810, "H": 960},
    {"L": 312, "M": 588, "Q": 870, "H": 1050},
    {"L": 336, "M": 644, "Q": 952, "H": 1110},
    {"L": 360, "M": 700, "Q": 1020, "H": 1200},
    {"L": 390, "M": 728, "Q": 1050, "H": 1260},
    {"L": 420, "M": 784, "Q": 1140, "H": 1350},
    {"L": 450, "M": 812, "Q": 1200, "H": 1440},
    {"L": 480, "M": 868, "Q": 1290, "H": 1530},
    {"L": 510, "M": 924, "Q": 1350, "H": 1620},
    {"L": 540, "M": 980, "Q": 1440, "H": 1710},
    {"L": 570, "M": 1036, "Q": 1530, "H": 1800},
    {"L": 570, "M": 1064, "Q": 1590, "H": 1890},
    {"L": 600, "M": 1120, "Q": 1680, "H": 1980},
    {"L": 630, "M": 1204, "Q": 1770, "H": 2100},
    {"L": 660, "M": 1260, "Q": 1860, "H": 2220},
    {"L": 720, "M": 1316, "Q": 1950, "H": 2310},
    {"L": 750, "M": 1372, "Q": 2040, "H": 2430},
)

BLOCKS = (
    None,
    {"L": 1, "M": 1, "Q": 1, "H": 1},
    {"L": 1, "M": 1, "Q": 1, "H": 1},
    {"L": 1, "M": 1, "Q": 2, "H": 2},
    {"L": 1, "M": 2, "Q": 2, "H": 4},
    {"L": 1, "M": 2, "Q": 4, "H": 4},
    {"L": 2, "M": 4, "Q": 4, "H": 4},
    {"L": 2, "M": 4, "Q": 6, "H": 5},
    {"L": 2, "M": 4, "Q": 6, "H": 6},
    {"L": 2, "M": 5, "Q": 8, "H": 8},
    {"L": 4, "M": 5, "Q": 8, "H": 8},
    {"L": 4, "M": 5, "Q": 8, "H": 11},
    {"L": 4, "M": 8, "Q": 10, "H": 11},
    {"L": 4, "M": 9, "Q": 12, "H": 16},
    {"L": 4, "M": 9, "Q": 16, "H": 16},
    {"L": 6, "M": 10, "Q": 12, "H": 18},
    {"L": 6, "M": 10, "Q": 17, "H": 16},
    {"L": 6, "M": 11, "Q": 16, "H": 19},
    {"L": 6, "M": 13, "Q": 18, "H": 21},
    {"L": 7, "M": 14, "Q": 21, "H": 25},
    {"L": 8, "M": 16, "Q": 20, "H": 25},
    {"L": 8, "M": 17, "Q": 23, "H": 25},
    {"L": 9, "M": 17, "Q": 23, "H": 34},
    {"L": 9, "M": 18, "Q": 25, "H": 30},
    {"L": 10, "M": 20, "Q": 27, "H": 32},
    {"L": 12, "M": 21, "Q": 29, "H": 35},
    {"L": 12, "M": 23, "Q": 34, "H": 37},
    {"L": 12, "M": 25, "Q": 34, "H": 40},
    {"L": 13, "M": 26, "Q": 35, "H": 42},
    {"L": 14, "M": 28, "Q": 38, "H": 45},
    {"L": 15, "M": 29, "Q": 40, "H": 48},
    {"L": 16, "M": 31, "Q": 43, "H": 51},
    {"L": 17, "M": 33, "Q": 45, "H": 54},
    {"L": 18, "M": 35, "Q": 48, "H": 57},
    {"L": 19, "M": 37, "Q": 51, "H": 60},
    {"L": 19, "M": 38, "Q": 53, "H": 63},
    {"L": 20, "M": 40, "Q": 56, "H": 66},
    {"L": 21, "M": 43, "Q": 59, "H": 70},
    {"L": 22, "M": 45, "Q": 62, "H": 74},
    {"L": 24, "M": 47, "Q": 65, "H": 77},
    {"L": 25, "M": 49, "Q": 68, "H": 81},
)

EC_PER_BLOCK = (
    None,
    {"L": 7, "M": 10, "Q": 13, "H": 17},
    {"L": 10, "M": 16, "Q": 22, "H": 28},
    {"L": 15, "M": 26, "Q": 18, "H": 22},
    {"L": 20, "M": 18, "Q": 26, "H": 16},
    {"L": 26, "M": 24, "Q": 18, "H": 22},
    {"L": 18, "M": 16, "Q": 24, "H": 28},
    {"L": 20, "M": 18, "Q": 18, "H": 26},
    {"L": 24, "M": 22, "Q": 22, "H": 26},
    {"L": 30, "M": 22, "Q": 20, "H": 24},
    {"L": 18, "M": 26, "Q": 24, "H": 28},
    {"L": 20, "M": 30, "Q": 28, "H": 24},
    {"L": 24, "M": 22, "Q": 26, "H": 28},
    {"L": 26, "M": 22, "Q": 24, "H": 22},
    {"L": 30, "M": 24, "Q": 20, "H": 24},
    {"L": 22, "M": 24, "Q": 30, "H": 24},
    {"L": 24, "M": 28, "Q": 24, "H": 30},
    {"L": 28, "M": 28, "Q": 28, "H": 28},
    {"L": 30, "M": 26, "Q": 28, "H": 28},
    {"L": 28, "M": 26, "Q": 26, "H": 26},
    {"L": 28, "M": 26, "Q": 30, "H": 28},
    {"L": 28, "M": 26, "Q": 28, "H": 30},
    {"L": 28, "M": 28, "Q": 30, "H": 24},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 26, "M": 28, "Q": 30, "H": 30},
    {"L": 28, "M": 28, "Q": 28, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
    {"L": 30, "M": 28, "Q": 30, "H": 30},
)

# center coordinates of alignment patterns per version (both axes)
ALIGNMENT = (
    None, (), (6, 18), (6, 22), (6, 26), (6, 30), (6, 34),
    (6, 22, 38), (6, 24, 42), (6, 26, 46), (6, 28, 50), (6, 30, 54),
    (6, 32, 58), (6, 34, 62), (6, 26, 46, 66), (6, 26, 48, 70),
    (6, 26, 50, 74), (6, 30, 54, 78), (6, 30, 56, 82), (6, 30, 58, 86),
    (6, 34, 62, 90), (6, 28, 50, 72, 94), (6, 26, 50, 74, 98),
    (6, 30, 54, 78, 102), (6, 28, 54, 80, 106), (6, 32, 58, 84, 110),
    (6, 30, 58, 86, 114), (6, 34, 62, 90, 118), (6, 26, 50, 74, 98, 122),
    (6, 30, 54, 78, 102, 126), (6, 26, 52, 78, 104, 130),
    (6, 30, 56, 82, 108, 134), (6, 34, 60, 86, 112, 138),
    (6, 30, 58, 86, 114, 142), (6, 34, 62, 90, 118, 146),
    (6, 30, 54, 78, 102, 126, 150), (6, 24, 50, 76, 102, 128, 154),
    (6, 28, 54, 80, 106, 132, 158), (6, 32, 58, 84, 110, 136, 162),
    (6, 26, 54, 82, 110, 138, 166), (6, 30, 58, 86, 114, 142, 170),
)

# leftover modules after the last full codeword, filled with zero bits
REMAINDER_BITS = (
    None, 0, 7, 7, 7, 7, 7, 0, 0, 0, 0, 0, 0, 0,
    3, 3, 3, 3, 3, 3, 3, 4, 4, 4, 4, 4, 4, 4,
    3, 3, 3, 3, 3, 3, 3, 0, 0, 0, 0, 0, 0,
)


def data_codewords(version: int, level: str) -> int:
    return TOTAL_CODEWORDS[version] - EC_TOTAL[version][level]


def block_sizes(version: int, level: str) -> list[int]:
    """Data codewords per block, shorter blocks first."""
    blocks = BLOCKS[version][level]
    total = data_codewords(version, level)
    base, rem = divmod(total, blocks)
    return [base] * (blocks - rem) + [base + 1] * rem


def byte_mode_capacity(version: int, level: str) -> int:
    """Maximum payload bytes in byte mode at this version and level."""
    count_bits = 8 if version <= 9 else 16
    return (data_codewords(version, level) * 8 - 4 - count_bits) // 8
