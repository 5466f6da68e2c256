"""Reference values transcribed by hand, shared by several test modules."""

# quiver of the 4-punctured torus triangulation shipped as torus_4
TORUS_4_ARROWS = [
    (4, 1), (1, 5), (8, 1), (1, 9), (3, 2), (2, 4), (6, 2), (2, 7),
    (4, 3), (9, 3), (3, 10), (5, 4), (5, 6), (11, 5), (7, 6), (6, 11),
    (7, 8), (12, 7), (9, 8), (8, 12), (10, 9), (10, 11), (12, 10), (11, 12),
]

# quiver of the genus-2, 10-puncture triangulation shipped as genus2_10
GENUS2_ARROWS = [
    (1, 2), (13, 1), (1, 23), (24, 1), (25, 1), (2, 13), (2, 15), (28, 2),
    (3, 4), (5, 3), (6, 3), (3, 9), (4, 5), (4, 7), (8, 4), (5, 6),
    (7, 5), (6, 7), (9, 6), (7, 8), (22, 8), (8, 23), (9, 10), (11, 9),
    (10, 12), (12, 11), (13, 12), (12, 14), (14, 13), (15, 14), (14, 16), (16, 15),
    (15, 28), (16, 17), (18, 16), (17, 18), (19, 17), (17, 21), (18, 19), (20, 18),
    (19, 20), (21, 19), (20, 26), (27, 20), (21, 22), (26, 21), (23, 22), (22, 26),
    (23, 24), (23, 25), (26, 27), (27, 28), (29, 27), (28, 29), (30, 29), (29, 31),
    (31, 30), (30, 32), (34, 30), (33, 31), (31, 35), (32, 33), (32, 34), (36, 32),
    (35, 33), (33, 36), (35, 34), (34, 36), (36, 35),
]

# quiver of the genus-1 surface with one 3-pointed boundary component
SIGMA_STAR_ARROWS = [
    (4, 1), (1, 5), (8, 1), (1, 9), (3, 2), (2, 4), (6, 2), (2, 7),
    (4, 3), (9, 3), (5, 4), (5, 6), (7, 6), (7, 8), (9, 8),
]

# staged sequences of the worked genus-2 example
IND_M0 = (3, 4, 5, 10, 16, 20, 21, 29, 17, 18, 19)
# the same stage as first displayed, in plain ascending id order
IND_M0_DISPLAYED = (3, 4, 5, 10, 16, 17, 18, 19, 20, 21, 29)
CYCLE_P1 = (3, 6, 7, 9, 12, 14, 22, 8, 14, 12, 9, 7, 6, 3)
CYCLE_P2 = (15, 28, 31, 35, 34, 30, 27, 34, 35, 31, 28, 15)
CYCLE_P3 = (16, 20, 21, 16)
IND_STAR_M0 = (26, 18, 17, 29, 20, 21, 16, 11, 5, 4, 3)
IND_M1 = (32, 33, 36)
CYCLE_R1 = (27, 31)
CYCLE_R3 = (32, 35)
CYCLE_M1_PRINTED = (27, 31, 32, 35)
IND_STAR_M1_PRINTED = (24, 33, 35)
IND_X = (2, 13, 23, 24, 1)
CYCLE_X_PRINTED = (6, 7, 22, 25, 23, 15, 14, 2, 8, 19, 30, 28, 12, 10, 9, 12, 28, 30, 19, 8, 2, 14, 15, 23, 25, 22, 7, 6)
IND_STAR_X = (1, 24, 23, 13, 2)

# the full sequence exactly as printed, stage by stage
PRINTED_100 = (
    IND_M0_DISPLAYED + CYCLE_P1 + CYCLE_P2 + CYCLE_P3 + IND_STAR_M0
    + IND_M1 + CYCLE_M1_PRINTED + IND_STAR_M1_PRINTED
    + IND_X + CYCLE_X_PRINTED + IND_STAR_X
)
