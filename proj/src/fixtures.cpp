#include "snf/fixtures.hpp"

namespace snf::fixtures {

IntMat a4() {
    return IntMat::from_rows({{-6, 3, -13, -15},
                              {-4, 19, 12, -1},
                              {-4, 10, -6, 17},
                              {-26, -13, 1, -2}});
}

SmithForm a4_smith() { return SmithForm({1, 1, 9, 29088}); }

IntMat a4_massager_m() {
    return IntMat::from_rows({{0, 0, 7, 805},
                              {0, 0, 5, 23668},
                              {0, 0, 3, 6},
                              {0, 0, 4, 10224}});
}

IntMat a4_massager_w() {
    return IntMat::from_rows({{4, -19, -12, 1},
                              {-306, 3, 133, 0},
                              {5156, 805, 6332, 0},
                              {12017, -403, 11356, 0}});
}

IntMat a4_scaled_inverse() {
    return IntMat::from_rows({{-271, -402, -373, -937},
                              {580, 920, 524, -356},
                              {-1074, 804, -870, 258},
                              {-784, -352, 1008, 80}});
}

IntMat a4_opa_ubar() {
    return IntMat::from_rows({{0, 0, 0, 0},
                              {0, 0, 0, 0},
                              {2, 2, 0, 2},
                              {20829, 1750, 28943, 16203}});
}

IntMat a7() {
    return IntMat::from_rows({{1, 0, 0, 0, 0, 0, 0},
                              {1, 1, 1, 1, 1, 1, 1},
                              {1, 2, 4, 1, 2, 4, 1},
                              {1, 3, 2, 6, 4, 5, 1},
                              {1, 4, 2, 1, 4, 2, 1},
                              {1, 5, 4, 6, 2, 3, 1},
                              {1, 6, 1, 6, 1, 6, 1}});
}

SmithForm a7_smith() { return SmithForm({1, 1, 1, 1, 2, 8, 80}); }

SmithForm a7_two_smith() { return SmithForm({2, 2, 2, 2, 4, 16, 160}); }

IntMat run7_massager_m() {
    return IntMat::from_rows({{1, 0, 1, 1, 2, 8, 0},
                              {0, 1, 1, 0, 2, 11, 65},
                              {1, 0, 1, 1, 1, 12, 15},
                              {0, 1, 1, 1, 3, 6, 98},
                              {0, 0, 0, 0, 0, 12, 155},
                              {1, 1, 1, 1, 1, 7, 125},
                              {1, 1, 1, 1, 1, 0, 22}});
}

IntMat run7_perturbation() {
    return IntMat::from_rows({{0, 0, 1, 1, 1, 0, 1},
                              {1, 1, 0, 0, 1, 0, 1},
                              {0, 0, 0, 0, 0, 0, 0},
                              {1, 1, 1, 1, 0, 0, 0},
                              {0, 1, 0, 1, 0, 1, 0},
                              {0, 1, 1, 1, 1, 1, 0},
                              {1, 1, 0, 0, 1, 1, 0}});
}

IntMat run7_b() {
    return IntMat::from_rows({{1, 0, 3, 3, 6, 8, 160},
                              {2, 3, 1, 0, 6, 11, 225},
                              {1, 0, 1, 1, 1, 12, 15},
                              {2, 3, 3, 3, 3, 6, 98},
                              {0, 2, 0, 2, 0, 28, 155},
                              {1, 3, 3, 3, 5, 23, 125},
                              {3, 3, 1, 1, 5, 16, 22}});
}

Int run7_h1() { return Int(830295); }

IntVec run7_hbar() { return IntVec{547348, 602711, 592450, 540934, 350043, 323815}; }

IntMat run7_v() {
    return IntMat::from_rows({{-74, 0, 3, 3, 6, 8, 160},
                              {-99, 3, 1, 0, 6, 11, 225},
                              {-13, 0, 1, 1, 1, 12, 15},
                              {-49, 3, 3, 3, 3, 6, 98},
                              {-75, 2, 0, 2, 0, 28, 155},
                              {-68, 3, 3, 3, 5, 23, 125},
                              {-22, 3, 1, 1, 5, 16, 22}});
}

IntMat run7_u() {
    return IntMat::from_rows({{-74, 0, 3, 3, 3, 1, 2},
                              {-400, 14, 12, 13, 13, 13, 10},
                              {-817, 28, 25, 27, 25, 31, 20},
                              {-1353, 53, 42, 47, 37, 43, 34},
                              {-1003, 32, 19, 23, 25, 32, 26},
                              {-1291, 49, 40, 39, 39, 36, 33},
                              {-1480, 59, 47, 43, 48, 38, 38}});
}

IntMat l4() {
    return IntMat::from_rows({{2, 4, 44199, 3061969404},
                              {4, 8, 19644, 765492351},
                              {7, 8, 44199, 5358446457},
                              {7, 5, 9822, 765492351}});
}

IntMat l4_linearized() {
    return IntMat::from_rows({{2, 4, 11431, 12796, 2, 6663, 11},
                              {4, 8, 3260, 15487, 1, 13953, 2},
                              {7, 8, 11431, 10105, 2, 15757, 19},
                              {7, 5, 9822, 15487, 0, 13953, 2},
                              {0, 0, -16384, 0, 1, 0, 0},
                              {0, 0, 0, -16384, 0, 1, 0},
                              {0, 0, 0, 0, 0, -16384, 1}});
}

IntMat l4_hermite_of_linearized() {
    return IntMat::from_rows({{777, 0, 0, 0, 0, 0, 0},
                              {401, 1, 0, 0, 0, 0, 0},
                              {174, 0, 4911, 0, 0, 0, 0},
                              {762, 0, 0, 765492351, 0, 0, 0},
                              {696, 0, 3260, 0, 1, 0, 0},
                              {762, 0, 0, 765475967, 0, 1, 0},
                              {762, 0, 0, 497056895, 0, 0, 1}});
}

} // namespace snf::fixtures
