#pragma once

#include "snf/intmat.hpp"
#include "snf/multipliers.hpp"

// Small frozen matrices with independently computed companions (Smith forms,
// massagers, Hermite data, scaled inverses).  Tests and the CLI replay mode
// use these as ground truth.

namespace snf::fixtures {

// --- 4 x 4 dense example ("a4") -------------------------------------------
IntMat a4();                 // det = 261792
SmithForm a4_smith();        // (1, 1, 9, 29088)
IntMat a4_massager_m();      // reduced massager M with a4_smith
IntMat a4_massager_w();      // certificate W
IntMat a4_scaled_inverse();  // 29088 * a4^{-1} (exact integer matrix)
IntMat a4_opa_ubar();        // rowmod(U^{-1}, S) for the frozen triple

// --- 7 x 7 Vandermonde-like example ("a7") and a frozen pipeline run ------
IntMat a7();                 // det = 1280
SmithForm a7_smith();        // (1, 1, 1, 1, 2, 8, 80)
SmithForm a7_two_smith();    // Smith form of 2 * a7
IntMat run7_massager_m();    // massager of 2 * a7 used by the frozen run
IntMat run7_perturbation();  // the 0/1 perturbation R of that run
IntMat run7_b();             // B = M + R * diag(2S)
Int run7_h1();               // 830295 = |det B|
IntVec run7_hbar();          // below-diagonal column of the trivial Hermite form
IntMat run7_v();             // extracted V
IntMat run7_u();             // U with  a7 * V = U * diag(S)

// --- 4 x 4 column-skewed example ("l4") for linearization -----------------
IntMat l4();             // det = 2921001691086297, column lengths (3, 4, 16, 33)
IntMat l4_linearized();  // its 7 x 7 column linearization at d = 14
IntMat l4_hermite_of_linearized(); // lower Hermite form of the linearization

} // namespace snf::fixtures
