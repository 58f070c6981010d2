#pragma once

// Named data used across tests, the acceptance suite and the CLI docs, and
// random generators for geometric data and equivalence transforms.

#include "entineq/datum.hpp"
#include "entineq/random.hpp"

#include <string>
#include <utility>
#include <vector>

namespace entineq::catalog {

/// lambda h(X1) + (1-lambda) h(X2) <= h(sqrt(lambda) X1 + sqrt(1-lambda) X2), X_i in R^n.
Datum shannon_stam(double lambda, Index n = 1);

/// lambda h(X,Y) + (1-lambda) h(Z) <= lambda h(X) + h(sqrt(lambda) Y + sqrt(1-lambda) Z),
/// scalar X, Y, Z. Coordinates of E_0: (x, y, z).
Datum toy(double lambda);

/// k = 1, B_1 = I_n, c = d = 1.
Datum identity(Index n);

/// h(BX) >= sum |b_i|^2 h(X_i) for B with orthonormal rows and scalar X_i.
Datum zamir_feder(const Mat& b);
/// B = [[1,0,0],[0,1/sqrt2,1/sqrt2]].
Datum zamir_feder_example();

/// c1 h(Z1,Z2) + c2 h(Y) <= d1 h(Z1+Y, Z2+Y) + d2 h(Z1) + d3 h(Z2).
Datum three_map(double c1, double c2, double d1, double d2, double d3);

/// k = 1 on R^2 with B_1 = [1, 0], c = d = 1: fails both finiteness conditions.
Datum kernel_witness();
/// As kernel_witness but with c = 1/2 so the scaling condition holds.
Datum kernel_witness_scaled();
/// Shannon-Stam (lambda = 1/2, n = 1) with d = 2.
Datum scaling_violating();

/// The fixed corpus of geometric data used by the acceptance battery.
std::vector<std::pair<std::string, Datum>> geometric_corpus();

struct RandomGeometricOptions {
  Index max_k = 3;
  Index max_block = 3;
  Index max_frames = 3;
  Index max_maps = 6;
};

/// Random geometric datum assembled from weighted orthogonal frames: each
/// frame is an orthogonal matrix on a subset of the blocks whose rows are
/// split into maps; a frame with weight w adds w to d_j of its maps and to
/// c_i of the blocks it covers.
Datum random_geometric(Rng& rng, const RandomGeometricOptions& options = {});

struct Equivalence {
  std::vector<Mat> a;  // one per map
  std::vector<Mat> c;  // one per source block
};

/// Well-conditioned random invertible transforms I + spread * G.
Equivalence random_equivalence(const Datum& datum, Rng& rng, double spread = 0.4);

}  // namespace entineq::catalog
