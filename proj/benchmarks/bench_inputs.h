#pragma once

#include <random>
#include <vector>

#include "covgeom/spectral.h"

namespace covgeom::bench {

// G G^T / d + 0.1 I for a Gaussian d x d matrix G.
inline Covariance RandomSpd(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> normal;
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = normal(rng);
  }
  return make_covariance(g * g.transpose() / static_cast<double>(d) +
                         0.1 * Matrix::Identity(d, d));
}

inline std::vector<Covariance> RandomFamily(std::mt19937_64& rng, Index n, Index d) {
  std::vector<Covariance> fam;
  for (Index i = 0; i < n; ++i) fam.push_back(RandomSpd(rng, d));
  return fam;
}

}  // namespace covgeom::bench
