#pragma once

#include <vector>

#include "epilab/equilibria.hpp"

namespace epilab {

struct SweepAxis {
  double lo = 0.0, hi = 0.0, step = 0.05;

  std::vector<double> values() const {
    if (!(step > 0) || hi < lo) throw std::invalid_argument("SweepAxis: bad range");
    std::vector<double> v;
    for (int i = 0;; ++i) {
      const double x = lo + i * step;
      if (x > hi + 0.5 * step) break;
      v.push_back(x);
    }
    return v;
  }
};

// Row-major abscissa grid over (u_star, k). Cells where the operating-branch
// equilibrium does not exist carry found = 0 and must not be read as numbers.
struct SweepGrid {
  std::vector<double> u_axis;
  std::vector<double> k_axis;
  std::vector<double> abscissa;   // u-major: [iu * k_axis.size() + ik]
  std::vector<std::uint8_t> found;
  OutputMap c;

  double at(std::size_t iu, std::size_t ik) const { return abscissa[iu * k_axis.size() + ik]; }
  bool cell_found(std::size_t iu, std::size_t ik) const {
    return found[iu * k_axis.size() + ik] != 0;
  }
  std::size_t stable_count() const;
};

// Continuation sweep: per u_star column the operating-branch equilibrium is
// tracked by seeding Newton from the neighboring column (the equilibrium set
// does not depend on k because feedback vanishes at the fixed point); the
// spectral abscissa of A - k g c^T fills the column. Eigensolves run in
// parallel; the output is independent of the thread count.
SweepGrid stability_sweep(const SweepAxis& u_range, const SweepAxis& k_range, const OutputMap& c,
                          const EpileptorParams& p, int threads = 0);

}  // namespace epilab
