#include "epilab/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epilab {

namespace {

// Linear interpolation of the recorded outputs onto a uniform grid.
std::vector<double> resample_output(const Trajectory& traj, double t_begin, double dt) {
  std::vector<double> y;
  const double t_end = traj.times.back();
  std::size_t k = 0;
  for (double t = t_begin; t <= t_end; t += dt) {
    while (k + 1 < traj.times.size() && traj.times[k + 1] < t) ++k;
    if (k + 1 >= traj.times.size()) {
      y.push_back(traj.outputs.back());
      break;
    }
    const double t0 = traj.times[k], t1 = traj.times[k + 1];
    const double w = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
    y.push_back((1.0 - w) * traj.outputs[k] + w * traj.outputs[k + 1]);
  }
  return y;
}

}  // namespace

CycleReport detect_cycles(const Trajectory& traj, const EpileptorParams& p,
                          const CycleOptions& opts) {
  if (traj.size() < 2) throw std::invalid_argument("detect_cycles: empty trajectory");
  const double t_begin = traj.times.front() + opts.skip_initial;
  if (traj.times.back() - t_begin < p.tau0)
    throw std::invalid_argument("detect_cycles: trajectory shorter than one ultraslow period");

  const std::vector<double> y = resample_output(traj, t_begin, opts.sample_dt);
  const int wlen = std::max(2, static_cast<int>(std::lround(opts.window / opts.sample_dt)));
  const int n_win = static_cast<int>(y.size()) / wlen;
  if (n_win < 2) throw std::invalid_argument("detect_cycles: too few windows");

  std::vector<double> stds(n_win);
  for (int w = 0; w < n_win; ++w) {
    const auto first = y.begin() + static_cast<std::ptrdiff_t>(w) * wlen;
    const double mean = std::accumulate(first, first + wlen, 0.0) / wlen;
    double acc = 0;
    for (int i = 0; i < wlen; ++i) acc += (first[i] - mean) * (first[i] - mean);
    stds[w] = std::sqrt(acc / wlen);
  }

  std::vector<double> sorted = stds;
  std::sort(sorted.begin(), sorted.end());
  const int decile = std::max(1, n_win / 10);
  const double baseline = std::accumulate(sorted.begin(), sorted.begin() + decile, 0.0) / decile;
  const double threshold = std::max(opts.ratio * baseline, opts.min_std);

  std::vector<bool> ictal(n_win);
  int n_ictal = 0;
  for (int w = 0; w < n_win; ++w) {
    ictal[w] = stds[w] > threshold;
    n_ictal += ictal[w];
  }

  // Episodes: runs of ictal windows, bridging gaps up to merge_gap windows.
  CycleReport rep;
  rep.ictal_fraction = static_cast<double>(n_ictal) / n_win;
  std::vector<int> onsets;
  int w = 0;
  while (w < n_win) {
    if (!ictal[w]) {
      ++w;
      continue;
    }
    const int start = w;
    int end = w, gap = 0, j = w;
    while (j < n_win) {
      if (ictal[j]) {
        end = j;
        gap = 0;
      } else if (++gap > opts.merge_gap) {
        break;
      }
      ++j;
    }
    if (end - start + 1 >= opts.min_windows) onsets.push_back(start);
    w = j;
  }
  rep.n_seizures = static_cast<int>(onsets.size());
  if (onsets.size() >= 2) {
    double acc = 0;
    for (std::size_t i = 1; i < onsets.size(); ++i) acc += onsets[i] - onsets[i - 1];
    rep.mean_period = acc / (onsets.size() - 1) * wlen * opts.sample_dt;
  }
  return rep;
}

}  // namespace epilab
