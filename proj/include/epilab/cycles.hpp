#pragma once

#include "epilab/integrate.hpp"

namespace epilab {

struct CycleOptions {
  double window = 50.0;       // moving-std window, time units
  double sample_dt = 1.0;     // uniform resampling step
  double ratio = 3.0;         // ictal threshold vs quietest-decile baseline
  double min_std = 0.05;      // absolute amplitude floor for the threshold
  double skip_initial = 0.0;  // drop an initial transient before detection
  int merge_gap = 2;          // windows; gaps up to this are bridged
  int min_windows = 2;        // shortest run counted as an episode
};

struct CycleReport {
  int n_seizures = 0;
  double mean_period = 0.0;    // mean spacing of episode onsets (0 if < 2)
  double ictal_fraction = 0.0;
};

// Ictal episodes via a moving-window std criterion on the output: a window is
// ictal when its std exceeds max(ratio * baseline, min_std), with the baseline
// taken as the mean std of the quietest decile of windows.
// Throws std::invalid_argument when the (post-skip) span is shorter than tau0.
CycleReport detect_cycles(const Trajectory& traj, const EpileptorParams& p,
                          const CycleOptions& opts = {});

}  // namespace epilab
