#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "core/skeleton.hpp"

namespace mogen {

struct ScaleConfig {
  int factor_num = 4;          // F = factor_num / factor_den, > 1
  int factor_den = 3;
  int levels = 8;              // L
  int min_coarse_length = 8;   // minimum frames at level 1

  double factor() const { return static_cast<double>(factor_num) / factor_den; }
  void validate() const;
};

// Level 0 in storage = level 1 in the cascade (coarsest); back = finest.
struct TemporalPyramid {
  std::vector<MotionSequence> levels;

  int level_count() const { return static_cast<int>(levels.size()); }
  std::vector<int> lengths() const;
};

struct NoiseSchedule {
  std::vector<double> sigmas;  // per level, index 0 = coarsest
};

// Analysis lengths, derived backward from the source length:
// T_i = round(T / F^(L-i)), round half away from zero.
std::vector<int> pyramid_lengths(int source_length, const ScaleConfig& cfg);

// Synthesis lengths, derived forward from the coarse length:
// T_i = round(T_1 * F^(i-1)).
std::vector<int> synthesis_lengths(int coarse_length, const ScaleConfig& cfg);

// Linear resampling; endpoint-exact, fps scaled proportionally.
MotionSequence upsample_linear(const MotionSequence& seq, int target_length);
MotionSequence downsample(const MotionSequence& seq, int target_length);

TemporalPyramid build_pyramid(const MotionSequence& seq, const ScaleConfig& cfg);

// sigma_1 = 1 (the coarsest level is pure noise-driven); for i >= 2 the
// mean over sequences of RMSE between the upsampled level i-1 and level i.
NoiseSchedule compute_noise_schedule(const std::vector<TemporalPyramid>& pyramids);

// Per-frame scalar noise track (T x 1), Normal(0, sigma^2), deterministic
// for a given seed.
Eigen::MatrixXd sample_noise(int length, double sigma, std::uint64_t seed);

}  // namespace mogen
