#include "core/pyramid.hpp"

#include <cmath>

#include "core/resample.hpp"
#include "core/rng.hpp"

namespace mogen {

void ScaleConfig::validate() const {
  require(factor_num > 0 && factor_den > 0, "scale: factor must be positive");
  require(factor_num > factor_den, "scale: upscale factor must be > 1");
  require(levels >= 2, "scale: at least two levels required");
  require(min_coarse_length >= 1, "scale: min_coarse_length must be >= 1");
}

std::vector<int> TemporalPyramid::lengths() const {
  std::vector<int> out;
  out.reserve(levels.size());
  for (const auto& l : levels) out.push_back(l.length());
  return out;
}

namespace {
int round_half_away(double x) {
  return static_cast<int>(std::llround(x));
}
}  // namespace

std::vector<int> pyramid_lengths(int source_length, const ScaleConfig& cfg) {
  cfg.validate();
  require(source_length >= 1, "pyramid: source length must be >= 1");
  std::vector<int> lengths(cfg.levels);
  for (int i = 0; i < cfg.levels; ++i) {
    const int k = cfg.levels - 1 - i;  // levels above i
    lengths[i] = round_half_away(source_length / std::pow(cfg.factor(), k));
  }
  lengths[cfg.levels - 1] = source_length;
  return lengths;
}

std::vector<int> synthesis_lengths(int coarse_length, const ScaleConfig& cfg) {
  cfg.validate();
  require(coarse_length >= 1, "synthesis: coarse length must be >= 1");
  std::vector<int> lengths(cfg.levels);
  for (int i = 0; i < cfg.levels; ++i)
    lengths[i] = round_half_away(coarse_length * std::pow(cfg.factor(), i));
  lengths[0] = coarse_length;
  return lengths;
}

namespace {
MotionSequence resample_sequence(const MotionSequence& seq, int target_length) {
  MotionSequence out = seq;
  out.frames = resample_rows(seq.frames, target_length);
  out.fps = seq.fps * static_cast<double>(target_length) / static_cast<double>(seq.length());
  return out;
}
}  // namespace

MotionSequence upsample_linear(const MotionSequence& seq, int target_length) {
  require(target_length >= seq.length(), "upsample: target length is shorter than input");
  return resample_sequence(seq, target_length);
}

MotionSequence downsample(const MotionSequence& seq, int target_length) {
  require(target_length >= 1 && target_length <= seq.length(),
          "downsample: target length out of range");
  return resample_sequence(seq, target_length);
}

TemporalPyramid build_pyramid(const MotionSequence& seq, const ScaleConfig& cfg) {
  std::vector<int> lengths = pyramid_lengths(seq.length(), cfg);
  if (lengths.front() < cfg.min_coarse_length)
    throw ValidationError("pyramid: level 1 would have " + std::to_string(lengths.front()) +
                          " frames, below the minimum of " +
                          std::to_string(cfg.min_coarse_length));
  for (int i = 1; i < cfg.levels; ++i) {
    if (lengths[i - 1] >= lengths[i])
      throw ValidationError("pyramid: lengths are not strictly increasing at level " +
                            std::to_string(i + 1) + " (" + std::to_string(lengths[i - 1]) +
                            " -> " + std::to_string(lengths[i]) + ")");
  }
  TemporalPyramid pyr;
  pyr.levels.reserve(cfg.levels);
  for (int i = 0; i < cfg.levels - 1; ++i) pyr.levels.push_back(downsample(seq, lengths[i]));
  pyr.levels.push_back(seq);  // finest level is the untouched source
  return pyr;
}

NoiseSchedule compute_noise_schedule(const std::vector<TemporalPyramid>& pyramids) {
  require(!pyramids.empty(), "noise schedule: no pyramids given");
  const int levels = pyramids.front().level_count();
  for (const auto& p : pyramids)
    require(p.level_count() == levels, "noise schedule: pyramids have differing level counts");

  NoiseSchedule schedule;
  schedule.sigmas.assign(levels, 0.0);
  schedule.sigmas[0] = 1.0;  // level 1 is driven by unit noise alone
  for (int i = 1; i < levels; ++i) {
    double total = 0.0;
    for (const auto& p : pyramids) {
      const MotionSequence& fine = p.levels[i];
      Eigen::MatrixXd up = resample_rows(p.levels[i - 1].frames, fine.length());
      double mse = (up - fine.frames).squaredNorm() /
                   static_cast<double>(fine.frames.size());
      total += std::sqrt(mse);
    }
    schedule.sigmas[i] = total / static_cast<double>(pyramids.size());
  }
  return schedule;
}

Eigen::MatrixXd sample_noise(int length, double sigma, std::uint64_t seed) {
  require(length >= 1, "sample_noise: length must be >= 1");
  require(sigma >= 0.0, "sample_noise: sigma must be non-negative");
  Eigen::MatrixXd z(length, 1);
  if (sigma == 0.0) {
    z.setZero();
    return z;
  }
  Rng rng(seed);
  for (int t = 0; t < length; ++t) z(t, 0) = sigma * rng.normal();
  return z;
}

}  // namespace mogen
