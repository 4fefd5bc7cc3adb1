#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/pyramid.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace mogen {

// A control signal: either a one-hot label or a per-frame feature sequence
// at its source rate.
struct ConditionSignal {
  enum class Kind { label, features };
  Kind kind = Kind::label;
  Eigen::RowVectorXd label;     // one-hot (label kind)
  Eigen::MatrixXd features;     // T_s x D_s (feature kind)
  double feature_rate = 0.0;    // Hz

  static ConditionSignal make_label(int index, int n_conditions);
  static ConditionSignal make_features(Eigen::MatrixXd features, double rate);
  int dimension() const;  // encoder input width
  void validate() const;
};

// Per-level condition inputs: identical one-hot rows for labels,
// residualized feature matrices matching each level's length for features.
struct ConditionPyramid {
  ConditionSignal::Kind kind = ConditionSignal::Kind::label;
  std::vector<Eigen::MatrixXd> per_level;  // labels: 1xN; features: T_i x D_s
};

// Initial (non-residual) per-level features: resampled to T_L rows at the
// motion rate, then to each level's length.
std::vector<Eigen::MatrixXd> build_feature_pyramid(const Eigen::MatrixXd& features,
                                                   double source_rate, double motion_fps,
                                                   const std::vector<int>& level_lengths);

// s_1 = s~_1; s_i = upsample(s~_{i-1}, T_i) - s~_i for i > 1.
std::vector<Eigen::MatrixXd> residualize(const std::vector<Eigen::MatrixXd>& levels);

// Inverse of residualize via the recurrence s~_i = upsample(s~_{i-1}) - s_i;
// used by tests to check the telescoping identity.
std::vector<Eigen::MatrixXd> reconstruct_feature_pyramid(const std::vector<Eigen::MatrixXd>& residuals);

ConditionPyramid build_condition_pyramid(const ConditionSignal& signal, double motion_fps,
                                         const std::vector<int>& level_lengths);

// Piecewise-constant condition assignment: levels [1, crossover] take
// condition a, levels [crossover+1, L] take condition b.
struct MixingSchedule {
  ConditionSignal condition_a;
  ConditionSignal condition_b;
  int crossover = 0;
  int levels = 0;
  std::vector<int> assignment;  // per level: 0 = a, 1 = b

  bool uses_b(int level_index0) const { return assignment[level_index0] == 1; }
};

MixingSchedule make_mixing_schedule(const ConditionSignal& a, const ConditionSignal& b,
                                    int crossover, int levels);

// --- FiLM ---

// Per-level condition encoder S_i: an affine embedding to y_i plus separate
// affine heads f, h for scale and shift. gamma is parameterized as 1 + f(y)
// with f, h zero-initialized, so a fresh encoder modulates identically.
struct FilmEncoder {
  ad::Var embed_w, embed_b;  // input_dim x embed_dim, 1 x embed_dim
  ad::Var f_w, f_b;          // embed_dim x channels, 1 x channels
  ad::Var h_w, h_b;
  int input_dim = 0;
  int embed_dim = 0;
  int channels = 0;

  static FilmEncoder init(int input_dim, int embed_dim, int channels, Rng& rng);
};

struct FilmParams {
  ad::Var gamma;  // 1 x D (label) or T x D (features)
  ad::Var delta;
};

ad::Var embed_condition(const FilmEncoder& enc, const ad::Var& s);
FilmParams film_params(const FilmEncoder& enc, const ad::Var& y);

// gamma * (upsampled + z) + delta, with the Tx1 noise track broadcast
// across channels.
ad::Var film_modulate(const ad::Var& upsampled, const ad::Var& noise_track,
                      const FilmParams& params);

}  // namespace mogen
