#include "core/conditioning.hpp"

#include <cmath>

#include "core/resample.hpp"

namespace mogen {

ConditionSignal ConditionSignal::make_label(int index, int n_conditions) {
  require(n_conditions >= 1, "condition: need at least one label class");
  require(index >= 0 && index < n_conditions, "condition: label index out of range");
  ConditionSignal s;
  s.kind = Kind::label;
  s.label = Eigen::RowVectorXd::Zero(n_conditions);
  s.label(index) = 1.0;
  return s;
}

ConditionSignal ConditionSignal::make_features(Eigen::MatrixXd features, double rate) {
  require(features.rows() >= 1 && features.cols() >= 1, "condition: empty feature matrix");
  require(rate > 0.0, "condition: feature rate must be positive");
  ConditionSignal s;
  s.kind = Kind::features;
  s.features = std::move(features);
  s.feature_rate = rate;
  s.validate();
  return s;
}

int ConditionSignal::dimension() const {
  return kind == Kind::label ? static_cast<int>(label.cols())
                             : static_cast<int>(features.cols());
}

void ConditionSignal::validate() const {
  if (kind == Kind::label) {
    require(label.cols() >= 1, "condition: empty label");
    int ones = 0;
    for (Eigen::Index i = 0; i < label.cols(); ++i) {
      require(label(i) == 0.0 || label(i) == 1.0, "condition: label must be one-hot");
      if (label(i) == 1.0) ++ones;
    }
    require(ones == 1, "condition: label must have exactly one active entry");
  } else {
    require(features.allFinite(), "condition: non-finite feature values");
    require(feature_rate > 0.0, "condition: feature rate must be positive");
  }
}

std::vector<Eigen::MatrixXd> build_feature_pyramid(const Eigen::MatrixXd& features,
                                                   double source_rate, double motion_fps,
                                                   const std::vector<int>& level_lengths) {
  require(features.rows() >= 1 && features.cols() >= 1, "feature pyramid: empty features");
  require(source_rate >= motion_fps, "feature pyramid: source rate below motion rate");
  require(!level_lengths.empty(), "feature pyramid: no level lengths");
  const int t_final = level_lengths.back();
  Eigen::MatrixXd at_motion_rate = resample_rows(features, t_final);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(level_lengths.size());
  for (int t_i : level_lengths) out.push_back(resample_rows(at_motion_rate, t_i));
  return out;
}

std::vector<Eigen::MatrixXd> residualize(const std::vector<Eigen::MatrixXd>& levels) {
  require(!levels.empty(), "residualize: empty level list");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(levels.size());
  out.push_back(levels.front());
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const int t_i = static_cast<int>(levels[i].rows());
    out.push_back(resample_rows(levels[i - 1], t_i) - levels[i]);
  }
  return out;
}

std::vector<Eigen::MatrixXd> reconstruct_feature_pyramid(
    const std::vector<Eigen::MatrixXd>& residuals) {
  require(!residuals.empty(), "reconstruct: empty residual list");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(residuals.size());
  out.push_back(residuals.front());
  for (std::size_t i = 1; i < residuals.size(); ++i) {
    const int t_i = static_cast<int>(residuals[i].rows());
    out.push_back(resample_rows(out[i - 1], t_i) - residuals[i]);
  }
  return out;
}

ConditionPyramid build_condition_pyramid(const ConditionSignal& signal, double motion_fps,
                                         const std::vector<int>& level_lengths) {
  signal.validate();
  ConditionPyramid pyr;
  pyr.kind = signal.kind;
  if (signal.kind == ConditionSignal::Kind::label) {
    pyr.per_level.assign(level_lengths.size(), signal.label);
  } else {
    pyr.per_level = residualize(build_feature_pyramid(signal.features, signal.feature_rate,
                                                      motion_fps, level_lengths));
  }
  return pyr;
}

MixingSchedule make_mixing_schedule(const ConditionSignal& a, const ConditionSignal& b,
                                    int crossover, int levels) {
  require(levels >= 1, "mixing: level count must be >= 1");
  require(crossover >= 0 && crossover <= levels, "mixing: crossover out of range");
  require(a.kind == b.kind, "mixing: conditions must share a kind");
  MixingSchedule m;
  m.condition_a = a;
  m.condition_b = b;
  m.crossover = crossover;
  m.levels = levels;
  m.assignment.resize(levels);
  for (int i = 0; i < levels; ++i) m.assignment[i] = (i < crossover) ? 0 : 1;
  return m;
}

FilmEncoder FilmEncoder::init(int input_dim, int embed_dim, int channels, Rng& rng) {
  require(input_dim >= 1 && embed_dim >= 1 && channels >= 1, "film: invalid encoder sizes");
  FilmEncoder enc;
  enc.input_dim = input_dim;
  enc.embed_dim = embed_dim;
  enc.channels = channels;
  const double bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
  Eigen::MatrixXd w(input_dim, embed_dim);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
  enc.embed_w = ad::Var::leaf(std::move(w), true);
  enc.embed_b = ad::Var::leaf(Eigen::MatrixXd::Zero(1, embed_dim), true);
  // Zero-initialized heads: gamma = 1, delta = 0 until trained.
  enc.f_w = ad::Var::leaf(Eigen::MatrixXd::Zero(embed_dim, channels), true);
  enc.f_b = ad::Var::leaf(Eigen::MatrixXd::Zero(1, channels), true);
  enc.h_w = ad::Var::leaf(Eigen::MatrixXd::Zero(embed_dim, channels), true);
  enc.h_b = ad::Var::leaf(Eigen::MatrixXd::Zero(1, channels), true);
  return enc;
}

ad::Var embed_condition(const FilmEncoder& enc, const ad::Var& s) {
  require(static_cast<int>(s.cols()) == enc.input_dim,
          "film: condition width does not match encoder input");
  return ad::add_rowvec(ad::matmul(s, enc.embed_w), enc.embed_b);
}

FilmParams film_params(const FilmEncoder& enc, const ad::Var& y) {
  FilmParams p;
  p.gamma = ad::scalar_add(ad::add_rowvec(ad::matmul(y, enc.f_w), enc.f_b), 1.0);
  p.delta = ad::add_rowvec(ad::matmul(y, enc.h_w), enc.h_b);
  return p;
}

ad::Var film_modulate(const ad::Var& upsampled, const ad::Var& noise_track,
                      const FilmParams& params) {
  require(noise_track.cols() == 1 && noise_track.rows() == upsampled.rows(),
          "film: noise track must be Tx1 matching the feature map");
  ad::Var noisy = ad::add_colvec(upsampled, noise_track);
  require(params.gamma.cols() == upsampled.cols() && params.delta.cols() == upsampled.cols(),
          "film: parameter width does not match the feature map");
  if (params.gamma.rows() == 1) {
    return ad::add_rowvec(ad::mul_rowvec(noisy, params.gamma), params.delta);
  }
  require(params.gamma.rows() == upsampled.rows(),
          "film: per-frame parameters must match the feature map length");
  return ad::add(ad::mul(noisy, params.gamma), params.delta);
}

}  // namespace mogen
