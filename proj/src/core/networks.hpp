#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/conditioning.hpp"
#include "core/pyramid.hpp"
#include "core/skeleton.hpp"
#include "core/tensor.hpp"

namespace mogen {

struct SkeletalConvSpec {
  int neighbor_distance = 2;
  int kernel_width = 5;        // odd
  int hidden_per_joint = 16;
  int layers_per_generator = 3;
  double leaky_slope = 0.2;

  void validate() const;
};

// neighbors(j) = all joints within tree distance d of j (including j).
std::vector<std::vector<int>> skeletal_neighbors(const Skeleton& skeleton, int distance);

// Owning joint per layout channel: rotations belong to their joint, root
// displacement to the root, each contact channel to its foot joint.
std::vector<int> layout_channel_joints(const Skeleton& skeleton, const ChannelLayout& layout);

// Hidden channels are grouped per joint, hidden_per_joint each, joint order.
std::vector<int> hidden_channel_joints(int joint_count, int hidden_per_joint);

// 0/1 weight mask of shape (kernel*c_in) x c_out allowing connections only
// between channels of joints within the neighbor distance. Empty joint
// vectors mean unmasked (dense) on that side.
Eigen::MatrixXd conv_weight_mask(const std::vector<int>& in_joints,
                                 const std::vector<int>& out_joints,
                                 const std::vector<std::vector<int>>& neighbors, int kernel);

// Temporal convolution with zero padding, expressed via im2col + matmul so
// the autodiff engine differentiates it (twice) for free.
struct ConvLayer {
  ad::Var weight;    // (kernel*c_in) x c_out
  ad::Var bias;      // 1 x c_out
  ad::Var mask;      // constant 0/1, same shape as weight
  int kernel = 5;
  int pad = 2;
  int c_in = 0;
  int c_out = 0;

  ad::Var apply(const ad::Var& x) const;
};

ConvLayer init_conv_layer(int c_in, int c_out, int kernel, int pad, Eigen::MatrixXd mask,
                          Rng& rng);

ad::Var apply_conv_stack(const std::vector<ConvLayer>& convs, const ad::Var& x,
                         double leaky_slope);

struct GeneratorLevel {
  FilmEncoder encoder;          // S_i
  std::vector<ConvLayer> convs;  // g_i*
  int level_index = 1;           // 1-based
};

struct PatchDiscriminator {
  std::vector<ConvLayer> convs;
  int receptive_field = 0;
};

struct ConditionSpec {
  ConditionSignal::Kind kind = ConditionSignal::Kind::label;
  int input_dim = 0;  // number of labels, or feature dimension
  int embed_dim = 8;  // 8 for labels, 64 for feature conditions by default
};

struct GeneratorStack {
  ScaleConfig scale;
  NoiseSchedule noise;
  SkeletalConvSpec conv_spec;
  ConditionSpec condition;
  std::shared_ptr<const Skeleton> skeleton;
  ChannelLayout layout;
  double fps = 25.0;
  std::vector<GeneratorLevel> levels;

  int level_count() const { return static_cast<int>(levels.size()); }
  int channels() const { return layout.total_channels; }
};

GeneratorLevel init_generator_level(int level_index, const Skeleton& skeleton,
                                    const ChannelLayout& layout, const SkeletalConvSpec& spec,
                                    const ConditionSpec& cond, Rng& rng);

PatchDiscriminator init_discriminator(const Skeleton& skeleton, const ChannelLayout& layout,
                                      const SkeletalConvSpec& spec, Rng& rng);

GeneratorStack init_generator_stack(const ScaleConfig& scale, const NoiseSchedule& noise,
                                    const SkeletalConvSpec& spec, const ConditionSpec& cond,
                                    std::shared_ptr<const Skeleton> skeleton,
                                    const ChannelLayout& layout, double fps,
                                    std::uint64_t seed);

// Deterministic parameter enumeration for optimizers and checkpoints.
using ParamVisitor = std::function<void(const std::string&, ad::Var&)>;
void visit_params(GeneratorLevel& level, const std::string& prefix, const ParamVisitor& fn);
void visit_params(PatchDiscriminator& disc, const std::string& prefix, const ParamVisitor& fn);

// --- forward passes (raw feature channels in, raw out) ---

// Level 1: g_1*(FiLM(z_1)); no residual skip.
ad::Var generate_coarse(const GeneratorStack& stack, const Eigen::MatrixXd& condition_input,
                        const ad::Var& z1);

// Level i >= 2: g_i*(FiLM(up(prev) + z_i)) + up(prev).
ad::Var generate_level(const GeneratorStack& stack, int level_index, const ad::Var& prev,
                       const Eigen::MatrixXd& condition_input, const ad::Var& z,
                       int target_length);

// Per-position patch scores (T x 1) and their mean.
ad::Var critic_scores(const PatchDiscriminator& disc, const ad::Var& seq);
ad::Var discriminate(const PatchDiscriminator& disc, const ad::Var& seq);

// --- full cascade ---

struct CascadeOptions {
  std::vector<int> lengths;               // per-level target lengths (size >= upto_level)
  const ConditionPyramid* condition_a = nullptr;
  const ConditionPyramid* condition_b = nullptr;  // optional
  std::vector<int> assignment;            // per level 0=a 1=b; empty = all a
  std::vector<Eigen::MatrixXd> noises;    // per level T_i x 1
  int upto_level = 0;                     // 1-based; 0 = all levels
  int detach_below_level = 1;             // levels below run without gradients
};

// Returns per-level outputs, index 0 = level 1.
std::vector<ad::Var> generate_cascade(const GeneratorStack& stack, const CascadeOptions& opt);

// --- inference entry point ---

struct GenerationRequest {
  ConditionSignal condition_a;
  ConditionSignal condition_b;   // ignored unless has_condition_b
  bool has_condition_b = false;
  int crossover = -1;            // -1: all levels use condition_a
  int coarse_length = 0;         // T_1; used when lengths empty
  std::vector<int> lengths;      // explicit per-level lengths (optional)
  std::uint64_t seed = 0;
  bool squash_contacts = true;   // logistic-map contact channels on export
  bool collect_levels = false;
};

struct GenerationResult {
  MotionSequence motion;                    // finest level
  std::vector<Eigen::MatrixXd> level_frames;  // raw per-level outputs if requested
  std::vector<int> lengths;
};

GenerationResult generate(const GeneratorStack& stack, const GenerationRequest& request);

// Logistic squash applied to contact columns only.
Eigen::MatrixXd squash_contact_channels(const Eigen::MatrixXd& frames, const ChannelLayout& layout);

}  // namespace mogen
