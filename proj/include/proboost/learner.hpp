#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "proboost/layers.hpp"
#include "proboost/prng.hpp"
#include "proboost/tensor.hpp"

namespace proboost {

enum class LearnerMode { deterministic, mcd, vi };

const char* learner_mode_name(LearnerMode mode);
LearnerMode learner_mode_from_name(const std::string& name);

/// A probabilistic weak learner: an ordered layer stack ending in softmax.
/// Forward with stochastic=false uses posterior means and no dropout masks and
/// is a pure function of the input. A learner is single-owner while training;
/// clone it for concurrent prediction.
class WeakLearner {
public:
    WeakLearner() = default;
    WeakLearner(LearnerMode mode, std::vector<std::size_t> input_shape,
                std::size_t n_classes, std::vector<std::unique_ptr<Layer>> layers);

    WeakLearner(const WeakLearner& other);
    WeakLearner& operator=(const WeakLearner& other);
    WeakLearner(WeakLearner&&) noexcept = default;
    WeakLearner& operator=(WeakLearner&&) noexcept = default;

    LearnerMode mode() const { return mode_; }
    const std::vector<std::size_t>& input_shape() const { return input_shape_; }
    std::size_t n_classes() const { return n_classes_; }
    std::vector<std::unique_ptr<Layer>>& layers() { return layers_; }
    const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

    /// Class-probability matrix [batch, K]; rows sum to 1 within 1e-9.
    /// Mismatched sample dims raise ShapeError.
    Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng = nullptr);

    /// Backprop a gradient w.r.t. the output probabilities; parameter
    /// gradients accumulate inside the layers.
    void backward(const Tensor& grad_probs);

    std::vector<Tensor*> parameters();
    std::vector<Tensor*> gradients();
    void zero_grad();

    /// Deep copies of all parameter tensors, for best-epoch restore.
    std::vector<Tensor> snapshot_parameters() const;
    void restore_parameters(const std::vector<Tensor>& snapshot);

    std::size_t parameter_count() const;

private:
    LearnerMode mode_ = LearnerMode::deterministic;
    std::vector<std::size_t> input_shape_;  // per-sample shape
    std::size_t n_classes_ = 0;
    std::vector<std::unique_ptr<Layer>> layers_;
};

/// LeNet-5 variant: conv(6,5,s1,same)+relu, maxpool2, conv(16,5)+relu,
/// maxpool2, conv(120,5)+relu, flatten, dense(84)+relu, dense(K)+softmax.
/// mcd mode inserts dropout after every weighted layer except the last. vi
/// mode raises UnsupportedConfiguration (variational kernels are dense-only).
/// Spatially too-small inputs (third conv would see less than its kernel)
/// raise ShapeError.
WeakLearner build_lenet_variant(const std::vector<std::size_t>& input_dims,
                                std::size_t n_classes, LearnerMode mode,
                                PrngStream& init_stream, double dropout_rate = 0.3);

/// Dense stack ending in a softmax head. vi mode swaps every dense layer for
/// flipout_dense; mcd mode wraps hidden activations with dropout.
WeakLearner build_dense_stack(std::size_t input_len,
                              const std::vector<std::size_t>& hidden_sizes,
                              std::size_t n_classes, LearnerMode mode,
                              PrngStream& init_stream, double dropout_rate = 0.3,
                              double prior_std = 1.0);

}  // namespace proboost
