#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "proboost/prng.hpp"
#include "proboost/tensor.hpp"

namespace proboost {

enum class LayerKind {
    conv2d,
    maxpool2d,
    dense,
    flatten,
    relu,
    softmax,
    dropout,
    flipout_dense,
};

const char* layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

/// Declarative description of one layer; carries only the kind-specific
/// hyperparameters, not the materialized tensors.
struct LayerSpec {
    LayerKind kind{};
    std::size_t out_channels = 0;  // conv2d
    std::size_t kernel_size = 0;   // conv2d
    std::size_t stride = 1;        // conv2d
    std::size_t pool_size = 2;     // maxpool2d (pool and stride)
    std::size_t units = 0;         // dense / flipout_dense
    double rate = 0.0;             // dropout, must be in [0, 1)
    double prior_std = 1.0;        // flipout_dense
};

void validate_layer_spec(const LayerSpec& spec,
                         const std::vector<std::size_t>& input_shape);

/// Gaussian weight posterior: std = softplus(rho), elementwise.
struct GaussianPosterior {
    Tensor mu;
    Tensor rho;
    double prior_std = 1.0;
};

double softplus(double x);
double softplus_inverse(double y);

/// ΔŴ ∘ (a bᵀ): the rank-one sign perturbation of a single sample. a indexes
/// rows of delta_hat, b its columns; entries outside {-1, +1} raise
/// InvalidParameter.
Tensor flipout_perturb(const Tensor& delta_hat, const std::vector<double>& a,
                       const std::vector<double>& b);

/// A network layer with manual backprop. forward() caches whatever backward()
/// needs, so a layer instance is single-owner during training; clone the
/// learner for concurrent prediction.
class Layer {
public:
    virtual ~Layer() = default;

    virtual LayerKind kind() const = 0;
    virtual LayerSpec spec() const = 0;

    /// Per-sample output shape for a per-sample input shape.
    virtual std::vector<std::size_t> output_shape(
        const std::vector<std::size_t>& input_shape) const = 0;

    /// x carries the batch dimension first. Stochastic layers draw from rng
    /// in a fixed documented order; rng may be null when stochastic is false.
    virtual Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng) = 0;

    /// Gradient of the loss w.r.t. this layer's input; accumulates parameter
    /// gradients from the most recent forward().
    virtual Tensor backward(const Tensor& grad_output) = 0;

    virtual std::vector<Tensor*> parameters() { return {}; }
    virtual std::vector<Tensor*> gradients() { return {}; }
    void zero_grad();

    virtual std::unique_ptr<Layer> clone() const = 0;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec,
                                  const std::vector<std::size_t>& input_shape,
                                  PrngStream& init_stream);

class DenseLayer : public Layer {
public:
    DenseLayer(std::size_t in_features, std::size_t out_features,
               PrngStream& init_stream);

    LayerKind kind() const override { return LayerKind::dense; }
    LayerSpec spec() const override;
    std::vector<std::size_t> output_shape(
        const std::vector<std::size_t>& input_shape) const override;
    Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng) override;
    Tensor backward(const Tensor& grad_output) override;
    std::vector<Tensor*> parameters() override { return {&weight_, &bias_}; }
    std::vector<Tensor*> gradients() override { return {&grad_weight_, &grad_bias_}; }
    std::unique_ptr<Layer> clone() const override;

    Tensor& weight() { return weight_; }
    Tensor& bias() { return bias_; }

private:
    std::size_t in_ = 0, out_ = 0;
    Tensor weight_;  // [in, out]
    Tensor bias_;    // [out]
    Tensor grad_weight_, grad_bias_;
    Tensor cached_input_;
};

/// Variational dense layer trained with the flipout estimator: a shared base
/// perturbation ΔŴ = softplus(rho) ∘ E plus per-sample rank-one sign flips.
/// The bias is sampled once per stochastic forward (no flipout on vectors).
class FlipoutDenseLayer : public Layer {
public:
    FlipoutDenseLayer(std::size_t in_features, std::size_t out_features,
                      double prior_std, double initial_posterior_std,
                      PrngStream& init_stream);

    LayerKind kind() const override { return LayerKind::flipout_dense; }
    LayerSpec spec() const override;
    std::vector<std::size_t> output_shape(
        const std::vector<std::size_t>& input_shape) const override;

    /// Stochastic draw order: weight noise E (in*out), bias noise (out), then
    /// per-sample input signs B (n*in) and output signs A (n*out).
    Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng) override;
    Tensor backward(const Tensor& grad_output) override;
    std::vector<Tensor*> parameters() override;
    std::vector<Tensor*> gradients() override;
    std::unique_ptr<Layer> clone() const override;

    /// Sampled KL contribution log q(W|θ) - log P(W) at the base draw of the
    /// most recent stochastic forward; accumulates grad_scale times its
    /// gradient into the parameter gradients. Requires a stochastic forward.
    double sampled_kl_and_grad(double grad_scale);

    GaussianPosterior& weight_posterior() { return w_post_; }
    GaussianPosterior& bias_posterior() { return b_post_; }

private:
    std::size_t in_ = 0, out_ = 0;
    GaussianPosterior w_post_;  // mu/rho [in, out]
    GaussianPosterior b_post_;  // mu/rho [out]
    Tensor grad_w_mu_, grad_w_rho_, grad_b_mu_, grad_b_rho_;

    // caches from the last forward
    Tensor cached_input_;
    Tensor noise_w_;       // E, [in, out]
    Tensor noise_b_;       // [out]
    Tensor signs_in_;      // B, [n, in]
    Tensor signs_out_;     // A, [n, out]
    Tensor delta_hat_;     // softplus(rho) ∘ E
    bool last_stochastic_ = false;
};

class Conv2dLayer : public Layer {
public:
    /// Zero 'same' padding: stride-1 output keeps the spatial size.
    Conv2dLayer(std::size_t in_channels, std::size_t out_channels,
                std::size_t kernel_size, std::size_t stride, PrngStream& init_stream);

    LayerKind kind() const override { return LayerKind::conv2d; }
    LayerSpec spec() const override;
    std::vector<std::size_t> output_shape(
        const std::vector<std::size_t>& input_shape) const override;
    Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng) override;
    Tensor backward(const Tensor& grad_output) override;
    std::vector<Tensor*> parameters() override { return {&weight_, &bias_}; }
    std::vector<Tensor*> gradients() override { return {&grad_weight_, &grad_bias_}; }
    std::unique_ptr<Layer> clone() const override;

private:
    std::size_t in_c_ = 0, out_c_ = 0, k_ = 0, stride_ = 1;
    Tensor weight_;  // [out_c, in_c, k, k]
    Tensor bias_;    // [out_c]
    Tensor grad_weight_, grad_bias_;
    Tensor cached_input_;
};

class MaxPool2dLayer : public Layer {
public:
    explicit MaxPool2dLayer(std::size_t pool_size);

    LayerKind kind() const override { return LayerKind::maxpool2d; }
    LayerSpec spec() const override;
    std::vector<std::size_t> output_shape(
        const std::vector<std::size_t>& input_shape) const override;
    Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng) override;
    Tensor backward(const Tensor& grad_output) override;
    std::unique_ptr<Layer> clone() const override;

private:
    std::size_t pool_ = 2;
    std::vector<std::size_t> cached_input_shape_;
    std::vector<std::size_t> argmax_;  // flat input index per output element
};

class FlattenLayer : public Layer {
public:
    LayerKind kind() const override { return LayerKind::flatten; }
    LayerSpec spec() const override { return {.kind = LayerKind::flatten}; }
    std::vector<std::size_t> output_shape(
        const std::vector<std::size_t>& input_shape) const override;
    Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng) override;
    Tensor backward(const Tensor& grad_output) override;
    std::unique_ptr<Layer> clone() const override;

private:
    std::vector<std::size_t> cached_input_shape_;
};

class ReluLayer : public Layer {
public:
    LayerKind kind() const override { return LayerKind::relu; }
    LayerSpec spec() const override { return {.kind = LayerKind::relu}; }
    std::vector<std::size_t> output_shape(
        const std::vector<std::size_t>& input_shape) const override {
        return input_shape;
    }
    Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng) override;
    Tensor backward(const Tensor& grad_output) override;
    std::unique_ptr<Layer> clone() const override;

private:
    Tensor cached_input_;
};

class SoftmaxLayer : public Layer {
public:
    LayerKind kind() const override { return LayerKind::softmax; }
    LayerSpec spec() const override { return {.kind = LayerKind::softmax}; }
    std::vector<std::size_t> output_shape(
        const std::vector<std::size_t>& input_shape) const override {
        return input_shape;
    }
    Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng) override;
    Tensor backward(const Tensor& grad_output) override;
    std::unique_ptr<Layer> clone() const override;

private:
    Tensor cached_output_;
};

/// Inverted dropout: kept units scale by 1/(1-p) so the deterministic forward
/// needs no rescaling. Deterministic mode is the identity.
class DropoutLayer : public Layer {
public:
    explicit DropoutLayer(double rate);

    LayerKind kind() const override { return LayerKind::dropout; }
    LayerSpec spec() const override;
    std::vector<std::size_t> output_shape(
        const std::vector<std::size_t>& input_shape) const override {
        return input_shape;
    }
    Tensor forward(const Tensor& x, bool stochastic, PrngStream* rng) override;
    Tensor backward(const Tensor& grad_output) override;
    std::unique_ptr<Layer> clone() const override;

private:
    double rate_ = 0.0;
    Tensor mask_;  // empty when the last forward was the identity
};

}  // namespace proboost
