#include "proboost/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "proboost/errors.hpp"

namespace proboost {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::conv2d: return "conv2d";
        case LayerKind::maxpool2d: return "maxpool2d";
        case LayerKind::dense: return "dense";
        case LayerKind::flatten: return "flatten";
        case LayerKind::relu: return "relu";
        case LayerKind::softmax: return "softmax";
        case LayerKind::dropout: return "dropout";
        case LayerKind::flipout_dense: return "flipout_dense";
    }
    return "unknown";
}

LayerKind layer_kind_from_name(const std::string& name) {
    for (LayerKind kind : {LayerKind::conv2d, LayerKind::maxpool2d, LayerKind::dense,
                           LayerKind::flatten, LayerKind::relu, LayerKind::softmax,
                           LayerKind::dropout, LayerKind::flipout_dense}) {
        if (name == layer_kind_name(kind)) return kind;
    }
    throw InvalidParameter("unknown layer kind: " + name);
}

void validate_layer_spec(const LayerSpec& spec,
                         const std::vector<std::size_t>& input_shape) {
    switch (spec.kind) {
        case LayerKind::conv2d:
            if (spec.out_channels == 0 || spec.kernel_size == 0 || spec.stride == 0) {
                throw InvalidParameter("conv2d: channels, kernel, stride must be >= 1");
            }
            if (input_shape.size() != 3) {
                throw ShapeError("conv2d: input must be [C, H, W]");
            }
            break;
        case LayerKind::maxpool2d:
            if (spec.pool_size == 0) throw InvalidParameter("maxpool2d: pool size >= 1");
            if (input_shape.size() != 3) {
                throw ShapeError("maxpool2d: input must be [C, H, W]");
            }
            break;
        case LayerKind::dense:
        case LayerKind::flipout_dense:
            if (spec.units == 0) throw InvalidParameter("dense: units must be >= 1");
            if (input_shape.size() != 1) {
                throw ShapeError("dense: input must be flat");
            }
            break;
        case LayerKind::dropout:
            if (spec.rate < 0.0 || spec.rate >= 1.0) {
                throw InvalidParameter("dropout: rate must be in [0, 1)");
            }
            break;
        default:
            break;
    }
}

double softplus(double x) {
    // log1p(exp(x)) with overflow guard
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
    if (y <= 0.0) throw InvalidParameter("softplus_inverse: argument must be > 0");
    if (y > 30.0) return y;
    return std::log(std::expm1(y));
}

Tensor flipout_perturb(const Tensor& delta_hat, const std::vector<double>& a,
                       const std::vector<double>& b) {
    if (delta_hat.rank() != 2) throw ShapeError("flipout_perturb: delta_hat must be rank 2");
    if (a.size() != delta_hat.dim(0) || b.size() != delta_hat.dim(1)) {
        throw ShapeError("flipout_perturb: sign vector lengths must match delta_hat dims");
    }
    for (double v : a) {
        if (v != 1.0 && v != -1.0) {
            throw InvalidParameter("flipout_perturb: sign entries must be -1 or +1");
        }
    }
    for (double v : b) {
        if (v != 1.0 && v != -1.0) {
            throw InvalidParameter("flipout_perturb: sign entries must be -1 or +1");
        }
    }
    Tensor out({delta_hat.dim(0), delta_hat.dim(1)});
    for (std::size_t i = 0; i < delta_hat.dim(0); ++i) {
        for (std::size_t j = 0; j < delta_hat.dim(1); ++j) {
            out.at(i, j) = delta_hat.at(i, j) * a[i] * b[j];
        }
    }
    return out;
}

void Layer::zero_grad() {
    for (Tensor* g : gradients()) g->fill(0.0);
}

namespace {

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void glorot_fill(Tensor& t, std::size_t fan_in, std::size_t fan_out,
                 PrngStream& stream) {
    const double limit = glorot_limit(fan_in, fan_out);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = limit * (2.0 * stream.next_uniform() - 1.0);
    }
}

void check_batch_input(const Tensor& x, std::size_t expected_trailing,
                       const char* who) {
    if (x.rank() < 2 || x.size() / x.dim(0) != expected_trailing) {
        throw ShapeError(std::string(who) + ": input sample size mismatch");
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

// ---------------------------------------------------------------------------
// DenseLayer

DenseLayer::DenseLayer(std::size_t in_features, std::size_t out_features,
                       PrngStream& init_stream)
    : in_(in_features), out_(out_features), weight_({in_features, out_features}),
      bias_({out_features}), grad_weight_({in_features, out_features}),
      grad_bias_({out_features}) {
    glorot_fill(weight_, in_, out_, init_stream);
}

LayerSpec DenseLayer::spec() const {
    return {.kind = LayerKind::dense, .units = out_};
}

std::vector<std::size_t> DenseLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
    if (input_shape.size() != 1 || input_shape[0] != in_) {
        throw ShapeError("dense: expected flat input of length " + std::to_string(in_));
    }
    return {out_};
}

Tensor DenseLayer::forward(const Tensor& x, bool, PrngStream*) {
    check_batch_input(x, in_, "dense");
    cached_input_ = x.reshaped({x.dim(0), in_});
    Tensor y = matmul(cached_input_, weight_);
    for (std::size_t i = 0; i < y.dim(0); ++i) {
        for (std::size_t j = 0; j < out_; ++j) y.at(i, j) += bias_[j];
    }
    return y;
}

Tensor DenseLayer::backward(const Tensor& g) {
    const Tensor gw = matmul_tn(cached_input_, g);
    for (std::size_t i = 0; i < gw.size(); ++i) grad_weight_[i] += gw[i];
    for (std::size_t i = 0; i < g.dim(0); ++i) {
        for (std::size_t j = 0; j < out_; ++j) grad_bias_[j] += g.at(i, j);
    }
    return matmul_nt(g, weight_);
}

std::unique_ptr<Layer> DenseLayer::clone() const {
    return std::make_unique<DenseLayer>(*this);
}

// ---------------------------------------------------------------------------
// FlipoutDenseLayer

FlipoutDenseLayer::FlipoutDenseLayer(std::size_t in_features, std::size_t out_features,
                                     double prior_std, double initial_posterior_std,
                                     PrngStream& init_stream)
    : in_(in_features), out_(out_features) {
    if (prior_std <= 0.0 || initial_posterior_std <= 0.0) {
        throw InvalidParameter("flipout_dense: prior and initial std must be > 0");
    }
    w_post_.mu = Tensor({in_, out_});
    w_post_.rho = Tensor({in_, out_});
    w_post_.prior_std = prior_std;
    b_post_.mu = Tensor({out_});
    b_post_.rho = Tensor({out_});
    b_post_.prior_std = prior_std;
    glorot_fill(w_post_.mu, in_, out_, init_stream);
    const double rho0 = softplus_inverse(initial_posterior_std);
    w_post_.rho.fill(rho0);
    b_post_.rho.fill(rho0);
    grad_w_mu_ = Tensor({in_, out_});
    grad_w_rho_ = Tensor({in_, out_});
    grad_b_mu_ = Tensor({out_});
    grad_b_rho_ = Tensor({out_});
}

LayerSpec FlipoutDenseLayer::spec() const {
    return {.kind = LayerKind::flipout_dense, .units = out_,
            .prior_std = w_post_.prior_std};
}

std::vector<std::size_t> FlipoutDenseLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
    if (input_shape.size() != 1 || input_shape[0] != in_) {
        throw ShapeError("flipout_dense: expected flat input of length " +
                         std::to_string(in_));
    }
    return {out_};
}

std::vector<Tensor*> FlipoutDenseLayer::parameters() {
    return {&w_post_.mu, &w_post_.rho, &b_post_.mu, &b_post_.rho};
}

std::vector<Tensor*> FlipoutDenseLayer::gradients() {
    return {&grad_w_mu_, &grad_w_rho_, &grad_b_mu_, &grad_b_rho_};
}

Tensor FlipoutDenseLayer::forward(const Tensor& x, bool stochastic, PrngStream* rng) {
    check_batch_input(x, in_, "flipout_dense");
    const std::size_t n = x.dim(0);
    cached_input_ = x.reshaped({n, in_});
    last_stochastic_ = stochastic;

    Tensor y = matmul(cached_input_, w_post_.mu);
    if (!stochastic) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < out_; ++j) y.at(i, j) += b_post_.mu[j];
        }
        return y;
    }
    if (!rng) throw InvalidParameter("flipout_dense: stochastic forward needs a stream");

    noise_w_ = Tensor({in_, out_});
    for (std::size_t i = 0; i < noise_w_.size(); ++i) noise_w_[i] = rng->next_gaussian();
    noise_b_ = Tensor({out_});
    for (std::size_t i = 0; i < out_; ++i) noise_b_[i] = rng->next_gaussian();
    signs_in_ = Tensor({n, in_});
    for (std::size_t i = 0; i < signs_in_.size(); ++i) signs_in_[i] = rng->next_sign();
    signs_out_ = Tensor({n, out_});
    for (std::size_t i = 0; i < signs_out_.size(); ++i) signs_out_[i] = rng->next_sign();

    delta_hat_ = Tensor({in_, out_});
    for (std::size_t i = 0; i < delta_hat_.size(); ++i) {
        delta_hat_[i] = softplus(w_post_.rho[i]) * noise_w_[i];
    }

    Tensor x_signed({n, in_});
    for (std::size_t i = 0; i < x_signed.size(); ++i) {
        x_signed[i] = cached_input_[i] * signs_in_[i];
    }
    const Tensor perturbed = matmul(x_signed, delta_hat_);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < out_; ++j) {
            const double bias_sample =
                b_post_.mu[j] + softplus(b_post_.rho[j]) * noise_b_[j];
            y.at(i, j) += perturbed.at(i, j) * signs_out_.at(i, j) + bias_sample;
        }
    }
    return y;
}

Tensor FlipoutDenseLayer::backward(const Tensor& g) {
    const std::size_t n = g.dim(0);
    const Tensor gw_mu = matmul_tn(cached_input_, g);
    for (std::size_t i = 0; i < gw_mu.size(); ++i) grad_w_mu_[i] += gw_mu[i];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < out_; ++j) grad_b_mu_[j] += g.at(i, j);
    }
    Tensor gx = matmul_nt(g, w_post_.mu);
    if (!last_stochastic_) return gx;

    // bias noise path
    for (std::size_t j = 0; j < out_; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += g.at(i, j);
        grad_b_rho_[j] += col * noise_b_[j] * sigmoid(b_post_.rho[j]);
    }

    // flipout path: upstream of the perturbation matmul is g ∘ A
    Tensor g_signed({n, out_});
    for (std::size_t i = 0; i < g_signed.size(); ++i) {
        g_signed[i] = g[i] * signs_out_[i];
    }
    Tensor x_signed({n, in_});
    for (std::size_t i = 0; i < x_signed.size(); ++i) {
        x_signed[i] = cached_input_[i] * signs_in_[i];
    }
    const Tensor g_delta = matmul_tn(x_signed, g_signed);
    for (std::size_t i = 0; i < g_delta.size(); ++i) {
        grad_w_rho_[i] += g_delta[i] * noise_w_[i] * sigmoid(w_post_.rho[i]);
    }
    const Tensor gx_perturb = matmul_nt(g_signed, delta_hat_);
    for (std::size_t i = 0; i < gx.size(); ++i) {
        gx[i] += gx_perturb[i] * signs_in_[i];
    }
    return gx;
}

double FlipoutDenseLayer::sampled_kl_and_grad(double grad_scale) {
    if (!last_stochastic_) {
        throw InvalidParameter("flipout_dense: sampled KL needs a stochastic forward");
    }
    double total = 0.0;
    const auto accumulate = [&](const GaussianPosterior& post, const Tensor& noise,
                                Tensor& g_mu, Tensor& g_rho) {
        const double sp = post.prior_std;
        const double inv_sp2 = 1.0 / (sp * sp);
        for (std::size_t i = 0; i < post.mu.size(); ++i) {
            const double sig = softplus(post.rho[i]);
            const double w = post.mu[i] + sig * noise[i];
            total += std::log(sp / sig) - 0.5 * noise[i] * noise[i] +
                     0.5 * w * w * inv_sp2;
            g_mu[i] += grad_scale * w * inv_sp2;
            g_rho[i] += grad_scale * (-1.0 / sig + w * noise[i] * inv_sp2) *
                        sigmoid(post.rho[i]);
        }
    };
    accumulate(w_post_, noise_w_, grad_w_mu_, grad_w_rho_);
    accumulate(b_post_, noise_b_, grad_b_mu_, grad_b_rho_);
    return total;
}

std::unique_ptr<Layer> FlipoutDenseLayer::clone() const {
    return std::make_unique<FlipoutDenseLayer>(*this);
}

// ---------------------------------------------------------------------------
// Conv2dLayer

Conv2dLayer::Conv2dLayer(std::size_t in_channels, std::size_t out_channels,
                         std::size_t kernel_size, std::size_t stride,
                         PrngStream& init_stream)
    : in_c_(in_channels), out_c_(out_channels), k_(kernel_size), stride_(stride),
      weight_({out_channels, in_channels, kernel_size, kernel_size}),
      bias_({out_channels}),
      grad_weight_({out_channels, in_channels, kernel_size, kernel_size}),
      grad_bias_({out_channels}) {
    glorot_fill(weight_, in_c_ * k_ * k_, out_c_ * k_ * k_, init_stream);
}

LayerSpec Conv2dLayer::spec() const {
    return {.kind = LayerKind::conv2d, .out_channels = out_c_, .kernel_size = k_,
            .stride = stride_};
}

std::vector<std::size_t> Conv2dLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
    if (input_shape.size() != 3 || input_shape[0] != in_c_) {
        throw ShapeError("conv2d: expected input [" + std::to_string(in_c_) + ", H, W]");
    }
    const std::size_t out_h = (input_shape[1] + stride_ - 1) / stride_;
    const std::size_t out_w = (input_shape[2] + stride_ - 1) / stride_;
    return {out_c_, out_h, out_w};
}

Tensor Conv2dLayer::forward(const Tensor& x, bool, PrngStream*) {
    if (x.rank() != 4 || x.dim(1) != in_c_) {
        throw ShapeError("conv2d: expected input [N, C, H, W]");
    }
    cached_input_ = x;
    const std::size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const std::size_t out_h = (h + stride_ - 1) / stride_;
    const std::size_t out_w = (w + stride_ - 1) / stride_;
    const std::size_t pad_h = ((out_h - 1) * stride_ + k_ > h)
                                  ? ((out_h - 1) * stride_ + k_ - h) / 2
                                  : 0;
    const std::size_t pad_w = ((out_w - 1) * stride_ + k_ > w)
                                  ? ((out_w - 1) * stride_ + k_ - w) / 2
                                  : 0;

    Tensor y({n, out_c_, out_h, out_w});
    const double* px = x.data();
    double* py = y.data();
    const double* pw = weight_.data();
    const std::size_t x_chw = in_c_ * h * w;
    const std::size_t y_chw = out_c_ * out_h * out_w;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t oc = 0; oc < out_c_; ++oc) {
            for (std::size_t oy = 0; oy < out_h; ++oy) {
                for (std::size_t ox = 0; ox < out_w; ++ox) {
                    double acc = bias_[oc];
                    for (std::size_t ic = 0; ic < in_c_; ++ic) {
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            const std::ptrdiff_t iy =
                                static_cast<std::ptrdiff_t>(oy * stride_ + ky) -
                                static_cast<std::ptrdiff_t>(pad_h);
                            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                const std::ptrdiff_t ix =
                                    static_cast<std::ptrdiff_t>(ox * stride_ + kx) -
                                    static_cast<std::ptrdiff_t>(pad_w);
                                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
                                acc += px[b * x_chw + ic * h * w +
                                          static_cast<std::size_t>(iy) * w +
                                          static_cast<std::size_t>(ix)] *
                                       pw[((oc * in_c_ + ic) * k_ + ky) * k_ + kx];
                            }
                        }
                    }
                    py[b * y_chw + oc * out_h * out_w + oy * out_w + ox] = acc;
                }
            }
        }
    }
    return y;
}

Tensor Conv2dLayer::backward(const Tensor& g) {
    const Tensor& x = cached_input_;
    const std::size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const std::size_t out_h = g.dim(2), out_w = g.dim(3);
    const std::size_t pad_h = ((out_h - 1) * stride_ + k_ > h)
                                  ? ((out_h - 1) * stride_ + k_ - h) / 2
                                  : 0;
    const std::size_t pad_w = ((out_w - 1) * stride_ + k_ > w)
                                  ? ((out_w - 1) * stride_ + k_ - w) / 2
                                  : 0;

    Tensor gx({n, in_c_, h, w});
    const double* px = x.data();
    const double* pg = g.data();
    const double* pw = weight_.data();
    double* pgx = gx.data();
    const std::size_t x_chw = in_c_ * h * w;
    const std::size_t y_chw = out_c_ * out_h * out_w;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t oc = 0; oc < out_c_; ++oc) {
            for (std::size_t oy = 0; oy < out_h; ++oy) {
                for (std::size_t ox = 0; ox < out_w; ++ox) {
                    const double gv =
                        pg[b * y_chw + oc * out_h * out_w + oy * out_w + ox];
                    if (gv == 0.0) continue;
                    grad_bias_[oc] += gv;
                    for (std::size_t ic = 0; ic < in_c_; ++ic) {
                        for (std::size_t ky = 0; ky < k_; ++ky) {
                            const std::ptrdiff_t iy =
                                static_cast<std::ptrdiff_t>(oy * stride_ + ky) -
                                static_cast<std::ptrdiff_t>(pad_h);
                            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t kx = 0; kx < k_; ++kx) {
                                const std::ptrdiff_t ix =
                                    static_cast<std::ptrdiff_t>(ox * stride_ + kx) -
                                    static_cast<std::ptrdiff_t>(pad_w);
                                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
                                const std::size_t xi =
                                    b * x_chw + ic * h * w +
                                    static_cast<std::size_t>(iy) * w +
                                    static_cast<std::size_t>(ix);
                                const std::size_t wi =
                                    ((oc * in_c_ + ic) * k_ + ky) * k_ + kx;
                                grad_weight_[wi] += px[xi] * gv;
                                pgx[xi] += pw[wi] * gv;
                            }
                        }
                    }
                }
            }
        }
    }
    return gx;
}

std::unique_ptr<Layer> Conv2dLayer::clone() const {
    return std::make_unique<Conv2dLayer>(*this);
}

// ---------------------------------------------------------------------------
// MaxPool2dLayer

MaxPool2dLayer::MaxPool2dLayer(std::size_t pool_size) : pool_(pool_size) {
    if (pool_ == 0) throw InvalidParameter("maxpool2d: pool size must be >= 1");
}

LayerSpec MaxPool2dLayer::spec() const {
    return {.kind = LayerKind::maxpool2d, .pool_size = pool_};
}

std::vector<std::size_t> MaxPool2dLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
    if (input_shape.size() != 3) throw ShapeError("maxpool2d: input must be [C, H, W]");
    return {input_shape[0], (input_shape[1] + pool_ - 1) / pool_,
            (input_shape[2] + pool_ - 1) / pool_};
}

Tensor MaxPool2dLayer::forward(const Tensor& x, bool, PrngStream*) {
    if (x.rank() != 4) throw ShapeError("maxpool2d: expected input [N, C, H, W]");
    cached_input_shape_ = x.shape();
    const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const std::size_t out_h = (h + pool_ - 1) / pool_;
    const std::size_t out_w = (w + pool_ - 1) / pool_;
    Tensor y({n, c, out_h, out_w});
    argmax_.assign(y.size(), 0);
    const double* px = x.data();
    double* py = y.data();
    std::size_t oi = 0;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t ch = 0; ch < c; ++ch) {
            const std::size_t base = (b * c + ch) * h * w;
            for (std::size_t oy = 0; oy < out_h; ++oy) {
                for (std::size_t ox = 0; ox < out_w; ++ox, ++oi) {
                    const std::size_t y0 = oy * pool_, x0 = ox * pool_;
                    const std::size_t y1 = std::min(y0 + pool_, h);
                    const std::size_t x1 = std::min(x0 + pool_, w);
                    double best = px[base + y0 * w + x0];
                    std::size_t best_i = base + y0 * w + x0;
                    for (std::size_t iy = y0; iy < y1; ++iy) {
                        for (std::size_t ix = x0; ix < x1; ++ix) {
                            const std::size_t xi = base + iy * w + ix;
                            if (px[xi] > best) {  // first max wins ties
                                best = px[xi];
                                best_i = xi;
                            }
                        }
                    }
                    py[oi] = best;
                    argmax_[oi] = best_i;
                }
            }
        }
    }
    return y;
}

Tensor MaxPool2dLayer::backward(const Tensor& g) {
    Tensor gx(cached_input_shape_);
    for (std::size_t i = 0; i < g.size(); ++i) gx[argmax_[i]] += g[i];
    return gx;
}

std::unique_ptr<Layer> MaxPool2dLayer::clone() const {
    return std::make_unique<MaxPool2dLayer>(*this);
}

// ---------------------------------------------------------------------------
// FlattenLayer

std::vector<std::size_t> FlattenLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
    return {shape_product(input_shape)};
}

Tensor FlattenLayer::forward(const Tensor& x, bool, PrngStream*) {
    cached_input_shape_ = x.shape();
    return x.reshaped({x.dim(0), x.size() / x.dim(0)});
}

Tensor FlattenLayer::backward(const Tensor& g) {
    return g.reshaped(cached_input_shape_);
}

std::unique_ptr<Layer> FlattenLayer::clone() const {
    return std::make_unique<FlattenLayer>(*this);
}

// ---------------------------------------------------------------------------
// ReluLayer

Tensor ReluLayer::forward(const Tensor& x, bool, PrngStream*) {
    cached_input_ = x;
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0) y[i] = 0.0;
    }
    return y;
}

Tensor ReluLayer::backward(const Tensor& g) {
    Tensor gx = g;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        if (cached_input_[i] <= 0.0) gx[i] = 0.0;
    }
    return gx;
}

std::unique_ptr<Layer> ReluLayer::clone() const {
    return std::make_unique<ReluLayer>(*this);
}

// ---------------------------------------------------------------------------
// SoftmaxLayer

Tensor SoftmaxLayer::forward(const Tensor& x, bool, PrngStream*) {
    if (x.rank() != 2) throw ShapeError("softmax: expected [N, K] input");
    const std::size_t n = x.dim(0), k = x.dim(1);
    Tensor y({n, k});
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = x.at(i, 0);
        for (std::size_t j = 1; j < k; ++j) row_max = std::max(row_max, x.at(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double e = std::exp(x.at(i, j) - row_max);
            y.at(i, j) = e;
            sum += e;
        }
        const double inv = 1.0 / sum;
        for (std::size_t j = 0; j < k; ++j) y.at(i, j) *= inv;
    }
    cached_output_ = y;
    return y;
}

Tensor SoftmaxLayer::backward(const Tensor& g) {
    const std::size_t n = g.dim(0), k = g.dim(1);
    Tensor gx({n, k});
    for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < k; ++j) dot += g.at(i, j) * cached_output_.at(i, j);
        for (std::size_t j = 0; j < k; ++j) {
            gx.at(i, j) = cached_output_.at(i, j) * (g.at(i, j) - dot);
        }
    }
    return gx;
}

std::unique_ptr<Layer> SoftmaxLayer::clone() const {
    return std::make_unique<SoftmaxLayer>(*this);
}

// ---------------------------------------------------------------------------
// DropoutLayer

DropoutLayer::DropoutLayer(double rate) : rate_(rate) {
    if (rate_ < 0.0 || rate_ >= 1.0) {
        throw InvalidParameter("dropout: rate must be in [0, 1)");
    }
}

LayerSpec DropoutLayer::spec() const {
    return {.kind = LayerKind::dropout, .rate = rate_};
}

Tensor DropoutLayer::forward(const Tensor& x, bool stochastic, PrngStream* rng) {
    if (!stochastic || rate_ == 0.0) {
        mask_ = Tensor();
        return x;
    }
    if (!rng) throw InvalidParameter("dropout: stochastic forward needs a stream");
    const double keep_scale = 1.0 / (1.0 - rate_);
    mask_ = Tensor(x.shape());
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double m = (rng->next_uniform() >= rate_) ? keep_scale : 0.0;
        mask_[i] = m;
        y[i] *= m;
    }
    return y;
}

Tensor DropoutLayer::backward(const Tensor& g) {
    if (mask_.empty()) return g;
    Tensor gx = g;
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= mask_[i];
    return gx;
}

std::unique_ptr<Layer> DropoutLayer::clone() const {
    return std::make_unique<DropoutLayer>(*this);
}

// ---------------------------------------------------------------------------

std::unique_ptr<Layer> make_layer(const LayerSpec& spec,
                                  const std::vector<std::size_t>& input_shape,
                                  PrngStream& init_stream) {
    validate_layer_spec(spec, input_shape);
    switch (spec.kind) {
        case LayerKind::conv2d:
            return std::make_unique<Conv2dLayer>(input_shape[0], spec.out_channels,
                                                 spec.kernel_size, spec.stride,
                                                 init_stream);
        case LayerKind::maxpool2d:
            return std::make_unique<MaxPool2dLayer>(spec.pool_size);
        case LayerKind::dense:
            return std::make_unique<DenseLayer>(input_shape[0], spec.units, init_stream);
        case LayerKind::flipout_dense:
            return std::make_unique<FlipoutDenseLayer>(input_shape[0], spec.units,
                                                       spec.prior_std, 0.05, init_stream);
        case LayerKind::flatten:
            return std::make_unique<FlattenLayer>();
        case LayerKind::relu:
            return std::make_unique<ReluLayer>();
        case LayerKind::softmax:
            return std::make_unique<SoftmaxLayer>();
        case LayerKind::dropout:
            return std::make_unique<DropoutLayer>(spec.rate);
    }
    throw InvalidParameter("make_layer: unhandled layer kind");
}

}  // namespace proboost
