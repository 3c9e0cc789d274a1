#include "proboost/learner.hpp"

#include <algorithm>
#include <string>

#include "proboost/errors.hpp"

namespace proboost {

const char* learner_mode_name(LearnerMode mode) {
    switch (mode) {
        case LearnerMode::deterministic: return "deterministic";
        case LearnerMode::mcd: return "mcd";
        case LearnerMode::vi: return "vi";
    }
    return "unknown";
}

LearnerMode learner_mode_from_name(const std::string& name) {
    if (name == "deterministic" || name == "det") return LearnerMode::deterministic;
    if (name == "mcd") return LearnerMode::mcd;
    if (name == "vi") return LearnerMode::vi;
    throw InvalidParameter("unknown learner mode: " + name);
}

WeakLearner::WeakLearner(LearnerMode mode, std::vector<std::size_t> input_shape,
                         std::size_t n_classes,
                         std::vector<std::unique_ptr<Layer>> layers)
    : mode_(mode), input_shape_(std::move(input_shape)), n_classes_(n_classes),
      layers_(std::move(layers)) {}

WeakLearner::WeakLearner(const WeakLearner& other)
    : mode_(other.mode_), input_shape_(other.input_shape_),
      n_classes_(other.n_classes_) {
    layers_.reserve(other.layers_.size());
    for (const auto& layer : other.layers_) layers_.push_back(layer->clone());
}

WeakLearner& WeakLearner::operator=(const WeakLearner& other) {
    if (this == &other) return *this;
    WeakLearner copy(other);
    *this = std::move(copy);
    return *this;
}

Tensor WeakLearner::forward(const Tensor& x, bool stochastic, PrngStream* rng) {
    if (x.rank() < 1) throw ShapeError("forward: batched input required");
    const std::size_t per_sample = x.size() / x.dim(0);
    if (per_sample != shape_product(input_shape_)) {
        throw ShapeError("forward: sample has " + std::to_string(per_sample) +
                         " elements, learner expects " +
                         std::to_string(shape_product(input_shape_)));
    }
    // normalize batch layout to [N, ...input_shape]
    std::vector<std::size_t> shape{x.dim(0)};
    shape.insert(shape.end(), input_shape_.begin(), input_shape_.end());
    Tensor cur = x.reshaped(shape);
    for (auto& layer : layers_) {
        cur = layer->forward(cur, stochastic, rng);
    }
    return cur;
}

void WeakLearner::backward(const Tensor& grad_probs) {
    Tensor g = grad_probs;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
        g = (*it)->backward(g);
    }
}

std::vector<Tensor*> WeakLearner::parameters() {
    std::vector<Tensor*> out;
    for (auto& layer : layers_) {
        for (Tensor* p : layer->parameters()) out.push_back(p);
    }
    return out;
}

std::vector<Tensor*> WeakLearner::gradients() {
    std::vector<Tensor*> out;
    for (auto& layer : layers_) {
        for (Tensor* g : layer->gradients()) out.push_back(g);
    }
    return out;
}

void WeakLearner::zero_grad() {
    for (auto& layer : layers_) layer->zero_grad();
}

std::vector<Tensor> WeakLearner::snapshot_parameters() const {
    std::vector<Tensor> snap;
    for (const auto& layer : layers_) {
        for (Tensor* p : const_cast<Layer&>(*layer).parameters()) snap.push_back(*p);
    }
    return snap;
}

void WeakLearner::restore_parameters(const std::vector<Tensor>& snapshot) {
    std::size_t i = 0;
    for (auto& layer : layers_) {
        for (Tensor* p : layer->parameters()) {
            if (i >= snapshot.size() || !p->same_shape(snapshot[i])) {
                throw ShapeError("restore_parameters: snapshot does not match learner");
            }
            *p = snapshot[i++];
        }
    }
    if (i != snapshot.size()) {
        throw ShapeError("restore_parameters: snapshot does not match learner");
    }
}

std::size_t WeakLearner::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) {
        for (Tensor* p : const_cast<Layer&>(*layer).parameters()) n += p->size();
    }
    return n;
}

WeakLearner build_lenet_variant(const std::vector<std::size_t>& input_dims,
                                std::size_t n_classes, LearnerMode mode,
                                PrngStream& init_stream, double dropout_rate) {
    if (mode == LearnerMode::vi) {
        throw UnsupportedConfiguration(
            "build_lenet_variant: variational kernels are restricted to dense stacks");
    }
    if (input_dims.size() != 3) {
        throw ShapeError("build_lenet_variant: input dims must be [C, H, W]");
    }
    if (n_classes < 2) throw InvalidParameter("build_lenet_variant: need >= 2 classes");

    const bool mcd = mode == LearnerMode::mcd;
    std::vector<std::unique_ptr<Layer>> layers;
    std::vector<std::size_t> shape = input_dims;

    const auto push = [&](std::unique_ptr<Layer> layer) {
        shape = layer->output_shape(shape);
        layers.push_back(std::move(layer));
    };

    const std::size_t conv_channels[3] = {6, 16, 120};
    for (int stage = 0; stage < 3; ++stage) {
        // the conv kernel must fit inside its input, padding aside
        if (shape[1] < 5 || shape[2] < 5) {
            throw ShapeError("build_lenet_variant: input too small for conv stage " +
                             std::to_string(stage + 1));
        }
        push(std::make_unique<Conv2dLayer>(shape[0], conv_channels[stage], 5, 1,
                                           init_stream));
        push(std::make_unique<ReluLayer>());
        if (mcd) push(std::make_unique<DropoutLayer>(dropout_rate));
        if (stage < 2) push(std::make_unique<MaxPool2dLayer>(2));
    }
    push(std::make_unique<FlattenLayer>());
    push(std::make_unique<DenseLayer>(shape[0], 84, init_stream));
    push(std::make_unique<ReluLayer>());
    if (mcd) push(std::make_unique<DropoutLayer>(dropout_rate));
    push(std::make_unique<DenseLayer>(shape[0], n_classes, init_stream));
    push(std::make_unique<SoftmaxLayer>());

    return WeakLearner(mode, input_dims, n_classes, std::move(layers));
}

WeakLearner build_dense_stack(std::size_t input_len,
                              const std::vector<std::size_t>& hidden_sizes,
                              std::size_t n_classes, LearnerMode mode,
                              PrngStream& init_stream, double dropout_rate,
                              double prior_std) {
    if (input_len < 1) throw InvalidParameter("build_dense_stack: input_len >= 1");
    if (n_classes < 2) throw InvalidParameter("build_dense_stack: need >= 2 classes");

    const bool mcd = mode == LearnerMode::mcd;
    const bool vi = mode == LearnerMode::vi;
    std::vector<std::unique_ptr<Layer>> layers;
    std::vector<std::size_t> shape{input_len};

    const auto push = [&](std::unique_ptr<Layer> layer) {
        shape = layer->output_shape(shape);
        layers.push_back(std::move(layer));
    };
    const auto push_dense = [&](std::size_t units) {
        if (vi) {
            push(std::make_unique<FlipoutDenseLayer>(shape[0], units, prior_std, 0.05,
                                                     init_stream));
        } else {
            push(std::make_unique<DenseLayer>(shape[0], units, init_stream));
        }
    };

    for (std::size_t units : hidden_sizes) {
        push_dense(units);
        push(std::make_unique<ReluLayer>());
        if (mcd) push(std::make_unique<DropoutLayer>(dropout_rate));
    }
    push_dense(n_classes);
    push(std::make_unique<SoftmaxLayer>());

    return WeakLearner(mode, {input_len}, n_classes, std::move(layers));
}

}  // namespace proboost
