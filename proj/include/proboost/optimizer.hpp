#pragma once

#include <cstdint>
#include <vector>

#include "proboost/tensor.hpp"

namespace proboost {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected Adam over a fixed parameter list. Moment tensors are laid
/// out to match the parameter list given at construction.
class AdamState {
public:
    explicit AdamState(const std::vector<Tensor*>& params);

    /// One in-place update of params from grads.
    void step(const std::vector<Tensor*>& params, const std::vector<Tensor*>& grads,
              const AdamConfig& cfg);

    std::uint64_t steps_taken() const { return t_; }

private:
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    std::uint64_t t_ = 0;
};

}  // namespace proboost
