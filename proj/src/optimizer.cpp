#include "proboost/optimizer.hpp"

#include <cmath>

#include "proboost/errors.hpp"

namespace proboost {

AdamState::AdamState(const std::vector<Tensor*>& params) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor* p : params) {
        m_.emplace_back(p->shape());
        v_.emplace_back(p->shape());
    }
}

void AdamState::step(const std::vector<Tensor*>& params,
                     const std::vector<Tensor*>& grads, const AdamConfig& cfg) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw ShapeError("adam: parameter list does not match optimizer state");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& param = *params[p];
        const Tensor& grad = *grads[p];
        if (!param.same_shape(grad) || !param.same_shape(m_[p])) {
            throw ShapeError("adam: gradient shape mismatch");
        }
        for (std::size_t i = 0; i < param.size(); ++i) {
            const double g = grad[i];
            m_[p][i] = cfg.beta1 * m_[p][i] + (1.0 - cfg.beta1) * g;
            v_[p][i] = cfg.beta2 * v_[p][i] + (1.0 - cfg.beta2) * g * g;
            const double m_hat = m_[p][i] / bc1;
            const double v_hat = v_[p][i] / bc2;
            param[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
        }
    }
}

}  // namespace proboost
