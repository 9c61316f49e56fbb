#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cwauc/errors.hpp"

namespace cwauc {

// Real-valued function h of the wAUC vector together with its gradient.
class ContrastFunction {
public:
    using Evaluator = std::function<double(std::span<const double>)>;
    using Gradient = std::function<std::vector<double>(std::span<const double>)>;

    static constexpr double kDefaultStep = 1e-6;

    static ContrastFunction linear(std::vector<double> coefficients) {
        if (coefficients.empty()) throw InputError("linear contrast needs coefficients");
        ContrastFunction h;
        h.coefficients_ = std::move(coefficients);
        return h;
    }

    // Smooth h; when `gradient` is empty the gradient is taken by central differences.
    static ContrastFunction smooth(Evaluator f, Gradient gradient = {}, double step = kDefaultStep) {
        if (!f) throw InputError("smooth contrast needs an evaluator");
        if (!(step > 0.0)) throw InputError("numeric gradient step must be positive");
        ContrastFunction h;
        h.f_ = std::move(f);
        h.grad_ = std::move(gradient);
        h.step_ = step;
        return h;
    }

    bool is_linear() const { return coefficients_.has_value(); }
    const std::vector<double>& coefficients() const { return *coefficients_; }

    double operator()(std::span<const double> omega) const {
        double value;
        if (coefficients_) {
            check_dimension(omega);
            value = 0.0;
            for (std::size_t i = 0; i < omega.size(); ++i) value += (*coefficients_)[i] * omega[i];
        } else {
            value = f_(omega);
        }
        if (!std::isfinite(value)) throw NumericalError("contrast evaluated to a non-finite value");
        return value;
    }

    std::vector<double> gradient(std::span<const double> omega) const {
        if (coefficients_) {
            check_dimension(omega);
            return *coefficients_;
        }
        if (grad_) {
            auto g = grad_(omega);
            if (g.size() != omega.size()) throw InputError("gradient dimension mismatch");
            return g;
        }
        return numeric_gradient(omega);
    }

    std::vector<double> numeric_gradient(std::span<const double> omega) const {
        std::vector<double> x(omega.begin(), omega.end());
        std::vector<double> g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double orig = x[i];
            x[i] = orig + step_;
            const double up = (*this)(x);
            x[i] = orig - step_;
            const double down = (*this)(x);
            x[i] = orig;
            g[i] = (up - down) / (2.0 * step_);
        }
        return g;
    }

    bool has_analytic_gradient() const { return coefficients_.has_value() || static_cast<bool>(grad_); }

private:
    void check_dimension(std::span<const double> omega) const {
        if (omega.size() != coefficients_->size())
            throw InputError("contrast dimension mismatch: expected " +
                             std::to_string(coefficients_->size()) + ", got " +
                             std::to_string(omega.size()));
    }

    std::optional<std::vector<double>> coefficients_;
    Evaluator f_;
    Gradient grad_;
    double step_ = kDefaultStep;
};

}  // namespace cwauc
