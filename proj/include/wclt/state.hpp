#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "wclt/errors.hpp"

namespace wclt {

// Point of the state space: a dense real vector with finite coordinates.
struct State {
    std::vector<double> coords;

    explicit State(std::vector<double> c) : coords(std::move(c)) {
        if (coords.empty()) throw ConfigError("state dimension must be >= 1");
        for (double v : coords) {
            if (!std::isfinite(v)) throw ConfigError("state coordinate must be finite");
        }
    }

    static State scalar(double x) { return State(std::vector<double>{x}); }

    std::size_t dimension() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
};

// Ground metric psi on the state space.
class Metric {
  public:
    enum class Kind { euclidean, discrete, bounded_euclidean };

    static Metric euclidean() { return Metric(Kind::euclidean, 0.0); }
    static Metric discrete() { return Metric(Kind::discrete, 0.0); }
    static Metric bounded_euclidean(double cap) {
        if (!(cap > 0.0)) throw ConfigError("bounded metric cap must be > 0");
        return Metric(Kind::bounded_euclidean, cap);
    }

    Kind kind() const { return kind_; }
    double cap() const { return cap_; }

    double operator()(std::span<const double> x, std::span<const double> y) const {
        if (x.size() != y.size()) throw ConfigError("metric: dimension mismatch");
        if (kind_ == Kind::discrete) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] != y[i]) return 1.0;
            }
            return 0.0;
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - y[i];
            sum += d * d;
        }
        const double dist = std::sqrt(sum);
        return kind_ == Kind::bounded_euclidean ? std::min(dist, cap_) : dist;
    }

    double operator()(const State& x, const State& y) const {
        return (*this)(std::span<const double>(x.coords), std::span<const double>(y.coords));
    }

  private:
    Metric(Kind k, double cap) : kind_(k), cap_(cap) {}
    Kind kind_;
    double cap_;
};

} // namespace wclt
