#include "wclt/rates.hpp"

#include <cmath>

namespace wclt {

RateFunction RateFunction::geometric(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("geometric rate needs rho in (0,1)");
    RateFunction r;
    r.kind_ = Kind::geometric;
    r.rho_ = rho;
    return r;
}

RateFunction RateFunction::subgeometric(double rho, double gamma_exponent) {
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("subgeometric rate needs rho in (0,1)");
    if (!(gamma_exponent > 0.0)) throw ConfigError("subgeometric rate needs gamma > 0");
    RateFunction r;
    r.kind_ = Kind::subgeometric;
    r.rho_ = rho;
    r.gamma_ = gamma_exponent;
    return r;
}

RateFunction RateFunction::polynomial(double beta) {
    if (!(beta > 0.0)) throw ConfigError("polynomial rate needs beta > 0");
    RateFunction r;
    r.kind_ = Kind::polynomial;
    r.beta_ = beta;
    return r;
}

bool RateFunction::clt_regime() const {
    switch (kind_) {
        case Kind::geometric: return true;
        case Kind::subgeometric: return gamma_ >= 0.5;
        case Kind::polynomial: return beta_ > 0.5;
    }
    return false;
}

double RateFunction::eval(std::size_t n) const {
    switch (kind_) {
        case Kind::geometric: return std::pow(rho_, static_cast<double>(n));
        case Kind::subgeometric:
            return std::pow(rho_, std::pow(static_cast<double>(n), gamma_));
        case Kind::polynomial:
            return n == 0 ? 1.0 : std::pow(static_cast<double>(n), -beta_);
    }
    return 0.0;
}

double RateFunction::partial_sum(std::size_t n) const {
    if (n < 1) throw ConfigError("partial_sum needs n >= 1");
    // Kahan accumulation over k = 0 .. n-1.
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double term = eval(k) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

RateFunction::Classification RateFunction::classify() const {
    switch (kind_) {
        case Kind::geometric:
            return Classification::a1_prime;
        case Kind::subgeometric:
            // rho^(n^gamma) is summable for every gamma > 0.
            return Classification::a1_prime;
        case Kind::polynomial:
            if (beta_ > 1.0) return Classification::a1_prime;
            if (beta_ > 0.5) return Classification::a1_only;
            return Classification::neither;
    }
    return Classification::neither;
}

const char* classification_name(RateFunction::Classification c) {
    switch (c) {
        case RateFunction::Classification::a1_prime: return "A1-prime";
        case RateFunction::Classification::a1_only: return "A1-only";
        case RateFunction::Classification::neither: return "neither";
    }
    return "unknown";
}

} // namespace wclt
