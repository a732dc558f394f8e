#pragma once

#include <cstddef>

#include "wclt/errors.hpp"

namespace wclt {

// Convergence-rate function r(n): geometric rho^n, subgeometric rho^(n^gamma),
// or polynomial n^(-beta) with r(0) = 1 by convention.
class RateFunction {
  public:
    enum class Kind { geometric, subgeometric, polynomial };
    enum class Classification { a1_prime, a1_only, neither };

    static RateFunction geometric(double rho);
    static RateFunction subgeometric(double rho, double gamma_exponent);
    static RateFunction polynomial(double beta);

    Kind kind() const { return kind_; }
    double rho() const { return rho_; }
    double gamma_exponent() const { return gamma_; }
    double beta() const { return beta_; }

    // Whether the parameters sit inside the regime the CLT statements cover
    // (gamma >= 0.5 for subgeometric, beta > 0.5 for polynomial). Rates
    // outside the regime remain evaluable.
    bool clt_regime() const;

    double eval(std::size_t n) const;

    // Exact partial sum sum_{k=0}^{n-1} r(k), compensated accumulation.
    double partial_sum(std::size_t n) const;

    // a1_prime: sum r(k) converges. a1_only: diverges but partial sums are
    // o(sqrt(n)). neither: partial sums grow at least like sqrt(n).
    Classification classify() const;

  private:
    RateFunction() = default;
    Kind kind_ = Kind::geometric;
    double rho_ = 0.0;
    double gamma_ = 0.0;
    double beta_ = 0.0;
};

const char* classification_name(RateFunction::Classification c);

} // namespace wclt
