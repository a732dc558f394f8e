#pragma once

#include <cstdint>

namespace wclt {

// Quantile of the standard normal distribution, accurate to full double
// precision (Wichura's rational approximation). p must lie in (0, 1).
double normal_quantile(double p);

// CDF of the standard normal distribution.
double normal_cdf(double x);

// Counter-based random stream (Philox-2x64, 10 rounds).
//
// A stream is identified by (seed, stream_id). Equal identifiers replay a
// bit-identical draw sequence; distinct stream ids select disjoint counter
// blocks, giving independent streams without shared state. Replicated
// experiments hand one stream per replicate and may run them on any thread
// layout.
//
// Gaussians are produced by the inverse-CDF map, so every draw consumes
// exactly one uniform and replay stays exact.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_(seed), stream_(stream_id), counter_(0), buffered_(false), buffer_(0) {}

    std::uint64_t seed() const { return key_; }
    std::uint64_t stream() const { return stream_; }

    // Next raw 64-bit word.
    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); never returns 0 or 1 exactly.
    double uniform();

    // Standard normal draw (one uniform via normal_quantile).
    double gaussian();

  private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t counter_;
    bool buffered_;
    std::uint64_t buffer_;
};

} // namespace wclt
